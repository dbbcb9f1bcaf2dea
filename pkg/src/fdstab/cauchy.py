"""Fully discrete Cauchy problem on a periodic torus.

Grids have shape ``N = (N_1, ..., N_d)``; with ``numpy.fft`` conventions the
lattice frequency ``k`` corresponds to ``theta_k = 2 pi k / N`` and
``(S^l v)^ = kappa^l v^``.  Norms carry the cell volume ``prod dx_k``::

    |||v|||^2 = cell_volume * sum_j |v_j|^2 = cell_volume / prod(N) * sum_k |v^_k|^2

Energy and dissipation are sums over the lattice of the per-frequency forms
of the dispersion polynomial ``P_kappa(X) = sum_sigma Q_sigma^(kappa) X^sigma``.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import BoundaryMultipleRoot, HypothesisViolation, UnstableRoot, WrongTimeLevels
from .forms import (DEFAULT_EPSILON, PSD_TOL, UNIT_TOL, HermitianFormPair, build_forms,
                    build_forms_crossing)
from .poly import DEFAULT_CLUSTER_RADIUS, Poly, group_roots
from .scheme import INSIDE_TOL, SchemeDef, classify_assumption1, symbols

DEFAULT_N = {1: 128, 2: 64}


@dataclass
class TorusState:
    """The ``s + 1`` stored levels ``u^n, ..., u^{n+s}``, oldest first."""

    levels: np.ndarray
    dt: float
    cell_volume: float
    step_index: int = 0

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        if not np.all(np.isfinite(self.levels)):
            raise ValueError("torus state contains non-finite values")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.levels.shape[1:]

    @classmethod
    def create(cls, scheme: SchemeDef, levels, dt: Optional[float] = None) -> "TorusState":
        """State on the unit torus: ``dx_k = 1 / N_k`` unless ``dt`` is given,
        in which case ``dx_k = dt / lambda_k``."""
        levels = np.asarray(levels, dtype=float)
        if levels.shape[0] != scheme.s + 1 or levels.ndim != scheme.d + 1:
            raise WrongTimeLevels(f"expected {scheme.s + 1} levels of dimension {scheme.d}, "
                                  f"got shape {levels.shape}")
        if dt is None:
            dt = scheme.lam[0] / levels.shape[1]
        cell_volume = math.prod(dt / lam for lam in scheme.lam)
        return cls(levels, dt, cell_volume)

    def norm2(self, level: int = -1) -> float:
        return self.cell_volume * float(np.sum(self.levels[level] ** 2))


def lattice_theta(shape: tuple[int, ...]) -> np.ndarray:
    axes = [2 * np.pi * np.arange(n) / n for n in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


def lattice_symbols(scheme: SchemeDef, shape: tuple[int, ...]) -> np.ndarray:
    """``Q_sigma^`` on the lattice, shape ``shape + (s + 2,)``."""
    return symbols(scheme, lattice_theta(shape)).reshape(tuple(shape) + (scheme.s + 2,))


def _spatial_axes(d: int, lead: int = 1) -> tuple[int, ...]:
    return tuple(range(lead, lead + d))


def apply_operator(scheme: SchemeDef, sigma: int, v: np.ndarray) -> np.ndarray:
    """``Q_sigma v`` on the torus by stencil application."""
    out = np.zeros_like(v, dtype=float)
    axes = _spatial_axes(scheme.d, 0)
    for off, a in scheme.interior_offsets(sigma).items():
        out += a * np.roll(v, tuple(-o for o in off), axis=axes)
    return out


def apply_LM(scheme: SchemeDef, window) -> tuple[np.ndarray, np.ndarray]:
    """``L v = sum Q_sigma v^{n+sigma}`` and ``M v = sum sigma Q_sigma v^{n+sigma}``."""
    window = np.asarray(window, dtype=float)
    if window.shape[0] != scheme.s + 2:
        raise WrongTimeLevels(f"window needs {scheme.s + 2} levels, got {window.shape[0]}")
    lv = np.zeros(window.shape[1:])
    mv = np.zeros(window.shape[1:])
    for sigma in range(scheme.s + 2):
        qv = apply_operator(scheme, sigma, window[sigma])
        lv += qv
        mv += sigma * qv
    return lv, mv


def step_cauchy(scheme: SchemeDef, state: TorusState, method: str = "auto") -> TorusState:
    """Advance one step.  ``method`` is ``"dft"``, ``"stencil"`` (explicit
    schemes only) or ``"auto"`` (stencil when explicit)."""
    if method == "auto":
        method = "stencil" if scheme.is_explicit() else "dft"
    u = state.levels
    if method == "stencil":
        if not scheme.is_explicit():
            raise ValueError("stencil update needs Q_(s+1) = I")
        new = -sum(apply_operator(scheme, sigma, u[sigma]) for sigma in range(scheme.s + 1))
    elif method == "dft":
        axes = _spatial_axes(scheme.d)
        q = np.moveaxis(lattice_symbols(scheme, state.shape), -1, 0)
        uh = np.fft.fftn(u, axes=axes)
        if np.abs(q[-1]).min() <= 1e-12:
            raise HypothesisViolation("Q_(s+1) symbol vanishes on the lattice")
        new_hat = -np.sum(q[:-1] * uh, axis=0) / q[-1]
        new = np.fft.ifftn(new_hat).real
    else:
        raise ValueError(f"unknown step method {method!r}")
    levels = np.concatenate((u[1:], new[None]), axis=0)
    return TorusState(levels, state.dt, state.cell_volume, state.step_index + 1)


# -- lattice forms -----------------------------------------------------------

@dataclass(frozen=True)
class CrossingZone:
    theta: np.ndarray
    radius: float
    value: complex
    size: int


def _torus_distance(theta: np.ndarray, center: np.ndarray) -> np.ndarray:
    return np.abs(np.angle(np.exp(1j * (theta - center)))).max(axis=-1)


def _taper(dist: np.ndarray, radius: float) -> np.ndarray:
    """Smooth cutoff: 1 up to ``radius / 2``, 0 from ``radius`` on."""
    x = np.clip((dist - radius / 2) / (radius / 2), 0.0, 1.0)
    return 0.5 * (1 + np.cos(np.pi * x))


def _cluster_indices(roots: np.ndarray, value: complex, size: int) -> list[int]:
    return list(np.argsort(np.abs(roots - value), kind="stable")[:size])


def _crossing_pair(q: np.ndarray, roots: np.ndarray, zone: CrossingZone,
                   epsilon: float) -> Optional[HermitianFormPair]:
    idx = _cluster_indices(roots, zone.value, zone.size)
    others = np.delete(roots, idx)
    spread = np.abs(roots[idx] - zone.value).max()
    if len(others) and spread >= 0.5 * np.abs(others - zone.value).min():
        return None
    if np.abs(roots[idx]).max() >= 1 - INSIDE_TOL:
        return None
    try:
        pair = build_forms_crossing(q[-1], roots, idx, epsilon)
    except HypothesisViolation:
        return None
    scale = max(1.0, np.abs(pair.qe).max())
    if np.linalg.eigvalsh(pair.qe)[0] <= 0 or np.linalg.eigvalsh(pair.qd)[0] < -PSD_TOL * scale:
        return None
    return pair


def _ball(scheme: SchemeDef, center: np.ndarray, radius: float) -> np.ndarray:
    n = 101 if scheme.d == 1 else 21
    axis = np.linspace(-radius, radius, n)
    mesh = np.meshgrid(*([axis] * scheme.d), indexing="ij")
    return center + np.stack([m.ravel() for m in mesh], axis=-1)


def crossing_zones(scheme: SchemeDef, epsilon: float = DEFAULT_EPSILON,
                   cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> list[CrossingZone]:
    """Neighborhoods of the crossing points where the crossing forms are valid.

    The radius starts at 0.5 and is halved until the crossing forms pass on a
    sampled ball around the crossing; it never exceeds half the distance to
    another crossing.
    """
    if scheme.s < 1:
        return []
    grid = 256 if scheme.d == 1 else 64
    crossings = classify_assumption1(scheme, grid, cluster_radius).crossings
    centers = [np.array(c.theta) for c in crossings]
    zones = []
    for c, center in zip(crossings, centers):
        group = max(c.groups, key=lambda g: g.multiplicity)
        if abs(group.value) >= 1 - INSIDE_TOL:
            continue
        cap = min([0.5] + [0.5 * float(_torus_distance(other, center)) for other in centers
                           if other is not center])
        radius = cap
        for _ in range(16):
            pts = _ball(scheme, center, radius)
            q = symbols(scheme, pts)
            roots = np.linalg.eigvals(_companion(q))
            zone = CrossingZone(center, radius, group.value, group.multiplicity)
            if all(_crossing_pair(q[k], roots[k], zone, epsilon) is not None for k in range(len(pts))):
                zones.append(zone)
                break
            radius /= 2
    return zones


def _companion(q: np.ndarray) -> np.ndarray:
    nu = q.shape[-1] - 1
    a = np.zeros(q.shape[:-1] + (nu, nu), dtype=complex)
    a[..., 0, :] = -q[..., -2::-1] / q[..., -1:]
    idx = np.arange(1, nu)
    a[..., idx, idx - 1] = 1.0
    return a


def _degree2_forms(q: np.ndarray, cluster_radius: float) -> tuple[np.ndarray, np.ndarray]:
    a, b, c = q[:, 2], q[:, 1], q[:, 0]
    roots = np.linalg.eigvals(_companion(q))
    mod = np.abs(roots).max(axis=-1)
    if mod.max() > 1 + UNIT_TOL:
        raise UnstableRoot(f"dispersion root of modulus {mod.max():.12g} outside the closed unit disk")
    double = np.abs(roots[:, 0] - roots[:, 1]) <= cluster_radius
    if np.any(double & (mod >= 1 - UNIT_TOL)):
        raise BoundaryMultipleRoot("double dispersion root on the unit circle")
    aa, cc = np.abs(a) ** 2, np.abs(c) ** 2
    ce = np.conj(a) * b
    cd = np.conj(a) * b - np.conj(b) * c
    qe = np.empty((len(a), 2, 2), dtype=complex)
    qd = np.empty_like(qe)
    qe[:, 0, 0], qe[:, 1, 1], qe[:, 1, 0], qe[:, 0, 1] = aa + cc, 2 * aa, ce, np.conj(ce)
    qd[:, 0, 0], qd[:, 1, 1], qd[:, 1, 0], qd[:, 0, 1] = aa - cc, aa - cc, cd, np.conj(cd)
    return qe, qd


class TorusEnergy:
    """Energy and dissipation forms at every lattice frequency.

    ``mode="auto"`` uses the explicit degree-2 forms when ``s = 1`` and the
    root-based construction otherwise; ``mode="roots"`` always uses roots.
    In the root-based construction a frequency with an exact multiple root
    gets the multiple-root forms, a frequency near a crossing gets a smooth
    blend of the crossing forms and the simple-root forms, and every other
    frequency gets the simple-root forms.
    """

    def __init__(self, scheme: SchemeDef, shape: tuple[int, ...], epsilon: float = DEFAULT_EPSILON,
                 cluster_radius: float = DEFAULT_CLUSTER_RADIUS, mode: str = "auto"):
        if mode not in ("auto", "roots"):
            raise ValueError(f"unknown form mode {mode!r}")
        self.scheme = scheme
        self.shape = tuple(shape)
        self.epsilon = epsilon
        self.cluster_radius = cluster_radius
        theta = lattice_theta(self.shape).reshape(-1, scheme.d)
        q = symbols(scheme, theta)
        if mode == "auto" and scheme.s == 1:
            self.qe, self.qd = _degree2_forms(q, cluster_radius)
            self.regimes = np.full(len(q), "degree2", dtype=object)
        else:
            self.qe, self.qd, self.regimes = self._root_forms(theta, q)
        self.qe.setflags(write=False)
        self.qd.setflags(write=False)

    def _root_forms(self, theta, q):
        nu = self.scheme.s + 1
        roots = np.linalg.eigvals(_companion(q))
        zones = crossing_zones(self.scheme, self.epsilon, self.cluster_radius)
        qe = np.empty((len(q), nu, nu), dtype=complex)
        qd = np.empty_like(qe)
        regimes = np.empty(len(q), dtype=object)
        weights = np.zeros(len(q))
        owner = np.full(len(q), -1)
        for z, zone in enumerate(zones):
            w = _taper(_torus_distance(theta, zone.theta), zone.radius)
            owner[w > 0] = z
            weights = np.maximum(weights, w)
        for k in range(len(q)):
            groups = group_roots(roots[k], self.cluster_radius)
            pair = None
            chi = weights[k]
            if chi > 0:
                pair = _crossing_pair(q[k], roots[k], zones[owner[k]], self.epsilon)
            if pair is not None and chi < 1 and all(g.multiplicity == 1 for g in groups):
                simple = build_forms(Poly(q[k]), groups, self.epsilon)
                qe[k] = chi * pair.qe + (1 - chi) * simple.qe
                qd[k] = chi * pair.qd + (1 - chi) * simple.qd
                regimes[k] = "crossing-blend"
                continue
            if pair is None:
                pair = build_forms(Poly(q[k]), groups, self.epsilon)
            qe[k], qd[k], regimes[k] = pair.qe, pair.qd, pair.regime
        return qe, qd, regimes

    @property
    def coercivity(self) -> float:
        """Smallest eigenvalue of the energy forms over the lattice."""
        return float(np.linalg.eigvalsh(self.qe)[:, 0].min())

    @property
    def dissipation_floor(self) -> float:
        return float(np.linalg.eigvalsh(self.qd)[:, 0].min())

    def regime_counts(self) -> dict[str, int]:
        names, counts = np.unique(self.regimes.astype(str), return_counts=True)
        return {str(n): int(c) for n, c in zip(names, counts)}

    def _spectra(self, levels: np.ndarray) -> np.ndarray:
        levels = np.asarray(levels, dtype=float)
        if levels.shape[0] != self.scheme.s + 1:
            raise WrongTimeLevels(f"expected {self.scheme.s + 1} levels, got {levels.shape[0]}")
        uh = np.fft.fftn(levels, axes=_spatial_axes(self.scheme.d))
        return uh.reshape(levels.shape[0], -1).T

    def _evaluate(self, h: np.ndarray, levels: np.ndarray, cell_volume: float) -> float:
        w = self._spectra(levels)
        val = np.einsum("ki,kij,kj->", np.conj(w), h, w).real
        return float(val * cell_volume / w.shape[0])

    def energy(self, levels, cell_volume: float = 1.0) -> float:
        return self._evaluate(self.qe, levels, cell_volume)

    def dissipation(self, levels, cell_volume: float = 1.0) -> float:
        return self._evaluate(self.qd, levels, cell_volume)


@functools.lru_cache(maxsize=32)
def torus_energy(scheme: SchemeDef, shape: tuple[int, ...], epsilon: float = DEFAULT_EPSILON,
                 cluster_radius: float = DEFAULT_CLUSTER_RADIUS, mode: str = "auto") -> TorusEnergy:
    return TorusEnergy(scheme, tuple(shape), epsilon, cluster_radius, mode)


def energy_dissipation(scheme: SchemeDef, state: TorusState, epsilon: float = DEFAULT_EPSILON,
                       cluster_radius: float = DEFAULT_CLUSTER_RADIUS, mode: str = "auto") -> tuple[float, float]:
    """``(E, D)`` of the stored window ``u^n, ..., u^{n+s}``."""
    te = torus_energy(scheme, state.shape, epsilon, cluster_radius, mode)
    return te.energy(state.levels, state.cell_volume), te.dissipation(state.levels, state.cell_volume)


@dataclass(frozen=True)
class BalanceTerms:
    lhs: float
    l_norm: float
    e_next: float
    e_cur: float
    dissipation: float
    nu: int

    @property
    def residual(self) -> float:
        rhs = self.nu * self.l_norm + self.e_next - self.e_cur + self.dissipation
        scale = abs(self.lhs) + self.nu * self.l_norm + self.e_next + self.e_cur + abs(self.dissipation)
        return abs(self.lhs - rhs) / scale if scale > 0 else 0.0


def balance_terms_cauchy(scheme: SchemeDef, window, epsilon: float = DEFAULT_EPSILON,
                         cell_volume: float = 1.0, cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
                         mode: str = "auto") -> BalanceTerms:
    """Every term of ``2<Mv, Lv> = (s+1)|||Lv|||^2 + E(next) - E(cur) + D(cur)``.

    The pairing and the L-norm are computed in physical space by stencils;
    E and D come from the lattice forms.
    """
    window = np.asarray(window, dtype=float)
    lv, mv = apply_LM(scheme, window)
    te = torus_energy(scheme, window.shape[1:], epsilon, cluster_radius, mode)
    return BalanceTerms(
        lhs=2 * cell_volume * float(np.sum(mv * lv)),
        l_norm=cell_volume * float(np.sum(lv ** 2)),
        e_next=te.energy(window[1:], cell_volume),
        e_cur=te.energy(window[:-1], cell_volume),
        dissipation=te.dissipation(window[:-1], cell_volume),
        nu=scheme.s + 1,
    )


def balance_check_cauchy(scheme: SchemeDef, window, epsilon: float = DEFAULT_EPSILON,
                         cell_volume: float = 1.0, cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
                         mode: str = "auto") -> float:
    """Relative residual of the torus balance law on an arbitrary window."""
    return balance_terms_cauchy(scheme, window, epsilon, cell_volume, cluster_radius, mode).residual


def local_densities_s1(scheme: SchemeDef, vn, vn1) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise energy and dissipation densities for two-step schemes.

    With ``A = Q_2 v^{n+1}``, ``B = Q_1 v^n``, ``C = Q_2 v^n``, ``G = Q_0 v^n``::

        E_j = 2 A^2 + 2 A B + C^2 + G^2
        D_j = A^2 - (Q_0 v^{n+1})^2 + 2 A B - 2 (Q_1 v^{n+1}) G + C^2 - G^2

    Summing either density times the cell volume gives the lattice E or D.
    """
    if scheme.s != 1:
        raise WrongTimeLevels(f"local densities are defined for s = 1, got s = {scheme.s}")
    vn, vn1 = np.asarray(vn, dtype=float), np.asarray(vn1, dtype=float)
    a = apply_operator(scheme, 2, vn1)
    b = apply_operator(scheme, 1, vn)
    c = apply_operator(scheme, 2, vn)
    g = apply_operator(scheme, 0, vn)
    energy = 2 * a ** 2 + 2 * a * b + c ** 2 + g ** 2
    diss = (a ** 2 - apply_operator(scheme, 0, vn1) ** 2 + 2 * a * b
            - 2 * apply_operator(scheme, 1, vn1) * g + c ** 2 - g ** 2)
    return energy, diss


# -- runs --------------------------------------------------------------------

@dataclass(frozen=True)
class EnergySeries:
    """Per step ``n``: energy of the window starting at ``n``, its dissipation,
    the running maximum of ``|||u^m|||^2`` and ``|||L u|||``."""

    step: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray
    sup_norm: np.ndarray
    l_residual: np.ndarray

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "E", "D", "sup_norm", "L_residual"])
            for row in zip(self.step, self.energy, self.dissipation, self.sup_norm, self.l_residual):
                writer.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])


@dataclass(frozen=True)
class CauchyRun:
    series: EnergySeries
    final: TorusState
    sup_ratio: float
    max_energy_ratio: float
    max_increase: float

    @property
    def energy_drift(self) -> float:
        e = self.series.energy
        return float(np.abs(e - e[0]).max() / e[0]) if e[0] > 0 else 0.0


def run_cauchy(scheme: SchemeDef, levels, n_steps: int, dt: Optional[float] = None,
               epsilon: float = DEFAULT_EPSILON, cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
               mode: str = "auto", method: str = "auto") -> CauchyRun:
    """Advance ``n_steps`` and record the energy series.

    ``max_increase`` is the largest one-step energy increase relative to the
    initial energy (nonpositive up to roundoff for a stable scheme).
    """
    state = TorusState.create(scheme, levels, dt)
    te = torus_energy(scheme, state.shape, epsilon, cluster_radius, mode)
    initial = sum(state.norm2(k) for k in range(scheme.s + 1))
    steps, energy, diss, sup, lres = [], [], [], [], []
    running = max(state.norm2(k) for k in range(scheme.s + 1))
    for n in range(n_steps + 1):
        steps.append(n)
        energy.append(te.energy(state.levels, state.cell_volume))
        diss.append(te.dissipation(state.levels, state.cell_volume))
        running = max(running, state.norm2())
        sup.append(running)
        if n == n_steps:
            lres.append(0.0)
            break
        nxt = step_cauchy(scheme, state, method)
        lv, _ = apply_LM(scheme, np.concatenate((state.levels, nxt.levels[-1:])))
        lres.append(math.sqrt(state.cell_volume * float(np.sum(lv ** 2))))
        state = nxt
    e = np.array(energy)
    series = EnergySeries(np.array(steps), e, np.array(diss), np.array(sup), np.array(lres))
    if e[0] > 0:
        max_ratio = float(e.max() / e[0])
        max_increase = float(np.diff(e).max() / e[0]) if len(e) > 1 else 0.0
    else:
        max_ratio, max_increase = 0.0, 0.0
    sup_ratio = float(sup[-1] / initial) if initial > 0 else 0.0
    return CauchyRun(series, state, sup_ratio, max_ratio, max_increase)
