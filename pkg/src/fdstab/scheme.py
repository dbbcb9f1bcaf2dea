"""Finite difference schemes, their symbols and the root-condition checks.

A scheme on ``d`` space dimensions with ``s + 2`` time levels reads::

    sum_{sigma=0}^{s+1} Q_sigma u^{n+sigma} = dt F^{n+s+1}
    Q_sigma = sum_l a_{l,sigma} S^l,   (S^l v)_j = v_{j+l}

Interior coefficients are keyed by ``(offset, sigma)`` and boundary
coefficients by ``(offset, j1, sigma)``; offsets are integer tuples of length
``d``.  Frequencies are angles ``theta`` with ``kappa_k = exp(i theta_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import least_squares, linear_sum_assignment

from .errors import CharacteristicSymbol, ConfigError, DegenerateEdgeSymbol
from .poly import DEFAULT_CLUSTER_RADIUS, Poly, RootGroup, group_roots, poly_roots

SYMBOL_TOL = 1e-12
UNIT_TOL = 1e-10
INSIDE_TOL = 1e-6

Offset = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SchemeDef:
    """Immutable description of a scalar multistep scheme.

    ``q`` holds the inward boundary depth ``q1`` followed by the ``d - 1``
    transverse half-widths.  ``lam`` holds the ratios ``dt / dx_k``.
    """

    name: str
    d: int
    s: int
    r: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    lam: tuple[float, ...]
    interior: Mapping[tuple[Offset, int], float]
    boundary: Mapping[tuple[Offset, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("r", "p", "q", "lam"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "interior", {(tuple(int(x) for x in k[0]), int(k[1])): float(v)
                                              for k, v in self.interior.items()})
        object.__setattr__(self, "boundary", {(tuple(int(x) for x in k[0]), int(k[1]), int(k[2])): float(v)
                                              for k, v in self.boundary.items()})
        self._validate()
        keys = list(self.interior)
        offsets = np.array([k[0] for k in keys], dtype=float).reshape(len(keys), self.d)
        coef = np.zeros((len(keys), self.s + 2))
        for t, k in enumerate(keys):
            coef[t, k[1]] = self.interior[k]
        object.__setattr__(self, "_offsets", offsets)
        object.__setattr__(self, "_coef", coef)
        grid = frequency_grid(self.d, 64 if self.d == 1 else 16)
        top = np.abs(symbols(self, grid)[:, -1])
        if top.min() <= SYMBOL_TOL:
            bad = grid[int(np.argmin(top))]
            raise CharacteristicSymbol(f"{self.name}: Q_(s+1) symbol vanishes near theta={bad.tolist()}")

    def _validate(self) -> None:
        d, s = self.d, self.s
        if d < 1 or s < 0:
            raise ConfigError(f"{self.name}: need d >= 1 and s >= 0")
        if not (len(self.r) == len(self.p) == len(self.q) == len(self.lam) == d):
            raise ConfigError(f"{self.name}: r, p, q and lambda must each have {d} entries")
        if min(self.r + self.p + self.q) < 0:
            raise ConfigError(f"{self.name}: stencil extents must be nonnegative")
        if min(self.lam) <= 0:
            raise ConfigError(f"{self.name}: CFL ratios must be positive")
        for (off, sigma), v in self.interior.items():
            if len(off) != d or not 0 <= sigma <= s + 1:
                raise ConfigError(f"{self.name}: bad interior key offset={off} sigma={sigma}")
            if any(not -self.r[k] <= off[k] <= self.p[k] for k in range(d)):
                raise ConfigError(f"{self.name}: interior offset {off} outside the stencil extents")
            if not math.isfinite(v):
                raise ConfigError(f"{self.name}: non-finite coefficient at {off}, sigma={sigma}")
        for k in range(d):
            used = {off[k] for (off, _), v in self.interior.items() if v != 0}
            if -self.r[k] not in used or self.p[k] not in used:
                raise ConfigError(f"{self.name}: stencil extents along axis {k} are not tight")
        for (off, j1, sigma), v in self.boundary.items():
            if len(off) != d or not 0 <= sigma <= s + 1:
                raise ConfigError(f"{self.name}: bad boundary key offset={off} j1={j1} sigma={sigma}")
            if not 0 <= off[0] <= self.q[0] or any(abs(off[k]) > self.q[k] for k in range(1, d)):
                raise ConfigError(f"{self.name}: boundary offset {off} outside the boundary stencil")
            if not 1 - self.r[0] <= j1 <= 0:
                raise ConfigError(f"{self.name}: boundary row j1={j1} outside [{1 - self.r[0]}, 0]")
            if not math.isfinite(v):
                raise ConfigError(f"{self.name}: non-finite boundary coefficient")

    @property
    def nu(self) -> int:
        return self.s + 1

    def interior_offsets(self, sigma: int) -> dict[Offset, float]:
        return {off: v for (off, sg), v in self.interior.items() if sg == sigma and v != 0}

    def boundary_offsets(self, j1: int, sigma: int) -> dict[Offset, float]:
        return {off: v for (off, j, sg), v in self.boundary.items() if j == j1 and sg == sigma and v != 0}

    def is_explicit(self) -> bool:
        top = self.interior_offsets(self.s + 1)
        return top == {(0,) * self.d: 1.0}


# -- frequency grids and symbols ---------------------------------------------

def frequency_grid(d: int, n: int) -> np.ndarray:
    """Uniform grid ``2 pi k / n`` on ``[0, 2 pi)^d`` as an ``(n**d, d)`` array."""
    axis = 2 * np.pi * np.arange(n) / n
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _points(theta, d: int) -> tuple[np.ndarray, tuple[int, ...]]:
    t = np.asarray(theta, dtype=float)
    if d == 1:
        if t.ndim >= 2 and t.shape[-1] == 1:
            return t.reshape(-1, 1), t.shape[:-1]
        return t.reshape(-1, 1), t.shape if t.shape != (1,) else ()
    if t.shape[-1] != d:
        raise ValueError(f"theta must have trailing dimension {d}")
    return t.reshape(-1, d), t.shape[:-1]


def symbols(scheme: SchemeDef, theta) -> np.ndarray:
    """All symbols ``Q_sigma^(kappa)``, shape ``batch + (s + 2,)``."""
    pts, batch = _points(theta, scheme.d)
    phase = np.exp(1j * pts @ scheme._offsets.T)
    return (phase @ scheme._coef).reshape(batch + (scheme.s + 2,))


def symbol(scheme: SchemeDef, sigma: int, theta):
    """``Q_sigma^(kappa) = sum_l a_{l,sigma} kappa^l``."""
    if not 0 <= sigma <= scheme.s + 1:
        raise ValueError(f"sigma must lie in [0, {scheme.s + 1}]")
    out = symbols(scheme, theta)[..., sigma]
    return complex(out) if np.ndim(out) == 0 else out


def dispersion_poly(scheme: SchemeDef, theta) -> Poly:
    """``sum_sigma Q_sigma^(kappa) z^sigma`` at a single frequency."""
    return Poly(symbols(scheme, theta).reshape(-1))


def _companion_batch(q: np.ndarray) -> np.ndarray:
    top = q[..., -1]
    if np.abs(top).min() <= SYMBOL_TOL:
        raise CharacteristicSymbol("Q_(s+1) symbol vanishes on the frequency grid")
    nu = q.shape[-1] - 1
    a = np.zeros(q.shape[:-1] + (nu, nu), dtype=complex)
    a[..., 0, :] = -q[..., -2::-1] / top[..., None]
    idx = np.arange(1, nu)
    a[..., idx, idx - 1] = 1.0
    return a


def amplification(scheme: SchemeDef, theta) -> np.ndarray:
    """Companion (amplification) matrix; batched over leading theta axes."""
    return _companion_batch(symbols(scheme, theta))


def dispersion_roots(scheme: SchemeDef, theta) -> np.ndarray:
    """Roots of the dispersion relation, shape ``batch + (s + 1,)``."""
    return np.linalg.eigvals(amplification(scheme, theta))


def derivative_dispersion_roots(scheme: SchemeDef, theta) -> np.ndarray:
    """Roots of ``sum_{sigma >= 1} sigma Q_sigma^ z^(sigma - 1)``."""
    if scheme.s < 1:
        raise ValueError("derivative roots need s >= 1")
    q = symbols(scheme, theta).reshape(-1)
    return poly_roots(np.arange(1, scheme.s + 2) * q[1:])


# -- uniform power boundedness -----------------------------------------------

@dataclass(frozen=True)
class PowerScan:
    max_norm: float
    history: np.ndarray
    grid_size: int
    n_max: int

    @property
    def growth_ratio(self) -> float:
        """Late-time maximum over early-time maximum; close to 1 when bounded."""
        h = self.history
        half = max(1, len(h) // 2)
        return float(h[half:].max() / h[:half].max()) if len(h) > 1 else 1.0


def power_bound_scan(scheme: SchemeDef, grid_size: int, n_max: int) -> PowerScan:
    """``max_kappa ||A(kappa)^n||_2`` for ``n = 1..n_max`` on a uniform grid."""
    if grid_size < 2 or n_max < 1:
        raise ValueError("need grid_size >= 2 and n_max >= 1")
    a = amplification(scheme, frequency_grid(scheme.d, grid_size))
    power = a.copy()
    history = np.empty(n_max)
    for n in range(n_max):
        if n:
            power = power @ a
        history[n] = np.linalg.norm(power, ord=2, axis=(-2, -1)).max()
        if not np.isfinite(history[n]) or history[n] > 1e200:
            history[n:] = np.inf
            break
    return PowerScan(float(history.max()), history, grid_size, n_max)


# -- root classification -----------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    theta: tuple[float, ...]
    groups: list[RootGroup]
    gap: float
    continuity: float

    @property
    def cluster_size(self) -> int:
        return max(g.multiplicity for g in self.groups)


@dataclass(frozen=True)
class RootClassification:
    theta: np.ndarray
    groups: list[list[RootGroup]]
    max_modulus: float
    all_in_closed_disk: bool
    boundary_roots_simple: bool
    has_interior_multiple: bool
    crossings: list[Crossing]
    cluster_radius: float
    grid_size: int

    @property
    def verdict(self) -> bool:
        return self.all_in_closed_disk and self.boundary_roots_simple


def _gap(roots: np.ndarray) -> np.ndarray:
    n = roots.shape[-1]
    if n < 2:
        return np.full(roots.shape[:-1], np.inf)
    diff = np.abs(roots[..., :, None] - roots[..., None, :])
    diff[..., np.arange(n), np.arange(n)] = np.inf
    return diff.min(axis=(-2, -1))


def _local_minima(gap: np.ndarray, d: int, n: int) -> np.ndarray:
    g = gap.reshape((n,) * d)
    mask = np.isfinite(g)
    for axis in range(d):
        mask &= g <= np.roll(g, 1, axis)
        mask &= g <= np.roll(g, -1, axis)
    return np.flatnonzero(mask.ravel())


def _refine_crossing(scheme: SchemeDef, theta0: np.ndarray, h: float) -> tuple[np.ndarray, float]:
    """Locate a point where ``P`` and ``dP/dz`` vanish together near ``theta0``.

    Gauss-Newton on the real unknowns ``(theta, Re z, Im z)`` started at the
    closest root pair; returns the refined angles and the root gap there.
    """
    d = scheme.d
    roots = dispersion_roots(scheme, theta0)
    n = len(roots)
    diff = np.abs(roots[:, None] - roots[None, :]) + np.diag(np.full(n, np.inf))
    i, j = np.unravel_index(np.argmin(diff), diff.shape)
    z0 = 0.5 * (roots[i] + roots[j])
    scale = np.abs(symbols(scheme, theta0)).max()
    deg = np.arange(n + 1)

    def residual(x):
        q = symbols(scheme, x[:d])
        z = x[d] + 1j * x[d + 1]
        p = np.sum(q * z ** deg)
        dp = np.sum(deg[1:] * q[1:] * z ** deg[:-1])
        return np.array([p.real, p.imag, dp.real, dp.imag]) / scale

    x0 = np.concatenate((theta0, [z0.real, z0.imag]))
    lo = np.concatenate((theta0 - h, [-np.inf, -np.inf]))
    hi = np.concatenate((theta0 + h, [np.inf, np.inf]))
    sol = least_squares(residual, x0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    theta = sol.x[:d]
    return theta, float(_gap(dispersion_roots(scheme, theta)))


def _continuity(scheme: SchemeDef, theta: np.ndarray, step: float) -> float:
    """Largest matched root displacement between ``theta`` and ``theta + step``
    along each axis; small values indicate a continuous root path."""
    base = dispersion_roots(scheme, theta)
    worst = 0.0
    for k in range(scheme.d):
        for sign in (-1, 1):
            t = theta.copy()
            t[k] += sign * step
            other = dispersion_roots(scheme, t)
            cost = np.abs(base[:, None] - other[None, :])
            rows, cols = linear_sum_assignment(cost)
            worst = max(worst, float(cost[rows, cols].max()))
    return worst


def _wrap(theta: np.ndarray) -> np.ndarray:
    t = np.mod(theta, 2 * np.pi)
    t[t > 2 * np.pi - 1e-9] = 0.0
    return t


def classify_assumption1(scheme: SchemeDef, grid_size: int = 256,
                         cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> RootClassification:
    """Root groups on a frequency grid plus refined crossing points.

    Crossing candidates are grid points whose closest root pair is within
    ``cluster_radius`` and the local minima of the closest-pair distance.  Each
    candidate is refined by solving ``P = dP/dz = 0`` in ``(theta, z)`` within
    one grid cell, and kept when the refined gap is within the radius.
    """
    d = scheme.d
    theta = frequency_grid(d, grid_size)
    roots = dispersion_roots(scheme, theta)
    groups = [group_roots(r, cluster_radius) for r in roots]
    max_mod = float(np.abs(roots).max())
    boundary_simple = all(g.multiplicity == 1 or abs(g.value) < 1 - INSIDE_TOL
                          for gs in groups for g in gs)

    crossings: list[Crossing] = []
    if scheme.s >= 1:
        gap = _gap(roots)
        h = 2 * np.pi / grid_size
        candidates = set(np.flatnonzero(gap <= cluster_radius)) | set(_local_minima(gap, d, grid_size))
        found: list[np.ndarray] = []
        for idx in sorted(candidates):
            t0 = theta[idx]
            if gap[idx] <= cluster_radius:
                t, g = t0.copy(), float(gap[idx])
            else:
                t, g = _refine_crossing(scheme, t0, h)
            if g > cluster_radius:
                continue
            t = _wrap(t)
            if any(np.abs(np.angle(np.exp(1j * (t - f)))).max() <= INSIDE_TOL for f in found):
                continue
            found.append(t)
            crossings.append(Crossing(
                theta=tuple(float(x) for x in t),
                groups=group_roots(dispersion_roots(scheme, t), cluster_radius),
                gap=g,
                continuity=_continuity(scheme, t, h / 64),
            ))
        crossings.sort(key=lambda c: c.theta)

    interior_multiple = any(g.multiplicity > 1 and abs(g.value) < 1 - INSIDE_TOL
                            for gs in groups for g in gs)
    interior_multiple |= any(c.cluster_size > 1 for c in crossings)
    boundary_simple &= all(g.multiplicity == 1 or abs(g.value) < 1 - INSIDE_TOL
                           for c in crossings for g in c.groups)
    return RootClassification(
        theta=theta,
        groups=groups,
        max_modulus=max_mod,
        all_in_closed_disk=max_mod <= 1 + UNIT_TOL,
        boundary_roots_simple=boundary_simple,
        has_interior_multiple=interior_multiple,
        crossings=crossings,
        cluster_radius=cluster_radius,
        grid_size=grid_size,
    )


# -- noncharacteristic boundary ----------------------------------------------

def edge_symbol_coeffs(scheme: SchemeDef, eta=()) -> np.ndarray:
    """Coefficients in ``z`` of ``a_{l1}(z, eta)`` for ``l1 = -r1..p1``.

    Row ``l1 + r1`` holds ``sum_{l'} a_{(l1,l'),sigma} exp(i l'.eta)`` for
    ``sigma = 0..s+1``.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if len(eta) != scheme.d - 1:
        raise ValueError(f"eta must have {scheme.d - 1} entries")
    r1, p1 = scheme.r[0], scheme.p[0]
    out = np.zeros((r1 + p1 + 1, scheme.s + 2), dtype=complex)
    for (off, sigma), v in scheme.interior.items():
        out[off[0] + r1, sigma] += v * np.exp(1j * np.dot(off[1:], eta))
    return out


@dataclass(frozen=True)
class EdgeCheck:
    eta: tuple[float, ...]
    low_roots: np.ndarray
    high_roots: np.ndarray
    low_deriv_roots: np.ndarray
    high_deriv_roots: np.ndarray

    @property
    def max_modulus(self) -> float:
        return float(max(np.abs(self.low_roots).max(), np.abs(self.high_roots).max()))

    @property
    def max_deriv_modulus(self) -> float:
        vals = [np.abs(r).max() for r in (self.low_deriv_roots, self.high_deriv_roots) if len(r)]
        return float(max(vals)) if vals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_modulus < 1 - INSIDE_TOL and self.max_deriv_modulus < 1 - INSIDE_TOL


@dataclass(frozen=True)
class Assumption2Report:
    checks: list[EdgeCheck]

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_modulus(self) -> float:
        return max(c.max_modulus for c in self.checks)


def _edge_roots(c: np.ndarray, label: str, eta) -> tuple[np.ndarray, np.ndarray]:
    p = Poly(c)
    if p.degree < 1:
        raise DegenerateEdgeSymbol(f"edge symbol {label} at eta={list(eta)} does not depend on z")
    roots = poly_roots(p.coeffs)
    deriv = poly_roots(p.deriv().coeffs) if p.degree >= 2 else np.zeros(0, dtype=complex)
    return roots, deriv


def eta_grid(d: int, n: int) -> np.ndarray:
    if d == 1:
        return np.zeros((1, 0))
    return frequency_grid(d - 1, n)


def check_assumption2(scheme: SchemeDef, etas: Optional[np.ndarray] = None, n_eta: int = 32) -> Assumption2Report:
    """Roots of the extreme edge symbols ``a_{-r1}`` and ``a_{p1}`` (and of
    their z-derivatives) at each transverse frequency."""
    if etas is None:
        etas = eta_grid(scheme.d, n_eta)
    checks = []
    etas = np.zeros((1, 0)) if scheme.d == 1 else np.asarray(etas, dtype=float).reshape(-1, scheme.d - 1)
    for eta in etas:
        coeffs = edge_symbol_coeffs(scheme, eta)
        lo, dlo = _edge_roots(coeffs[0], f"a_{-scheme.r[0]}", eta)
        hi, dhi = _edge_roots(coeffs[-1], f"a_{scheme.p[0]}", eta)
        checks.append(EdgeCheck(tuple(float(x) for x in eta), lo, hi, dlo, dhi))
    return Assumption2Report(checks)
