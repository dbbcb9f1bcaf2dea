"""Boundary symbols, the spatial companion matrices and the trace inequality.

For ``d = 1`` and ``eta = ()``, the edge symbols are the polynomials in ``z``

    a_{l1}(z) = sum_sigma z^sigma a_{l1,sigma},   l1 = -r1..p1

and the companion matrices ``L`` and ``M`` are built from the ``a_{l1}`` and
from ``z da_{l1}/dz``.  Their eigenvalues are the roots ``kappa`` of
``sum_l a_l kappa^(l + r1)`` and of the analogous derivative relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import schur
from scipy.optimize import linprog

from .errors import EdgeSymbolVanishes
from .poly import Poly, poly_roots
from .scheme import SchemeDef, edge_symbol_coeffs, eta_grid

SPLIT_MARGIN = 1e-6
EDGE_TOL = 1e-12
DEFAULT_R0 = math.e
MARGIN_THRESHOLD = 1e-3
TRACE_PAD = 20


def boundary_symbols(scheme: SchemeDef, z: complex, eta=()) -> np.ndarray:
    """``a_{l1}(z, eta)`` for ``l1 = -r1..p1``."""
    c = edge_symbol_coeffs(scheme, () if scheme.d == 1 else eta)
    return c @ (complex(z) ** np.arange(scheme.s + 2))


def boundary_symbols_dz(scheme: SchemeDef, z: complex, eta=()) -> np.ndarray:
    """``z da_{l1}/dz (z, eta)`` for ``l1 = -r1..p1``."""
    c = edge_symbol_coeffs(scheme, () if scheme.d == 1 else eta)
    k = np.arange(scheme.s + 2)
    return c @ (k * complex(z) ** k)


def _companion(sym: np.ndarray, label: str) -> np.ndarray:
    top = sym[-1]
    if abs(top) <= EDGE_TOL:
        raise EdgeSymbolVanishes(f"leading edge symbol of {label} vanishes")
    n = len(sym) - 1
    mat = np.zeros((n, n), dtype=complex)
    mat[0, :] = -sym[-2::-1] / top
    mat[np.arange(1, n), np.arange(n - 1)] = 1.0
    return mat


@dataclass(frozen=True)
class Splitting:
    """Eigenvalue counts and spectral projectors relative to the unit circle."""

    eigenvalues: np.ndarray
    counts: dict
    projectors: dict
    condition: float

    def projector_residual(self) -> float:
        """Largest defect of idempotence, completeness and mutual annihilation."""
        n = len(self.eigenvalues)
        eye = np.eye(n)
        total = sum(self.projectors.values())
        worst = float(np.abs(total - eye).max())
        names = list(self.projectors)
        for a in names:
            p = self.projectors[a]
            worst = max(worst, float(np.abs(p @ p - p).max()))
            for b in names:
                if a != b:
                    worst = max(worst, float(np.abs(p @ self.projectors[b]).max()))
        return worst


def split_spectrum(mat: np.ndarray, margin: float = SPLIT_MARGIN) -> Splitting:
    """Stable (``|k| < 1 - margin``), central and unstable
    (``|k| > 1 + margin``) invariant subspaces and their projectors.

    Bases come from sorted complex Schur forms; the projectors are
    ``B E B^-1`` with ``B = [stable | central | unstable]``.
    """
    n = mat.shape[0]
    eig = np.linalg.eigvals(mat)
    tests = {
        "stable": lambda x: abs(x) < 1 - margin,
        "central": lambda x: 1 - margin <= abs(x) <= 1 + margin,
        "unstable": lambda x: abs(x) > 1 + margin,
    }
    counts = {name: int(sum(test(x) for x in eig)) for name, test in tests.items()}
    blocks = []
    for name, test in tests.items():
        if counts[name] == 0:
            continue
        _, vecs, _ = schur(mat, output="complex", sort=test)
        blocks.append((name, vecs[:, :counts[name]]))
    basis = np.concatenate([b for _, b in blocks], axis=1)
    inv = np.linalg.inv(basis)
    projectors = {}
    start = 0
    for name, b in blocks:
        k = b.shape[1]
        projectors[name] = b @ inv[start:start + k, :]
        start += k
    for name in tests:
        projectors.setdefault(name, np.zeros((n, n), dtype=complex))
    return Splitting(eig, counts, projectors, float(np.linalg.cond(basis)))


@dataclass(frozen=True)
class CompanionPair:
    L_mat: np.ndarray
    M_mat: np.ndarray
    z: complex
    eta: tuple
    M_split: Splitting
    L_split: Splitting

    @property
    def central_margin(self) -> float:
        """Distance of the spectrum of ``M`` to the unit circle."""
        return float(np.abs(np.abs(self.M_split.eigenvalues) - 1).min())


def companions(scheme: SchemeDef, z: complex, eta=(), margin: float = SPLIT_MARGIN) -> CompanionPair:
    if abs(z) < 1 - 1e-12:
        raise ValueError("companion matrices are analysed for |z| >= 1")
    a = boundary_symbols(scheme, z, eta)
    b = boundary_symbols_dz(scheme, z, eta)
    L = _companion(a, f"L at z={complex(z):.6g}")
    M = _companion(b, f"M at z={complex(z):.6g}")
    return CompanionPair(L, M, complex(z), tuple(np.atleast_1d(eta).tolist()) if scheme.d > 1 else (),
                         split_spectrum(M, margin), split_spectrum(L, margin))


def z_samples(n: int, R0: float = DEFAULT_R0, seed: int = 0) -> np.ndarray:
    """Deterministic skeleton on ``|z| in {1, R0}`` at multiples of ``pi/4``,
    then log-uniform moduli in ``[1, R0]`` with uniform arguments."""
    angles = np.pi / 4 * np.arange(8)
    skeleton = np.concatenate([rho * np.exp(1j * angles) for rho in (1.0, R0)])
    rng = np.random.default_rng(seed)
    m = max(n - len(skeleton), 0)
    rho = np.exp(rng.uniform(0, math.log(R0), m))
    arg = rng.uniform(0, 2 * np.pi, m)
    return np.concatenate((skeleton, rho * np.exp(1j * arg)))[:n] if n >= len(skeleton) else skeleton[:n]


@dataclass(frozen=True)
class MarginScan:
    min_margin: float
    worst_z: complex
    worst_eta: tuple
    max_projector_residual: float
    max_condition: float
    n_samples: int
    threshold: float = MARGIN_THRESHOLD

    @property
    def verdict(self) -> bool:
        return self.min_margin > self.threshold


def central_margin_scan(scheme: SchemeDef, zs: Sequence[complex], etas: Optional[np.ndarray] = None,
                        threshold: float = MARGIN_THRESHOLD, margin: float = SPLIT_MARGIN) -> MarginScan:
    """Minimal distance of ``spec M(z, eta)`` to the unit circle over samples."""
    if etas is None:
        etas = eta_grid(scheme.d, 16)
    best = (math.inf, 0j, ())
    proj_res, cond = 0.0, 0.0
    count = 0
    for eta in etas:
        for z in zs:
            pair = companions(scheme, z, eta, margin)
            count += 1
            m = pair.central_margin
            if m < best[0]:
                best = (m, complex(z), pair.eta)
            proj_res = max(proj_res, pair.M_split.projector_residual())
            cond = max(cond, pair.M_split.condition)
    return MarginScan(float(best[0]), best[1], best[2], proj_res, cond, count, threshold)


def stable_decay(pair: CompanionPair, n_max: int = 50) -> tuple[float, float]:
    """Fit ``||M^n Pi_s|| ~ C delta^n`` for ``n <= n_max``; returns ``(C, delta)``.

    Powers are taken on the triangular stable Schur block, so rounding in the
    unstable directions never pollutes the product.  ``(0, 0)`` when ``M`` has
    no stable eigenvalue.
    """
    k = pair.M_split.counts["stable"]
    if k == 0:
        return 0.0, 0.0
    t, basis, _ = schur(pair.M_mat, output="complex", sort=lambda x: abs(x) < 1 - SPLIT_MARGIN)
    block, zs = t[:k, :k], basis[:, :k]
    rows = zs.conj().T @ pair.M_split.projectors["stable"]
    norms = []
    power = np.eye(k, dtype=complex)
    for _ in range(n_max + 1):
        norms.append(np.linalg.norm(zs @ power @ rows, 2))
        power = block @ power
    norms = np.maximum(np.array(norms), 1e-300)
    n = np.arange(n_max + 1)
    tail = (n >= n_max // 5) & (norms > 1e-250)
    if tail.sum() < 2:
        return float(norms[0]), 0.0
    slope, _ = np.polyfit(n[tail], np.log(norms[tail]), 1)
    delta = float(math.exp(slope))
    c = float(np.max(norms / delta ** n))
    return c, delta


def hull_distance(points: np.ndarray, x: complex) -> float:
    """l1 distance from ``x`` to the convex hull of ``points`` (a small LP)."""
    pts = np.asarray(points, dtype=complex)
    k = len(pts)
    # variables: weights (k), then slack pairs for the real and imaginary parts
    cost = np.concatenate((np.zeros(k), np.ones(4)))
    a_eq = np.zeros((3, k + 4))
    a_eq[0, :k] = pts.real
    a_eq[0, k:k + 2] = (1, -1)
    a_eq[1, :k] = pts.imag
    a_eq[1, k + 2:] = (1, -1)
    a_eq[2, :k] = 1
    b_eq = np.array([x.real, x.imag, 1.0])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * (k + 4), method="highs")
    return float(res.fun)


def gauss_lucas_check(scheme: SchemeDef, etas: Optional[np.ndarray] = None, tol: float = 1e-9) -> float:
    """Largest hull distance of a derivative root of an extreme edge symbol
    from the roots of the symbol itself; ``<= tol`` confirms Gauss-Lucas."""
    if etas is None:
        etas = eta_grid(scheme.d, 16)
    worst = 0.0
    for eta in etas:
        coeffs = edge_symbol_coeffs(scheme, eta)
        for row in (coeffs[0], coeffs[-1]):
            p = Poly(row)
            if p.degree < 2:
                continue
            roots = poly_roots(p.coeffs)
            scale = max(1.0, np.abs(roots).max())
            for x in poly_roots(p.deriv().coeffs):
                worst = max(worst, hull_distance(roots, x) / scale)
    return worst


# -- trace inequality --------------------------------------------------------

def _correlate(sym: np.ndarray, w: np.ndarray, start: int, r1: int) -> tuple[np.ndarray, int]:
    """``(sum_l c_l w_{j+l})_j`` on its full support; returns values and first index."""
    n = len(w)
    p1 = len(sym) - 1 - r1
    first = start - p1
    out = np.zeros(n + p1 + r1, dtype=complex)
    for i, c in enumerate(sym):
        l = i - r1
        # w_{j+l} is nonzero for start <= j + l < start + n
        lo = start - l - first
        out[lo:lo + n] += c * w
    return out, first


@dataclass(frozen=True)
class TraceTerms:
    lhs: float
    interior: float
    boundary: float

    @property
    def ratio(self) -> float:
        if self.lhs == 0:
            return 0.0
        rhs = self.interior + self.boundary
        return self.lhs / rhs if rhs > 0 else math.inf


def trace_terms(scheme: SchemeDef, z: complex, eta, w, P1: int, start: int = 0) -> TraceTerms:
    """Both sides of the trace inequality for ``w`` supported on
    ``start .. start + len(w) - 1``."""
    w = np.asarray(w, dtype=complex)
    r1, p1 = scheme.r[0], scheme.p[0]
    a = boundary_symbols(scheme, z, eta)
    b = boundary_symbols_dz(scheme, z, eta)
    idx = np.arange(start, start + len(w))
    window = (idx >= -r1 - p1) & (idx <= P1)
    lhs = float(np.sum(np.abs(w[window]) ** 2))
    aw, _ = _correlate(a, w, start, r1)
    bw, first = _correlate(b, w, start, r1)
    cells = np.arange(first, first + len(bw))
    return TraceTerms(lhs, float(np.sum(np.abs(aw) ** 2)), float(np.sum(np.abs(bw[cells <= 0]) ** 2)))


def trace_ratio(scheme: SchemeDef, z: complex, eta, w, P1: int, start: int = 0) -> float:
    """LHS/RHS of the trace inequality; 0 when ``w`` vanishes on the window."""
    return trace_terms(scheme, z, eta, w, P1, start).ratio


@dataclass(frozen=True)
class TraceScan:
    max_ratio: float
    worst_z: complex
    n_samples: int
    P1: int
    R0: float
    prefix_max: float

    @property
    def doubling_factor(self) -> float:
        """Growth of the maximum from the first half of the samples to all of them."""
        return self.max_ratio / self.prefix_max if self.prefix_max > 0 else math.inf


def trace_scan(scheme: SchemeDef, n_samples: int, P1: int = 5, R0: float = DEFAULT_R0, seed: int = 0,
               eta=()) -> TraceScan:
    """Monte-Carlo maximum of the trace ratio over ``|z| in (1, R0]`` and
    random ``w`` supported on ``[-r1 - p1 - 20, P1 + 20]``."""
    r1, p1 = scheme.r[0], scheme.p[0]
    start = -r1 - p1 - TRACE_PAD
    length = P1 + TRACE_PAD - start + 1
    rng = np.random.default_rng(seed)
    best, worst_z, prefix = 0.0, 0j, 0.0
    for k in range(n_samples):
        rho = math.exp(rng.uniform(0, math.log(R0)))
        if rho <= 1.0:
            rho = math.nextafter(1.0, 2.0)
        z = rho * np.exp(1j * rng.uniform(0, 2 * np.pi))
        w = rng.standard_normal(length) + 1j * rng.standard_normal(length)
        w /= np.linalg.norm(w)
        ratio = trace_ratio(scheme, z, eta, w, P1, start)
        if ratio > best:
            best, worst_z = ratio, complex(z)
        if k == n_samples // 2 - 1:
            prefix = best
    return TraceScan(best, worst_z, n_samples, P1, R0, prefix if n_samples > 1 else best)
