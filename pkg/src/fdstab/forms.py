"""Energy and dissipation Hermitian forms for stable recurrence relations.

For a polynomial ``P`` of degree ``nu`` and a complex sequence ``v`` the forms
satisfy, at every index ``n``::

    2 Re( conj(T P'(T) v^n) * P(T) v^n )
        = nu |P(T) v^n|^2 + (T - I) q_e(v^n..v^{n+nu-1}) + q_d(v^n..v^{n+nu-1})

with ``q_e`` positive definite and ``q_d`` nonnegative.  A form is stored as a
Hermitian matrix ``H`` acting on ``w = (w^0, ..., w^{nu-1})`` (oldest level
first) through ``q(w) = w^H H w``.  Every term ``|R(T) w^0|^2`` contributes the
rank-one matrix ``outer(conj(c), c)`` where ``c`` holds the coefficients of R.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadEpsilon, BoundaryMultipleRoot, HypothesisViolation, LengthMismatch, UnstableRoot
from .poly import DEFAULT_CLUSTER_RADIUS, Poly, RootGroup, group_roots, lagrange_and_aux, poly_roots

DEFAULT_EPSILON = 1 / 8
UNIT_TOL = 1e-10
PSD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianFormPair:
    qe: np.ndarray
    qd: np.ndarray
    nu: int
    regime: str
    epsilon: Optional[float] = None
    poly: Optional[Poly] = None

    def energy(self, w) -> float:
        return quad(self.qe, w)

    def dissipation(self, w) -> float:
        return quad(self.qd, w)


@dataclass(frozen=True)
class BalanceCertificate:
    residual: float
    qe_min_eig: float
    qd_min_eig: float
    regime: str

    @property
    def passed(self) -> bool:
        return self.qe_min_eig > 0 and self.qd_min_eig >= -PSD_TOL


def quad(h: np.ndarray, w) -> float:
    w = np.asarray(w, dtype=complex)
    return float(np.real(np.conj(w) @ h @ w))


def _rank_one(c: np.ndarray) -> np.ndarray:
    return np.outer(np.conj(c), c)


def _shifted(c: np.ndarray) -> np.ndarray:
    """Coefficients of ``R(T) w^1`` seen as a form on ``(w^0, ..., w^{nu-1})``."""
    if c[-1] != 0:
        raise ValueError("polynomial too long to be shifted by one time level")
    return np.concatenate(([0.0], c[:-1]))


def _check_epsilon(epsilon: float) -> None:
    if not (0 < epsilon <= 0.25):
        raise BadEpsilon(f"epsilon must lie in (0, 1/4], got {epsilon!r}")


def _check_groups(groups: Sequence[RootGroup]) -> None:
    for g in groups:
        r = abs(g.value)
        if r > 1 + UNIT_TOL:
            raise UnstableRoot(f"root {g.value:.6g} lies outside the closed unit disk")
        if g.multiplicity >= 2 and r >= 1 - UNIT_TOL:
            raise BoundaryMultipleRoot(
                f"root {g.value:.6g} of multiplicity {g.multiplicity} is not in the open unit disk"
            )


def build_forms(p: Poly, groups: Sequence[RootGroup], epsilon: float = DEFAULT_EPSILON) -> HermitianFormPair:
    """Energy/dissipation pair built from the clustered roots of ``p``.

    Only the leading coefficient and degree of ``p`` are used; the roots come
    from ``groups`` (cluster centroids).  Simple roots give the classical
    Lagrange forms; a group with ``mu >= 2`` adds the weighted auxiliary terms
    ``eps**(mu-j) (1-|z|^2)**(2(mu-j)) |Q_{k,j}(T) w|^2`` to the energy and
    their one-step telescoped differences to the dissipation.
    """
    _check_epsilon(epsilon)
    _check_groups(groups)
    nu = p.degree
    if sum(g.multiplicity for g in groups) != nu:
        raise ValueError("root groups do not account for the degree of the polynomial")
    lagrange, aux = lagrange_and_aux(p, groups)
    qe = np.zeros((nu, nu), dtype=complex)
    qd = np.zeros((nu, nu), dtype=complex)
    for k, g in enumerate(groups):
        h = _rank_one(lagrange[k].padded(nu))
        damp = 1 - abs(g.value) ** 2
        qe += g.multiplicity * h
        qd += g.multiplicity * damp * h
    for (k, j), q in aux.items():
        g = groups[k]
        damp = 1 - abs(g.value) ** 2
        weight = epsilon ** (g.multiplicity - j) * damp ** (2 * (g.multiplicity - j))
        c = q.padded(nu)
        qe += weight * _rank_one(c)
        qd += weight * (_rank_one(c) - _rank_one(_shifted(c)))
    multiple = any(g.multiplicity > 1 for g in groups)
    return HermitianFormPair(
        qe=_hermitize(qe),
        qd=_hermitize(qd),
        nu=nu,
        regime="multiple" if multiple else "simple",
        epsilon=epsilon if multiple else None,
        poly=Poly.from_groups(groups, p.lead),
    )


def build_forms_crossing(
    lead: complex,
    roots: Sequence[complex],
    cluster: Sequence[int],
    epsilon: float = DEFAULT_EPSILON,
) -> HermitianFormPair:
    """Forms valid on a neighborhood of a frequency where roots cross.

    ``roots`` lists every root individually (no clustering) and ``cluster``
    indexes the ``m`` roots that coalesce at the crossing point.  The energy is
    the sum of the ``|P_k(T) w|^2`` over all individual roots, plus, for each
    cluster root ``z_k`` and ``j = 1..m-1``, the term
    ``eps**(m-j) (1-|z_k|^2)**(2(m-j)) |W_{k,j}|^2`` with
    ``W_{k,j} = lead (T - z_k)**(j-1) prod_{l not in cluster} (T - z_l) w``.
    The dissipation receives the matching telescoped differences.  Positive
    definiteness holds up to and including the crossing point; nonnegativity
    of the dissipation holds close enough to it and must be checked.
    """
    _check_epsilon(epsilon)
    z = np.asarray(roots, dtype=complex)
    nu = len(z)
    cluster = list(cluster)
    m = len(cluster)
    if m < 2:
        raise ValueError("a crossing cluster has at least two roots")
    if np.abs(z).max() > 1 + UNIT_TOL:
        raise UnstableRoot("root outside the closed unit disk")
    if np.abs(z[cluster]).max() >= 1 - UNIT_TOL:
        raise BoundaryMultipleRoot("crossing roots must lie in the open unit disk")
    qe = np.zeros((nu, nu), dtype=complex)
    qd = np.zeros((nu, nu), dtype=complex)
    for k in range(nu):
        c = Poly.from_roots(np.delete(z, k), lead).padded(nu)
        h = _rank_one(c)
        qe += h
        qd += (1 - abs(z[k]) ** 2) * h
    outside = np.delete(z, cluster)
    for k in cluster:
        damp = 1 - abs(z[k]) ** 2
        for j in range(1, m):
            c = Poly.from_roots(np.concatenate(([z[k]] * (j - 1), outside)), lead).padded(nu)
            weight = epsilon ** (m - j) * damp ** (2 * (m - j))
            qe += weight * _rank_one(c)
            qd += weight * (_rank_one(c) - _rank_one(_shifted(c)))
    return HermitianFormPair(
        qe=_hermitize(qe),
        qd=_hermitize(qd),
        nu=nu,
        regime="crossing",
        epsilon=epsilon,
        poly=Poly.from_roots(z, lead),
    )


def build_forms_degree2(a: complex, b: complex, c: complex,
                        cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> HermitianFormPair:
    """Explicit forms for ``a X^2 + b X + c`` in the variables ``(x1, x2)``.

    ``q_e = 2|a|^2|x2|^2 + 2 Re(conj(a x2) b x1) + (|a|^2 + |c|^2)|x1|^2``
    ``q_d = (|a|^2-|c|^2)(|x1|^2+|x2|^2) + 2 Re(conj(a x2) b x1) - 2 Re(conj(b x2) c x1)``

    The coefficients are polynomial in ``(a, b, c)``: no root is needed to
    build them, only to check the hypotheses.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0:
        raise HypothesisViolation("leading coefficient must be nonzero")
    z = poly_roots(np.array([c, b, a]))
    if np.abs(z).max() > 1 + UNIT_TOL:
        raise UnstableRoot(f"roots {z} not in the closed unit disk")
    if abs(z[0] - z[1]) <= cluster_radius and np.abs(z).max() >= 1 - UNIT_TOL:
        raise BoundaryMultipleRoot(f"double root {z[0]:.6g} on the unit circle")
    aa, cc = abs(a) ** 2, abs(c) ** 2
    cross_e = np.conj(a) * b
    qe = np.array([[aa + cc, np.conj(cross_e)], [cross_e, 2 * aa]], dtype=complex)
    cross_d = np.conj(a) * b - np.conj(b) * c
    qd = np.array([[aa - cc, np.conj(cross_d)], [cross_d, aa - cc]], dtype=complex)
    return HermitianFormPair(qe=qe, qd=qd, nu=2, regime="degree2", poly=Poly([c, b, a]))


def forms_for_poly(p: Poly, epsilon: float = DEFAULT_EPSILON,
                   cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> HermitianFormPair:
    """Convenience wrapper: cluster the roots of ``p`` and build the forms."""
    groups = group_roots(poly_roots(p.coeffs), cluster_radius)
    return build_forms(p, groups, epsilon)


def _hermitize(h: np.ndarray) -> np.ndarray:
    return 0.5 * (h + h.conj().T)


def balance_terms(coeffs: np.ndarray, pair: HermitianFormPair, window: np.ndarray) -> tuple[float, float]:
    """Both sides of the balance law on ``window = (v^n, ..., v^{n+nu})``."""
    nu = pair.nu
    a = np.asarray(coeffs, dtype=complex)
    pv = a @ window
    tpv = (np.arange(nu + 1) * a) @ window
    lhs = 2 * np.real(np.conj(tpv) * pv)
    rhs = (nu * abs(pv) ** 2 + quad(pair.qe, window[1:]) - quad(pair.qe, window[:-1])
           + quad(pair.qd, window[:-1]))
    return float(lhs), float(rhs)


def balance_residual(p: Poly, pair: HermitianFormPair, trajectory: Sequence[complex]) -> float:
    """Largest relative residual ``|LHS - RHS| / (1 + |LHS|)`` of the balance
    law over all indices ``n`` the trajectory allows."""
    v = np.asarray(trajectory, dtype=complex)
    nu = pair.nu
    if p.degree != nu:
        raise LengthMismatch(f"polynomial degree {p.degree} does not match form size {nu}")
    if len(v) < nu + 1:
        raise LengthMismatch(f"trajectory needs at least {nu + 1} values, got {len(v)}")
    worst = 0.0
    for n in range(len(v) - nu):
        lhs, rhs = balance_terms(p.coeffs, pair, v[n:n + nu + 1])
        worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    return worst


def certify(pair: HermitianFormPair, n_trajectories: int = 20, length: Optional[int] = None,
            seed: int = 0) -> BalanceCertificate:
    """Eigenvalue certificate plus balance residual on random trajectories."""
    qe_min = float(np.linalg.eigvalsh(pair.qe)[0])
    qd_min = float(np.linalg.eigvalsh(pair.qd)[0])
    residual = 0.0
    if pair.poly is not None:
        rng = np.random.default_rng(seed)
        length = length or pair.nu + 4
        for _ in range(n_trajectories):
            traj = rng.standard_normal(length) + 1j * rng.standard_normal(length)
            residual = max(residual, balance_residual(pair.poly, pair, traj))
    return BalanceCertificate(residual=residual, qe_min_eig=qe_min, qd_min_eig=qd_min, regime=pair.regime)
