"""Complex polynomials, clustered roots and the Lagrange/Hermite bases.

Coefficients are always stored lowest degree first, matching
:mod:`numpy.polynomial.polynomial`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ClusterAmbiguity, ZeroPolynomial

DEFAULT_CLUSTER_RADIUS = 1e-6


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial with complex coefficients, trailing zeros trimmed."""

    coeffs: np.ndarray

    def __init__(self, coeffs: Iterable[complex]):
        c = np.atleast_1d(np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                                     dtype=complex)).copy()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "Poly":
        roots = list(roots)
        if not roots:
            return cls([lead])
        return cls(lead * npoly.polyfromroots(roots))

    @classmethod
    def from_groups(cls, groups: Sequence["RootGroup"], lead: complex = 1.0) -> "Poly":
        return cls.from_roots(_expand(groups), lead)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1])

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, x):
        return npoly.polyval(x, self.coeffs)

    def deriv(self) -> "Poly":
        if self.degree == 0:
            return Poly([0.0])
        return Poly(npoly.polyder(self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(npoly.polymul(self.coeffs, other.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(npoly.polysub(self.coeffs, other.coeffs))

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(npoly.polyadd(self.coeffs, other.coeffs))

    def padded(self, n: int) -> np.ndarray:
        """Coefficient vector zero-padded to length ``n``."""
        if self.degree >= n:
            raise ValueError(f"degree {self.degree} does not fit in {n} coefficients")
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def close_to(self, other: "Poly", rtol: float = 1e-10) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.padded(n), other.padded(n)
        scale = max(np.abs(a).max(), np.abs(b).max(), np.finfo(float).tiny)
        return bool(np.abs(a - b).max() <= rtol * scale)

    def __repr__(self) -> str:
        return f"Poly({np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True)
class RootGroup:
    value: complex
    multiplicity: int


def _expand(groups: Sequence[RootGroup]) -> list[complex]:
    return [g.value for g in groups for _ in range(g.multiplicity)]


def _sort_key(z: complex) -> tuple[float, float]:
    angle = cmath.phase(z) % (2 * math.pi)
    if angle > 2 * math.pi - 1e-9:
        angle = 0.0
    return (round(abs(z), 9), round(angle, 9))


def poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots as eigenvalues of the companion matrix.

    LAPACK's ``geev`` balances the matrix before the QR iteration.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[-2::-1] / c[-1]
    comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(comp)


def cluster_values(values: Sequence[complex], cluster_radius: float) -> list[list[int]]:
    """Single-linkage clusters (as index lists) of points in the plane."""
    vals = np.asarray(values, dtype=complex)
    n = len(vals)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(vals[:, None] - vals[None, :])
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= cluster_radius:
                parent[find(i)] = find(j)
    clusters: dict[int, list[int]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)
    return list(clusters.values())


def group_roots(roots: Sequence[complex], cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> list[RootGroup]:
    roots = np.asarray(roots, dtype=complex)
    groups = []
    for idx in cluster_values(roots, cluster_radius):
        members = roots[idx]
        diameter = np.abs(members[:, None] - members[None, :]).max()
        if diameter > 10 * cluster_radius:
            raise ClusterAmbiguity(
                f"root chain of diameter {diameter:.3e} exceeds 10x the clustering radius {cluster_radius:.1e}"
            )
        groups.append(RootGroup(complex(members.mean()), len(idx)))
    groups.sort(key=lambda g: _sort_key(g.value))
    return groups


def roots_clustered(p: Poly, cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> list[RootGroup]:
    """Roots of ``p`` grouped by single-linkage clustering.

    Each group is represented by the centroid of its members.  Groups are
    sorted by modulus, then by argument in ``[0, 2*pi)``.
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot locate the roots of the zero polynomial")
    if p.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    if cluster_radius <= 0:
        raise ValueError("cluster_radius must be positive")
    return group_roots(poly_roots(p.coeffs), cluster_radius)


def lagrange_and_aux(
    p: Poly, groups: Sequence[RootGroup]
) -> tuple[list[Poly], dict[tuple[int, int], Poly]]:
    """Lagrange factors ``P_k`` and auxiliary polynomials ``Q_{k,j}``.

    With ``p = a * prod (X - z_k)**mu_k``::

        P_k     = a (X - z_k)**(mu_k - 1) prod_{l != k} (X - z_l)**mu_l
        Q_{k,j} = a (X - z_k)**(j - 1)    prod_{l != k} (X - z_l)**mu_l

    for ``j = 1, ..., mu_k - 1``.  Keys of the returned mapping are
    ``(k, j)`` with ``k`` a 0-based group index and ``j`` the 1-based index
    used above, so ``aux_poly(p.lead, groups, k, mu_k)`` equals ``P_k``.
    """
    a = p.lead
    lagrange = [aux_poly(a, groups, k, g.multiplicity) for k, g in enumerate(groups)]
    aux = {
        (k, j): aux_poly(a, groups, k, j)
        for k, g in enumerate(groups)
        for j in range(1, g.multiplicity)
    }
    return lagrange, aux


def aux_poly(lead: complex, groups: Sequence[RootGroup], k: int, j: int) -> Poly:
    roots = [groups[k].value] * (j - 1)
    for l, g in enumerate(groups):
        if l != k:
            roots.extend([g.value] * g.multiplicity)
    return Poly.from_roots(roots, lead)


def hermite_expand(roots: Sequence[complex], k: int) -> np.ndarray:
    """Coefficients ``a_{k,j}``, ``j = 1..m-1``, such that

    ``(X - z_k)**(m-1) = prod_{j != k} (X - z_j) + sum_j a_{k,j} (X - z_k)**(j-1)``

    for the ``m`` (nearby) roots ``z_1..z_m``.  The expansion is a Taylor
    shift to ``Y = X - z_k``; all coefficients vanish when the roots coalesce.
    """
    z = np.asarray(roots, dtype=complex)
    m = len(z)
    if m < 2:
        raise ValueError("hermite_expand needs a cluster of at least two roots")
    others = np.delete(z, k)
    # prod_{j != k} (Y + z_k - z_j), monic of degree m-1 in Y
    shifted = npoly.polyfromroots(others - z[k])
    return -shifted[: m - 1]
