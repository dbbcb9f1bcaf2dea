"""Ready-made one-dimensional transport schemes used in the examples and tests.

``velocity`` is the transport speed ``a`` of ``u_t + a u_x = 0``; the
coefficients involve ``a * courant``.  A negative velocity makes the left
boundary an outflow boundary.
"""

from __future__ import annotations

from .scheme import SchemeDef

BOUNDARIES = ("extrapolation", "extrapolation2", "dirichlet")


def _boundary(kind: str, sigma: int) -> dict:
    if kind == "dirichlet":
        return {}
    if kind == "extrapolation":
        # u_0 = u_1
        return {((0,), 0, sigma): -1.0}
    if kind == "extrapolation2":
        # u_0 = 2 u_1 - u_2
        return {((0,), 0, sigma): -2.0, ((1,), 0, sigma): 1.0}
    raise ValueError(f"unknown boundary condition {kind!r}; choose from {BOUNDARIES}")


def _depth(kind: str) -> int:
    return 1 if kind == "extrapolation2" else 0


def leapfrog(courant: float = 0.8, velocity: float = -1.0, boundary: str = "extrapolation") -> SchemeDef:
    """``u^{n+2} + a lam (S - S^-1) u^{n+1} - u^n = 0``."""
    la = velocity * courant
    interior = {((0,), 2): 1.0, ((1,), 1): la, ((-1,), 1): -la, ((0,), 0): -1.0}
    return SchemeDef(name=f"leapfrog-{boundary}", d=1, s=1, r=(1,), p=(1,), q=(_depth(boundary),),
                     lam=(courant,), interior=interior, boundary=_boundary(boundary, 2))


def damped_leapfrog(courant: float = 0.8, velocity: float = -1.0, damping: float = 0.9) -> SchemeDef:
    """``u^{n+2} + a lam (S - S^-1) u^{n+1} - damping u^n = 0``; dissipative
    when ``lam^2 a^2 <= damping < 1``."""
    la = velocity * courant
    interior = {((0,), 2): 1.0, ((1,), 1): la, ((-1,), 1): -la, ((0,), 0): -damping}
    return SchemeDef(name="damped-leapfrog", d=1, s=1, r=(1,), p=(1,), q=(0,), lam=(courant,),
                     interior=interior)


def lax_friedrichs(courant: float = 0.8, velocity: float = -1.0, boundary: str = "extrapolation") -> SchemeDef:
    """``u^{n+1} = ((1 - a lam) S + (1 + a lam) S^-1) u^n / 2``."""
    la = velocity * courant
    interior = {((0,), 1): 1.0, ((1,), 0): -(0.5 - la / 2), ((-1,), 0): -(0.5 + la / 2)}
    return SchemeDef(name=f"lax-friedrichs-{boundary}", d=1, s=0, r=(1,), p=(1,), q=(_depth(boundary),),
                     lam=(courant,), interior=interior, boundary=_boundary(boundary, 1))


def ab3_centered(courant: float = 0.5, velocity: float = -1.0, boundary: str = "extrapolation") -> SchemeDef:
    """Third-order Adams-Bashforth in time with the centered difference
    ``D u = (S - S^-1) u / 2`` in space."""
    la = velocity * courant
    interior = {((0,), 3): 1.0, ((0,), 2): -1.0}
    for sigma, w in ((2, 23 / 24), (1, -16 / 24), (0, 5 / 24)):
        interior[((1,), sigma)] = w * la
        interior[((-1,), sigma)] = -w * la
    return SchemeDef(name=f"ab3-centered-{boundary}", d=1, s=2, r=(1,), p=(1,), q=(_depth(boundary),),
                     lam=(courant,), interior=interior, boundary=_boundary(boundary, 3))


def crank_nicolson(courant: float = 0.8, velocity: float = -1.0, boundary: str = "extrapolation") -> SchemeDef:
    """Implicit centered scheme ``(I + a lam D / 2) u^{n+1} = (I - a lam D / 2) u^n``,
    ``D = (S - S^-1) / 2``."""
    h = velocity * courant / 4
    interior = {((0,), 1): 1.0, ((1,), 1): h, ((-1,), 1): -h,
                ((0,), 0): -1.0, ((1,), 0): h, ((-1,), 0): -h}
    return SchemeDef(name=f"crank-nicolson-{boundary}", d=1, s=0, r=(1,), p=(1,), q=(_depth(boundary),),
                     lam=(courant,), interior=interior, boundary=_boundary(boundary, 1))


def wave_leapfrog(courant: float = 0.5) -> SchemeDef:
    """Leap-frog for the wave equation, ``u^{n+2} - (2 + lam^2 (S - 2 + S^-1)) u^{n+1} + u^n``.

    At ``theta = 0`` the dispersion polynomial is ``(z - 1)^2``: a double root
    on the unit circle.
    """
    l2 = courant ** 2
    interior = {((0,), 2): 1.0, ((0,), 0): 1.0,
                ((0,), 1): -2.0 + 2 * l2, ((1,), 1): -l2, ((-1,), 1): -l2}
    return SchemeDef(name="wave-leapfrog", d=1, s=1, r=(1,), p=(1,), q=(0,), lam=(courant,),
                     interior=interior)


def amplified(modulus: float = 1.05, courant: float = 0.5) -> SchemeDef:
    """One-step scheme whose amplification factor at ``theta = 0`` is ``modulus``."""
    h = (modulus - 1) / 2
    interior = {((0,), 1): 1.0, ((1,), 0): -(0.5 + h), ((-1,), 0): -(0.5 + h)}
    return SchemeDef(name="amplified", d=1, s=0, r=(1,), p=(1,), q=(0,), lam=(courant,), interior=interior)


def leapfrog_2d(courant: tuple[float, float] = (0.4, 0.4), velocity: tuple[float, float] = (-1.0, 0.5)) -> SchemeDef:
    """Two-dimensional leap-frog transport (Cauchy problem only)."""
    interior = {((0, 0), 2): 1.0, ((0, 0), 0): -1.0}
    for axis in range(2):
        la = velocity[axis] * courant[axis]
        e = [0, 0]
        e[axis] = 1
        interior[(tuple(e), 1)] = la
        e[axis] = -1
        interior[(tuple(e), 1)] = -la
    return SchemeDef(name="leapfrog-2d", d=2, s=1, r=(1, 1), p=(1, 1), q=(0, 0), lam=tuple(courant),
                     interior=interior)


def shipped() -> dict[str, SchemeDef]:
    return {
        "leapfrog": leapfrog(),
        "lax_friedrichs": lax_friedrichs(),
        "ab3_centered": ab3_centered(),
    }
