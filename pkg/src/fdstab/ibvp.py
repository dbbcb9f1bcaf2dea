"""Half-line initial boundary value problems (one space dimension).

The scheme is solved on cells ``j = lo, ..., J`` with ``lo = 1 - r1``::

    sum_sigma Q_sigma u_j^{n+sigma} = dt F_j^{n+s+1}              1 <= j <= J - p1
    u_j^{n+s+1} + sum_sigma B_{j,sigma} u_1^{n+sigma} = g_j^{n+s+1}   lo <= j <= 0
    u_j^{n+s+1} = 0                                              J - p1 < j <= J

Values outside ``[lo, J]`` are zero.  The auxiliary absorbing problem replaces
the boundary rows by ``M u = g`` on ``j <= 0`` (truncated below with a
buffer) and keeps ``L u = 0`` for ``j >= 1``.

Source arrays are indexed by time level: ``F[n]`` covers ``j = 1..J`` and
``g[n]`` covers the boundary rows; entries for ``n <= s`` are unused.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConfigError, EmptyRun, SingularStep, TruncationBreach
from .scheme import SchemeDef

AUX_BUFFER = 20
SWEEP_SPREAD = 1.5


def _stencil(scheme: SchemeDef, sigma: int, weight: float = 1.0) -> dict[int, float]:
    return {off[0]: weight * v for off, v in scheme.interior_offsets(sigma).items()}


def _apply(coeffs: dict[int, float], v: np.ndarray, lo: int, j_from: int, j_to: int) -> np.ndarray:
    """``sum_l a_l v_{j+l}`` for ``j_from <= j <= j_to``; ``v`` starts at cell ``lo``
    and vanishes outside its range."""
    n = j_to - j_from + 1
    out = np.zeros(max(n, 0))
    if n <= 0 or not coeffs:
        return out
    pad = max(abs(l) for l in coeffs)
    vp = np.concatenate((np.zeros(pad), v, np.zeros(pad)))
    start = j_from - lo + pad
    for l, a in coeffs.items():
        out += a * vp[start + l:start + l + n]
    return out


@dataclass
class HalfSpaceState:
    """The ``s + 1`` stored levels on cells ``lo..J``, oldest first."""

    levels: np.ndarray
    lo: int
    J: int
    dt: float
    dx: float
    gamma: float = 0.0
    step_index: int = 0

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        if self.levels.shape[-1] != self.J - self.lo + 1:
            raise ValueError("level length does not match the cell range")
        if not np.all(np.isfinite(self.levels)):
            raise ValueError("half-space state contains non-finite values")


@dataclass
class IBVPSources:
    """Initial levels ``f`` (on ``lo..J``), interior forcing ``F`` and boundary data ``g``."""

    f: np.ndarray
    F: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        for name in ("F", "g"):
            val = getattr(self, name)
            if val is not None:
                val = np.asarray(val, dtype=float)
                if not np.all(np.isfinite(val)):
                    raise ValueError(f"source {name} contains non-finite values")
                setattr(self, name, val)


class HalfSpaceProblem:
    """Linear algebra of one time step on a truncated half line.

    ``kind="ibvp"`` uses the scheme's boundary conditions; ``kind="aux"`` uses
    the multiplier ``M`` on ``j <= 0`` with ``buffer`` extra cells below.
    """

    def __init__(self, scheme: SchemeDef, J: int, kind: str = "ibvp", buffer: int = AUX_BUFFER):
        if scheme.d != 1:
            raise ConfigError("half-space simulations are one-dimensional")
        if kind not in ("ibvp", "aux"):
            raise ValueError(f"unknown problem kind {kind!r}")
        r1, p1, s = scheme.r[0], scheme.p[0], scheme.s
        if J < p1 + 1:
            raise ConfigError(f"truncation index J={J} must be at least p1 + 1 = {p1 + 1}")
        self.scheme, self.J, self.kind, self.buffer = scheme, J, kind, buffer
        self.lo = 1 - r1 if kind == "ibvp" else 1 - r1 - p1 - buffer
        self.size = J - self.lo + 1
        self.last_interior = J - p1
        self.explicit = scheme.is_explicit()
        self.Q = [_stencil(scheme, sigma) for sigma in range(s + 2)]
        if kind == "aux":
            self.M = [_stencil(scheme, sigma, sigma) for sigma in range(s + 2)]
        else:
            self.B = {j1: [{off[0]: v for off, v in scheme.boundary_offsets(j1, sigma).items()}
                           for sigma in range(s + 2)]
                      for j1 in range(1 - r1, 1)}
        if kind == "ibvp" and any(1 + l > self.last_interior for b in self.B.values() for l in b[s + 1]):
            raise ConfigError("boundary stencil reaches past the interior rows; increase J")
        self._lu = None if self.explicit else self._factorize()

    @property
    def boundary_rows(self) -> range:
        return range(self.lo, 1)

    def _factorize(self):
        s, lo = self.scheme.s, self.lo
        rows, cols, vals = [], [], []

        def put(j, coeffs, base):
            for l, a in coeffs.items():
                c = base + l - lo
                if 0 <= c < self.size:
                    rows.append(j - lo)
                    cols.append(c)
                    vals.append(a)

        for j in range(1, self.last_interior + 1):
            put(j, self.Q[s + 1], j)
        for j in self.boundary_rows:
            if self.kind == "aux":
                put(j, self.M[s + 1], j)
            else:
                put(j, {0: 1.0}, j)
                # boundary couplings are anchored at cell 1, not at the row
                for l, b in self.B[j][s + 1].items():
                    rows.append(j - lo)
                    cols.append(1 + l - lo)
                    vals.append(b)
        for j in range(self.last_interior + 1, self.J + 1):
            put(j, {0: 1.0}, j)
        a = sp.csc_matrix((vals, (rows, cols)), shape=(self.size, self.size))
        try:
            return splu(a)
        except RuntimeError as exc:
            raise SingularStep(f"step matrix is singular: {exc}") from None

    def rhs(self, levels: np.ndarray, F_new: Optional[np.ndarray], g_new: Optional[np.ndarray],
            dt: float) -> np.ndarray:
        s, lo = self.scheme.s, self.lo
        out = np.zeros(self.size)
        interior = slice(1 - lo, self.last_interior - lo + 1)
        acc = np.zeros(self.last_interior)
        for sigma in range(s + 1):
            acc -= _apply(self.Q[sigma], levels[sigma], lo, 1, self.last_interior)
        if F_new is not None and self.kind == "ibvp":
            acc += dt * F_new[:self.last_interior]
        out[interior] = acc
        bnd = np.zeros(1 - lo)
        if g_new is not None:
            bnd += g_new
        if self.kind == "aux":
            for sigma in range(1, s + 1):
                bnd -= _apply(self.M[sigma], levels[sigma], lo, lo, 0)
        else:
            for j in self.boundary_rows:
                for sigma in range(s + 1):
                    for l, b in self.B[j][sigma].items():
                        bnd[j - lo] -= b * levels[sigma][1 + l - lo]
        out[:1 - lo] = bnd
        return out

    def solve(self, levels: np.ndarray, F_new=None, g_new=None, dt: float = 1.0) -> np.ndarray:
        """The new level ``u^{n+s+1}`` from the stored levels ``u^n..u^{n+s}``."""
        s, lo = self.scheme.s, self.lo
        if self.explicit:
            tail = self.last_interior + 1 - self.scheme.r[0] - lo
            if any(np.any(lv[tail:] != 0) for lv in levels):
                raise TruncationBreach(f"nonzero values within reach of the far end J={self.J}")
        b = self.rhs(levels, F_new, g_new, dt)
        if not self.explicit:
            x = self._lu.solve(b)
            if not np.all(np.isfinite(x)):
                raise SingularStep("step solve produced non-finite values")
            return x
        x = b.copy()
        if self.kind == "aux":
            x[:1 - lo] /= s + 1
        else:
            for j in self.boundary_rows:
                for l, v in self.B[j][s + 1].items():
                    x[j - lo] -= v * x[1 + l - lo]
        x[self.last_interior + 1 - lo:] = 0.0
        return x

    def residuals(self, window: np.ndarray, F_new=None, g_new=None, dt: float = 1.0) -> tuple[float, float]:
        """Relative residuals of the interior and boundary rows on ``s + 2`` levels."""
        s, lo = self.scheme.s, self.lo
        new = window[-1]
        b = self.rhs(window[:-1], F_new, g_new, dt)
        interior = _apply(self.Q[s + 1], new, lo, 1, self.last_interior) - b[1 - lo:self.last_interior - lo + 1]
        if self.kind == "aux":
            bnd = _apply(self.M[s + 1], new, lo, lo, 0) - b[:1 - lo]
        else:
            bnd = new[:1 - lo].copy()
            for j in self.boundary_rows:
                for l, v in self.B[j][s + 1].items():
                    bnd[j - lo] += v * new[1 + l - lo]
            bnd -= b[:1 - lo]
        scale = 1.0 + np.abs(window).max()
        return float(np.abs(interior).max() / scale), float(np.abs(bnd).max() / scale) if bnd.size else 0.0


_PROBLEMS: dict = {}


def _problem(scheme: SchemeDef, J: int, kind: str, buffer: int = AUX_BUFFER) -> HalfSpaceProblem:
    key = (id(scheme), J, kind, buffer)
    hit = _PROBLEMS.get(key)
    if hit is None or hit.scheme is not scheme:
        hit = HalfSpaceProblem(scheme, J, kind, buffer)
        _PROBLEMS[key] = hit
    return hit


def _advance(problem: HalfSpaceProblem, state: HalfSpaceState, F_new, g_new) -> HalfSpaceState:
    new = problem.solve(state.levels, F_new, g_new, state.dt)
    levels = np.concatenate((state.levels[1:], new[None]), axis=0)
    return HalfSpaceState(levels, state.lo, state.J, state.dt, state.dx, state.gamma, state.step_index + 1)


def step_ibvp(scheme: SchemeDef, state: HalfSpaceState, F_new=None, g_new=None) -> HalfSpaceState:
    """One step of the boundary value problem; ``F_new`` covers ``j = 1..J``
    and ``g_new`` the boundary cells ``1 - r1..0``."""
    return _advance(_problem(scheme, state.J, "ibvp"), state, F_new, g_new)


def step_aux(scheme: SchemeDef, state: HalfSpaceState, g_new=None, buffer: int = AUX_BUFFER) -> HalfSpaceState:
    """One step of the absorbing problem; ``g_new`` covers ``j = lo..0``."""
    return _advance(_problem(scheme, state.J, "aux", buffer), state, None, g_new)


# -- runs --------------------------------------------------------------------

@dataclass(frozen=True)
class HalfSpaceRun:
    """Every level ``u^0, ..., u^{n_steps+s}`` on cells ``lo..J``."""

    history: np.ndarray
    lo: int
    J: int
    dt: float
    dx: float
    kind: str
    sources: IBVPSources
    max_residual: float = 0.0
    s: int = 0

    @property
    def n_steps(self) -> int:
        return self.history.shape[0] - self.s - 1

    def cells(self) -> np.ndarray:
        return np.arange(self.lo, self.J + 1)

    def at(self, j_from: int, j_to: int) -> np.ndarray:
        return self.history[:, j_from - self.lo:j_to - self.lo + 1]


def _source_row(arr: Optional[np.ndarray], n: int) -> Optional[np.ndarray]:
    if arr is None or n >= arr.shape[0]:
        return None
    return arr[n]


def run_halfspace(scheme: SchemeDef, sources: IBVPSources, n_steps: int, dt: float, J: int,
                  kind: str = "ibvp", buffer: int = AUX_BUFFER, check_residuals: bool = False) -> HalfSpaceRun:
    """Run ``n_steps`` steps from the initial levels in ``sources.f``.

    For ``kind="aux"`` the initial levels may be given on ``1 - r1..J`` (they
    are extended by zero below) or on the full aux range.
    """
    problem = _problem(scheme, J, kind, buffer)
    s, lo = scheme.s, problem.lo
    f = np.atleast_2d(sources.f)
    if f.shape[0] != s + 1:
        raise ConfigError(f"need {s + 1} initial levels, got {f.shape[0]}")
    if f.shape[1] != problem.size:
        missing = problem.size - f.shape[1]
        if kind != "aux" or missing < 0:
            raise ConfigError(f"initial levels must cover {problem.size} cells, got {f.shape[1]}")
        f = np.concatenate((np.zeros((s + 1, missing)), f), axis=1)
    dx = dt / scheme.lam[0]
    state = HalfSpaceState(f, lo, J, dt, dx)
    history = [lv for lv in f]
    worst = 0.0
    for k in range(n_steps):
        n = k + s + 1
        F_new = _source_row(sources.F, n)
        g_new = _source_row(sources.g, n)
        if kind == "aux" and g_new is not None and g_new.shape[0] != 1 - lo:
            g_new = np.concatenate((np.zeros(1 - lo - g_new.shape[0]), g_new))
        new = problem.solve(state.levels, F_new, g_new, dt)
        if check_residuals:
            window = np.concatenate((state.levels, new[None]), axis=0)
            worst = max(worst, *problem.residuals(window, F_new, g_new, dt))
        state = HalfSpaceState(np.concatenate((state.levels[1:], new[None]), axis=0), lo, J, dt, dx,
                               step_index=k + 1)
        history.append(new)
    return HalfSpaceRun(np.array(history), lo, J, dt, dx, kind, sources, worst, s)


def run_ibvp(scheme: SchemeDef, sources: IBVPSources, n_steps: int, dt: float, J: int,
             check_residuals: bool = False) -> HalfSpaceRun:
    return run_halfspace(scheme, sources, n_steps, dt, J, "ibvp", check_residuals=check_residuals)


def run_aux(scheme: SchemeDef, sources: IBVPSources, n_steps: int, dt: float, J: int,
            buffer: int = AUX_BUFFER, check_residuals: bool = False) -> HalfSpaceRun:
    return run_halfspace(scheme, sources, n_steps, dt, J, "aux", buffer, check_residuals)


# -- estimates ---------------------------------------------------------------

@dataclass(frozen=True)
class EstimateReport:
    """Left and right sides of the weighted stability estimates and their ratios.

    * ``strong_stability``: weighted l2 norm plus boundary traces over weighted
      interior forcing plus boundary data (only for zero initial data).
    * ``semigroup``: ``sup_n |||u^n|||^2`` over ``sum_sigma |||f^sigma|||^2``
      (only without forcing and boundary data).
    * ``full``: all three left-hand terms over all three data terms.
    * ``trace_sum``: weighted trace sum over ``1 - r1..P1`` over the data terms.
    * ``aux_estimate``: the absorbing-problem version of ``full`` (whole line
      norms, traces up to ``P1``, boundary data summed over ``j <= 0``).
    """

    ratios: dict
    terms: dict
    gamma: float
    dt: float
    J: int
    n_steps: int
    P1: int
    kind: str

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(num: float, den: float) -> float:
    if num == 0:
        return 0.0
    return num / den if den > 0 else math.inf


def measure_estimates(scheme: SchemeDef, run: HalfSpaceRun, gamma: float, P1: Optional[int] = None) -> EstimateReport:
    """Discrete weighted estimates with weights ``dt exp(-2 gamma n dt)``."""
    if run.n_steps < 1:
        raise EmptyRun("run has no time steps")
    if gamma <= 0:
        raise ConfigError("gamma must be positive")
    s, r1, p1 = scheme.s, scheme.r[0], scheme.p[0]
    P1 = p1 if P1 is None else P1
    dt, dx = run.dt, run.dx
    u = run.history
    n = np.arange(u.shape[0])
    decay = np.exp(-2 * gamma * n * dt)
    w = dt * decay
    norms = dx * np.sum(u ** 2, axis=1)
    pre = gamma / (gamma * dt + 1)
    late = n >= s + 1
    trace_p1 = np.sum(run.at(1 - r1, p1) ** 2, axis=1)
    trace_P1 = np.sum(run.at(1 - r1, P1) ** 2, axis=1)

    src = run.sources
    f = np.atleast_2d(src.f)
    f_term = float(dx * np.sum(f ** 2))
    F_term = 0.0
    if src.F is not None and run.kind == "ibvp":
        Fn = np.zeros(u.shape[0])
        m = min(len(Fn), src.F.shape[0])
        Fn[:m] = dx * np.sum(src.F[:m] ** 2, axis=1)
        F_term = float((gamma * dt + 1) / gamma * np.sum((w * Fn)[late]))
    g_term = 0.0
    if src.g is not None:
        gn = np.zeros(u.shape[0])
        m = min(len(gn), src.g.shape[0])
        gn[:m] = np.sum(src.g[:m] ** 2, axis=1)
        g_term = float(np.sum((w * gn)[late]))

    sup_w = float(np.max(decay * norms))
    l2_all = float(pre * np.sum(w * norms))
    trace_all = float(np.sum(w * trace_p1))
    l2_late = float(pre * np.sum((w * norms)[late]))
    trace_late = float(np.sum((w * trace_p1)[late]))
    trace_P1_all = float(np.sum(w * trace_P1))
    data = f_term + F_term + g_term
    terms = {
        "sup_weighted_norm": sup_w, "weighted_l2": l2_all, "weighted_trace": trace_all,
        "weighted_trace_P1": trace_P1_all, "sup_norm": float(norms.max()),
        "initial_data": f_term, "interior_forcing": F_term, "boundary_data": g_term,
    }
    ratios = {
        "full": _ratio(sup_w + l2_all + trace_all, data),
        "trace_sum": _ratio(trace_P1_all, data),
    }
    # each ratio is reported only for the data it is stated for
    if f_term == 0:
        ratios["strong_stability"] = _ratio(l2_late + trace_late, F_term + g_term)
    if F_term == 0 and g_term == 0:
        ratios["semigroup"] = _ratio(float(norms.max()), f_term)
    if run.kind == "aux":
        ratios["aux_estimate"] = _ratio(sup_w + l2_all + trace_P1_all, f_term + g_term)
    return EstimateReport(ratios, terms, gamma, dt, run.J, run.n_steps, P1, run.kind)


def write_series_csv(run: HalfSpaceRun, gamma: float, path: Union[str, Path], P1: Optional[int] = None,
                     r1: int = 1) -> None:
    """Per level: weighted interior norm, weighted trace sum and the running
    maximum of ``|||u^n|||^2``."""
    u = run.history
    n = np.arange(u.shape[0])
    w = run.dt * np.exp(-2 * gamma * n * run.dt)
    norms = run.dx * np.sum(u ** 2, axis=1)
    hi = P1 if P1 is not None else 1
    trace = np.sum(run.at(1 - r1, hi) ** 2, axis=1)
    sup = np.maximum.accumulate(norms)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "weighted_norm", "weighted_trace", "sup_norm"])
        for row in zip(n, w * norms, w * trace, sup):
            writer.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])


# -- test data and sweeps ----------------------------------------------------

def bump(x: np.ndarray, center: float = 0.5, width: float = 0.4) -> np.ndarray:
    """Compactly supported ``cos^4`` bump."""
    y = (x - center) / width
    return np.where(np.abs(y) < 0.5, np.cos(np.pi * y) ** 4, 0.0)


def transport_levels(scheme: SchemeDef, dt: float, lo: int, J: int, velocity: float = -1.0,
                     center: float = 0.5, width: float = 0.4) -> np.ndarray:
    """Exact transport of a bump sampled at the ``s + 1`` initial levels."""
    dx = dt / scheme.lam[0]
    x = np.arange(lo, J + 1) * dx
    return np.array([bump(x - velocity * sigma * dt, center, width) for sigma in range(scheme.s + 1)])


def default_extent(scheme: SchemeDef, dt: float, t_final: float, reach: float = 1.0) -> tuple[int, int]:
    """``(n_steps, J)`` so that nothing reaches the far end before ``t_final``."""
    dx = dt / scheme.lam[0]
    n_steps = int(round(t_final / dt))
    J = int(math.ceil(reach / dx)) + n_steps * scheme.r[0] + 4 * (scheme.p[0] + scheme.r[0]) + 8
    return n_steps, J


@dataclass(frozen=True)
class SweepPoint:
    dt: float
    gamma: float
    ratios: dict


@dataclass(frozen=True)
class SweepReport:
    kind: str
    points: list
    spreads: dict
    threshold: float = SWEEP_SPREAD

    @property
    def verdict(self) -> bool:
        return all(v <= self.threshold for v in self.spreads.values())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "spreads": self.spreads,
            "verdict": "pass" if self.verdict else "fail",
            "points": [asdict(p) for p in self.points],
        }


def _spread(values: Sequence[float]) -> float:
    vals = [v for v in values if v > 0]
    if not vals:
        return 1.0
    return max(vals) / min(vals)


def estimate_sweep(scheme: SchemeDef, dts: Sequence[float], gammas: Sequence[float], kind: str = "ibvp",
                   t_final: float = 1.5, P1: Optional[int] = None,
                   watch: Sequence[str] = ("semigroup",)) -> SweepReport:
    """Measured ratios over a grid of ``(dt, gamma)`` for bump initial data.

    The spread of a ratio is its max/min over the ``dt`` values at fixed
    ``gamma``; the sweep passes when every watched spread is at most 1.5.
    """
    points = []
    for dt in dts:
        n_steps, J = default_extent(scheme, dt, t_final)
        lo = 1 - scheme.r[0]
        f = transport_levels(scheme, dt, lo, J)
        run = run_halfspace(scheme, IBVPSources(f), n_steps, dt, J, kind)
        for gamma in gammas:
            rep = measure_estimates(scheme, run, gamma, P1)
            points.append(SweepPoint(dt, gamma, rep.ratios))
    spreads = {}
    for name in watch:
        for gamma in gammas:
            spreads[f"{name}@gamma={gamma:g}"] = _spread([p.ratios[name] for p in points if p.gamma == gamma])
    return SweepReport(kind, points, spreads)


# -- superposition -----------------------------------------------------------

@dataclass(frozen=True)
class Superposition:
    direct: HalfSpaceRun
    aux: HalfSpaceRun
    bvp: HalfSpaceRun
    max_deviation: float


def superposition_solve(scheme: SchemeDef, sources: IBVPSources, n_steps: int, dt: float, J: int,
                        buffer: int = AUX_BUFFER) -> Superposition:
    """Split a boundary value problem into the absorbing problem carrying the
    initial data and a boundary value problem with zero initial data.

    The absorbing solution satisfies ``L u = 0`` for ``j >= 1``, so the
    remainder keeps the interior forcing; its boundary data is ``g`` minus
    the boundary operator applied to the absorbing solution.
    """
    s, lo = scheme.s, 1 - scheme.r[0]
    direct = run_ibvp(scheme, sources, n_steps, dt, J)
    aux = run_aux(scheme, IBVPSources(sources.f), n_steps, dt, J, buffer)
    ua = aux.at(lo, J)
    problem = _problem(scheme, J, "ibvp")
    n_levels = n_steps + s + 1
    g_bvp = np.zeros((n_levels, 1 - lo))
    if sources.g is not None:
        m = min(n_levels, sources.g.shape[0])
        g_bvp[:m] = sources.g[:m]
    for n in range(s + 1, n_levels):
        for j in problem.boundary_rows:
            corr = ua[n, j - lo]
            for sigma in range(s + 2):
                for l, b in problem.B[j][sigma].items():
                    corr += b * ua[n - s - 1 + sigma, 1 + l - lo]
            g_bvp[n, j - lo] -= corr
    zero = np.zeros_like(np.atleast_2d(sources.f))
    bvp = run_ibvp(scheme, IBVPSources(zero, sources.F, g_bvp), n_steps, dt, J)
    total = ua + bvp.history
    scale = max(np.abs(direct.history).max(), np.finfo(float).tiny)
    dev = float(np.abs(direct.history - total).max() / scale)
    return Superposition(direct, aux, bvp, dev)


def random_sources(scheme: SchemeDef, n_steps: int, J: int, rng: np.random.Generator,
                   support: int = 12) -> IBVPSources:
    """Gaussian initial levels, forcing and boundary data supported near the
    boundary (``j <= support``), so that ``J`` well beyond
    ``support + n_steps * (r1 + p1)`` keeps the far end untouched."""
    r1, s = scheme.r[0], scheme.s
    lo = 1 - r1
    n_levels = n_steps + s + 1
    f = np.zeros((s + 1, J - lo + 1))
    f[:, :support - lo + 1] = rng.standard_normal((s + 1, support - lo + 1))
    F = np.zeros((n_levels, J))
    F[:, :support] = rng.standard_normal((n_levels, support))
    g = rng.standard_normal((n_levels, 1 - lo))
    return IBVPSources(f, F, g)


def report_json(obj: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
