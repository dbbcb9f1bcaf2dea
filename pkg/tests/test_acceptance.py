"""The eleven acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line; the lines are
also collected in the terminal summary.
"""

import numpy as np

from fdstab.catalog import ab3_centered, damped_leapfrog, lax_friedrichs, leapfrog, wave_leapfrog
from fdstab.cauchy import TorusState, balance_check_cauchy, energy_dissipation, local_densities_s1, run_cauchy, torus_energy
from fdstab.cli import main
from fdstab.forms import build_forms, build_forms_degree2, certify
from fdstab.ibvp import estimate_sweep, random_sources, superposition_solve
from fdstab.poly import Poly
from fdstab.scheme import classify_assumption1
from fdstab.trace import central_margin_scan, trace_scan, z_samples

from _strategies import random_degree2, random_stable_groups, spread_apart

SHIPPED = {"leapfrog": leapfrog(), "lax_friedrichs": lax_friedrichs(), "ab3_centered": ab3_centered()}
DTS = [1 / 50, 1 / 100, 1 / 200, 1 / 400]


def independent_gap(coeffs, qe, qd, v):
    a = np.asarray(coeffs, dtype=complex)
    nu = len(a) - 1
    worst = 0.0
    for n in range(len(v) - nu):
        w = v[n:n + nu + 1]
        pv, tpv = a @ w, (np.arange(nu + 1) * a) @ w
        lhs = 2 * (np.conj(tpv) * pv).real
        rhs = (nu * abs(pv) ** 2 + (w[1:].conj() @ qe @ w[1:]).real
               - (w[:-1].conj() @ qe @ w[:-1]).real + (w[:-1].conj() @ qd @ w[:-1]).real)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    return worst


def test_criterion_01_balance_identity(verdict_line):
    rng = np.random.default_rng(2024)
    res, qe_min, qd_min, count, multiple = 0.0, np.inf, np.inf, 0, 0
    while count < 1000:
        force = count % 2 == 0
        groups = random_stable_groups(rng, 6, force_multiple=force)
        if not spread_apart(groups):
            continue
        pair = build_forms(Poly.from_groups(groups, complex(rng.uniform(0.5, 2))), groups)
        cert = certify(pair, n_trajectories=5, seed=count)
        v = rng.standard_normal(pair.nu + 6) + 1j * rng.standard_normal(pair.nu + 6)
        res = max(res, cert.residual, independent_gap(pair.poly.coeffs, pair.qe, pair.qd, v))
        qe_min, qd_min = min(qe_min, cert.qe_min_eig), min(qd_min, cert.qd_min_eig)
        multiple += pair.regime == "multiple"
        count += 1
    ok = res <= 1e-10 and qe_min > 0 and qd_min >= -1e-12 and multiple >= 400
    assert verdict_line(1, "balance identity", ok,
                        f"{count} polys, {multiple} with repeated roots, residual {res:.1e}, "
                        f"min qe eig {qe_min:.1e}, min qd eig {qd_min:.1e}")


def test_criterion_02_degree2_forms(verdict_line):
    rng = np.random.default_rng(7)
    res, slack = 0.0, np.inf
    for _ in range(1000):
        a, b, c, z = random_degree2(rng)
        pair = build_forms_degree2(a, b, c)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        res = max(res, independent_gap([c, b, a], pair.qe, pair.qd, v))
        bound = (1 - abs(z[0]) ** 2) ** 2 * (1 - abs(z[1]) ** 2) ** 2 * abs(a) ** 4
        slack = min(slack, np.linalg.det(pair.qd).real - bound)
    ok = res <= 1e-12 and slack >= -1e-12
    assert verdict_line(2, "degree-2 explicit forms", ok, f"residual {res:.1e}, det minus bound >= {slack:.1e}")


def test_criterion_03_leapfrog_nondissipative(verdict_line):
    sch = leapfrog(0.8)
    te = torus_energy(sch, (128,))
    qd = np.abs(te.qd).max() / np.abs(te.qe).max()
    rng = np.random.default_rng(3)
    drift = run_cauchy(sch, rng.standard_normal((2, 128)), 1000).energy_drift
    ok = qd <= 1e-12 and drift <= 1e-10
    assert verdict_line(3, "leap-frog nondissipativity", ok, f"max |qd|/scale {qd:.1e}, energy drift {drift:.1e}")


def test_criterion_04_crossing_detection(verdict_line):
    ab3 = classify_assumption1(ab3_centered(), 256, 1e-6)
    thetas = [c.theta[0] for c in ab3.crossings]
    groups_ok = all(
        [(round(abs(g.value), 6), g.multiplicity) for g in c.groups] == [(0.0, 2), (1.0, 1)]
        and abs(c.groups[1].value - 1) <= 1e-6
        for c in ab3.crossings)
    places_ok = len(thetas) == 2 and abs(thetas[0]) <= 1e-6 and abs(thetas[1] - np.pi) <= 1e-6
    lf = classify_assumption1(leapfrog(), 256, 1e-6)
    ok = groups_ok and places_ok and lf.crossings == [] and ab3.verdict
    assert verdict_line(4, "crossing detection", ok,
                        f"AB3 crossings at {[round(t, 8) for t in thetas]}, leap-frog crossings {len(lf.crossings)}")


def test_criterion_05_torus_balance(verdict_line):
    rng = np.random.default_rng(5)
    worst = {}
    for name, sch in SHIPPED.items():
        worst[name] = max(balance_check_cauchy(sch, rng.standard_normal((sch.s + 2, 64)), cell_volume=1 / 64)
                          for _ in range(100))
    sch = ab3_centered()
    run = run_cauchy(sch, rng.standard_normal((3, 128)), 500)
    e = run.series.energy
    increase = np.diff(e).max() / e[0]
    ok = max(worst.values()) <= 1e-10 and increase <= 1e-12
    assert verdict_line(5, "torus balance law", ok,
                        f"max residual {max(worst.values()):.1e}, AB3 largest step change {increase:.1e} E0")


def test_criterion_06_local_densities(verdict_line):
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(100):
        sch = leapfrog() if k % 2 else damped_leapfrog()
        vn, vn1 = rng.standard_normal((2, 64))
        state = TorusState.create(sch, [vn, vn1])
        e, d = energy_dissipation(sch, state)
        ej, dj = local_densities_s1(sch, vn, vn1)
        worst = max(worst, abs(state.cell_volume * ej.sum() - e) / e, abs(state.cell_volume * dj.sum() - d) / e)
    ok = worst <= 1e-10
    assert verdict_line(6, "local densities", ok, f"max relative mismatch {worst:.1e} over 100 states")


def test_criterion_07_companion_splitting(verdict_line):
    zs = z_samples(1000, np.e, seed=0)
    margins, residual = [], 0.0
    for lam in (0.5, 0.8):
        scan = central_margin_scan(leapfrog(lam, velocity=1.0), zs)
        margins.append(scan.min_margin)
        residual = max(residual, scan.max_projector_residual)
    planted = central_margin_scan(wave_leapfrog(), zs)
    ok = min(margins) > 1e-3 and residual <= 1e-10 and not planted.verdict
    assert verdict_line(7, "companion splitting", ok,
                        f"margins {[round(m, 6) for m in margins]}, projector residual {residual:.1e}, "
                        f"planted margin {planted.min_margin:.1e}")


def test_criterion_08_trace_inequality(verdict_line):
    scan = trace_scan(leapfrog(), 20000, P1=5, seed=0)
    ok = np.isfinite(scan.max_ratio) and scan.doubling_factor <= 2
    assert verdict_line(8, "trace inequality", ok,
                        f"max ratio {scan.max_ratio:.4g} at 10^4 samples {scan.prefix_max:.4g}, "
                        f"doubling factor {scan.doubling_factor:.3f}")


def test_criterion_09_semigroup_ratios(verdict_line):
    sch = leapfrog()
    ibvp = estimate_sweep(sch, DTS, [0.5, 2.0], "ibvp", watch=("semigroup",))
    aux = estimate_sweep(sch, DTS, [0.5, 2.0], "aux", watch=("semigroup", "aux_estimate"))
    spread = max(list(ibvp.spreads.values()) + list(aux.spreads.values()))
    ok = ibvp.verdict and aux.verdict
    assert verdict_line(9, "semigroup ratios", ok, f"largest max/min over dt {spread:.4f} (limit 1.5)")


def test_criterion_10_superposition(verdict_line):
    rng = np.random.default_rng(10)
    steps = 40
    worst = 0.0
    for k in range(20):
        sch = leapfrog() if k % 2 else ab3_centered()
        J = 12 + steps * 2 + 10
        worst = max(worst, superposition_solve(sch, random_sources(sch, steps, J, rng), steps, 0.01, J).max_deviation)
    ok = worst <= 1e-10
    assert verdict_line(10, "superposition", ok, f"max relative deviation {worst:.1e} over 20 instances")


def test_criterion_11_determinism(tmp_path, verdict_line):
    runs = [
        ["analyze", "--scheme", "ab3_centered"],
        ["forms", "--scheme", "ab3_centered", "--theta", "0"],
        ["cauchy", "--scheme", "leapfrog", "--steps", "100"],
        ["ibvp", "--scheme", "leapfrog", "--dt", "1/50,1/100"],
        ["aux", "--scheme", "leapfrog", "--dt", "1/50,1/100"],
        ["trace", "--scheme", "leapfrog", "--samples", "200", "--trace-samples", "1000"],
        ["superpose", "--scheme", "lax_friedrichs", "--instances", "5"],
    ]
    identical = 0
    for k, args in enumerate(runs):
        paths = [tmp_path / f"{k}_{i}.json" for i in range(2)]
        for p in paths:
            main(args + ["--seed", "11", "--out", str(p)])
        identical += paths[0].read_bytes() == paths[1].read_bytes()
    ok = identical == len(runs)
    assert verdict_line(11, "determinism", ok, f"{identical}/{len(runs)} reports byte-identical")
