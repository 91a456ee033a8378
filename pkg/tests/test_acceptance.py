"""Acceptance suite at desk scale: L = 64, N = 2^15, n in {4..8}, (2, 2, 2).

One test per criterion; each prints a single PASS/FAIL line (run with -s to
see them on success).  Everything here is rate- or identity-based; the free
constants of the reproduced inequalities are measured, never assumed.
"""

import math

import numpy as np
import pytest
import scipy.integrate

from chlab.constructions import (
    abs_cos_mean,
    bump_profile,
    cos_packet_norm,
    cross_term_besov_sup,
    high_wave,
    low_bump,
)
from chlab.evolution import SolverConfig, Trajectory, solve, solve_transport
from chlab.experiments import (
    ExperimentConfig,
    persist,
    run_besov_scaling,
    run_flow_approximation,
    run_lower_bounds,
    run_product_probes,
    run_separation,
    run_taylor_remainder,
    run_transport_bound,
)
from chlab.littlewood_paley import (
    BesovParams,
    LPFamily,
    besov_norm,
    block_lp_profile,
    build_lp_family,
)
from chlab.spectral import (
    Field,
    Spectrum,
    lp_norm,
    make_grid,
    random_band_limited,
    to_field,
    to_spectrum,
)

DESK = ExperimentConfig()  # L=64, N=2**15, n 4..8, (2,2,2), T=0.5
GRID = DESK.grid
PARAMS = DESK.params


def report(criterion: str, ok: bool, detail: str):
    print(f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def scaling_result():
    return run_besov_scaling(DESK)


@pytest.fixture(scope="module")
def lower_bounds_result():
    return run_lower_bounds(DESK)


@pytest.fixture(scope="module")
def prop1_result():
    return run_flow_approximation(DESK)


@pytest.fixture(scope="module")
def prop2_result():
    return run_taylor_remainder(DESK)


@pytest.fixture(scope="module")
def main_result():
    return run_separation(DESK)


def test_criterion_1_partition_and_reconstruction():
    fam = build_lp_family()
    deviation = float(np.max(np.abs(fam.partition_values(GRID.xi) - 1.0)))

    rng = np.random.default_rng(11)
    band = LPFamily.reconstruction_band(GRID) * 0.98
    worst = 0.0
    for _ in range(100):
        u = random_band_limited(GRID, rng, band_xi=band)
        spec = np.fft.rfft(u.samples)
        total = np.zeros(GRID.N)
        xi_half = (np.pi / GRID.L) * np.arange(GRID.N // 2 + 1)
        mult = fam.chi(xi_half)
        for j in range(0, LPFamily.j_max(GRID) + 1):
            mult = mult + fam.psi_ring(xi_half * 2.0 ** (-j))
        total = np.fft.irfft(spec * mult, n=GRID.N)
        err = np.max(np.abs(total - u.samples)) / np.max(np.abs(u.samples))
        worst = max(worst, err)
    ok = deviation <= 1e-12 and worst <= 1e-10
    report(
        "1",
        ok,
        f"partition deviation {deviation:.2e} (<=1e-12), "
        f"reconstruction {worst:.2e} (<=1e-10, 100 fields)",
    )


def test_criterion_2_high_wave_block_identities(scaling_result):
    worst_off_block = 0.0
    for n in DESK.n_range:
        f = high_wave(n, PARAMS.s, GRID)
        profile = block_lp_profile(f, 2.0)
        own = profile[n + 1]  # index j = -1 sits at 0
        off = max(
            v for j, v in zip(range(-1, profile.size - 1), profile) if j != n
        )
        worst_off_block = max(worst_off_block, off / own)

    slopes_ok = all(
        scaling_result.verdicts[f"slope_sigma_{sig:g}"] == "pass"
        for sig in (1.0, 2.0, 3.0)
    )
    bound_ok = scaling_result.verdicts["profile_bound"] == "pass"
    slopes = {k: round(v.slope, 4) for k, v in scaling_result.fits.items()}
    ok = worst_off_block <= 1e-10 and slopes_ok and bound_ok
    report(
        "2",
        ok,
        f"off-block energy {worst_off_block:.2e} (<=1e-10), slopes {slopes} "
        f"within +-0.05 of (sigma - s), profile bound {bound_ok}",
    )


def test_criterion_3_cos_averaging_and_packet_norm():
    half_err = max(
        abs(abs_cos_mean(2.0, k * math.pi) - 0.5) for k in (1, 3, 10, 50)
    )
    conv_ok = all(
        abs(abs_cos_mean(1.0, X) - 2.0 / math.pi) <= 5.0 / X
        for X in (10.0, 100.0, 1000.0)
    )
    phi = bump_profile(GRID).phi.samples
    oracle = 0.5 * scipy.integrate.simpson(phi**4, dx=GRID.dx)
    packet_ok = True
    worst_rel = 0.0
    for n in (6, 7, 8):
        v = cos_packet_norm(n, 2.0, GRID)
        rel = abs(v**2 - oracle) / oracle
        worst_rel = max(worst_rel, rel)
        packet_ok &= rel <= 0.05
    ok = half_err <= 1e-14 and conv_ok and packet_ok
    report(
        "3",
        ok,
        f"|mean(2,k*pi) - 1/2| = {half_err:.1e} (machine), 2/pi convergence "
        f"{conv_ok}, packet norm vs quadrature oracle off by {worst_rel:.2%} "
        f"(<=5%, n>=6)",
    )


def test_criterion_4_cross_term_lower_bound(lower_bounds_result):
    res = lower_bounds_result
    identity_ok = res.verdicts["single_block_identity"] == "pass"
    m_tilde = res.constants["M_tilde"]
    spread = res.constants["M_tilde_spread"]
    ok = identity_ok and m_tilde > 0 and spread <= 0.10
    report(
        "4",
        ok,
        f"single-block identity {identity_ok}, M_tilde = {m_tilde:.5f} > 0, "
        f"spread over n in {{6,7,8}} = {spread:.2%} (<=10%)",
    )


def test_criterion_5_solver_self_validation():
    g = make_grid(4 * np.pi, 256)
    rng = np.random.default_rng(5)
    u0 = 0.8 * random_band_limited(g, rng, band_xi=3.0, decay=1.5)
    traj = solve(u0, SolverConfig(T=0.5, dt=0.005))
    means = np.array(traj.diagnostics["mean"])
    h1 = np.array(traj.diagnostics["h1_energy"])
    mass_drift = float(np.max(np.abs(means - means[0]))) / max(abs(means[0]), 1.0)
    h1_drift = float(np.max(np.abs(h1 - h1[0]))) / h1[0]

    u0r = 0.5 * random_band_limited(g, np.random.default_rng(6), band_xi=2.0, decay=1.5)
    T = 0.25
    ref = solve(u0r, SolverConfig(T=T, dt=T / 512, record_times=(0.0, T))).states[-1]
    errs = [
        lp_norm(
            solve(u0r, SolverConfig(T=T, dt=T / m, record_times=(0.0, T))).states[-1]
            - ref,
            2,
        )
        for m in (8, 16, 32)
    ]
    order = min(math.log2(errs[i] / errs[i + 1]) for i in range(2))

    c, T2 = 0.5, 0.5
    f0 = random_band_limited(g, np.random.default_rng(7), band_xi=2.0, decay=2.0)
    const_state = Field(g, np.full(g.N, c))
    vel = Trajectory(
        grid=g, times=(0.0, T2), states=(const_state, const_state), diagnostics={}
    )
    moved = solve_transport(
        f0, vel, cfg=SolverConfig(T=T2, dt=1e-3, record_times=(0.0, T2))
    ).states[-1]
    shifted = to_field(
        Spectrum(g, to_spectrum(f0).coefficients * np.exp(-1j * g.xi * c * T2))
    )
    trans_err = lp_norm(moved - shifted, math.inf) / lp_norm(f0, math.inf)

    ok = mass_drift <= 1e-8 and h1_drift <= 1e-8 and order >= 3.8 and trans_err <= 1e-8
    report(
        "5",
        ok,
        f"mass drift {mass_drift:.1e}, H1 drift {h1_drift:.1e} (<=1e-8), "
        f"RK4 order {order:.2f} (>=3.8), translation error {trans_err:.1e} (<=1e-8)",
    )


def test_criterion_6_flow_stays_near_wave(prop1_result):
    res = prop1_result
    slope = res.fits["flow_distance"].slope
    target = -(PARAMS.s - 1.5) / 2.0 + 0.15
    lo = res.fits["norm_sigma_1"].slope
    hi = res.fits["norm_sigma_3"].slope
    ok = (
        slope <= target
        and abs(lo + 1.0) <= 0.15
        and abs(hi - 1.0) <= 0.15
    )
    report(
        "6",
        ok,
        f"flow-distance slope {slope:.3f} (<= {target:.2f}), satellite norm "
        f"slopes {lo:.3f} / {hi:.3f} within +-0.15 of -1 / +1",
    )


def test_criterion_7_taylor_remainder(prop2_result):
    res = prop2_result
    pooled = res.constants["pooled_fit_residual"]
    offset_ok = res.verdicts["offset_decay"] == "pass"
    offset_slope = (
        res.fits["offset_decay"].slope if "offset_decay" in res.fits else None
    )
    tslope = res.fits["time_slope_top_n"].slope
    ok = (
        pooled <= 0.10
        and offset_ok
        and abs(tslope - 2.0) <= 0.1
        and res.verdicts["remainder_vanishes_at_zero"] == "pass"
    )
    report(
        "7",
        ok,
        f"pooled quadratic-fit residual {pooled:.2%} (<=10%), offset decay "
        f"slope {offset_slope if offset_slope is None else round(offset_slope, 3)} "
        f"(<= -0.35), time slope at n_max {tslope:.3f} in 2.0+-0.1 over "
        f"t in {DESK.c0_window}",
    )


def test_criterion_8_separation(main_result):
    res = main_result
    d0_slope = res.fits["initial_distance"].slope
    c0 = res.constants["c0"]
    ratio = res.constants["c0_leading_ratio"]
    phi_l2 = lp_norm(bump_profile(GRID).phi, 2)
    g8 = besov_norm(low_bump(8, GRID), PARAMS)
    bound = 2.0**-8 * 2.0 ** (-PARAMS.s) * (12.0 / 17.0) * phi_l2 * (1 + 1e-6)
    ok = (
        abs(d0_slope + 1.0) <= 0.1
        and c0 > 0
        and ratio <= 2.0
        and g8 <= bound
    )
    report(
        "8",
        ok,
        f"initial-distance slope {d0_slope:.4f} (-1 +- 0.1), c0 = {c0:.5f} > 0 "
        f"on {DESK.c0_window}, c0 vs leading term ratio {ratio:.4f} (<=2), "
        f"low-bump norm {g8:.3e} <= bound {bound:.3e}",
    )


def test_criterion_9_determinism(tmp_path):
    cfg = ExperimentConfig(N=2**12, n_min=4, n_max=5, T=0.1, dt=0.01,
                           record_times=(0.0, 0.05, 0.1), c0_window=(0.05, 0.1))
    pairs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        persist(run_besov_scaling(DESK), out)
        persist(run_product_probes(cfg), out)
        pairs.append(out)
    identical = True
    for name in ("scaling.csv", "scaling.json", "products.csv", "products.json"):
        identical &= (pairs[0] / name).read_bytes() == (pairs[1] / name).read_bytes()
    report("9", identical, "CSV and JSON byte-identical across consecutive runs")


def test_criterion_10_estimate_probes():
    products = run_product_probes(DESK)
    transport = run_transport_bound(
        ExperimentConfig(T=0.25, dt=0.01, record_times=(0.0, 0.05, 0.15, 0.25))
    )
    c1 = products.constants["product_estimate_C"]
    c2 = products.constants["algebra_estimate_C"]
    stable_n = products.verdicts["stable_under_refinement"] == "pass"
    cg = transport.constants["gronwall_C"]
    stable_dt = transport.verdicts["stable_under_dt_refinement"] == "pass"
    finite = all(np.isfinite(v) for v in (c1, c2, cg))
    ok = finite and stable_n and stable_dt
    report(
        "10",
        ok,
        f"product C = {c1:.3f}, algebra C = {c2:.3f} (N-doubling stable: "
        f"{stable_n}), transport growth C = {cg:.3f} (dt-halving stable: "
        f"{stable_dt})",
    )
