"""Measurement campaigns: tables, fitted rates, verdicts, persistence.

Every experiment is a pure function of an ExperimentConfig: it returns an
ExperimentResult holding the raw table (experiment, n, t, norm_name, value),
the slope fits, the measured constants, and pass/fail/info verdicts.
persist() writes the table as CSV and the summary as JSON; identical configs
and seeds reproduce identical bytes.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .constructions import (
    abs_cos_mean,
    abs_cos_mean_limit,
    bump_profile,
    construction_set,
    cos_packet_norm,
    cross_term_besov_sup,
    high_wave,
    low_bump,
)
from .evolution import SolverConfig, gronwall_bound_check, solve, solve_transport
from .fitting import FitResult, fit_log2_slope, fit_loglog_slope, fit_quadratic_offset
from .littlewood_paley import BesovParams, besov_weighted_norm, block_lp_profile
from .spectral import (
    Field,
    GridSpec,
    dealiased_product,
    derivative,
    lp_norm,
    make_grid,
    nonlocal_P,
    random_band_limited,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "run_besov_scaling",
    "run_lower_bounds",
    "run_flow_approximation",
    "run_taylor_remainder",
    "run_separation",
    "run_product_probes",
    "run_transport_bound",
    "run_dp_separation",
    "EXPERIMENTS",
    "run_experiment",
    "persist",
    "load",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    L: float = defaults.DEFAULT_L
    N: int = defaults.DEFAULT_N
    s: float = defaults.DEFAULT_S
    p: float = defaults.DEFAULT_P
    r: float = defaults.DEFAULT_R
    n_min: int = defaults.DEFAULT_N_MIN
    n_max: int = defaults.DEFAULT_N_MAX
    T: float = defaults.DEFAULT_T
    dt: float = defaults.DEFAULT_DT
    record_times: tuple = defaults.DEFAULT_RECORD_TIMES
    c0_window: tuple = defaults.DEFAULT_C0_WINDOW
    seed: int = defaults.DEFAULT_SEED
    trials: int = defaults.DEFAULT_TRIALS
    micro_times: tuple = defaults.DEFAULT_MICRO_TIMES
    micro_dt: float = defaults.DEFAULT_MICRO_DT

    def __post_init__(self):
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError("need 1 <= n_min <= n_max")
        object.__setattr__(self, "record_times", tuple(self.record_times))
        object.__setattr__(self, "c0_window", tuple(self.c0_window))
        object.__setattr__(self, "micro_times", tuple(self.micro_times))

    @property
    def grid(self) -> GridSpec:
        return make_grid(self.L, self.N)

    @property
    def params(self) -> BesovParams:
        return BesovParams(self.s, self.p, self.r)

    @property
    def n_range(self) -> range:
        return range(self.n_min, self.n_max + 1)

    @property
    def solver(self) -> SolverConfig:
        # keep the record grid inside [0, T] and always record the endpoint,
        # so overriding T alone still yields a valid solver window
        times = tuple(t for t in self.record_times if t <= self.T + 1e-12)
        if not times or not math.isclose(times[-1], self.T, abs_tol=1e-12):
            times = times + (self.T,)
        return SolverConfig(T=self.T, dt=self.dt, record_times=times)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("record_times", "c0_window", "micro_times"):
            d[key] = list(d[key])
        return d


@dataclass
class ExperimentResult:
    name: str
    config: dict
    records: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def add(self, n, t, norm_name: str, value: float):
        self.records.append(
            (
                self.name,
                None if n is None else int(n),
                None if t is None else float(t),
                norm_name,
                float(value),
            )
        )

    def values(self, norm_name: str, n=None) -> list:
        out = []
        for _, rn, rt, name, value in self.records:
            if name == norm_name and (n is None or rn == n):
                out.append((rn, rt, value))
        return out

    @property
    def passed(self) -> bool:
        return all(v != "fail" for v in self.verdicts.values())


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def _fit_vs_n(res: ExperimentResult, fit_name: str, ns, values):
    """Record a log2 slope fit vs n, or None when the range is degenerate."""
    ns = list(ns)
    if len(ns) < 2:
        return None
    fit = fit_log2_slope(ns, values)
    res.fits[fit_name] = fit
    return fit


def _require_ch_admissible(cfg: ExperimentConfig):
    if not cfg.params.admissible_for_ch:
        raise ValueError(
            f"(s, p, r) = ({cfg.s}, {cfg.p}, {cfg.r}) violates the admissible "
            "range s > max(1 + 1/p, 3/2), r < inf"
        )


# ---------------------------------------------------------------------------
# scaling: one surviving block turns Besov norms into exact powers of two
# ---------------------------------------------------------------------------


def run_besov_scaling(cfg: ExperimentConfig) -> ExperimentResult:
    grid = cfg.grid
    res = ExperimentResult("scaling", cfg.as_dict())
    phi_lp = lp_norm(bump_profile(grid).phi, cfg.p)
    res.constants["phi_lp"] = phi_lp

    sigmas = (cfg.s - 1.0, cfg.s, cfg.s + 1.0)
    bound_ok = True
    for sigma in sigmas:
        values = []
        for n in cfg.n_range:
            f = high_wave(n, cfg.s, grid)
            profile = block_lp_profile(f, cfg.p)
            v = besov_weighted_norm(profile, sigma, cfg.r)
            values.append(v)
            res.add(n, None, f"besov_sigma_{sigma:g}", v)
            bound_ok &= v <= 2.0 ** (n * (sigma - cfg.s)) * phi_lp * (1 + 1e-12)
        fit = _fit_vs_n(res, f"sigma_{sigma:g}", cfg.n_range, values)
        res.verdicts[f"slope_sigma_{sigma:g}"] = (
            "info"
            if fit is None
            else _verdict(abs(fit.slope - (sigma - cfg.s)) <= defaults.SLOPE_TIGHT_TOL)
        )
    res.verdicts["profile_bound"] = _verdict(bound_ok)
    return res


# ---------------------------------------------------------------------------
# lower-bounds: the positive constants under the separation mechanism
# ---------------------------------------------------------------------------


def run_lower_bounds(cfg: ExperimentConfig) -> ExperimentResult:
    grid = cfg.grid
    res = ExperimentResult("lower-bounds", cfg.as_dict())

    # |cos|^p averaging: closed form at full periods, 2/pi limit for p = 1
    exact_half = abs(abs_cos_mean(2.0, 4 * math.pi) - 0.5)
    res.add(None, 4 * math.pi, "abs_cos_mean_p2", abs_cos_mean(2.0, 4 * math.pi))
    res.verdicts["cos_mean_half_exact"] = _verdict(exact_half <= 1e-14)
    conv_ok = True
    for X in (10.0, 100.0, 1000.0):
        v = abs_cos_mean(1.0, X)
        res.add(None, X, "abs_cos_mean_p1", v)
        conv_ok &= abs(v - 2.0 / math.pi) <= 5.0 / X
    res.verdicts["cos_mean_convergence"] = _verdict(conv_ok)

    packet, cross, gaps = [], [], []
    identity_ok = True
    for n in cfg.n_range:
        m_n = cos_packet_norm(n, cfg.p, grid)
        g_n = cross_term_besov_sup(n, cfg.params, grid)
        packet.append(m_n)
        cross.append(g_n)
        gaps.append(max(m_n - g_n, 0.0) * 2.0**n)
        res.add(n, None, "packet_lp", m_n)
        res.add(n, None, "cross_term_sup", g_n)

        f = high_wave(n, cfg.s, grid)
        g = low_bump(n, grid)
        prod = dealiased_product(g, derivative(f))
        direct = 2.0 ** (n * cfg.s) * lp_norm(prod, cfg.p)
        residual = abs(g_n - direct) / direct
        res.add(n, None, "single_block_residual", residual)
        identity_ok &= residual <= defaults.BLOCK_IDENTITY_TOL
    res.verdicts["single_block_identity"] = _verdict(identity_ok)

    top = min(3, len(packet))
    m_const = min(packet[-top:])
    m_tilde = min(cross[-top:])
    res.constants["M"] = m_const
    res.constants["M_tilde"] = m_tilde
    res.constants["gap_constant"] = max(gaps) if gaps else 0.0
    res.verdicts["M_positive"] = _verdict(m_const > 0)
    res.verdicts["M_tilde_positive"] = _verdict(m_tilde > 0)
    spread = (max(cross[-top:]) - min(cross[-top:])) / max(cross[-top:])
    res.constants["M_tilde_spread"] = spread
    res.verdicts["M_tilde_stable"] = _verdict(
        spread <= defaults.STABILIZATION_FRACTION
    )
    return res


# ---------------------------------------------------------------------------
# prop1: the flow started from the pure wave stays close to it
# ---------------------------------------------------------------------------


def run_flow_approximation(cfg: ExperimentConfig) -> ExperimentResult:
    _require_ch_admissible(cfg)
    grid = cfg.grid
    res = ExperimentResult("prop1", cfg.as_dict())
    s, p, r = cfg.s, cfg.p, cfg.r

    dist_sup, norms_sup = [], {s - 1.0: [], s: [], s + 1.0: []}
    ratio_sup = 0.0
    for n in cfg.n_range:
        f = high_wave(n, s, grid)
        f_profile = block_lp_profile(f, p)
        f_norm = besov_weighted_norm(f_profile, s, r)
        traj = solve(f, cfg.solver, "ch")
        dists, per_sigma = [], {sig: [] for sig in norms_sup}
        for t, state in zip(traj.times, traj.states):
            profile = block_lp_profile(state, p)
            for sig in per_sigma:
                val = besov_weighted_norm(profile, sig, r)
                per_sigma[sig].append(val)
                res.add(n, t, f"flow_norm_sigma_{sig:g}", val)
            d = besov_weighted_norm(block_lp_profile(state - f, p), s, r)
            dists.append(d)
            res.add(n, t, "flow_distance", d)
        dist_sup.append(max(dists[1:]))
        for sig in norms_sup:
            norms_sup[sig].append(max(per_sigma[sig]))
        ratio_sup = max(ratio_sup, max(per_sigma[s]) / f_norm)

    fit = _fit_vs_n(res, "flow_distance", cfg.n_range, dist_sup)
    target = -(s - 1.5) / 2.0
    res.verdicts["flow_distance_slope"] = (
        "info"
        if fit is None
        else _verdict(fit.slope <= target + defaults.SLOPE_MARGIN)
    )
    for sig, expected in ((s - 1.0, -1.0), (s + 1.0, 1.0)):
        fit_sig = _fit_vs_n(res, f"norm_sigma_{sig:g}", cfg.n_range, norms_sup[sig])
        res.verdicts[f"norm_slope_sigma_{sig:g}"] = (
            "info"
            if fit_sig is None
            else _verdict(abs(fit_sig.slope - expected) <= defaults.SLOPE_MARGIN)
        )
    fit_s = _fit_vs_n(res, f"norm_sigma_{s:g}", cfg.n_range, norms_sup[s])
    res.constants["flow_stability_ratio"] = ratio_sup
    res.verdicts["flow_norm_uniform"] = (
        "info" if fit_s is None else _verdict(abs(fit_s.slope) <= defaults.SLOPE_MARGIN)
    )
    return res


# ---------------------------------------------------------------------------
# prop2: the Taylor remainder behind the separation estimate
# ---------------------------------------------------------------------------


def _remainder_norms(cfg: ExperimentConfig, traj, cs, sigmas):
    """||S_t(u0) - u0 - t v0|| at each recorded t for each sigma."""
    out = {sig: [] for sig in sigmas}
    for t, state in zip(traj.times, traj.states):
        w = Field(
            cfg.grid,
            state.samples - cs.u0.samples - t * cs.v0.samples,
        )
        profile = block_lp_profile(w, cfg.p)
        for sig in sigmas:
            out[sig].append(besov_weighted_norm(profile, sig, cfg.r))
    return out


def run_taylor_remainder(cfg: ExperimentConfig) -> ExperimentResult:
    _require_ch_admissible(cfg)
    grid = cfg.grid
    res = ExperimentResult("prop2", cfg.as_dict())
    s = cfg.s
    sigmas = (s - 1.0, s)

    times = None
    table, offsets, quad_coeffs = [], [], []
    pooled_num = pooled_den = 0.0
    for n in cfg.n_range:
        cs = construction_set(n, cfg.params, grid)
        traj = solve(cs.u0, cfg.solver, "ch")
        norms = _remainder_norms(cfg, traj, cs, sigmas)
        times = np.asarray(traj.times)
        for sig in sigmas:
            for t, v in zip(traj.times, norms[sig]):
                res.add(n, t, f"remainder_sigma_{sig:g}", v)
        res.constants[f"remainder_t0_n{n}"] = norms[s][0]  # exact zero check
        y = np.asarray(norms[s][1:])
        a_n, b_n, _ = fit_quadratic_offset(times[1:], y)
        design = np.column_stack([times[1:] ** 2, np.ones_like(times[1:])])
        resid = y - design @ np.array([a_n, b_n])
        pooled_num += float(np.sum(resid**2))
        pooled_den += float(np.sum(y**2))
        offsets.append(b_n)
        quad_coeffs.append(a_n)
        table.append(y)
        res.add(n, None, "quadratic_coefficient", a_n)
        res.add(n, None, "time_free_offset", b_n)

    res.verdicts["remainder_vanishes_at_zero"] = _verdict(
        all(res.constants[f"remainder_t0_n{n}"] == 0.0 for n in cfg.n_range)
    )
    pooled = math.sqrt(pooled_num / pooled_den) if pooled_den > 0 else 0.0
    res.constants["pooled_fit_residual"] = pooled
    res.verdicts["quadratic_fit_residual"] = _verdict(
        pooled <= defaults.QUADRATIC_FIT_RESIDUAL_MAX
    )

    # the time-free offsets must decay at least like 2^{-min(s-3/2,1) n};
    # offsets at the measurement floor satisfy the bound trivially
    floor = defaults.OFFSET_FLOOR_FRACTION * max(float(np.max(t)) for t in table)
    usable = [
        (n, b) for n, b in zip(cfg.n_range, offsets) if b > floor
    ]
    target = -min(s - 1.5, 1.0)
    if len(usable) >= 3:
        fit_b = _fit_vs_n(res, "offset_decay", [n for n, _ in usable], [b for _, b in usable])
        res.verdicts["offset_decay"] = _verdict(
            fit_b.slope <= target + defaults.SLOPE_MARGIN
        )
    else:
        res.constants["offsets_below_floor"] = True
        res.verdicts["offset_decay"] = "pass"

    # time slope of the remainder for the largest n over the verdict window
    lo, hi = cfg.c0_window
    mask = (times >= lo - 1e-12) & (times <= hi + 1e-12)
    y_top = np.asarray(table[-1])
    fit_t = fit_loglog_slope(times[1:][mask[1:]], y_top[mask[1:]])
    res.fits["time_slope_top_n"] = fit_t
    res.verdicts["time_slope_quadratic"] = _verdict(
        abs(fit_t.slope - 2.0) <= defaults.SMALL_T_SLOPE_TOL
    )

    # micro-window probe: exposes the linear-in-t component t*P(u0) that the
    # tangent -u0 u0' leaves out (informative, not a verdict)
    micro_cfg = SolverConfig(
        T=cfg.micro_times[-1],
        dt=cfg.micro_dt,
        record_times=(0.0,) + tuple(cfg.micro_times),
    )
    for n in cfg.n_range:
        cs = construction_set(n, cfg.params, grid)
        res.constants[f"forcing_norm_n{n}"] = besov_weighted_norm(
            block_lp_profile(nonlocal_P(cs.u0), cfg.p), s, cfg.r
        )
        traj = solve(cs.u0, micro_cfg, "ch")
        norms = _remainder_norms(cfg, traj, cs, (s,))[s]
        for t, v in zip(traj.times, norms):
            res.add(n, t, "remainder_micro", v)
        fit_micro = fit_loglog_slope(traj.times[1:], norms[1:])
        res.fits[f"micro_time_slope_n{n}"] = fit_micro
        res.verdicts[f"micro_time_slope_n{n}"] = "info"
    return res


# ---------------------------------------------------------------------------
# main: the solution maps separate at rate t while the data merge
# ---------------------------------------------------------------------------


def _separation_core(
    cfg: ExperimentConfig, res: ExperimentResult, equation: str
) -> dict:
    grid = cfg.grid
    s, p, r = cfg.s, cfg.p, cfg.r
    d0, dmax_by_n = [], {}
    triangle_ok = True
    identity_ok = True
    for n in cfg.n_range:
        cs = construction_set(n, cfg.params, grid)
        traj_pair = solve(cs.u0, cfg.solver, equation)
        traj_wave = solve(cs.high, cfg.solver, equation)
        g_norm = besov_weighted_norm(block_lp_profile(cs.low, p), s, r)
        v0_norm = besov_weighted_norm(block_lp_profile(cs.v0, p), s, r)
        v0_sup = besov_weighted_norm(block_lp_profile(cs.v0, p), s, math.inf)
        res.add(n, None, "low_bump_norm", g_norm)
        res.add(n, None, "tangent_norm", v0_norm)
        res.add(n, None, "tangent_norm_sup", v0_sup)

        dists = []
        for t, ua, ub in zip(traj_pair.times, traj_pair.states, traj_wave.states):
            d = besov_weighted_norm(block_lp_profile(ua - ub, p), s, r)
            dists.append(d)
            res.add(n, t, "separation_distance", d)
            w = Field(
                grid, ua.samples - cs.u0.samples - t * cs.v0.samples
            )
            w_norm = besov_weighted_norm(block_lp_profile(w, p), s, r)
            flow_dist = besov_weighted_norm(
                block_lp_profile(ub - cs.high, p), s, r
            )
            res.add(n, t, "remainder_norm", w_norm)
            res.add(n, t, "wave_flow_distance", flow_dist)
            # rearranged triangle inequality linking all five quantities
            slack = g_norm + flow_dist + w_norm
            triangle_ok &= abs(d - t * v0_norm) <= slack * (1 + 1e-9) + 1e-15
        identity_ok &= abs(dists[0] - g_norm) <= defaults.BLOCK_IDENTITY_TOL * max(
            g_norm, 1e-300
        )
        d0.append(dists[0])
        dmax_by_n[n] = dists

        # the four-product split of the tangent, reported per n
        f, g = cs.high, cs.low
        for label, a, b in (
            ("wave_self_product", f, derivative(f)),
            ("wave_low_product", f, derivative(g)),
            ("low_self_product", g, derivative(g)),
            ("low_wave_product", g, derivative(f)),
        ):
            term = dealiased_product(a, b)
            res.add(
                n,
                None,
                label,
                besov_weighted_norm(block_lp_profile(term, p), s, r),
            )

    res.verdicts["initial_distance_identity"] = _verdict(identity_ok)
    res.verdicts["triangle_consistency"] = _verdict(triangle_ok)
    fit_d0 = _fit_vs_n(res, "initial_distance", cfg.n_range, d0)

    times = np.asarray(cfg.solver.record_times)
    lo, hi = cfg.c0_window
    window = (times >= lo - 1e-12) & (times <= hi + 1e-12)
    top = cfg.n_max
    ratios = np.asarray(dmax_by_n[top])[window] / times[window]
    c0 = float(np.min(ratios))
    leading = cross_term_besov_sup(top, cfg.params, grid)
    res.constants["c0"] = c0
    res.constants["leading_term"] = leading
    return {"fit_d0": fit_d0, "c0": c0, "leading": leading}


def run_separation(cfg: ExperimentConfig) -> ExperimentResult:
    _require_ch_admissible(cfg)
    res = ExperimentResult("main", cfg.as_dict())
    core = _separation_core(cfg, res, "ch")
    res.verdicts["initial_distance_slope"] = (
        "info"
        if core["fit_d0"] is None
        else _verdict(abs(core["fit_d0"].slope + 1.0) <= defaults.D0_SLOPE_TOL)
    )
    res.verdicts["c0_positive"] = _verdict(core["c0"] > 0)
    ratio = max(core["c0"], core["leading"]) / min(core["c0"], core["leading"])
    res.constants["c0_leading_ratio"] = ratio
    res.verdicts["c0_consistent_with_leading_term"] = _verdict(
        ratio <= defaults.CONSISTENCY_FACTOR
    )
    return res


def run_dp_separation(cfg: ExperimentConfig) -> ExperimentResult:
    if not cfg.params.admissible_for_dp:
        raise ValueError(
            f"(s, p, r) = ({cfg.s}, {cfg.p}, {cfg.r}) violates the "
            "admissible range s > 1 + 1/p (or the r = 1 endpoint)"
        )
    res = ExperimentResult("dp", cfg.as_dict())
    core = _separation_core(cfg, res, "dp")
    # the separation constants for this companion flow are not pinned down;
    # report the same table informatively
    res.verdicts["initial_distance_slope"] = (
        "info"
        if core["fit_d0"] is None
        else _verdict(abs(core["fit_d0"].slope + 1.0) <= defaults.D0_SLOPE_TOL)
    )
    res.verdicts["c0_positive"] = "info"
    res.verdicts["c0_consistent_with_leading_term"] = "info"
    res.constants["c0_leading_ratio"] = max(core["c0"], core["leading"]) / min(
        core["c0"], core["leading"]
    )
    return res


# ---------------------------------------------------------------------------
# products: empirical constants for the two product estimates
# ---------------------------------------------------------------------------


def _product_constants(cfg: ExperimentConfig, grid: GridSpec, band: float):
    rng = np.random.default_rng(cfg.seed)
    s, p, r = cfg.s, cfg.p, cfg.r
    c_product = 0.0
    c_algebra = 0.0
    for _ in range(cfg.trials):
        u = random_band_limited(grid, rng, band_xi=band, decay=1.0)
        v = random_band_limited(grid, rng, band_xi=band, decay=1.0)
        pu = block_lp_profile(u, p)
        pv = block_lp_profile(v, p)
        if besov_weighted_norm(pu, s, r) == 0 or besov_weighted_norm(pv, s, r) == 0:
            continue
        uv = dealiased_product(u, v)
        puv = block_lp_profile(uv, p)
        lhs_low = besov_weighted_norm(puv, s - 2.0, r)
        rhs_low = besov_weighted_norm(pu, s - 2.0, r) * besov_weighted_norm(
            pv, s - 1.0, r
        )
        c_product = max(c_product, lhs_low / rhs_low)
        lhs_alg = besov_weighted_norm(puv, s, r)
        rhs_alg = besov_weighted_norm(pu, s, r) * lp_norm(v, math.inf) + (
            besov_weighted_norm(pv, s, r) * lp_norm(u, math.inf)
        )
        c_algebra = max(c_algebra, lhs_alg / rhs_alg)
    return c_product, c_algebra


def run_product_probes(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult("products", cfg.as_dict())
    grid = cfg.grid
    band = grid.dealias_cutoff / 2.0  # products stay alias-free, exactly
    doubled = make_grid(cfg.L, 2 * cfg.N)
    c1, c2 = _product_constants(cfg, grid, band)
    c1d, c2d = _product_constants(cfg, doubled, band)
    res.constants.update(
        {
            "product_estimate_C": c1,
            "algebra_estimate_C": c2,
            "product_estimate_C_doubled": c1d,
            "algebra_estimate_C_doubled": c2d,
        }
    )
    res.add(None, None, "product_estimate_C", c1)
    res.add(None, None, "algebra_estimate_C", c2)
    res.add(None, None, "product_estimate_C_doubled", c1d)
    res.add(None, None, "algebra_estimate_C_doubled", c2d)
    finite = all(np.isfinite(c) and c > 0 for c in (c1, c2, c1d, c2d))
    res.verdicts["constants_finite"] = _verdict(finite)
    stable = max(c1, c1d) / min(c1, c1d) <= defaults.CONSISTENCY_FACTOR and (
        max(c2, c2d) / min(c2, c2d) <= defaults.CONSISTENCY_FACTOR
    )
    res.verdicts["stable_under_refinement"] = _verdict(stable)
    return res


# ---------------------------------------------------------------------------
# transport: the a-priori growth estimate along a solver trajectory
# ---------------------------------------------------------------------------


def run_transport_bound(cfg: ExperimentConfig) -> ExperimentResult:
    _require_ch_admissible(cfg)
    res = ExperimentResult("transport", cfg.as_dict())
    grid = cfg.grid
    f_init = high_wave(cfg.n_min, cfg.s, grid)
    dense_times = tuple(np.linspace(0.0, cfg.T, 26))
    constants = []
    for dt in (cfg.dt, cfg.dt / 2.0):
        vel = solve(
            f_init,
            SolverConfig(T=cfg.T, dt=dt, record_times=dense_times),
            "ch",
        )
        forcing = lambda t: nonlocal_P(Field(grid, vel.interpolate(t)))
        traj = solve_transport(
            bump_profile(grid).phi,
            vel,
            forcing=forcing,
            cfg=SolverConfig(T=cfg.T, dt=dt, record_times=cfg.record_times),
        )
        report = gronwall_bound_check(traj, vel, cfg.params, forcing=forcing)
        constants.append(report["C"])
        res.add(None, dt, "gronwall_constant", report["C"])
    res.constants["gronwall_C"] = constants[0]
    res.constants["gronwall_C_half_dt"] = constants[1]
    res.verdicts["constant_finite"] = _verdict(
        all(np.isfinite(c) for c in constants)
    )
    lohi = sorted(max(c, 1e-12) for c in constants)
    res.verdicts["stable_under_dt_refinement"] = _verdict(
        lohi[1] / lohi[0] <= defaults.CONSISTENCY_FACTOR
    )
    return res


EXPERIMENTS = {
    "scaling": run_besov_scaling,
    "lower-bounds": run_lower_bounds,
    "prop1": run_flow_approximation,
    "prop2": run_taylor_remainder,
    "main": run_separation,
    "products": run_product_probes,
    "transport": run_transport_bound,
    "dp": run_dp_separation,
}


def run_experiment(name: str, cfg: ExperimentConfig) -> ExperimentResult:
    if name not in EXPERIMENTS:
        raise KeyError(
            f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}"
        )
    return EXPERIMENTS[name](cfg)


# ---------------------------------------------------------------------------
# persistence: CSV table + JSON summary, byte-stable across reruns
# ---------------------------------------------------------------------------


def _config_digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def persist(result: ExperimentResult, out_dir) -> tuple[str, str]:
    """Write <name>.csv and <name>.json under out_dir; returns the paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{result.name}.csv")
    json_path = os.path.join(out_dir, f"{result.name}.json")

    lines = ["experiment,n,t,norm_name,value"]
    for exp, n, t, norm_name, value in result.records:
        n_txt = "" if n is None else str(n)
        t_txt = "" if t is None else repr(float(t))
        lines.append(f"{exp},{n_txt},{t_txt},{norm_name},{value!r}")
    with open(csv_path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": result.name,
        "config_digest": _config_digest(result.config),
        "config": result.config,
        "verdicts": dict(sorted(result.verdicts.items())),
        "fits": {k: v.as_dict() for k, v in sorted(result.fits.items())},
        "constants": dict(sorted(result.constants.items())),
    }
    with open(json_path, "w", newline="") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return csv_path, json_path


def load(out_dir, name: str) -> ExperimentResult:
    """Read a persisted result back; rejects unknown schema versions."""
    import os

    json_path = os.path.join(out_dir, f"{name}.json")
    csv_path = os.path.join(out_dir, f"{name}.csv")
    with open(json_path) as fh:
        summary = json.load(fh)
    version = summary.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"schema version {version} not supported (expected {SCHEMA_VERSION})"
        )
    result = ExperimentResult(summary["experiment"], summary["config"])
    result.verdicts = summary["verdicts"]
    result.constants = summary["constants"]
    result.fits = {
        k: FitResult(v["slope"], v["intercept"], v["residual"])
        for k, v in summary["fits"].items()
    }
    with open(csv_path) as fh:
        header = fh.readline().strip()
        if header != "experiment,n,t,norm_name,value":
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            exp, n_txt, t_txt, norm_name, value = line.rstrip("\n").split(",")
            result.records.append(
                (
                    exp,
                    None if n_txt == "" else int(n_txt),
                    None if t_txt == "" else float(t_txt),
                    norm_name,
                    float(value),
                )
            )
    return result
