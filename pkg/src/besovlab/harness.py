"""Experiment drivers: non-uniform dependence runs, Taylor remainder checks,
the cross-module validation suite, and report/file emission.

Every runner returns an ExperimentReport whose verdicts carry the measured
value next to the threshold it was judged against, so the JSON output is a
complete record of what was computed and why it passed or failed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .besov import (
    BesovIndex,
    CutoffPair,
    besov_norm,
    build_cutoffs,
    dyadic_block,
    linf_norm,
    lipschitz_norm,
    transition_ring,
)
from .corpus import random_field
from .dynamics import (
    Model,
    SolverConfig,
    evolve,
    p_operator,
    q_operator,
    remainder_bound,
    rhs,
)
from .errors import BlowUp, ResolutionExceeded
from .spectral import (
    Field,
    Grid,
    dealias_product,
    dealias_triple,
    derivative,
    forward_transform,
    helmholtz_inverse,
    inverse_transform,
    parseval_residual,
)
from .wavepackets import (
    build_bump,
    cubic_cross_product,
    make_packets,
    min_points_for,
    modulation_identity_residual,
    product_limits,
    quadratic_cross_product,
    scaling_report,
)

B321 = BesovIndex(1.5, 2, 1)

DEFAULT_HALF_LENGTH = 32.0 * math.pi
DEFAULT_POINTS = 2**15

# Verdict thresholds.
LOWER_BOUND_FRACTION = 0.1
BAND_LO, BAND_HI = 0.5, 2.0
DECAY_RATIO_RTOL = 1e-10
DOMINANCE_FACTOR = 4.0
DOMINANCE_MIN_N = 6
H1_DRIFT_TOL = 1e-6
SLOPE_TARGET, SLOPE_TOL = 2.0, 0.1

# Calibrated constants, frozen after one-off measurement on the seed-0
# corpus; regression-style bounds, not analytic ones.
EMBED_CONSTANT = 0.65  # ||f||_inf <= K ||f||_{B^{1/2}_{2,1}}; observed max 0.238
PRODUCT_CSTAR = 0.34  # max observed ||uv||_B/(||u||_B ||v||_inf + sym.) was 0.3332
SMALL_TIME_CONSTANT = 2.0  # ||S_t(u0)-u0||_inf / (t ||u0||_C01^2); observed max 0.27
FIRST_ORDER_CONSTANT = 2.0  # ||S_t(u0)-u0||_B / (t * first-order size); observed max 0.56


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one experiment batch."""

    model: Model = Model.CH
    n_values: tuple = (5, 6, 7, 8)
    t_values: tuple = (0.02, 0.05, 0.1)
    grid_points: int | None = None  # None: smallest adequate power of two
    half_length: float = DEFAULT_HALF_LENGTH
    cfl: float = 0.3
    dt_max: float = 1e-2
    seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        ts = tuple(sorted(float(t) for t in self.t_values))
        if not ts or ts[0] < 0:
            raise ValueError("t_values must be nonnegative and nonempty")
        object.__setattr__(self, "t_values", ts)
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))

    def make_grid(self) -> Grid:
        pts = self.grid_points
        if pts is None:
            pts = min_points_for(max(self.n_values), self.half_length)
        return Grid(pts, self.half_length)

    def solver(self) -> SolverConfig:
        final = max(self.t_values)
        return SolverConfig(
            final_time=final,
            cfl=self.cfl,
            dt_max=self.dt_max,
            sample_times=self.t_values,
        )

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "n_values": list(self.n_values),
            "t_values": list(self.t_values),
            "grid_points": self.grid_points,
            "half_length": self.half_length,
            "cfl": self.cfl,
            "dt_max": self.dt_max,
            "seed": self.seed,
            "output_dir": self.output_dir,
        }


@dataclass
class ExperimentReport:
    """Structured results of one runner invocation."""

    kind: str
    config: dict
    grid: dict
    rows: list = field(default_factory=list)
    per_n: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        ok = all(entry["passed"] for entry in self.checks.values())
        return ok and all(row.get("verdict", "pass") == "pass" for row in self.rows)

    def add_check(self, name: str, passed: bool, value, threshold) -> None:
        self.checks[name] = {
            "passed": bool(passed),
            "value": value,
            "threshold": threshold,
        }

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "version": self.version,
            "config": self.config,
            "grid": self.grid,
            "rows": self.rows,
            "per_n": self.per_n,
            "checks": self.checks,
            "extras": self.extras,
            "passed": self.passed,
        }


def _grid_dict(grid: Grid) -> dict:
    return {
        "num_points": grid.num_points,
        "half_length": grid.half_length,
        "xi_max": grid.xi_max,
    }


def run_nonuniform(config: ExperimentConfig) -> ExperimentReport:
    """Evolve each packet with and without its vanishing perturbation and
    measure the solution-map gap D_n(t) = ||S_t(packet+pert) - S_t(packet)||
    in B^{3/2}_{2,1}, together with the decomposition pieces that explain it.

    Per-n failures (blow-up, resolution) are recorded without aborting the
    remaining members.
    """
    grid = config.make_grid()
    cutoffs = build_cutoffs(grid)
    bump = build_bump(grid)
    limit_quad, limit_cub = product_limits(bump)
    limit = limit_quad if config.model is Model.CH else limit_cub
    solver = config.solver()
    report = ExperimentReport(
        kind="nonuniform",
        config=config.to_dict(),
        grid=_grid_dict(grid),
        extras={"product_limit": limit, "model": config.model.value},
    )

    gaps: dict = {}
    pert_norms: dict = {}
    for n in config.n_values:
        try:
            fam = make_packets(bump, n)
            pert = fam.perturbation(config.model)
            u0 = fam.packet + pert
            traj_pert = evolve(u0, config.model, solver)
            traj_base = evolve(fam.packet, config.model, solver)

            pert_norm = besov_norm(pert, B321, cutoffs)
            pieces = _decomposition_pieces(config.model, fam, u0, cutoffs)
            pert_norms[n] = pert_norm
            drift = max(traj_pert.h1_drift(), traj_base.h1_drift())
            entry = {
                "perturbation_norm": pert_norm,
                "snap_error": fam.snap_error,
                "h1_drift": drift,
                **pieces,
            }
            correction = pieces["correction_total"]
            if n >= DOMINANCE_MIN_N:
                factor = pieces["product_b321"] / correction if correction > 0 else math.inf
                entry["dominance_factor"] = factor
                report.add_check(
                    f"dominance_n{n}",
                    factor >= DOMINANCE_FACTOR,
                    factor,
                    f">= {DOMINANCE_FACTOR}",
                )
            report.per_n[str(n)] = entry

            for (t_pert, u_pert), (t_base, u_base) in zip(
                traj_pert.samples, traj_base.samples
            ):
                t = t_pert
                if t == 0.0 and 0.0 not in config.t_values:
                    continue
                gap = besov_norm(u_pert - u_base, B321, cutoffs)
                gaps[(n, t)] = gap
                row = {
                    "model": config.model.value,
                    "n": n,
                    "t": t,
                    "D_n": gap,
                    "ratio": gap / t if t > 0 else None,
                    "g_norm": pert_norm,
                    "h1_drift": drift,
                }
                cell_ok = True
                if t > 0:
                    band = gap / (t * pieces["product_b321"])
                    row["band_ratio"] = band
                    band_ok = BAND_LO <= band <= BAND_HI
                    lower_ok = gap / t >= LOWER_BOUND_FRACTION * limit
                    report.add_check(
                        f"band_n{n}_t{t}",
                        band_ok,
                        band,
                        f"in [{BAND_LO}, {BAND_HI}]",
                    )
                    cell_ok = band_ok and lower_ok and drift < H1_DRIFT_TOL
                else:
                    cell_ok = abs(gap - pert_norm) <= 1e-12 * pert_norm
                row["verdict"] = "pass" if cell_ok else "fail"
                report.rows.append(row)
        except (BlowUp, ResolutionExceeded) as err:
            report.per_n[str(n)] = {"error": f"{type(err).__name__}: {err}"}
            report.add_check(f"completed_n{n}", False, str(err), "run completes")

    _aggregate_nonuniform_checks(report, config, gaps, pert_norms, limit)
    return report


def _decomposition_pieces(model: Model, fam, u0: Field, cutoffs: CutoffPair) -> dict:
    """Norms of the first-order decomposition of the solution-map gap."""
    dpert = derivative(fam.perturbation(model), 1)
    if model is Model.CH:
        product = quadratic_cross_product(fam)
        cross = dealias_product(u0, dpert, 2)
        nonlocal_diff = p_operator(u0) - p_operator(fam.packet)
        pieces = {
            "product_b321": besov_norm(product, B321, cutoffs),
            "product_b32inf": besov_norm(product, BesovIndex(1.5, 2, math.inf), cutoffs),
            "transport_cross": besov_norm(cross, B321, cutoffs),
            "nonlocal_diff": besov_norm(nonlocal_diff, B321, cutoffs),
        }
        pieces["correction_total"] = pieces["transport_cross"] + pieces["nonlocal_diff"]
        return pieces
    product = cubic_cross_product(fam)
    mixed = 2.0 * dealias_triple(fam.packet, fam.bump_slow, derivative(fam.packet, 1))
    advect = dealias_triple(u0, u0, dpert)
    nonlocal_diff = q_operator(u0) - q_operator(fam.packet)
    pieces = {
        "product_b321": besov_norm(product, B321, cutoffs),
        "product_b32inf": besov_norm(product, BesovIndex(1.5, 2, math.inf), cutoffs),
        "mixed_cross": besov_norm(mixed, B321, cutoffs),
        "transport_cross": besov_norm(advect, B321, cutoffs),
        "nonlocal_diff": besov_norm(nonlocal_diff, B321, cutoffs),
    }
    pieces["correction_total"] = (
        pieces["mixed_cross"] + pieces["transport_cross"] + pieces["nonlocal_diff"]
    )
    return pieces


def _aggregate_nonuniform_checks(report, config, gaps, pert_norms, limit):
    ns = sorted(pert_norms)
    expected = 0.5 if config.model is Model.CH else 2.0**-0.5
    if len(ns) >= 2:
        worst = 0.0
        for a, b in zip(ns, ns[1:]):
            step = pert_norms[b] / pert_norms[a]
            target = expected ** (b - a)
            worst = max(worst, abs(step - target) / target)
        report.add_check(
            "perturbation_decay_geometric",
            worst <= DECAY_RATIO_RTOL,
            worst,
            f"<= {DECAY_RATIO_RTOL}",
        )
    for t in config.t_values:
        if t == 0.0:
            continue
        values = [gaps[(n, t)] / t for n in ns if (n, t) in gaps]
        if values:
            report.add_check(
                f"lower_bound_t{t}",
                min(values) >= LOWER_BOUND_FRACTION * limit,
                min(values),
                f">= {LOWER_BOUND_FRACTION * limit}",
            )


def smooth_profile(grid: Grid, amplitude: float = 0.25, width: float = 2.0) -> Field:
    """Gaussian reference datum for solver-validity and Taylor checks."""
    return Field(grid, amplitude * np.exp(-(grid.x**2) / (2.0 * width**2)))


def run_taylor_check(
    config: ExperimentConfig,
    t_min: float = 1e-3,
    t_max: float = 1e-1,
    points: int = 8,
    packet_n: int = 6,
) -> ExperimentReport:
    """Fit the time power of ||S_t(u0) - u0 - t * rhs(u0)|| in B^{3/2}_{2,1}.

    Runs a smooth Gaussian datum and the packet-plus-bump compound; a clean
    second-order Taylor remainder gives slope 2.  Also records the first-order
    gap ||S_t(u0) - u0|| against its expected t-linear size.
    """
    grid = config.make_grid() if config.grid_points else Grid(DEFAULT_POINTS, config.half_length)
    cutoffs = build_cutoffs(grid)
    bump = build_bump(grid)
    fam = make_packets(bump, packet_n)
    ladder = np.geomspace(t_min, t_max, points)
    report = ExperimentReport(
        kind="taylor",
        config={**config.to_dict(), "t_min": t_min, "t_max": t_max, "points": points},
        grid=_grid_dict(grid),
        extras={"model": config.model.value, "ladder": [float(t) for t in ladder]},
    )

    data = [
        ("smooth", smooth_profile(grid)),
        (f"packet_pair_n{packet_n}", fam.packet + fam.bump_fast),
    ]
    solver = SolverConfig(
        final_time=float(ladder[-1]),
        cfl=config.cfl,
        dt_max=min(config.dt_max, t_min / 4.0),
        sample_times=tuple(float(t) for t in ladder),
    )
    for label, u0 in data:
        coeff = rhs(u0, config.model)
        bound = remainder_bound(u0, config.model, cutoffs)
        traj = evolve(u0, config.model, solver)
        remainders = []
        first_order = []
        for t, u in traj.samples:
            if t == 0.0:
                continue
            remainders.append(besov_norm(u - u0 - t * coeff, B321, cutoffs))
            first_order.append(besov_norm(u - u0, B321, cutoffs) / t)
        slope = float(np.polyfit(np.log(ladder), np.log(remainders), 1)[0])
        implied = max(r / (t**2 * bound) for r, t in zip(remainders, ladder))
        first_size = _first_order_size(config.model, u0, cutoffs)
        first_ratio = max(first_order) / first_size if first_size > 0 else 0.0
        for t, r in zip(ladder, remainders):
            report.rows.append(
                {
                    "model": config.model.value,
                    "datum": label,
                    "t": float(t),
                    "remainder": r,
                    "verdict": "pass",
                }
            )
        report.per_n[label] = {
            "slope": slope,
            "remainder_bound": bound,
            "implied_constant": implied,
            "first_order_ratio": first_ratio,
        }
        report.add_check(
            f"slope_{label}",
            abs(slope - SLOPE_TARGET) <= SLOPE_TOL,
            slope,
            f"{SLOPE_TARGET} +- {SLOPE_TOL}",
        )
        report.add_check(
            f"first_order_{label}",
            first_ratio <= FIRST_ORDER_CONSTANT,
            first_ratio,
            f"<= {FIRST_ORDER_CONSTANT}",
        )
    return report


def _first_order_size(model: Model, u0: Field, cutoffs: CutoffPair) -> float:
    """t-linear bound on ||S_t(u0) - u0|| in B^{3/2}_{2,1} (shape only; the
    frozen FIRST_ORDER_CONSTANT absorbs the implied constant)."""
    b32 = besov_norm(u0, B321, cutoffs)
    b52 = besov_norm(u0, BesovIndex(2.5, 2, 1), cutoffs)
    lip = lipschitz_norm(u0)
    sup = u0.max_abs()
    if model is Model.CH:
        return b32**2 + (sup + lip**2) * b52
    return b32**3 + lip**2 * b52


def discover_time_horizon(
    u0: Field,
    model: Model,
    initial: float = 1.0,
    max_halvings: int = 8,
    cfl: float = 0.3,
) -> float:
    """Shrink a trial horizon until the run completes with small energy drift,
    then return 0.8 times the surviving value."""
    horizon = initial
    for _ in range(max_halvings):
        try:
            traj = evolve(u0, model, SolverConfig(final_time=horizon, cfl=cfl))
            if traj.h1_drift() < H1_DRIFT_TOL:
                return 0.8 * horizon
        except BlowUp:
            pass
        horizon /= 2.0
    return 0.8 * horizon


# --- validation suite -------------------------------------------------------


def run_validation_suite(
    seed: int = 0,
    grid_points: int = 2**10,
    half_length: float = 16.0 * math.pi,
    cutoff_scale: float = 1.0,
) -> ExperimentReport:
    """Aggregate every module's invariants into one deterministic pass/fail
    run.  cutoff_scale != 1 deliberately corrupts the ring cutoff so fault
    injection can be demonstrated.
    """
    rng = np.random.default_rng(seed)
    grid = Grid(grid_points, half_length)
    cutoffs = build_cutoffs(grid, ring_scale=cutoff_scale)
    report = ExperimentReport(
        kind="validation",
        config={
            "seed": seed,
            "grid_points": grid_points,
            "half_length": half_length,
            "cutoff_scale": cutoff_scale,
        },
        grid=_grid_dict(grid),
    )

    _check_transforms(report, grid, rng)
    _check_cutoffs(report, grid, cutoffs, rng)
    _check_besov_properties(report, grid, cutoffs, rng)
    _check_packets(report)
    _check_dynamics_smoke(report)
    return report


def _check_transforms(report, grid, rng):
    worst_rt = 0.0
    worst_pars = 0.0
    for _ in range(1000):
        f = random_field(grid, rng)
        back = inverse_transform(forward_transform(f))
        worst_rt = max(worst_rt, float(np.abs(back.samples - f.samples).max()) / max(f.max_abs(), 1e-300))
        worst_pars = max(worst_pars, parseval_residual(f))
    report.add_check("round_trip_1000", worst_rt <= 1e-12, worst_rt, "<= 1e-12")
    report.add_check("parseval", worst_pars <= 1e-10, worst_pars, "<= 1e-10")

    worst_lin = 0.0
    for _ in range(100):
        f, g = random_field(grid, rng), random_field(grid, rng)
        a, b = rng.uniform(-3, 3, size=2)
        lhs = forward_transform(Field(grid, a * f.samples + b * g.samples)).coeffs
        rhs_ = a * forward_transform(f).coeffs + b * forward_transform(g).coeffs
        scale = max(float(np.abs(rhs_).max()), 1e-300)
        worst_lin = max(worst_lin, float(np.abs(lhs - rhs_).max()) / scale)
    report.add_check("linearity", worst_lin <= 1e-12, worst_lin, "<= 1e-12")

    worst_d = 0.0
    worst_sa = 0.0
    for _ in range(100):
        f = random_field(grid, rng)
        g = random_field(grid, rng)
        d11 = derivative(derivative(f, 1), 1)
        d2 = derivative(f, 2)
        scale = max(d2.max_abs(), 1e-300)
        worst_d = max(worst_d, float(np.abs(d11.samples - d2.samples).max()) / scale)
        a = helmholtz_inverse(f).inner(g)
        b = f.inner(helmholtz_inverse(g))
        worst_sa = max(worst_sa, abs(a - b) / max(abs(a), 1e-300))
    report.add_check("derivative_composition", worst_d <= 1e-10, worst_d, "<= 1e-10")
    report.add_check("helmholtz_self_adjoint", worst_sa <= 1e-10, worst_sa, "<= 1e-10")


def _check_cutoffs(report, grid, cutoffs, rng):
    xi_band = 512.0
    xis = rng.uniform(-xi_band, xi_band, size=1_000_000)
    jm = int(math.ceil(math.log2(xi_band * 4.0 / 3.0))) + 1
    total = cutoffs.chi(xis)
    for j in range(jm + 1):
        total = total + cutoffs.phi_ring(xis / 2.0**j)
    worst = float(np.abs(total - 1.0).max())
    report.add_check("partition_of_unity_1e6", worst <= 1e-12, worst, "<= 1e-12")

    probe = np.array([0.0, 0.74, 0.76, 1.0, 4.0 / 3.0 + 1e-9, 2.0, 8.0 / 3.0 + 1e-9, 5.0])
    chi_ok = (
        cutoffs.chi(np.array([0.0]))[0] == 1.0
        and float(np.abs(cutoffs.chi(probe[probe >= 4.0 / 3.0])).max()) == 0.0
    )
    ring_vals = transition_ring(np.array([0.5, 0.74, 2.7, 3.0]))
    ring_ok = float(np.abs(ring_vals).max()) == 0.0
    report.add_check("cutoff_supports", chi_ok and ring_ok, None, "support bounds")

    worst_rec = 0.0
    for _ in range(1000):
        f = random_field(grid, rng)
        total_field = np.zeros(grid.num_points)
        for j in range(-1, cutoffs.j_max + 1):
            total_field = total_field + dyadic_block(f, j, cutoffs).samples
        worst_rec = max(
            worst_rec, float(np.abs(total_field - f.samples).max()) / max(f.max_abs(), 1e-300)
        )
    report.add_check("reconstruction_1000", worst_rec <= 1e-10, worst_rec, "<= 1e-10")

    worst_orth = 0.0
    for _ in range(50):
        f = random_field(grid, rng)
        norm = max(f.l2_norm(), 1e-300)
        for j in (0, 2, 5):
            for k in (j + 2, j + 3):
                if k > cutoffs.j_max:
                    continue
                twice = dyadic_block(dyadic_block(f, j, cutoffs), k, cutoffs)
                worst_orth = max(worst_orth, twice.l2_norm() / norm)
    report.add_check("block_almost_orthogonality", worst_orth <= 1e-12, worst_orth, "<= 1e-12")


def _check_besov_properties(report, grid, cutoffs, rng):
    worst_mono = 0.0
    worst_embed = 0.0
    for _ in range(200):
        f = random_field(grid, rng)
        n1 = besov_norm(f, BesovIndex(0.5, 2, 1), cutoffs)
        n2 = besov_norm(f, BesovIndex(0.5, 2, 2), cutoffs)
        ninf = besov_norm(f, BesovIndex(0.5, 2, math.inf), cutoffs)
        worst_mono = max(worst_mono, n2 - n1, ninf - n2)
        worst_embed = max(worst_embed, linf_norm(f) / n1)
    report.add_check("r_monotonicity", worst_mono <= 1e-12, worst_mono, "<= 1e-12")
    report.add_check(
        "embedding_constant",
        worst_embed <= EMBED_CONSTANT and EMBED_CONSTANT < 2.0,
        worst_embed,
        f"<= {EMBED_CONSTANT} (< 2)",
    )

    worst_prod = 0.0
    for _ in range(1000):
        u = random_field(grid, rng)
        v = random_field(grid, rng)
        uv = dealias_product(u, v, 2)
        num = besov_norm(uv, B321, cutoffs)
        den = besov_norm(u, B321, cutoffs) * linf_norm(v) + besov_norm(
            v, B321, cutoffs
        ) * linf_norm(u)
        worst_prod = max(worst_prod, num / den)
    report.add_check(
        "product_estimate",
        worst_prod <= 2.0 * PRODUCT_CSTAR,
        worst_prod,
        f"<= {2.0 * PRODUCT_CSTAR}",
    )


def _check_packets(report):
    grid = Grid(2**14, DEFAULT_HALF_LENGTH)
    cutoffs = build_cutoffs(grid)
    bump = build_bump(grid)

    hat = bump.hat
    plateau_ok = hat(np.array([0.2]))[0] == 1.0 and hat(np.array([0.6]))[0] == 0.0
    even_res = float(np.abs(bump.phi.samples[1:] - bump.phi.samples[1:][::-1]).max())
    hat_l2 = math.sqrt(float(np.sum(hat(grid.xi) ** 2)) * math.pi / grid.half_length)
    pars = abs(bump.phi.l2_norm() - hat_l2 / math.sqrt(2.0 * math.pi)) / bump.phi.l2_norm()
    report.add_check(
        "bump_invariants",
        plateau_ok and bump.peak > 0 and even_res <= 1e-12 and pars <= 1e-10,
        {"evenness": even_res, "parseval": pars},
        "plateau/evenness/parseval",
    )

    fams = {n: make_packets(bump, n) for n in (4, 5, 6)}
    fast = [besov_norm(fams[n].bump_fast, B321, cutoffs) * 2.0**n for n in fams]
    slow = [besov_norm(fams[n].bump_slow, B321, cutoffs) * 2.0 ** (n / 2.0) for n in fams]
    spread = max(
        (max(v) - min(v)) / max(v) for v in (fast, slow)
    )
    report.add_check("perturbation_scaling_exact", spread <= 1e-10, spread, "<= 1e-10")

    worst_mod = max(modulation_identity_residual(bump, fams[n]) for n in fams)
    report.add_check("modulation_identity", worst_mod <= 1e-12, worst_mod, "<= 1e-12")

    loc_ok = True
    worst_loc = 0.0
    for n in fams:
        rep = scaling_report(bump, n, cutoffs)
        loc_ok = loc_ok and all(rep["checks"].values())
        worst_loc = max(worst_loc, rep["localization_residual_cubic"])
    report.add_check("packet_scaling_reports", loc_ok, worst_loc, "all member checks")

    lim_quad, _ = product_limits(bump)
    lows = [
        besov_norm(
            quadratic_cross_product(fams[n]), BesovIndex(1.5, 2, math.inf), cutoffs
        )
        for n in (5, 6)
    ]
    report.add_check(
        "product_lower_bound", min(lows) >= 0.5 * lim_quad, min(lows), f">= {0.5 * lim_quad}"
    )


def _check_dynamics_smoke(report):
    grid = Grid(2**12, DEFAULT_HALF_LENGTH)
    u0 = smooth_profile(grid)
    cfg = SolverConfig(final_time=0.25, sample_times=(0.1, 0.25))

    worst_eq = 0.0
    for model in Model:
        const = Field.constant(grid, 0.7)
        traj = evolve(const, model, cfg, decay_tol=None)
        worst_eq = max(worst_eq, float(np.abs(traj.final().samples - 0.7).max()))
    report.add_check("constant_equilibrium", worst_eq <= 1e-12, worst_eq, "<= 1e-12")

    t1 = evolve(u0, Model.CH, cfg)
    t2 = evolve(u0, Model.CH, cfg)
    identical = all(
        np.array_equal(a[1].samples, b[1].samples) for a, b in zip(t1.samples, t2.samples)
    )
    report.add_check("evolve_deterministic", identical, identical, "bit-identical")
    report.add_check("h1_drift_smoke", t1.h1_drift() <= 1e-10, t1.h1_drift(), "<= 1e-10")

    lip = lipschitz_norm(u0)
    worst_small = 0.0
    for t, u in t1.samples:
        if t == 0.0:
            continue
        worst_small = max(worst_small, linf_norm(u - u0) / (t * lip**2))
    report.add_check(
        "small_time_consistency",
        worst_small <= SMALL_TIME_CONSTANT,
        worst_small,
        f"<= {SMALL_TIME_CONSTANT}",
    )


# --- output emission --------------------------------------------------------

CSV_HEADER = "model,n,t,D_n,ratio,g_norm,h1_drift,verdict"


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit_outputs(report: ExperimentReport, out_dir: str) -> list:
    """Write report.json, the per-experiment CSV and plot-ready .dat files.

    Returns the list of paths written.  All writes go through a temp file and
    os.replace so partially written outputs never appear.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    json_path = os.path.join(out_dir, "report.json")
    _atomic_write(json_path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    written.append(json_path)

    if report.kind == "nonuniform":
        lines = [CSV_HEADER]
        for row in sorted(report.rows, key=lambda r: (r["n"], r["t"])):
            if row["t"] == 0.0:
                continue
            lines.append(
                ",".join(
                    [
                        row["model"],
                        repr(row["n"]),
                        repr(row["t"]),
                        repr(row["D_n"]),
                        repr(row["ratio"]),
                        repr(row["g_norm"]),
                        repr(row["h1_drift"]),
                        row["verdict"],
                    ]
                )
            )
        csv_path = os.path.join(out_dir, "nonuniform.csv")
        _atomic_write(csv_path, "\n".join(lines) + "\n")
        written.append(csv_path)

        by_n: dict = {}
        for row in report.rows:
            if row["t"] > 0.0:
                by_n.setdefault(row["n"], []).append((row["t"], row["D_n"]))
        for n, pairs in sorted(by_n.items()):
            dat_path = os.path.join(out_dir, f"Dn_vs_t_n{n}.dat")
            body = "\n".join(f"{repr(t)} {repr(d)}" for t, d in sorted(pairs))
            _atomic_write(dat_path, body + "\n")
            written.append(dat_path)

    if report.kind == "taylor":
        by_datum: dict = {}
        for row in report.rows:
            by_datum.setdefault(row["datum"], []).append((row["t"], row["remainder"]))
        for label, pairs in sorted(by_datum.items()):
            dat_path = os.path.join(out_dir, f"remainder_vs_t_{label}.dat")
            body = "\n".join(f"{repr(t)} {repr(r)}" for t, r in sorted(pairs))
            _atomic_write(dat_path, body + "\n")
            written.append(dat_path)

    return written


def run_scaling_batch(
    n_values,
    grid_points: int | None = None,
    half_length: float = DEFAULT_HALF_LENGTH,
) -> ExperimentReport:
    """Scaling reports for a range of family members plus cross-n variation
    checks (each rescaled quantity must stay within a factor 1.5 over the
    range, and the rescaled product norms must approach their limits)."""
    pts = grid_points or min_points_for(max(n_values), half_length)
    grid = Grid(pts, half_length)
    cutoffs = build_cutoffs(grid)
    bump = build_bump(grid)
    report = ExperimentReport(
        kind="scalings",
        config={"n_values": list(n_values), "grid_points": pts, "half_length": half_length},
        grid=_grid_dict(grid),
    )
    reps = {}
    for n in n_values:
        try:
            reps[n] = scaling_report(bump, n, cutoffs)
            report.per_n[str(n)] = reps[n]
        except ResolutionExceeded as err:
            report.per_n[str(n)] = {"error": str(err)}
            report.add_check(f"completed_n{n}", False, str(err), "member constructible")
    if not reps:
        return report

    def variation(values):
        return max(values) / min(values)

    quantities = {
        "sup_packet_scaled": [r["sup_packet_scaled"] for r in reps.values()],
        "sup_packet_slope_scaled": [r["sup_packet_slope_scaled"] for r in reps.values()],
        "bump_fast_b32_scaled": [
            r["bump_fast_b32_norm"] * 2.0 ** (n + 1.5) for n, r in reps.items()
        ],
    }
    for s in ("1.5", "2.5", "3.5"):
        quantities[f"packet_besov_scaled_{s}"] = [
            r["packet_besov_scaled"][s] for r in reps.values()
        ]
    for name, values in quantities.items():
        v = variation(values)
        report.add_check(f"variation_{name}", v < 1.5, v, "< 1.5")

    member_ok = all(all(r["checks"].values()) for r in reps.values())
    report.add_check("member_checks", member_ok, member_ok, "all pass")

    n_top = max(reps)
    top = reps[n_top]
    for key, limit_key in (
        ("quad_product_b32inf", "quad_product_limit"),
        ("cubic_product_b32inf", "cubic_product_limit"),
    ):
        rel = abs(top[key] - top[limit_key]) / top[limit_key]
        report.add_check(f"limit_match_{key}_n{n_top}", rel <= 0.05, rel, "<= 0.05")
    return report
