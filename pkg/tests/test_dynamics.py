import math

import numpy as np
import pytest

from besovlab import (
    BesovIndex,
    BlowUp,
    DecayViolation,
    Field,
    Grid,
    Model,
    SolverConfig,
    besov_norm,
    build_bump,
    build_cutoffs,
    ch_rhs,
    derivative,
    evolve,
    h1_energy,
    make_packets,
    novikov_rhs,
    p_operator,
    q_operator,
    remainder_bound,
    taylor_coefficient,
)
from besovlab.harness import SMALL_TIME_CONSTANT, smooth_profile
from besovlab.besov import lipschitz_norm
from besovlab.spectral import _coeffs, _to_field, _truncate, _upsample


def kernel_quadrature(xs, w_fn, signed, refine_grid):
    """Trapezoid of the exponential kernel against an analytic source.

    signed=False: 0.5 e^{-|x-y|} (Helmholtz kernel); signed=True: the kernel
    of -d/dx (1-d2/dx2)^{-1}, i.e. 0.5 sign(x-y) e^{-|x-y|}.
    """
    dxf = refine_grid[1] - refine_grid[0]
    wy = w_fn(refine_grid)
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        diff = x - refine_grid
        ker = 0.5 * np.exp(-np.abs(diff))
        if signed:
            ker = ker * np.sign(diff)
        out[i] = dxf * np.sum(ker * wy)
    return out


class TestPOperator:
    def test_constant_maps_to_zero(self, trig_grid):
        out = p_operator(Field.constant(trig_grid, 3.0))
        assert out.max_abs() <= 1e-13

    def test_sine_closed_form(self, trig_grid):
        g = trig_grid
        out = p_operator(Field(g, np.sin(g.x)))
        assert np.abs(out.samples + np.sin(2 * g.x) / 10).max() <= 1e-12

    def test_odd_parity_preserved(self, trig_grid):
        g = trig_grid
        u = Field(g, np.sin(g.x) + 0.3 * np.sin(2 * g.x))
        out = p_operator(u).samples
        n = g.num_points
        # odd: value at -x equals -value at x (index 0 is x=-L, self-paired)
        flipped = -np.concatenate([out[:1], out[1:][::-1]])
        assert np.abs(out - flipped).max() <= 1e-12

    def test_gaussian_matches_kernel_quadrature(self):
        g = Grid(2**12, 32.0)
        u = Field(g, np.exp(-(g.x**2) / 2))
        out = p_operator(u).samples
        fine = np.linspace(-32.0, 32.0, g.num_points * 64, endpoint=False)
        idx = np.arange(0, g.num_points, 256)
        oracle = kernel_quadrature(
            g.x[idx], lambda y: (1 + y**2 / 2) * np.exp(-(y**2)), signed=True,
            refine_grid=fine,
        )
        assert np.abs(out[idx] - oracle).max() <= 1e-8


class TestModelRhs:
    def test_ch_constant_equilibrium(self, trig_grid):
        assert ch_rhs(Field.constant(trig_grid, -1.7)).max_abs() <= 1e-13

    def test_ch_sine_closed_form(self, trig_grid):
        g = trig_grid
        out = ch_rhs(Field(g, np.sin(g.x)))
        assert np.abs(out.samples + 0.6 * np.sin(2 * g.x)).max() <= 1e-12

    def test_ch_packet_pair_matches_fine_grid(self, box_bump):
        # same right-hand side evaluated on a 4x finer grid and truncated back
        g = box_bump.grid
        fam = make_packets(box_bump, 5)
        u = fam.packet + fam.bump_fast
        coarse = ch_rhs(u)

        fine = Grid(4 * g.num_points, g.half_length)
        uf = _to_field(fine, _upsample(g, _coeffs(u), fine))
        rhs_fine = ch_rhs(uf)
        ref = _to_field(g, _truncate(g, _coeffs(rhs_fine), fine))
        scale = ref.max_abs()
        assert np.abs(coarse.samples - ref.samples).max() <= 1e-9 * scale

    def test_novikov_constant_equilibrium(self, trig_grid):
        assert novikov_rhs(Field.constant(trig_grid, 0.9)).max_abs() <= 1e-13

    def test_novikov_sine_closed_form(self, trig_grid):
        # trig reduction of the cubic terms for u = sin x gives
        # Q(u) = -(3/4) cos x - (1/20) cos 3x and rhs = -cos x + (1/5) cos 3x
        g = trig_grid
        u = Field(g, np.sin(g.x))
        q = q_operator(u)
        assert np.abs(q.samples + 0.75 * np.cos(g.x) + np.cos(3 * g.x) / 20).max() <= 1e-12
        out = novikov_rhs(u)
        assert np.abs(out.samples + np.cos(g.x) - np.cos(3 * g.x) / 5).max() <= 1e-12

    def test_novikov_gaussian_matches_kernel_quadrature(self):
        # for u = exp(-x^2/2) the cubic source reduces to -5 x^3 exp(-3x^2/2)
        g = Grid(2**12, 32.0)
        u = Field(g, np.exp(-(g.x**2) / 2))
        out = q_operator(u).samples
        fine = np.linspace(-32.0, 32.0, g.num_points * 64, endpoint=False)
        idx = np.arange(0, g.num_points, 256)
        oracle = kernel_quadrature(
            g.x[idx], lambda y: 5 * y**3 * np.exp(-1.5 * y**2), signed=False,
            refine_grid=fine,
        )
        assert np.abs(out[idx] - oracle).max() <= 1e-8

    def test_taylor_coefficient_is_rhs(self, trig_grid):
        u = Field(trig_grid, np.sin(trig_grid.x))
        assert np.array_equal(
            taylor_coefficient(u, Model.CH).samples, ch_rhs(u).samples
        )
        assert np.array_equal(
            taylor_coefficient(u, Model.NOVIKOV).samples, novikov_rhs(u).samples
        )


class TestRemainderBound:
    def test_zero_field_gives_one(self, box_grid, box_cutoffs):
        z = Field.zero(box_grid)
        assert remainder_bound(z, Model.CH, box_cutoffs) == 1.0
        assert remainder_bound(z, Model.NOVIKOV, box_cutoffs) == 1.0

    def test_independent_reassembly(self, box_grid, box_cutoffs):
        f = smooth_profile(box_grid)
        lip = lipschitz_norm(f)
        sup = f.max_abs()
        b52 = besov_norm(f, BesovIndex(2.5, 2, 1), box_cutoffs)
        b72 = besov_norm(f, BesovIndex(3.5, 2, 1), box_cutoffs)
        expected_ch = 1 + lip**2 * b52 + sup * (b52 + (sup + lip**2) * b72)
        expected_nov = 1 + lip**2 * b52 + lip**4 * b72
        assert remainder_bound(f, Model.CH, box_cutoffs) == pytest.approx(expected_ch)
        assert remainder_bound(f, Model.NOVIKOV, box_cutoffs) == pytest.approx(
            expected_nov
        )

    def test_uniformly_bounded_along_family(self, box_bump, box_cutoffs):
        values = []
        for n in (4, 5):
            fam = make_packets(box_bump, n)
            values.append(
                remainder_bound(fam.packet + fam.bump_fast, Model.CH, box_cutoffs)
            )
            values.append(remainder_bound(fam.packet, Model.CH, box_cutoffs))
        assert max(values) < 3.0


class TestEvolve:
    def test_zero_horizon_returns_initial_sample(self, coarse_grid):
        u0 = smooth_profile(coarse_grid)
        traj = evolve(u0, Model.CH, SolverConfig(final_time=0.0))
        assert len(traj.samples) == 1
        t0, field0 = traj.samples[0]
        assert t0 == 0.0
        assert np.array_equal(field0.samples, u0.samples)

    @pytest.mark.parametrize("model", list(Model))
    def test_constant_is_equilibrium(self, coarse_grid, model):
        u0 = Field.constant(coarse_grid, 0.4)
        traj = evolve(u0, model, SolverConfig(final_time=0.5), decay_tol=None)
        assert np.abs(traj.final().samples - 0.4).max() <= 1e-12

    def test_decay_precondition_enforced(self, coarse_grid):
        u0 = Field(coarse_grid, 0.5 * np.cos(coarse_grid.x / 16))
        with pytest.raises(DecayViolation):
            evolve(u0, Model.CH, SolverConfig(final_time=0.1))

    def test_lands_exactly_on_sample_times(self, coarse_grid):
        times = (0.013, 0.05, 0.77 * 0.1)
        traj = evolve(
            smooth_profile(coarse_grid),
            Model.CH,
            SolverConfig(final_time=0.1, sample_times=times),
        )
        assert traj.times() == [0.0] + list(times) + [0.1]

    def test_temporal_order_four(self, coarse_grid):
        # Richardson: error against a dt/16 reference run contracts ~2^4
        # per halving of dt_max (cfl made non-binding)
        u0 = smooth_profile(coarse_grid)
        final = 0.5

        def run(dt):
            cfg = SolverConfig(final_time=final, cfl=1.0, dt_max=dt)
            return evolve(u0, Model.CH, cfg).final().samples

        ref = run(0.02 / 16)
        errs = [np.abs(run(dt) - ref).max() for dt in (0.02, 0.01)]
        order = math.log2(errs[0] / errs[1])
        assert order == pytest.approx(4.0, abs=0.2)

    @pytest.mark.parametrize("model", list(Model))
    def test_h1_energy_drift_small(self, coarse_grid, model):
        u0 = smooth_profile(coarse_grid)
        traj = evolve(u0, model, SolverConfig(final_time=0.5, sample_times=(0.25, 0.5)))
        assert traj.h1_drift() < 1e-6

    def test_deterministic(self, coarse_grid):
        u0 = smooth_profile(coarse_grid)
        cfg = SolverConfig(final_time=0.2, sample_times=(0.1, 0.2))
        a = evolve(u0, Model.CH, cfg)
        b = evolve(u0, Model.CH, cfg)
        for (ta, fa), (tb, fb) in zip(a.samples, b.samples):
            assert ta == tb
            assert np.array_equal(fa.samples, fb.samples)

    def test_blowup_detected(self, coarse_grid):
        # steep front: the slope of exp(-2x^2) grows from 1.21 past 2.5
        # well before t=1.5 under the quadratic model
        u0 = Field(coarse_grid, np.exp(-2 * coarse_grid.x**2))
        cfg = SolverConfig(final_time=1.5, blowup_threshold=2.5)
        with pytest.raises(BlowUp) as err:
            evolve(u0, Model.CH, cfg)
        assert 0.0 < err.value.time < 1.5
        assert err.value.slope > 2.5

    def test_small_time_consistency(self, coarse_grid):
        u0 = smooth_profile(coarse_grid)
        lip = lipschitz_norm(u0)
        traj = evolve(
            u0, Model.CH, SolverConfig(final_time=0.1, sample_times=(0.025, 0.05, 0.1))
        )
        for t, u in traj.samples:
            if t == 0.0:
                continue
            gap = np.abs(u.samples - u0.samples).max()
            assert gap <= SMALL_TIME_CONSTANT * t * lip**2

    def test_besov_diagnostics_recorded(self, coarse_grid):
        cutoffs = build_cutoffs(coarse_grid)
        idx = BesovIndex(1.5, 2, 1)
        traj = evolve(
            smooth_profile(coarse_grid),
            Model.CH,
            SolverConfig(final_time=0.05, sample_times=(0.05,)),
            cutoffs=cutoffs,
            besov_indices=(idx,),
        )
        assert len(traj.besov[idx]) == len(traj.samples)
        assert all(v > 0 for v in traj.besov[idx])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(final_time=1.0, cfl=0.0)
        with pytest.raises(ValueError):
            SolverConfig(final_time=1.0, sample_times=(0.5, 0.2))
        with pytest.raises(ValueError):
            SolverConfig(final_time=0.1, sample_times=(0.5,))


def test_h1_energy_formula(trig_grid):
    g = trig_grid
    u = Field(g, np.sin(3 * g.x))
    ux = derivative(u, 1)
    expected = g.dx * float(np.sum(u.samples**2 + ux.samples**2))
    assert h1_energy(u) == pytest.approx(expected)
    # sin(3x): integral of sin^2 + 9 cos^2 over [-pi, pi) is 10 pi
    assert h1_energy(u) == pytest.approx(10 * math.pi, rel=1e-12)
