"""Model right-hand sides and the RK4 time integrator.

Two nonlocal transport equations are implemented on the periodic grid:

  quadratic model (CH):   u_t + u u_x     = P(u),
      P(u) = p_operator(u) = -d/dx (1 - d2/dx2)^{-1} (u^2 + 0.5 u_x^2)

  cubic model (Novikov):  u_t + u^2 u_x   = Q(u),
      Q(u) = -(1 - d2/dx2)^{-1} (0.5 u_x^3 + d/dx (1.5 u u_x^2 + u^3))

Both right-hand sides vanish on constants, so constants are equilibria, and
both models conserve the H^1 energy dx * sum(u^2 + u_x^2) exactly in the
continuum; the integrator monitors the discrete version.  Evolution uses
classical RK4 with an advective CFL step size, aborting with BlowUp when the
slope passes the wave-breaking threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .besov import BesovIndex, CutoffPair, besov_norm, lipschitz_norm
from .errors import BlowUp, DecayViolation, InvalidField
from .spectral import (
    Field,
    Grid,
    _coeffs,
    _padded_grid,
    _to_field,
    _truncate,
    _upsample,
    dealias_product,
    dealias_triple,
    derivative,
)

# Initial data must fall below this at |x| >= L/2 so that the periodic wrap
# cannot contaminate the run; band-limited bumps bottom out near 1e-4 of
# their peak at practical box sizes, hence the default.
DECAY_TOL = 1e-3


class Model(enum.Enum):
    CH = "ch"
    NOVIKOV = "novikov"


@dataclass(frozen=True)
class SolverConfig:
    """Time-integration parameters.

    dt is recomputed every step as min(dt_max, cfl*dx/(1 + ||u||_inf)) and
    shortened to land exactly on each requested sample time.
    """

    final_time: float
    cfl: float = 0.3
    dt_max: float = 1e-2
    sample_times: tuple = ()
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if self.final_time < 0:
            raise ValueError("final_time must be nonnegative")
        times = tuple(float(t) for t in self.sample_times)
        if any(t < 0 or t > self.final_time + 1e-12 for t in times):
            raise ValueError("sample_times must lie in [0, final_time]")
        if list(times) != sorted(times):
            raise ValueError("sample_times must be sorted")
        object.__setattr__(self, "sample_times", times)


@dataclass
class Trajectory:
    """Sampled solution of one run, with per-sample diagnostics."""

    model: Model
    samples: list  # [(time, Field)]
    h1_energy: list
    lipschitz: list
    besov: dict  # BesovIndex -> list of norms
    steps_taken: int = 0

    def times(self):
        return [t for t, _ in self.samples]

    def final(self) -> Field:
        return self.samples[-1][1]

    def h1_drift(self) -> float:
        e0 = self.h1_energy[0]
        if e0 == 0.0:
            return max(abs(e) for e in self.h1_energy)
        return max(abs(e - e0) for e in self.h1_energy) / abs(e0)


def h1_energy(u: Field) -> float:
    """Discrete H^1 energy dx * sum(u^2 + u_x^2)."""
    ux = derivative(u, 1)
    return float(u.grid.dx * np.sum(u.samples**2 + ux.samples**2))


def p_operator(u: Field) -> Field:
    """Nonlocal term of the quadratic model applied to u."""
    g = u.grid
    ux = derivative(u, 1)
    source = dealias_product(u, u, 2) + 0.5 * dealias_product(ux, ux, 2)
    m = g.multiplier("p_op", lambda xi: -1j * xi / (1.0 + xi**2))
    mm = m.copy()
    mm[g.nyquist_index] = 0.0
    return _to_field(g, mm * _coeffs(source))


def ch_rhs(u: Field) -> Field:
    """-u u_x + P(u); the transport term is written as -(u^2)'/2."""
    half_dsq = 0.5 * derivative(dealias_product(u, u, 2), 1)
    return p_operator(u) - half_dsq


def q_operator(u: Field) -> Field:
    """Nonlocal term of the cubic model applied to u."""
    g = u.grid
    ux = derivative(u, 1)
    u3 = dealias_triple(u, u, u)
    uux2 = dealias_triple(u, ux, ux)
    ux3 = dealias_triple(ux, ux, ux)
    source = 0.5 * ux3 + derivative(1.5 * uux2 + u3, 1)
    m = g.multiplier("helmholtz", lambda xi: 1.0 / (1.0 + xi**2))
    return _to_field(g, -m * _coeffs(source))


def novikov_rhs(u: Field) -> Field:
    """-u^2 u_x + Q(u); the transport term is written as -(u^3)'/3."""
    third_dcube = derivative(dealias_triple(u, u, u), 1) * (1.0 / 3.0)
    return q_operator(u) - third_dcube


def rhs(u: Field, model: Model) -> Field:
    return ch_rhs(u) if model is Model.CH else novikov_rhs(u)


def taylor_coefficient(u0: Field, model: Model) -> Field:
    """First-order coefficient of t -> S_t(u0): the right-hand side at u0."""
    return rhs(u0, model)


def remainder_bound(u0: Field, model: Model, cutoffs: CutoffPair) -> float:
    """Norm functional bounding the second-order Taylor remainder.

    Quadratic model:
        1 + ||u||_C01^2 ||u||_{B^{5/2}} +
        ||u||_inf (||u||_{B^{5/2}} + (||u||_inf + ||u||_C01^2) ||u||_{B^{7/2}})
    Cubic model:
        1 + ||u||_C01^2 ||u||_{B^{5/2}} + ||u||_C01^4 ||u||_{B^{7/2}}
    """
    lip = lipschitz_norm(u0)
    sup = u0.max_abs()
    b52 = besov_norm(u0, BesovIndex(2.5, 2, 1), cutoffs)
    b72 = besov_norm(u0, BesovIndex(3.5, 2, 1), cutoffs)
    if model is Model.CH:
        return 1.0 + lip**2 * b52 + sup * (b52 + (sup + lip**2) * b72)
    return 1.0 + lip**2 * b52 + lip**4 * b72


def check_decay(u0: Field, tol: float | None = DECAY_TOL):
    """Line-truncation contract: |u0| < tol on the outer half of the box.

    tol=None skips the check; that is the documented escape hatch for data
    that are periodic-exact rather than line-truncated (constants, plane
    waves), for which the contract is vacuous.
    """
    if tol is None:
        return
    g = u0.grid
    outer = np.abs(g.x) >= g.half_length / 2.0
    worst = float(np.abs(u0.samples[outer]).max())
    if worst >= tol:
        raise DecayViolation(
            f"initial datum reaches {worst:.3e} at |x| >= L/2 (tolerance {tol:.1e})"
        )


# --- spectral-space right-hand sides used inside the integrator ------------


def _ch_rhs_hat(grid: Grid, F: np.ndarray, mults) -> np.ndarray:
    ixi, p_mult, _helm, fine2, _fine3 = mults
    Fx = ixi * F
    a = np.real(np.fft.ifft(fine2.alt_phase * _upsample(grid, F, fine2)) / fine2.dx)
    b = np.real(np.fft.ifft(fine2.alt_phase * _upsample(grid, Fx, fine2)) / fine2.dx)
    u2 = _truncate(grid, fine2.dx * fine2.alt_phase * np.fft.fft(a * a), fine2)
    ux2 = _truncate(grid, fine2.dx * fine2.alt_phase * np.fft.fft(b * b), fine2)
    return -0.5 * ixi * u2 + p_mult * (u2 + 0.5 * ux2)


def _novikov_rhs_hat(grid: Grid, F: np.ndarray, mults) -> np.ndarray:
    ixi, _p, helm, _fine2, fine3 = mults
    Fx = ixi * F
    a = np.real(np.fft.ifft(fine3.alt_phase * _upsample(grid, F, fine3)) / fine3.dx)
    b = np.real(np.fft.ifft(fine3.alt_phase * _upsample(grid, Fx, fine3)) / fine3.dx)
    tr = lambda w: _truncate(grid, fine3.dx * fine3.alt_phase * np.fft.fft(w), fine3)
    u3 = tr(a * a * a)
    uux2 = tr(a * b * b)
    ux3 = tr(b * b * b)
    return -(1.0 / 3.0) * ixi * u3 - helm * (0.5 * ux3 + ixi * (1.5 * uux2 + u3))


def _step_multipliers(grid: Grid):
    ixi = (1j * grid.xi).copy()
    ixi[grid.nyquist_index] = 0.0
    p_mult = (-1j * grid.xi / (1.0 + grid.xi**2)).copy()
    p_mult[grid.nyquist_index] = 0.0
    helm = 1.0 / (1.0 + grid.xi**2)
    return ixi, p_mult, helm, _padded_grid(grid, 2), _padded_grid(grid, 3)


def evolve(
    u0: Field,
    model: Model,
    config: SolverConfig,
    cutoffs: CutoffPair | None = None,
    besov_indices: tuple = (),
    decay_tol: float | None = DECAY_TOL,
) -> Trajectory:
    """Integrate one initial datum with classical RK4.

    Samples are recorded at t = 0, at every requested sample time (landed on
    exactly) and at final_time.  Per-sample diagnostics hold the H^1 energy,
    the C^{0,1} norm and any requested Besov norms (cutoffs must be supplied
    when besov_indices is nonempty).  Raises BlowUp when ||u_x||_inf exceeds
    the configured threshold and InvalidField if the state goes non-finite.
    """
    if besov_indices and cutoffs is None:
        raise ValueError("besov_indices requested but no cutoffs supplied")
    check_decay(u0, decay_tol)
    grid = u0.grid
    mults = _step_multipliers(grid)
    rhs_hat = _ch_rhs_hat if model is Model.CH else _novikov_rhs_hat

    targets = [t for t in config.sample_times if t > 0.0]
    if config.final_time > 0.0 and (
        not targets or abs(targets[-1] - config.final_time) > 1e-12
    ):
        targets.append(config.final_time)

    traj = Trajectory(model=model, samples=[], h1_energy=[], lipschitz=[], besov={
        idx: [] for idx in besov_indices
    })

    def record(t: float, u: Field):
        traj.samples.append((t, u))
        traj.h1_energy.append(h1_energy(u))
        traj.lipschitz.append(lipschitz_norm(u))
        for idx in besov_indices:
            traj.besov[idx].append(besov_norm(u, idx, cutoffs))

    record(0.0, u0)
    F = _coeffs(u0)
    t = 0.0
    for target in targets:
        while t < target - 1e-13:
            u = np.real(np.fft.ifft(grid.alt_phase * F) / grid.dx)
            if not np.all(np.isfinite(u)):
                raise InvalidField(f"solution became non-finite at t={t:.6f}")
            slope = float(np.abs(np.fft.ifft(grid.alt_phase * (mults[0] * F)).real).max() / grid.dx)
            if slope > config.blowup_threshold:
                raise BlowUp(t, slope)
            dt = min(
                config.dt_max,
                config.cfl * grid.dx / (1.0 + float(np.abs(u).max())),
                target - t,
            )
            k1 = rhs_hat(grid, F, mults)
            k2 = rhs_hat(grid, F + 0.5 * dt * k1, mults)
            k3 = rhs_hat(grid, F + 0.5 * dt * k2, mults)
            k4 = rhs_hat(grid, F + dt * k3, mults)
            F = F + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
            traj.steps_taken += 1
            if abs(t - target) < 1e-13:
                t = target
        record(target, _to_field(grid, F))
    return traj
