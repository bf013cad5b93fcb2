"""Band-limited bump and the modulated wave-packet family.

The family is indexed by an integer n and built from one even bump phi whose
transform is 1 on |xi| <= 1/4 and 0 beyond |xi| >= 1/2:

    packet_n    = 2^{-3n/2} phi(x) sin(omega_n x),  omega_n ~ (17/12) 2^n,
    bump_fast_n = (12/17) 2^{-n}   phi(x),
    bump_slow_n = (12/17) 2^{-n/2} phi(x).

The packet occupies one dyadic ring while the bumps stay in the lowest block,
so Besov norms of every member and of the cross products
bump_fast * packet' and bump_slow^2 * packet' reduce to single-block
quadratures with exactly computable scaling in n.  As n grows the rescaled
product norms approach limits fixed by ||phi^2|| and ||phi^3||; those limits
are what the non-uniform-dependence experiments compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .besov import BesovIndex, CutoffPair, besov_norm, block_lp_profile
from .dynamics import Model
from .errors import DecayViolation, ResolutionExceeded
from .spectral import (
    Field,
    Grid,
    SpectralField,
    dealias_product,
    dealias_triple,
    derivative,
    forward_transform,
    inverse_transform,
    smooth_step,
)

CARRIER_RATIO = 17.0 / 12.0
PLATEAU_EDGE = 0.25
SUPPORT_EDGE = 0.5
# Achievable periodization floor for a compactly supported smooth transform;
# see check_decay in dynamics for the matching solver contract.
BUMP_DECAY_TOL = 1e-3


def bump_hat(xi):
    """Transform of the bump: 1 on |xi| <= 1/4, 0 on |xi| >= 1/2, smooth."""
    return smooth_step((SUPPORT_EDGE - np.abs(xi)) / (SUPPORT_EDGE - PLATEAU_EDGE))


@dataclass(frozen=True)
class BumpProfile:
    """The bump phi together with its tabulated transform."""

    grid: Grid
    phi: Field
    hat: object  # callable xi -> [0, 1]

    @property
    def peak(self) -> float:
        return float(self.phi.samples[self.grid.num_points // 2])


def build_bump(grid: Grid, decay_tol: float = BUMP_DECAY_TOL) -> BumpProfile:
    """Tabulate the bump transform on the grid and invert it.

    Requires at least 32 frequency samples inside [-1/2, 1/2] (i.e. L >= 32 pi)
    so the plateau and transition are resolved.  Raises DecayViolation when the
    periodized bump fails to fall below decay_tol on the outer half of the box.
    """
    inside = int(np.sum(np.abs(grid.xi) <= SUPPORT_EDGE))
    if inside < 32:
        raise ResolutionExceeded(
            f"only {inside} frequency samples inside |xi| <= 1/2; need >= 32"
        )
    phi = inverse_transform(SpectralField(grid, bump_hat(grid.xi).astype(complex)))
    outer = np.abs(grid.x) >= grid.half_length / 2.0
    worst = float(np.abs(phi.samples[outer]).max())
    if worst >= decay_tol:
        raise DecayViolation(
            f"bump reaches {worst:.3e} at |x| >= L/2 (tolerance {decay_tol:.1e})"
        )
    return BumpProfile(grid=grid, phi=phi, hat=bump_hat)


@dataclass(frozen=True)
class PacketFamily:
    """Member n of the family: the packet and the two vanishing bumps."""

    n: int
    packet: Field
    bump_fast: Field  # amplitude (12/17) 2^{-n}; perturbs the quadratic model
    bump_slow: Field  # amplitude (12/17) 2^{-n/2}; perturbs the cubic model
    carrier: float  # snapped modulation frequency
    snap_error: float

    def perturbation(self, model: Model) -> Field:
        return self.bump_fast if model is Model.CH else self.bump_slow


def carrier_frequency(grid: Grid, n: int) -> tuple[float, float]:
    """Modulation frequency (17/12) 2^n snapped to the nearest grid frequency.

    Returns (snapped value, snap error); the error is below half the grid's
    frequency spacing by construction.
    """
    target = CARRIER_RATIO * 2.0**n
    k = round(target * grid.half_length / math.pi)
    snapped = math.pi * k / grid.half_length
    return snapped, abs(snapped - target)


def min_points_for(n_max: int, half_length: float) -> int:
    """Smallest power-of-two N (>= 2^15) resolving family member n_max with
    the 2/3 dealiasing headroom required by make_packets."""
    need = (CARRIER_RATIO * 2.0**n_max + SUPPORT_EDGE) * 1.5
    num = 2**15
    while math.pi * num / (2.0 * half_length) < need:
        num *= 2
    return num


def make_packets(bump: BumpProfile, n: int) -> PacketFamily:
    """Construct family member n on the bump's grid.

    Requires (17/12) 2^n + 1/2 <= (2/3) xi_max so cubic products of the
    members stay inside the alias-free band; raises ResolutionExceeded
    otherwise.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    grid = bump.grid
    top = CARRIER_RATIO * 2.0**n + SUPPORT_EDGE
    if top > (2.0 / 3.0) * grid.xi_max:
        raise ResolutionExceeded(
            f"family member n={n} needs frequencies up to {top:.1f}, "
            f"beyond 2/3 of xi_max={grid.xi_max:.1f}"
        )
    omega, snap = carrier_frequency(grid, n)
    phi = bump.phi.samples
    # omega*x_i = pi*k*(2i-N)/N exactly; reducing the integer phase mod 2N
    # before the sine keeps the carrier exact to one ulp even at large n*x
    # (naive np.sin(omega*x) loses ~eps*|omega x| and the spectral derivative
    # amplifies that noise above the localization tolerances).
    npts = grid.num_points
    k = round(omega * grid.half_length / math.pi)
    m = (k * (2 * np.arange(npts, dtype=np.int64) - npts)) % (2 * npts)
    carrier = np.sin((math.pi / npts) * m)
    packet = Field(grid, 2.0 ** (-1.5 * n) * phi * carrier)
    bump_fast = Field(grid, (12.0 / 17.0) * 2.0 ** (-float(n)) * phi)
    bump_slow = Field(grid, (12.0 / 17.0) * 2.0 ** (-0.5 * n) * phi)
    return PacketFamily(
        n=n,
        packet=packet,
        bump_fast=bump_fast,
        bump_slow=bump_slow,
        carrier=omega,
        snap_error=snap,
    )


def quadratic_cross_product(family: PacketFamily) -> Field:
    """bump_fast * packet' (dealiased): the term driving the quadratic model."""
    return dealias_product(family.bump_fast, derivative(family.packet, 1), 2)


def cubic_cross_product(family: PacketFamily) -> Field:
    """bump_slow^2 * packet' (dealiased): the term driving the cubic model."""
    dp = derivative(family.packet, 1)
    return dealias_triple(family.bump_slow, family.bump_slow, dp)


def product_limits(bump: BumpProfile) -> tuple[float, float]:
    """Large-n limits of the rescaled cross-product norms, by quadrature.

    The quadratic product tends to 2^{-1/2} ||phi^2||_{L^2} in B^{3/2}_{2,inf}
    and the cubic one to (12/17) 2^{-1/2} ||phi^3||_{L^2}; both follow from
    averaging the squared carrier over the envelope.
    """
    phi = bump.phi
    dx = bump.grid.dx
    norm_sq = math.sqrt(dx * float(np.sum(phi.samples**4)))
    norm_cu = math.sqrt(dx * float(np.sum(phi.samples**6)))
    return norm_sq / math.sqrt(2.0), (12.0 / 17.0) * norm_cu / math.sqrt(2.0)


def ring_membership(grid: Grid, cutoffs: CutoffPair, center: float, width: float):
    """Block indices whose ring support intersects [center-width, center+width].

    The ring of block j is supported in [2^j, (8/3) 2^j]; block -1 covers
    |xi| <= 4/3.  Everything outside the returned set annihilates a field
    whose spectrum sits in the given band.
    """
    lo, hi = center - width, center + width
    members = []
    if lo <= 4.0 / 3.0:
        members.append(-1)
    for j in range(0, cutoffs.j_max + 1):
        if 2.0**j <= hi and (8.0 / 3.0) * 2.0**j >= lo:
            members.append(j)
    return members


def localization_residual(f: Field, cutoffs: CutoffPair, members) -> float:
    """Largest relative block norm outside the expected membership set."""
    profile = block_lp_profile(f, cutoffs, 2.0)
    total = f.l2_norm()
    if total == 0.0:
        return 0.0
    worst = 0.0
    for j in range(-1, cutoffs.j_max + 1):
        if j not in members:
            worst = max(worst, profile[j + 1] / total)
    return worst


def scaling_report(bump: BumpProfile, n: int, cutoffs: CutoffPair) -> dict:
    """Measure every contract of family member n; returns a JSON-ready dict.

    Contents: rescaled sup norms of the packet and bumps, the exact low-block
    Besov norm of bump_fast, rescaled packet Besov norms for s in
    {3/2, 5/2, 7/2}, cross-product norms in B^{3/2}_{2,inf} with their
    large-n limits, ring membership and localization residuals, and the
    carrier snap error.  Both the bump's center value and its sup norm are
    recorded; only powers of two enter assertions.
    """
    fam = make_packets(bump, n)
    grid = bump.grid
    two = 2.0
    dp = derivative(fam.packet, 1)

    quad = quadratic_cross_product(fam)
    cub = cubic_cross_product(fam)
    lim_quad, lim_cub = product_limits(bump)
    b32inf = BesovIndex(1.5, 2, math.inf)
    b321 = BesovIndex(1.5, 2, 1)

    members_quad = ring_membership(grid, cutoffs, fam.carrier, 1.0)
    members_cub = ring_membership(grid, cutoffs, fam.carrier, 1.5)
    members_packet = ring_membership(grid, cutoffs, fam.carrier, 0.5)

    phi_l2 = bump.phi.l2_norm()
    low_block_l2 = block_lp_profile(bump.phi, cutoffs, 2.0)[0]

    report = {
        "n": n,
        "carrier": fam.carrier,
        "snap_error": fam.snap_error,
        "snap_budget": math.pi / grid.half_length / 2.0,
        "bump_center_value": bump.peak,
        "bump_sup": bump.phi.max_abs(),
        "sup_packet_scaled": fam.packet.max_abs() * two ** (1.5 * n),
        "sup_packet_slope_scaled": dp.max_abs() * two ** (0.5 * n),
        "sup_bump_fast_scaled": fam.bump_fast.max_abs() * two**n,
        "sup_bump_fast_slope_scaled": derivative(fam.bump_fast, 1).max_abs() * two**n,
        "sup_bump_slow_scaled": fam.bump_slow.max_abs() * two ** (0.5 * n),
        "sup_bump_slow_slope_scaled": derivative(fam.bump_slow, 1).max_abs()
        * two ** (0.5 * n),
        "bump_fast_b32_norm": besov_norm(fam.bump_fast, b321, cutoffs),
        "bump_fast_b32_exact": (12.0 / 17.0) * two ** (-(n + 1.5)) * low_block_l2,
        "bump_slow_b32_norm": besov_norm(fam.bump_slow, b321, cutoffs),
        "bump_slow_b32_exact": (12.0 / 17.0) * two ** (-(0.5 * n + 1.5)) * low_block_l2,
        "phi_l2": phi_l2,
        "packet_besov_scaled": {
            str(s): besov_norm(fam.packet, BesovIndex(s, 2, 1), cutoffs)
            * two ** ((1.5 - s) * n)
            for s in (1.5, 2.5, 3.5)
        },
        "quad_product_b32inf": besov_norm(quad, b32inf, cutoffs),
        "quad_product_b321": besov_norm(quad, b321, cutoffs),
        "quad_product_limit": lim_quad,
        "cubic_product_b32inf": besov_norm(cub, b32inf, cutoffs),
        "cubic_product_b321": besov_norm(cub, b321, cutoffs),
        "cubic_product_limit": lim_cub,
        "ring_membership_packet": members_packet,
        "ring_membership_quad": members_quad,
        "ring_membership_cubic": members_cub,
        "localization_residual_packet": localization_residual(
            fam.packet, cutoffs, members_packet
        ),
        "localization_residual_quad": localization_residual(quad, cutoffs, members_quad),
        "localization_residual_cubic": localization_residual(cub, cutoffs, members_cub),
    }
    report["checks"] = {
        "snap_within_budget": bool(report["snap_error"] < report["snap_budget"]),
        "bump_fast_b32_matches": _close(
            report["bump_fast_b32_norm"], report["bump_fast_b32_exact"], 1e-10
        ),
        "bump_slow_b32_matches": _close(
            report["bump_slow_b32_norm"], report["bump_slow_b32_exact"], 1e-10
        ),
        "localization_quad": bool(report["localization_residual_quad"] < 1e-12),
        "localization_cubic": bool(report["localization_residual_cubic"] < 1e-12),
        "localization_packet": bool(report["localization_residual_packet"] < 1e-12),
    }
    return report


def _close(a: float, b: float, rtol: float) -> bool:
    scale = max(abs(a), abs(b))
    return bool(scale == 0.0 or abs(a - b) <= rtol * scale)


def modulation_identity_residual(bump: BumpProfile, family: PacketFamily) -> float:
    """Coefficientwise check that the packet's spectrum is the bump transform
    shifted to +-carrier with the sine phase: (hat(xi-w) - hat(xi+w)) / 2i
    times the amplitude.  Returns the max absolute mismatch relative to the
    packet's largest coefficient."""
    grid = bump.grid
    F = forward_transform(family.packet).coeffs
    amp = 2.0 ** (-1.5 * family.n)
    expected = (
        amp
        * (bump_hat(grid.xi - family.carrier) - bump_hat(grid.xi + family.carrier))
        / 2j
    )
    scale = float(np.abs(F).max())
    return float(np.abs(F - expected).max() / scale)
