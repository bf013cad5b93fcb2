"""Periodic grid, Fourier transforms and multiplier operators.

The domain is the torus [-L, L) sampled at N equispaced points, used as a
numerical stand-in for the real line (all admissible data decay well inside
the box).  Transforms follow the physical convention

    F f(xi)  = integral e^{-i x xi} f(x) dx,
    f(x)     = (1/2pi) integral e^{+i x xi} F f(xi) dxi,

discretised with dx-weighted sums on the frequency set xi_k = pi k / L,
k = -N/2 .. N/2-1.  Under this convention the discrete Parseval identity

    dx * sum |f_i|^2 = (1/2L) * sum |Ff_k|^2

holds exactly, and band-limited statements about continuous transforms carry
over verbatim to the arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidField, NonRealSpectrum

HERMITIAN_RTOL = 1e-12


def smooth_step(r):
    """C-infinity ramp: 0 for r <= 0, 1 for r >= 1, strictly monotone between.

    Built from exp(-1/r); satisfies smooth_step(r) + smooth_step(1-r) == 1
    exactly, which makes telescoping cutoff sums exact in floating point.
    """
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    out[r >= 1.0] = 1.0
    mid = (r > 0.0) & (r < 1.0)
    if np.any(mid):
        rm = r[mid]
        with np.errstate(over="ignore", under="ignore"):
            a = np.exp(-1.0 / rm)
            b = np.exp(-1.0 / (1.0 - rm))
        out[mid] = a / (a + b)
    return out


class Grid:
    """Uniform periodic grid on [-L, L) with its discrete frequency set.

    Attributes
    ----------
    num_points : int
        Number of samples N (even, >= 16).
    half_length : float
        L; the domain is [-L, L).
    dx : float
        Spacing 2L/N.
    x : ndarray
        Sample locations -L + i*dx.
    xi : ndarray
        Frequencies pi*k/L in FFT order (k = 0..N/2-1, -N/2..-1).
    xi_max : float
        Magnitude of the Nyquist frequency, pi*N/(2L).
    """

    def __init__(self, num_points: int, half_length: float):
        if num_points < 16 or num_points % 2 != 0:
            raise ValueError(f"num_points must be even and >= 16, got {num_points}")
        if not half_length > 0:
            raise ValueError(f"half_length must be positive, got {half_length}")
        self.num_points = int(num_points)
        self.half_length = float(half_length)
        self.dx = 2.0 * self.half_length / self.num_points
        self.x = -self.half_length + self.dx * np.arange(self.num_points)
        n = self.num_points
        k = np.concatenate([np.arange(0, n // 2), np.arange(-n // 2, 0)])
        self.k = k
        self.xi = (np.pi / self.half_length) * k
        self.xi_max = np.pi * n / (2.0 * self.half_length)
        # e^{-i x_m xi_k} = (-1)^k e^{-2pi i mk/N}: the (-1)^k phase maps
        # numpy's 0-based FFT onto the grid whose first sample sits at -L.
        self.alt_phase = np.where(k % 2 == 0, 1.0, -1.0)
        self.nyquist_index = n // 2  # position of k = -N/2 in FFT order
        for arr in (self.x, self.k, self.xi, self.alt_phase):
            arr.flags.writeable = False
        self._cache: dict = {}

    def __repr__(self):
        return f"Grid(num_points={self.num_points}, half_length={self.half_length!r})"

    def padded(self, factor_num: int, factor_den: int = 1) -> "Grid":
        """Finer grid with the same half_length and N*factor points (cached)."""
        m = self.num_points * factor_num // factor_den
        if m % 2:
            m += 1
        key = ("pad", m)
        if key not in self._cache:
            self._cache[key] = Grid(m, self.half_length)
        return self._cache[key]

    def multiplier(self, key, builder) -> np.ndarray:
        """Memoised read-only multiplier array for this grid."""
        if key not in self._cache:
            arr = np.asarray(builder(self.xi))
            arr.flags.writeable = False
            self._cache[key] = arr
        return self._cache[key]


@dataclass(frozen=True)
class Field:
    """Real-valued function sampled on a grid."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.shape != (self.grid.num_points,):
            raise ValueError(
                f"samples shape {samples.shape} does not match grid size {self.grid.num_points}"
            )
        if not np.all(np.isfinite(samples)):
            raise InvalidField("field contains non-finite samples")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        return cls(grid, fn(grid.x))

    @classmethod
    def zero(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.num_points))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.num_points, float(value)))

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.samples - other.samples)

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.samples)

    def __mul__(self, scalar) -> "Field":
        return Field(self.grid, float(scalar) * self.samples)

    __rmul__ = __mul__

    def _check_same_grid(self, other: "Field"):
        if other.grid is not self.grid and (
            other.grid.num_points != self.grid.num_points
            or other.grid.half_length != self.grid.half_length
        ):
            raise ValueError("fields live on different grids")

    def max_abs(self) -> float:
        return float(np.abs(self.samples).max())

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.dx * np.sum(self.samples**2)))

    def lp_norm(self, p: float) -> float:
        if p == np.inf:
            return self.max_abs()
        return float((self.grid.dx * np.sum(np.abs(self.samples) ** p)) ** (1.0 / p))

    def inner(self, other: "Field") -> float:
        self._check_same_grid(other)
        return float(self.grid.dx * np.sum(self.samples * other.samples))


@dataclass(frozen=True)
class SpectralField:
    """Discrete Fourier coefficients of a real field, indexed by xi_k."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.grid.num_points,):
            raise ValueError("coefficient count does not match grid")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def hermitian_residual(self) -> float:
        """Max |c(-xi) - conj(c(xi))| relative to max |c| (0 for real fields)."""
        c = self.coeffs
        scale = float(np.abs(c).max())
        if scale == 0.0:
            return 0.0
        mirrored = np.conj(np.roll(c[::-1], 1))  # index k -> -k
        resid = np.abs(c - mirrored)
        resid[self.grid.nyquist_index] = abs(c.imag[self.grid.nyquist_index])
        return float(resid.max() / scale)


def forward_transform(f: Field) -> SpectralField:
    """Forward transform under the e^{-i x xi} convention with dx weighting."""
    g = f.grid
    coeffs = g.dx * g.alt_phase * np.fft.fft(f.samples)
    return SpectralField(g, coeffs)


def inverse_transform(F: SpectralField, check: bool = True) -> Field:
    """Inverse transform; raises NonRealSpectrum if coefficients are not
    Hermitian-symmetric to HERMITIAN_RTOL (relative)."""
    if check:
        resid = F.hermitian_residual()
        if resid > HERMITIAN_RTOL:
            raise NonRealSpectrum(f"hermitian symmetry violated: residual {resid:.3e}")
    g = F.grid
    samples = np.real(np.fft.ifft(g.alt_phase * F.coeffs) / g.dx)
    return Field(g, samples)


def _coeffs(f: Field) -> np.ndarray:
    g = f.grid
    return g.dx * g.alt_phase * np.fft.fft(f.samples)


def _to_field(grid: Grid, coeffs: np.ndarray) -> Field:
    return Field(grid, np.real(np.fft.ifft(grid.alt_phase * coeffs) / grid.dx))


def _multiplier_array(grid: Grid, m) -> np.ndarray:
    """Evaluate/validate a Fourier multiplier on the grid frequencies.

    Requires m(-xi) = conj(m(xi)); the Nyquist entry is replaced by its real
    part so real fields stay real (odd multipliers are zeroed there).
    """
    values = np.asarray(m(grid.xi) if callable(m) else m, dtype=complex)
    if values.shape != grid.xi.shape:
        raise ValueError("multiplier array does not match grid frequencies")
    scale = float(np.abs(values).max())
    if scale > 0.0:
        mirrored = np.conj(np.roll(values[::-1], 1))
        resid = np.abs(values - mirrored)
        resid[grid.nyquist_index] = 0.0
        if float(resid.max()) > HERMITIAN_RTOL * scale:
            raise NonRealSpectrum("multiplier is not Hermitian-compatible")
    values = values.copy()
    values[grid.nyquist_index] = values[grid.nyquist_index].real
    return values


def apply_multiplier(f: Field, m) -> Field:
    """Apply the Fourier multiplier operator m(D): F^{-1}(m(xi) F f)."""
    values = _multiplier_array(f.grid, m)
    return _to_field(f.grid, values * _coeffs(f))


def derivative(f: Field, order: int = 1) -> Field:
    """Spectral derivative of the given order (1, 2 or 3).

    Exact for band-limited inputs; the Nyquist mode of odd-order derivatives
    is zeroed to preserve realness.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    g = f.grid

    def build(xi, order=order):
        m = (1j * xi) ** order
        m[g.nyquist_index] = m[g.nyquist_index].real
        return m

    m = g.multiplier(("deriv", order), build)
    return _to_field(g, m * _coeffs(f))


def helmholtz_inverse(f: Field) -> Field:
    """Apply (1 - d^2/dx^2)^{-1}, the multiplier 1/(1 + xi^2).

    Equals convolution with the kernel 0.5*e^{-|x|} up to the periodic
    wrap-around, which is negligible for well-decaying data.
    """
    g = f.grid
    m = g.multiplier("helmholtz", lambda xi: 1.0 / (1.0 + xi**2))
    return _to_field(g, m * _coeffs(f))


def _padded_grid(grid: Grid, total_degree: int) -> Grid:
    # 3/2-rule padding for quadratic terms, factor 2 for cubic terms; both
    # keep the retained band |xi| < xi_max alias-free even at full bandwidth.
    if total_degree == 2:
        return grid.padded(3, 2)
    return grid.padded(2, 1)


def _upsample(grid: Grid, coeffs: np.ndarray, fine: Grid) -> np.ndarray:
    out = np.zeros(fine.num_points, dtype=complex)
    h = grid.num_points // 2
    out[:h] = coeffs[:h]
    out[fine.num_points - h :] = coeffs[grid.num_points - h :]
    return out


def _truncate(grid: Grid, coeffs: np.ndarray, fine: Grid) -> np.ndarray:
    out = np.zeros(grid.num_points, dtype=complex)
    h = grid.num_points // 2
    out[:h] = coeffs[:h]
    # skip index h (the coarse Nyquist): it is zeroed on truncation
    out[h + 1 :] = coeffs[fine.num_points - h + 1 :]
    return out


def dealias_product(f: Field, g: Field, total_degree: int = 2) -> Field:
    """Pointwise product evaluated on a zero-padded grid, then truncated.

    total_degree declares the total polynomial degree of the nonlinearity the
    product participates in (2 for quadratic, 3 for cubic) and selects the
    padding.  Exact to rounding for inputs whose combined bandwidth fits the
    original grid.
    """
    if total_degree not in (2, 3):
        raise ValueError(f"total_degree must be 2 or 3, got {total_degree}")
    f._check_same_grid(g)
    grid = f.grid
    fine = _padded_grid(grid, total_degree)
    a = np.real(np.fft.ifft(fine.alt_phase * _upsample(grid, _coeffs(f), fine)) / fine.dx)
    b = np.real(np.fft.ifft(fine.alt_phase * _upsample(grid, _coeffs(g), fine)) / fine.dx)
    prod = fine.dx * fine.alt_phase * np.fft.fft(a * b)
    return _to_field(grid, _truncate(grid, prod, fine))


def dealias_triple(f: Field, g: Field, h: Field) -> Field:
    """Dealiased triple product on the cubic (factor-2) padded grid."""
    f._check_same_grid(g)
    f._check_same_grid(h)
    grid = f.grid
    fine = _padded_grid(grid, 3)
    fields = []
    for u in (f, g, h):
        fields.append(
            np.real(np.fft.ifft(fine.alt_phase * _upsample(grid, _coeffs(u), fine)) / fine.dx)
        )
    prod = fine.dx * fine.alt_phase * np.fft.fft(fields[0] * fields[1] * fields[2])
    return _to_field(grid, _truncate(grid, prod, fine))


def parseval_residual(f: Field) -> float:
    """Relative defect of the discrete Parseval identity for this field."""
    F = _coeffs(f)
    lhs = f.grid.dx * float(np.sum(f.samples**2))
    rhs = float(np.sum(np.abs(F) ** 2)) / (2.0 * f.grid.half_length)
    if lhs == 0.0:
        return abs(rhs)
    return abs(lhs - rhs) / lhs
