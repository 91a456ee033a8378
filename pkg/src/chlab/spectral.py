"""Periodic spectral substrate: grid, Fourier transforms, multipliers, norms.

Everything lives on the uniform periodic grid of ``[-L, L)``.  The Fourier
convention follows the continuum one,

    u_hat(xi) = integral e^{-i x xi} u(x) dx,
    u(x)      = (1/2pi) integral e^{i x xi} u_hat(xi) dxi,

discretised with weights dx (forward) and 1/(2L) (inverse) so that continuum
identities (Parseval, multiplier calculus) hold verbatim on band-limited data.
Coefficients are stored in ascending frequency order, xi_k = pi*k/L for
k = -N/2 .. N/2-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GridSpec",
    "Field",
    "Spectrum",
    "make_grid",
    "to_spectrum",
    "to_field",
    "apply_multiplier",
    "derivative",
    "antiderivative",
    "nonlocal_P",
    "lp_norm",
    "dealias",
    "dealiased_product",
    "tail_sup_ratio",
    "tail_energy_ratio",
    "sine_field",
    "cosine_field",
    "random_band_limited",
    "embed_zero_padded",
    "ResolutionWarning",
]

# Amplitude ratio in the top third of the spectrum above which a field is
# flagged as unresolved by derivative(); the solver uses the stricter
# energy-based threshold in evolution.py.
RESOLUTION_SUP_TOL = 1e-10


class ResolutionWarning(UserWarning):
    """Emitted when an operation receives a spectrally unresolved field."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L, L) with N points (N even).

    Attributes
    ----------
    L : half-length of the domain.
    N : number of points; the dual grid holds frequencies pi*k/L for
        k = -N/2 .. N/2-1.
    """

    L: float
    N: int

    def __post_init__(self):
        if self.N % 2 != 0 or self.N < 16:
            raise ValueError(f"N must be even and >= 16, got {self.N}")
        if not (self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    @property
    def k(self) -> np.ndarray:
        """Integer mode numbers in ascending order."""
        return np.arange(-self.N // 2, self.N // 2)

    @property
    def xi(self) -> np.ndarray:
        """Frequencies pi*k/L, ascending."""
        return (np.pi / self.L) * self.k

    @property
    def xi_max(self) -> float:
        """Nyquist frequency pi*N/(2L)."""
        return np.pi * self.N / (2.0 * self.L)

    @property
    def dealias_cutoff(self) -> float:
        """Largest frequency kept by the 2/3 rule (see dealias())."""
        return (np.pi / self.L) * self.dealias_mode_cutoff

    @property
    def dealias_mode_cutoff(self) -> int:
        # (N-1)//3 keeps products of retained modes alias-free even when
        # 3 | N (the k = 2N/3 image would land exactly on the cutoff mode).
        return (self.N - 1) // 3


def make_grid(L: float, N: int) -> GridSpec:
    """Build the periodic grid; rejects odd N, N < 16 and nonpositive L."""
    return GridSpec(float(L), int(N))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Field:
    """Real grid function; immutable after construction."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.shape != (self.grid.N,):
            raise ValueError(
                f"samples shape {samples.shape} does not match grid N={self.grid.N}"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "samples", _freeze(samples.copy()))

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.samples - other.samples)

    def __mul__(self, c: float) -> "Field":
        return Field(self.grid, self.samples * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.samples)


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients u_hat(xi_k) in ascending frequency order."""

    grid: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=complex)
        if coeff.shape != (self.grid.N,):
            raise ValueError(
                f"coefficients shape {coeff.shape} does not match grid N={self.grid.N}"
            )
        object.__setattr__(self, "coefficients", _freeze(coeff.copy()))

    def hermitian_defect(self) -> float:
        """Max |u_hat(-xi) - conj(u_hat(xi))| over paired frequencies."""
        c = self.coefficients
        n = self.grid.N
        pos = c[n // 2 + 1 :]            # k = 1 .. N/2-1
        neg = c[1 : n // 2][::-1]        # k = -1 .. -(N/2-1)
        defect = float(np.max(np.abs(neg - np.conj(pos)), initial=0.0))
        defect = max(defect, abs(c[n // 2].imag))  # k = 0 must be real
        defect = max(defect, abs(c[0].imag))       # unpaired Nyquist mode
        return defect


def _check_same_grid(a: GridSpec, b: GridSpec):
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


@lru_cache(maxsize=32)
def _alternating_sign(N: int) -> np.ndarray:
    # e^{i pi k} = (-1)^k; the phase tying the x = -L origin to FFT indexing.
    k = np.arange(-N // 2, N // 2)
    return _freeze(np.where(k % 2 == 0, 1.0, -1.0))


def to_spectrum(u: Field) -> Spectrum:
    """Forward transform, u_hat(xi_k) = dx * sum_i e^{-i x_i xi_k} u(x_i)."""
    grid = u.grid
    a = np.fft.fftshift(np.fft.fft(u.samples))
    return Spectrum(grid, grid.dx * _alternating_sign(grid.N) * a)


def to_field(spec: Spectrum) -> Field:
    """Inverse transform back to a real Field.

    The imaginary part is discarded; it is a rounding residue whenever the
    spectrum is Hermitian (see Spectrum.hermitian_defect for the check, and
    apply_multiplier for where the symmetry contract is enforced).
    """
    grid = spec.grid
    c = spec.coefficients * _alternating_sign(grid.N)
    v = np.fft.ifft(np.fft.ifftshift(c)) / grid.dx
    return Field(grid, v.real)


def apply_multiplier(u: Field, m, require_real: bool = True) -> Field:
    """Apply the Fourier multiplier m(xi) to a Field.

    ``m`` is a callable evaluated on the grid frequencies.  When a real
    output is required, m must satisfy m(-xi) = conj(m(xi)); the unpaired
    Nyquist mode is mapped through Re(m) (the symmetric action on the
    cosine basis function living there).
    """
    grid = u.grid
    mv = np.asarray(m(grid.xi), dtype=complex)
    if mv.shape != (grid.N,):
        raise ValueError("multiplier must return one value per grid frequency")
    if not np.all(np.isfinite(mv)):
        raise ValueError("multiplier must be finite on the grid frequencies")
    if require_real:
        n = grid.N
        pos = mv[n // 2 + 1 :]
        neg = mv[1 : n // 2][::-1]
        defect = float(np.max(np.abs(neg - np.conj(pos)), initial=0.0))
        defect = max(defect, abs(mv[n // 2].imag))
        scale = float(np.max(np.abs(mv), initial=0.0))
        if scale > 0 and defect > 1e-12 * scale:
            raise ValueError(
                "multiplier breaks Hermitian symmetry; real output impossible"
            )
        mv[0] = mv[0].real
    c = to_spectrum(u).coefficients * mv
    return to_field(Spectrum(grid, c))


def tail_sup_ratio(u: Field) -> float:
    """Peak coefficient magnitude in the top third of |xi|, relative."""
    c = to_spectrum(u).coefficients
    peak = float(np.max(np.abs(c), initial=0.0))
    if peak == 0.0:
        return 0.0
    top = np.abs(u.grid.k) > u.grid.dealias_mode_cutoff
    return float(np.max(np.abs(c[top]), initial=0.0)) / peak


def tail_energy_ratio(u: Field) -> float:
    """Spectral energy fraction carried by the top third of |xi|."""
    c = np.abs(to_spectrum(u).coefficients) ** 2
    total = float(np.sum(c))
    if total == 0.0:
        return 0.0
    top = np.abs(u.grid.k) > u.grid.dealias_mode_cutoff
    return float(np.sum(c[top])) / total


def derivative(u: Field) -> Field:
    """Spectral derivative (multiplier i*xi; Nyquist mode dropped)."""
    import warnings

    if tail_sup_ratio(u) > RESOLUTION_SUP_TOL:
        warnings.warn(
            "field looks unresolved (top third of spectrum above 1e-10 of peak)",
            ResolutionWarning,
            stacklevel=2,
        )
    return apply_multiplier(u, lambda xi: 1j * xi)


def antiderivative(u: Field) -> Field:
    """Inverse of derivative on zero-mean fields (multiplier 1/(i*xi))."""
    grid = u.grid

    def m(xi):
        out = np.zeros_like(xi, dtype=complex)
        nz = xi != 0.0
        out[nz] = 1.0 / (1j * xi[nz])
        return out

    c = to_spectrum(u).coefficients
    mean_coeff = abs(c[grid.N // 2])
    scale = float(np.max(np.abs(c), initial=0.0))
    if scale > 0 and mean_coeff > 1e-10 * scale:
        raise ValueError("antiderivative requires a zero-mean field")
    return apply_multiplier(u, m)


def dealias(u: Field) -> Field:
    """Zero the top third of the spectrum (2/3 rule)."""
    grid = u.grid
    keep = np.abs(grid.k) <= grid.dealias_mode_cutoff
    c = to_spectrum(u).coefficients * keep
    return to_field(Spectrum(grid, c))


def dealiased_product(u: Field, v: Field) -> Field:
    """Pointwise product with the 2/3 rule applied before and after."""
    _check_same_grid(u.grid, v.grid)
    ud = dealias(u)
    vd = dealias(v)
    return dealias(Field(u.grid, ud.samples * vd.samples))


def nonlocal_P(u: Field) -> Field:
    """The Camassa-Holm nonlocal term -d/dx (1-d2/dx2)^{-1} (u^2 + u_x^2/2).

    Products are dealiased with the 2/3 rule.
    """
    ux = derivative(u)
    q = dealiased_product(u, u) + 0.5 * dealiased_product(ux, ux)
    return apply_multiplier(q, lambda xi: -1j * xi / (1.0 + xi**2))


def lp_norm(u: Field, p: float) -> float:
    """L^p norm by the rectangle rule; p = inf gives the max norm."""
    if p != math.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    a = np.abs(u.samples)
    if p == math.inf:
        return float(np.max(a, initial=0.0))
    return float((np.sum(a**p) * u.grid.dx) ** (1.0 / p))


def sine_field(grid: GridSpec, mode: int, amplitude: float = 1.0) -> Field:
    """sin(mode * pi/L * x) on the grid."""
    return Field(grid, amplitude * np.sin(mode * np.pi / grid.L * grid.x))


def cosine_field(grid: GridSpec, mode: int, amplitude: float = 1.0) -> Field:
    """cos(mode * pi/L * x) on the grid."""
    return Field(grid, amplitude * np.cos(mode * np.pi / grid.L * grid.x))


def random_band_limited(
    grid: GridSpec,
    rng: np.random.Generator,
    band_xi: float,
    decay: float = 1.0,
) -> Field:
    """Random real field with spectrum inside |xi| <= band_xi.

    Coefficients are drawn mode by mode in ascending |k| with amplitude
    profile (1 + xi^2)^(-decay/2), so the draw sequence depends only on the
    band and the generator state, not on N: the same seed reproduces the
    same continuum field on any grid resolving the band.
    """
    kmax = int(np.floor(band_xi * grid.L / np.pi))
    if kmax >= grid.N // 2:
        raise ValueError("band exceeds the grid's frequency range")
    c = np.zeros(grid.N, dtype=complex)
    mid = grid.N // 2
    c[mid] = rng.standard_normal()
    for k in range(1, kmax + 1):
        xi = np.pi * k / grid.L
        amp = (1.0 + xi * xi) ** (-decay / 2.0)
        z = amp * (rng.standard_normal() + 1j * rng.standard_normal())
        c[mid + k] = z
        c[mid - k] = np.conj(z)
    return to_field(Spectrum(grid, c))


def embed_zero_padded(u: Field, grid: GridSpec) -> Field:
    """Embed u into a larger commensurate domain, padding with zeros.

    The target grid must have the same spacing dx and L' >= L, with the
    extra points split evenly on both sides (N' - N divisible by 2).
    """
    src = u.grid
    if grid.L < src.L:
        raise ValueError("target domain must not be smaller")
    if not math.isclose(grid.dx, src.dx, rel_tol=1e-14):
        raise ValueError("target grid spacing must match the source")
    pad = grid.N - src.N
    if pad % 2 != 0:
        raise ValueError("padding must be symmetric (N' - N even)")
    samples = np.concatenate(
        [np.zeros(pad // 2), u.samples, np.zeros(pad - pad // 2)]
    )
    return Field(grid, samples)
