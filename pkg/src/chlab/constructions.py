"""The explicit two-scale initial data and the scalars that control it.

All fields are built from one even, nonnegative frequency bump: the profile
``phi`` has phi_hat = 1 on |xi| <= 1/4 and phi_hat = 0 on |xi| >= 1/2, taken
from the same smooth transition as the dyadic partition.  On top of it:

- the high-frequency wave  2^(-n*s) * phi(x) * sin(w_n x),  w_n = (17/12) 2^n,
- the low-frequency bump   (12/17) * 2^(-n) * phi(x),

whose sum is the two-scale initial datum.  The carrier 17/12 places the wave
strictly inside the plateau of ring n, so exactly one dyadic block survives
and Besov norms reduce to weighted L^p norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.integrate
import scipy.special

from .littlewood_paley import BesovParams, besov_norm, smooth_transition
from .spectral import (
    Field,
    GridSpec,
    Spectrum,
    dealiased_product,
    derivative,
    to_field,
    to_spectrum,
)

__all__ = [
    "BandLimitError",
    "BumpProfile",
    "ConstructionSet",
    "bump_profile",
    "carrier_frequency",
    "max_admissible_n",
    "high_wave",
    "low_bump",
    "construction_set",
    "cos_packet_norm",
    "abs_cos_mean",
    "cross_term_besov_sup",
]

# Minimum number of grid frequencies inside the closed support of phi_hat
# (|xi| <= 1/2).  21 samples at the default L = 64; grids below L ~ 16*pi
# sample the transition too coarsely to trust the profile.
_MIN_SUPPORT_SAMPLES = 16


class BandLimitError(ValueError):
    """Raised when a construction would leave the dealiasable band."""


@dataclass(frozen=True)
class BumpProfile:
    """The spatial profile and its frequency-side bump."""

    phi: Field

    @staticmethod
    def phi_hat(xi) -> np.ndarray:
        return smooth_transition((0.5 - np.abs(np.asarray(xi, float))) / 0.25)

    @property
    def peak(self) -> float:
        """phi(0) = (1/2pi) integral of phi_hat; positive by construction."""
        return float(self.phi.samples[self.phi.grid.N // 2])

    @property
    def periodization_defect(self) -> float:
        """|phi(-L)| / max|phi|: how much of the tail wraps around the torus.

        The profile decays like exp(-c sqrt|x|) (its frequency bump is only
        Gevrey-regular), so this sits near 7e-3 at L = 64 and shrinks slowly
        with L; it is the honest size of the real-line-to-torus truncation.
        """
        s = self.phi.samples
        return float(abs(s[0]) / np.max(np.abs(s)))


@lru_cache(maxsize=8)
def bump_profile(grid: GridSpec) -> BumpProfile:
    """Build the profile on a grid; rejects grids too coarse in frequency."""
    n_support = int(np.count_nonzero(np.abs(grid.xi) <= 0.5))
    if n_support < _MIN_SUPPORT_SAMPLES:
        raise ValueError(
            f"grid too coarse in frequency: {n_support} samples inside the "
            f"profile support, need >= {_MIN_SUPPORT_SAMPLES} (L >= ~16*pi)"
        )
    coeff = BumpProfile.phi_hat(grid.xi).astype(complex)
    c = coeff * _alternating(grid.N)
    v = np.fft.ifft(np.fft.ifftshift(c)) / grid.dx
    residue = float(np.max(np.abs(v.imag)))
    if residue > 1e-13 * float(np.max(np.abs(v.real))):
        raise AssertionError(f"unexpected imaginary residue {residue:.3e}")
    return BumpProfile(Field(grid, v.real))


def _alternating(N: int) -> np.ndarray:
    k = np.arange(-N // 2, N // 2)
    return np.where(k % 2 == 0, 1.0, -1.0)


def carrier_frequency(n: int, grid: GridSpec | None = None) -> float:
    """The wave carrier near (17/12) * 2^n.

    Without a grid this is the target value, computed as (17 * 2^n)/12 to
    keep it exact in floats.  With a grid it is snapped to the nearest torus
    frequency pi*k/L (a sine is periodic on [-L, L) only for those), which
    moves it by at most pi/(2L) -- far from every ring boundary -- and is
    what makes the one-surviving-block identities exact instead of leaking
    a ~1e-5 skirt across the whole spectrum.
    """
    target = (17.0 * 2.0**n) / 12.0
    if grid is None:
        return target
    k = round(target * grid.L / np.pi)
    return np.pi * k / grid.L


def max_admissible_n(grid: GridSpec) -> int:
    """Largest n with carrier + 1 inside the 2/3-rule band of the grid."""
    n = 0
    while carrier_frequency(n + 1) + 1.0 <= grid.dealias_cutoff:
        n += 1
    return n


def _check_band(n: int, grid: GridSpec):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if carrier_frequency(n) + 1.0 > grid.dealias_cutoff:
        raise BandLimitError(
            f"carrier frequency {carrier_frequency(n):.2f} + 1 exceeds the "
            f"dealiasable band {grid.dealias_cutoff:.2f}; "
            f"max admissible n for this grid is {max_admissible_n(grid)}"
        )


def high_wave(n: int, s: float, grid: GridSpec) -> Field:
    """2^(-n*s) * phi(x) * sin(w_n x): one surviving block at j = n."""
    _check_band(n, grid)
    phi = bump_profile(grid).phi
    w = carrier_frequency(n, grid)
    return Field(grid, 2.0 ** (-n * s) * phi.samples * np.sin(w * grid.x))


def low_bump(n: int, grid: GridSpec) -> Field:
    """(12/17) * 2^(-n) * phi(x): one surviving block at j = -1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    phi = bump_profile(grid).phi
    return Field(grid, (12.0 / 17.0) * 2.0 ** (-n) * phi.samples)


@dataclass(frozen=True)
class ConstructionSet:
    """One two-scale datum: high and low parts, their sum, and its tangent."""

    n: int
    params: BesovParams
    high: Field
    low: Field
    u0: Field
    v0: Field  # -u0 * d/dx u0, with the 2/3 rule applied to the product


def construction_set(n: int, params: BesovParams, grid: GridSpec) -> ConstructionSet:
    _check_band(n, grid)
    f = high_wave(n, params.s, grid)
    g = low_bump(n, grid)
    u0 = f + g
    v0 = -1.0 * dealiased_product(u0, derivative(u0))
    return ConstructionSet(n=n, params=params, high=f, low=g, u0=u0, v0=v0)


def cos_packet_norm(n: int, p: float, grid: GridSpec) -> float:
    """L^p norm of phi(x)^2 * cos(w_n x).

    The sequence over n has a positive lower limit: the squared profile
    holds the carrier oscillation away from zero near the origin.
    """
    _check_band(n, grid)
    phi = bump_profile(grid).phi
    w = carrier_frequency(n, grid)
    packet = Field(grid, phi.samples**2 * np.cos(w * grid.x))
    from .spectral import lp_norm

    return lp_norm(packet, p)


def abs_cos_mean(p: float, X: float) -> float:
    """(1/X) * integral_0^X |cos x|^p dx.

    Converges to (1/pi) * integral_0^pi |cos|^p = Gamma((p+1)/2) * sqrt(pi)
    / (pi * Gamma(p/2 + 1)) as X grows.  Whole periods are summed in closed
    form; only the partial period is quadratured (split at pi/2 where the
    integrand has a kink).
    """
    if not X > 0:
        raise ValueError(f"X must be positive, got {X}")
    if not (np.isfinite(p) and p >= 1):
        raise ValueError(f"p must be finite and >= 1, got {p}")
    period_integral = math.sqrt(math.pi) * scipy.special.gamma(
        (p + 1.0) / 2.0
    ) / scipy.special.gamma(p / 2.0 + 1.0)
    m = int(math.floor(X / math.pi))
    rem = X - m * math.pi
    total = m * period_integral
    f = lambda x: np.abs(np.cos(x)) ** p
    if rem > 0:
        hi = min(rem, math.pi / 2.0)
        part, _ = scipy.integrate.quad(f, 0.0, hi, epsabs=1e-14, epsrel=1e-13)
        total += part
        if rem > math.pi / 2.0:
            part, _ = scipy.integrate.quad(
                f, math.pi / 2.0, rem, epsabs=1e-14, epsrel=1e-13
            )
            total += part
    return total / X


def abs_cos_mean_limit(p: float) -> float:
    """The X -> infinity limit of abs_cos_mean."""
    return math.sqrt(math.pi) * scipy.special.gamma((p + 1.0) / 2.0) / (
        math.pi * scipy.special.gamma(p / 2.0 + 1.0)
    )


def cross_term_besov_sup(n: int, params: BesovParams, grid: GridSpec) -> float:
    """B^s_{p,inf} norm of low_n * d/dx high_n.

    The product's spectrum sits in [w_n - 1, w_n + 1], inside the plateau of
    ring n (for n >= 4), so the sup over blocks is realised at j = n and the
    value equals 2^(n*s) * ||low * d(high)||_{L^p}.
    """
    _check_band(n, grid)
    f = high_wave(n, params.s, grid)
    g = low_bump(n, grid)
    prod = dealiased_product(g, derivative(f))
    return besov_norm(prod, BesovParams(params.s, params.p, math.inf))
