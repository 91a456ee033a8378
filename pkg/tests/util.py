"""Shared test helpers: slow reference transforms and field factories."""

import numpy as np

from chlab.spectral import Field, GridSpec, Spectrum


def slow_dft(u: Field) -> np.ndarray:
    """O(N^2) direct evaluation of dx * sum_i e^{-i x_i xi_k} u(x_i)."""
    g = u.grid
    phase = np.exp(-1j * np.outer(g.xi, g.x))
    return g.dx * phase @ u.samples


def slow_idft(spec: Spectrum) -> np.ndarray:
    """O(N^2) direct evaluation of (1/2L) sum_k e^{i x_i xi_k} c_k."""
    g = spec.grid
    phase = np.exp(1j * np.outer(g.x, g.xi))
    return (phase @ spec.coefficients) / (2.0 * g.L)
