"""Periodic solver: evolve ``T`` steps at once in the frequency domain.

``a_T = ifft(Lambda**T * fft(a_0))`` where ``Lambda`` is the spectrum of the
stencil.  Work is O(N log N + N log T) regardless of how large ``T`` is.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from fftstencil import _backend
from fftstencil.grid import FieldGrid, GridShape, StencilKernel
from fftstencil.oracle import check_kernel
from fftstencil.spectral import (
    DiagonalSpectrum,
    fftn,
    ifftn,
    pseudo_inverse_spectrum,
    spectrum_from_kernel,
)
from fftstencil.timing import maybe_stage

__all__ = [
    "NumericalBlowupError",
    "solve_periodic",
    "solve_periodic_vector",
    "solve_periodic_implicit",
    "evolve_spectral",
    "IMAG_RTOL",
]

IMAG_RTOL = 1e-6
# absolute floor relative to the input, so an output that is pure roundoff
# noise (e.g. an annihilating stencil) is not reported as a blow-up
_IMAG_FLOOR = 1e-12


class NumericalBlowupError(ArithmeticError):
    """The spectral result is non-finite or has a large imaginary residue."""


def _check_T(T) -> int:
    T = int(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    if T >= 2**64:
        raise OverflowError("T must fit an unsigned 64-bit integer")
    return T


def _real_part(out: np.ndarray, in_scale: float) -> np.ndarray:
    if not np.all(np.isfinite(out)):
        raise NumericalBlowupError("non-finite values after the inverse FFT")
    real = np.ascontiguousarray(out.real)
    imag_max = float(np.abs(out.imag).max()) if out.size else 0.0
    real_max = float(np.abs(real).max()) if out.size else 0.0
    if imag_max > IMAG_RTOL * real_max + _IMAG_FLOOR * in_scale:
        raise NumericalBlowupError(
            f"imaginary residue {imag_max:.3g} exceeds {IMAG_RTOL:g} x max|real| ({real_max:.3g})"
        )
    return real


def evolve_spectral(data: np.ndarray, lam: np.ndarray, T: int, timings=None) -> np.ndarray:
    """Array-level core: ``data`` is ``dims + (m,)``, ``lam`` is ``dims + (m, m)``."""
    ndim = data.ndim - 1
    m = data.shape[-1]
    kernels = _backend.active
    with maybe_stage(timings, "forward_fft"):
        x = fftn(data.astype(np.complex128), ndim)
    with maybe_stage(timings, "squaring"):
        power = kernels.power_blocks(lam.reshape(-1, m, m), T)
    with maybe_stage(timings, "hadamard"):
        y = kernels.hadamard_blocks(power, x.reshape(-1, m)).reshape(x.shape)
    with maybe_stage(timings, "inverse_fft"):
        in_scale = float(np.abs(data).max()) if data.size else 0.0
        out = _real_part(ifftn(y, ndim), in_scale)
    return out


def solve_periodic(a0: FieldGrid, k: StencilKernel, T: int, *, timings=None) -> FieldGrid:
    """Evolve ``a0`` by ``T`` periodic steps of ``k``.

    Raises
    ------
    NumericalBlowupError
        If the result is non-finite or its imaginary residue exceeds
        ``1e-6 * max|real|`` (typically a spectral radius far above 1 with a
        huge ``T``).
    """
    T = _check_T(T)
    check_kernel(k, a0.shape)
    if T == 0:
        return a0
    with maybe_stage(timings, "forward_fft"):
        lam = spectrum_from_kernel(k, a0.shape)
    data = evolve_spectral(a0.data, lam.blocks, T, timings)
    with maybe_stage(timings, "inverse_fft"):
        return FieldGrid(a0.shape, data)


def solve_periodic_vector(
    a0: FieldGrid,
    kset: StencilKernel | Sequence[Sequence[StencilKernel | None]],
    T: int,
    *,
    timings=None,
) -> FieldGrid:
    """Vector-valued variant; ``kset`` is a block kernel or an ``m x m`` kernel matrix."""
    if not isinstance(kset, StencilKernel):
        kset = StencilKernel.from_matrix(kset)
    return solve_periodic(a0, kset, T, timings=timings)


def implicit_spectrum(q: StencilKernel, s: StencilKernel, shape: GridShape) -> DiagonalSpectrum:
    """Spectrum of the explicit stencil equivalent to ``Q a_{t+1} = S a_t``."""
    if q.fields != 1 or s.fields != 1:
        raise ValueError("implicit stencils are supported for scalar fields only")
    lam_q = spectrum_from_kernel(q, shape)
    lam_s = spectrum_from_kernel(s, shape)
    inv = pseudo_inverse_spectrum(lam_q)
    return DiagonalSpectrum(lam_s.shape, inv.blocks * lam_s.blocks)


def solve_periodic_implicit(
    q: StencilKernel, s: StencilKernel, a0: FieldGrid, T: int, *, timings=None
) -> FieldGrid:
    """Evolve under ``Q a_{t+1} = S a_t`` using the pseudoinverse of Q's spectrum.

    Frequencies where Q's spectrum vanishes (below the pseudoinverse
    threshold) are zeroed.
    """
    T = _check_T(T)
    check_kernel(q, a0.shape)
    check_kernel(s, a0.shape)
    if T == 0:
        return a0
    with maybe_stage(timings, "forward_fft"):
        lam = implicit_spectrum(q, s, a0.shape)
    data = evolve_spectral(a0.data, lam.blocks, T, timings)
    with maybe_stage(timings, "inverse_fft"):
        return FieldGrid(a0.shape, data)
