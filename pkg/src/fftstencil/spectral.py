"""Frequency-domain machinery: d-dimensional DFTs and spectrum algebra.

Conventions: the forward transform is unnormalized with kernel
``exp(-2*pi*i*j*k/n)`` per axis, the inverse carries ``1/N``.  A stencil's
spectrum is the DFT of its generator column ``s[i] = S[i, 0]``; for ``m``
fields each frequency carries an ``m x m`` block, stored frequency-major.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from fftstencil import _backend
from fftstencil._config import get_threads
from fftstencil.grid import FieldGrid, GridShape, StencilKernel
from fftstencil.oracle import check_kernel

__all__ = [
    "ComplexGrid",
    "DiagonalSpectrum",
    "multi_fft",
    "multi_ifft",
    "generator_column",
    "spectrum_from_kernel",
    "pow_spectrum",
    "pseudo_inverse_spectrum",
    "hadamard",
    "PINV_RTOL",
]

PINV_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ComplexGrid:
    shape: GridShape
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128).reshape(self.shape.array_shape)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_field(cls, grid: FieldGrid) -> ComplexGrid:
        return cls(grid.shape, grid.data.astype(np.complex128))


@dataclass(frozen=True, eq=False)
class DiagonalSpectrum:
    """One ``m x m`` complex block per frequency; ``blocks`` has shape ``dims + (m, m)``."""

    shape: GridShape
    blocks: np.ndarray

    def __post_init__(self):
        m = self.shape.fields
        blocks = np.asarray(self.blocks, dtype=np.complex128).reshape(self.shape.dims + (m, m))
        object.__setattr__(self, "blocks", blocks)

    @property
    def scalars(self) -> np.ndarray:
        """Diagonal values for a single-field spectrum."""
        if self.shape.fields != 1:
            raise ValueError("spectrum has block entries")
        return self.blocks[..., 0, 0]

    def flat_blocks(self) -> np.ndarray:
        m = self.shape.fields
        return self.blocks.reshape(-1, m, m)


def fftn(data: np.ndarray, ndim: int) -> np.ndarray:
    return scipy.fft.fftn(data, axes=tuple(range(ndim)), workers=get_threads())


def ifftn(data: np.ndarray, ndim: int) -> np.ndarray:
    return scipy.fft.ifftn(data, axes=tuple(range(ndim)), workers=get_threads())


def multi_fft(g: ComplexGrid) -> ComplexGrid:
    """Forward DFT over every spatial axis; fields are transformed independently."""
    return ComplexGrid(g.shape, fftn(g.data, g.shape.ndim))


def multi_ifft(g: ComplexGrid) -> ComplexGrid:
    return ComplexGrid(g.shape, ifftn(g.data, g.shape.ndim))


def generator_column(k: StencilKernel, dims: tuple[int, ...]) -> np.ndarray:
    """First column of the stencil matrix as a grid of ``m x m`` blocks.

    A tap at offset ``o`` reads ``a[i + o]``, so it lands at ``s[-o mod dims]``.
    """
    m = k.fields
    s = np.zeros(tuple(dims) + (m, m))
    for off, blk in k.items():
        idx = tuple((-o) % n for o, n in zip(off, dims))
        s[idx] += blk
    return s


@lru_cache(maxsize=128)
def _spectrum_blocks(k: StencilKernel, dims: tuple[int, ...]) -> np.ndarray:
    lam = fftn(generator_column(k, dims), len(dims))
    lam.setflags(write=False)
    return lam


def spectrum_from_kernel(k: StencilKernel, shape: GridShape) -> DiagonalSpectrum:
    """Eigenvalues of the circulant stencil matrix, one multi-FFT per field pair.

    Results are cached per ``(kernel, dims)``.
    """
    shape = GridShape(shape.dims, k.fields)
    check_kernel(k, shape)
    return DiagonalSpectrum(shape, _spectrum_blocks(k, shape.dims))


def pow_spectrum(lam: DiagonalSpectrum, T: int) -> DiagonalSpectrum:
    """Per-frequency power by binary exponentiation; ``T = 0`` gives identity blocks."""
    T = int(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    if T >= 2**64:
        raise OverflowError("T must fit an unsigned 64-bit integer")
    out = _backend.active.power_blocks(lam.flat_blocks(), T)
    return DiagonalSpectrum(lam.shape, out)


def pseudo_inverse_spectrum(lam: DiagonalSpectrum, rtol: float = PINV_RTOL) -> DiagonalSpectrum:
    """Elementwise inverse, mapping entries with ``|lam| <= rtol * max|lam|`` to zero."""
    if lam.shape.fields != 1:
        raise ValueError("pseudoinverse is defined for scalar spectra only")
    vals = lam.scalars
    mag = np.abs(vals)
    eps = rtol * mag.max() if mag.size else 0.0
    out = np.zeros_like(vals)
    keep = mag > eps
    out[keep] = 1.0 / vals[keep]
    return DiagonalSpectrum(lam.shape, out[..., None, None])


def hadamard(lam: DiagonalSpectrum, x: ComplexGrid) -> ComplexGrid:
    """``y[j] = lam[j] @ x[j]`` at every frequency ``j``."""
    if lam.shape != x.shape:
        raise ValueError(f"spectrum {lam.shape} and grid {x.shape} differ")
    m = x.shape.fields
    y = _backend.active.hadamard_blocks(lam.flat_blocks(), x.data.reshape(-1, m))
    return ComplexGrid(x.shape, y)
