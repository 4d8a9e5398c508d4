"""Naive looping solvers and dense stencil matrices.

These are the brute-force references every fast path is checked against.
Each step reads from one buffer and writes a fresh one (Jacobi-style), for
every kernel including ``seidel2d``; no in-place Gauss-Seidel sweeps.
"""

from __future__ import annotations

import numpy as np

from fftstencil import _backend
from fftstencil.grid import (
    BoundaryRule,
    FieldGrid,
    GridShape,
    StencilKernel,
    distance_field,
)

__all__ = [
    "step_periodic",
    "evolve_periodic_naive",
    "step_aperiodic",
    "evolve_aperiodic_naive",
    "dense_stencil_matrix",
    "DENSE_LIMIT",
]

DENSE_LIMIT = 4096


def check_kernel(k: StencilKernel, shape: GridShape) -> None:
    if k.ndim != shape.ndim:
        raise ValueError(f"kernel is {k.ndim}-D but grid is {shape.ndim}-D")
    if k.fields != shape.fields:
        raise ValueError(f"kernel has {k.fields} fields but grid has {shape.fields}")
    for axis, (reach, n) in enumerate(zip(k.axis_reach(), shape.dims)):
        if reach >= n:
            raise ValueError(
                f"stencil offset {reach} along axis {axis} does not fit an axis of {n} cells"
            )


def _check_aperiodic(k: StencilKernel, br: BoundaryRule, shape: GridShape) -> int:
    check_kernel(k, shape)
    sigma = k.radius
    if sigma < 1:
        raise ValueError("aperiodic stepping needs a stencil radius of at least 1")
    if 2 * sigma >= min(shape.dims):
        raise ValueError(
            f"grid {shape.dims} is too small for radius {sigma}: need 2*sigma < min dims"
        )
    if not br.fields_compatible(shape):
        raise ValueError("boundary rule does not match the grid")
    return sigma


def step_periodic(a: FieldGrid, k: StencilKernel) -> FieldGrid:
    """Apply the stencil once with wraparound in every axis."""
    check_kernel(k, a.shape)
    return FieldGrid(a.shape, _backend.active.apply_stencil(a.data, k.offsets, k.blocks))


def evolve_periodic_naive(a0: FieldGrid, k: StencilKernel, T: int) -> FieldGrid:
    if T < 0:
        raise ValueError("T must be non-negative")
    check_kernel(k, a0.shape)
    data = a0.data
    for _ in range(int(T)):
        data = _backend.active.apply_stencil(data, k.offsets, k.blocks)
    return a0 if T == 0 else FieldGrid(a0.shape, data)


def _aperiodic_steps(data, k, shell, bvals, T):
    for _ in range(T):
        data = _backend.active.apply_stencil(data, k.offsets, k.blocks)
        data[shell] = bvals[shell]
    return data


def step_aperiodic(a: FieldGrid, k: StencilKernel, br: BoundaryRule) -> FieldGrid:
    """One step: stencil on cells with ``dist > sigma``, rule on the rest."""
    return evolve_aperiodic_naive(a, k, br, 1)


def evolve_aperiodic_naive(a0: FieldGrid, k: StencilKernel, br: BoundaryRule, T: int) -> FieldGrid:
    if T < 0:
        raise ValueError("T must be non-negative")
    sigma = _check_aperiodic(k, br, a0.shape)
    if T == 0:
        return a0
    shell = distance_field(a0.shape.dims) <= sigma
    data = _aperiodic_steps(a0.data, k, shell, br.full(a0.shape), int(T))
    return FieldGrid(a0.shape, data)


def dense_stencil_matrix(k: StencilKernel, shape: GridShape, limit: int = DENSE_LIMIT) -> np.ndarray:
    """Explicit ``(N*m) x (N*m)`` matrix of one periodic step.

    Rows and columns follow the flattened grid layout (row-major cells,
    field innermost).  Built by plain index loops, independently of the
    stepping kernels.
    """
    if shape.fields != k.fields:
        raise ValueError("kernel and grid disagree on the number of fields")
    check_kernel(k, shape)
    n = shape.size * shape.fields
    if n > limit:
        raise ValueError(f"dense matrix of order {n} exceeds the limit {limit}")
    m = shape.fields
    mat = np.zeros((n, n))
    for cell in np.ndindex(*shape.dims):
        row = np.ravel_multi_index(cell, shape.dims) * m
        for off, blk in k.items():
            nb = tuple((c + o) % size for c, o, size in zip(cell, off, shape.dims))
            col = np.ravel_multi_index(nb, shape.dims) * m
            for f in range(m):
                for g in range(m):
                    mat[row + f, col + g] += blk[f, g]
    return mat
