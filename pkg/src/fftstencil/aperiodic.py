"""Aperiodic (Dirichlet) solver.

Cells farther than ``sigma * T`` from the boundary never see it, so they
come straight from the periodic solver.  The boundary's region of influence
is filled in by a time-halving recursion:

* split ``T = T1 + T2`` with ``T1 = ceil(T/2)``;
* from time-0 data on ``dist <= 2*sigma*T``, periodic solves on the ``2d``
  face slabs give time-``T1`` values on ``dist`` in ``(sigma*T1, sigma*(T+T2)]``
  while a recursive call supplies ``dist <= sigma*T1``;
* from those, periodic slab solves give time-``T`` values on
  ``(sigma*T2, sigma*T]`` and a second recursive call supplies
  ``dist <= sigma*T2``.

At or below ``cutoff`` steps the band is stepped directly, so the
recursion depth is ``ceil(log2(T / cutoff))``.  Face slabs span the
full extent of every other axis and are solved with wraparound; the cells
kept from a slab are more than ``sigma * T_step`` cells from every seam and
every other face, so neither the wrap nor the boundary can reach them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from fftstencil import _backend
from fftstencil._config import get_threads
from fftstencil.grid import (
    BandGrid,
    BoundaryGeometry,
    BoundaryRule,
    FieldGrid,
    GridShape,
    StencilKernel,
    max_distance,
)
from fftstencil.oracle import _check_aperiodic, evolve_aperiodic_naive
from fftstencil.periodic import _check_T, evolve_spectral, solve_periodic
from fftstencil.spectral import spectrum_from_kernel
from fftstencil.timing import maybe_stage

__all__ = [
    "DEFAULT_CUTOFF",
    "FallbackRequired",
    "roi_width",
    "recursion_fits",
    "recursive_boundary",
    "solve_aperiodic",
]

DEFAULT_CUTOFF = 32


class FallbackRequired(Exception):
    """The boundary band would overlap itself; use the looping solver instead."""


def roi_width(sigma: int, T: int) -> int:
    """Width of the boundary's region of influence after ``T`` steps."""
    return int(sigma) * int(T)


def recursion_fits(sigma: int, T: int, dims) -> bool:
    return 4 * sigma * ((T + 1) // 2) <= max_distance(dims)


class _BoundarySolver:
    def __init__(self, k: StencilKernel, br: BoundaryRule, shape: GridShape, cutoff: int):
        self.k = k
        self.sigma = k.radius
        self.m = shape.fields
        self.geo = BoundaryGeometry(shape.dims)
        self.bvals = br.full(shape)
        self.cutoff = int(cutoff)
        self.calls = 0
        self.max_depth = 0

    def _periodic(self, slab: np.ndarray, T: int) -> np.ndarray:
        lam = spectrum_from_kernel(self.k, GridShape(slab.shape[:-1], self.m))
        return evolve_spectral(np.ascontiguousarray(slab), lam.blocks, T)

    def _base(self, buf: np.ndarray, T: int) -> np.ndarray:
        s, geo = self.sigma, self.geo
        width = 2 * s * T
        cur = buf
        for _ in range(T):
            nxt = np.empty_like(buf)
            kept = width - s
            for face in geo.faces:
                local = _backend.active.apply_stencil(
                    cur[geo.slab(face, 0, width)], self.k.offsets, self.k.blocks)
                geo.write_face(nxt, face, local, width, s, kept)
            geo.copy_band(nxt, self.bvals, 0, s)
            cur, width = nxt, kept
        return cur

    def solve(self, buf: np.ndarray, T: int, depth: int = 0) -> np.ndarray:
        """Time-``T`` values on ``dist <= sigma*T`` from time-0 values on ``dist <= 2*sigma*T``.

        The returned array is only meaningful on that band.
        """
        self.calls += 1
        self.max_depth = max(self.max_depth, depth)
        if T <= self.cutoff:
            return self._base(buf, T)
        s, geo = self.sigma, self.geo
        t1, t2 = (T + 1) // 2, T // 2
        width_a = 2 * s * T
        width_b = s * (T + t2)

        mid = np.empty_like(buf)
        for face in geo.faces:
            local = self._periodic(buf[geo.slab(face, 0, width_a)], t1)
            geo.write_face(mid, face, local, width_a, s * t1, width_b)
        geo.copy_band(mid, self.solve(buf, t1, depth + 1), 0, s * t1)

        out = np.empty_like(buf)
        for face in geo.faces:
            local = self._periodic(mid[geo.slab(face, 0, width_b)], t2)
            geo.write_face(out, face, local, width_b, s * t2, s * T)
        geo.copy_band(out, self.solve(mid, t2, depth + 1), 0, s * t2)
        return out


def _validated(a0, k, br, T, cutoff):
    T = _check_T(T)
    if int(cutoff) < 1:
        raise ValueError("cutoff must be a positive integer")
    sigma = _check_aperiodic(k, br, a0.shape)
    return T, sigma


def recursive_boundary(
    a0: FieldGrid, k: StencilKernel, br: BoundaryRule, T: int, cutoff: int = DEFAULT_CUTOFF
) -> BandGrid:
    """Values at time ``T`` of every cell with ``dist <= sigma*T``, as face slabs.

    Raises
    ------
    FallbackRequired
        When ``4*sigma*ceil(T/2) > ceil(min dims / 2)``, i.e. the bands the
        recursion needs would overlap.
    """
    T, sigma = _validated(a0, k, br, T, cutoff)
    if T == 0:
        raise ValueError("the boundary band is empty for T = 0")
    if not recursion_fits(sigma, T, a0.shape.dims):
        raise FallbackRequired(
            f"4*sigma*ceil(T/2) = {4 * sigma * ((T + 1) // 2)} exceeds "
            f"ceil(min dims / 2) = {max_distance(a0.shape.dims)}"
        )
    solver = _BoundarySolver(k, br, a0.shape, cutoff)
    result = solver.solve(a0.data, T)
    width = roi_width(sigma, T)
    slabs = []
    for face in solver.geo.faces:
        slab = result[solver.geo.slab(face, 0, width)].copy()
        slab.setflags(write=False)
        slabs.append(slab)
    return BandGrid(a0.shape, 0, width, tuple(slabs))


def solve_aperiodic(
    a0: FieldGrid,
    k: StencilKernel,
    br: BoundaryRule,
    T: int,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    timings=None,
    stats: dict | None = None,
) -> FieldGrid:
    """Evolve ``a0`` by ``T`` steps with the boundary rule applied on ``dist <= sigma``.

    Falls back to the looping solver when the region of influence is too
    wide for the recursion (see :func:`recursive_boundary`).  ``stats``, if
    given, receives ``path``, ``calls`` and ``max_depth``.
    """
    T, sigma = _validated(a0, k, br, T, cutoff)
    if T == 0:
        return a0
    if not recursion_fits(sigma, T, a0.shape.dims):
        if stats is not None:
            stats.update(path="naive", calls=0, max_depth=0)
        with maybe_stage(timings, "boundary_recursion"):
            return evolve_aperiodic_naive(a0, k, br, T)

    with maybe_stage(timings, "boundary_recursion"):
        solver = _BoundarySolver(k, br, a0.shape, cutoff)
    width = roi_width(sigma, T)
    if timings is None and get_threads() > 1:
        with ThreadPoolExecutor(max_workers=1) as pool:
            interior = pool.submit(solve_periodic, a0, k, T)
            boundary = solver.solve(a0.data, T)
            center = interior.result()
    else:
        center = solve_periodic(a0, k, T, timings=timings)
        with maybe_stage(timings, "boundary_recursion"):
            boundary = solver.solve(a0.data, T)
    if stats is not None:
        stats.update(path="recursive", calls=solver.calls, max_depth=solver.max_depth)
    with maybe_stage(timings, "boundary_recursion"):
        out = center.data.copy()
        solver.geo.copy_band(out, boundary, 0, width)
        return FieldGrid(a0.shape, out)
