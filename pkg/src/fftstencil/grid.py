"""Grid, kernel and boundary types shared by every solver.

Cell data is stored row-major over the spatial axes with the field index
innermost, i.e. a ``FieldGrid`` with dims ``(l1, ..., ld)`` and ``m`` fields
holds an array of shape ``(l1, ..., ld, m)``.

Boundary distance follows the "outermost shell is 1" convention::

    dist(i) = min over axes k of min(i_k + 1, l_k - i_k)

so that after ``T`` steps of a radius ``sigma`` stencil the region influenced
by the boundary is exactly ``{dist <= sigma * T}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "GridShape",
    "FieldGrid",
    "StencilKernel",
    "BoundaryRule",
    "BandGrid",
    "BoundaryGeometry",
    "dist_to_boundary",
    "distance_field",
    "owner_field",
    "face_slices",
    "slice_band",
    "scatter_band",
    "max_distance",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GridShape:
    """Spatial extent ``dims`` plus the number of components per cell."""

    dims: tuple[int, ...]
    fields: int = 1

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) < 1:
            raise ValueError("a grid needs at least one axis")
        if any(n < 1 for n in dims):
            raise ValueError(f"every axis must have at least one cell, got {dims}")
        if int(self.fields) < 1:
            raise ValueError(f"fields must be >= 1, got {self.fields}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "fields", int(self.fields))
        if self.size * self.fields >= np.iinfo(np.int64).max:
            raise OverflowError("cell count does not fit a 64-bit integer")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        """Number of cells ``N``."""
        return int(np.prod(self.dims, dtype=object))

    @property
    def array_shape(self) -> tuple[int, ...]:
        return self.dims + (self.fields,)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Real, finite cell data of an ``m``-component field on a grid.

    Instances are immutable: ``data`` is a read-only array of shape
    ``dims + (fields,)``.
    """

    shape: GridShape
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.shape != self.shape.array_shape:
            try:
                data = data.reshape(self.shape.array_shape)
            except ValueError:
                raise ValueError(
                    f"data of shape {np.shape(self.data)} does not match grid "
                    f"{self.shape.array_shape}"
                ) from None
        if not np.all(np.isfinite(data)):
            raise ValueError("grid data must be finite")
        object.__setattr__(self, "data", _readonly(data))

    @classmethod
    def from_array(cls, values, fields: int | None = None) -> FieldGrid:
        """Wrap an array.

        With ``fields=None`` the array is a scalar field over its own shape;
        otherwise the last axis holds the ``fields`` components.
        """
        values = np.asarray(values, dtype=np.float64)
        if fields is None:
            return cls(GridShape(values.shape, 1), values[..., None])
        if values.ndim < 2 or values.shape[-1] != fields:
            raise ValueError(f"last axis must have length {fields}")
        return cls(GridShape(values.shape[:-1], fields), values)

    @classmethod
    def zeros(cls, shape: GridShape) -> FieldGrid:
        return cls(shape, np.zeros(shape.array_shape))

    @property
    def values(self) -> np.ndarray:
        """Data with the field axis dropped when there is a single field."""
        return self.data[..., 0] if self.shape.fields == 1 else self.data

    @property
    def ndim(self) -> int:
        return self.shape.ndim

    def flatten(self) -> np.ndarray:
        return self.data.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, FieldGrid):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None


class StencilKernel:
    """Sparse linear stencil: offset vector -> ``m x m`` coefficient block.

    The update it describes is::

        out[i, f] = sum over taps (o, B) of sum_g B[f, g] * a[i + o, g]

    Taps are kept sorted by offset so every consumer sums them in the same
    order.  Zero-valued taps are retained and still count towards the radius.

    Parameters
    ----------
    taps : mapping
        Keys are offsets (an ``int`` for 1-D, otherwise a tuple of ints);
        values are scalars for ``m = 1`` or ``m x m`` array-likes.
    """

    def __init__(self, taps: Mapping):
        if not taps:
            raise ValueError("a stencil needs at least one tap")
        items = []
        for key, value in taps.items():
            off = (int(key),) if np.ndim(key) == 0 else tuple(int(o) for o in key)
            blk = np.asarray(value, dtype=np.float64)
            if blk.ndim == 0:
                blk = blk.reshape(1, 1)
            items.append((off, blk))
        ndims = {len(off) for off, _ in items}
        if len(ndims) != 1:
            raise ValueError("all tap offsets must have the same dimension")
        shapes = {blk.shape for _, blk in items}
        if len(shapes) != 1:
            raise ValueError("all coefficient blocks must have the same shape")
        (bshape,) = shapes
        if len(bshape) != 2 or bshape[0] != bshape[1]:
            raise ValueError(f"coefficient blocks must be square, got {bshape}")
        if len({off for off, _ in items}) != len(items):
            raise ValueError("duplicate tap offsets")
        items.sort(key=lambda it: it[0])
        self._offsets = _readonly(np.array([off for off, _ in items], dtype=np.int64))
        self._blocks = _readonly(np.stack([blk for _, blk in items]).astype(np.float64))
        if not np.all(np.isfinite(self._blocks)):
            raise ValueError("stencil coefficients must be finite")
        self._key = (self._offsets.tobytes(), self._blocks.tobytes(), self._blocks.shape,
                     self._offsets.shape)

    @classmethod
    def from_matrix(cls, kset: Sequence[Sequence[StencilKernel | None]]) -> StencilKernel:
        """Fold an ``m x m`` matrix of scalar kernels into one block kernel.

        ``kset[i][j]`` describes how field ``i`` depends on field ``j``;
        ``None`` entries are zero.
        """
        m = len(kset)
        if m == 0 or any(len(row) != m for row in kset):
            raise ValueError("kernel matrix must be square and non-empty")
        taps: dict[tuple[int, ...], np.ndarray] = {}
        ndim = None
        for i, row in enumerate(kset):
            for j, k in enumerate(row):
                if k is None:
                    continue
                if k.fields != 1:
                    raise ValueError("entries of a kernel matrix must be scalar kernels")
                if ndim is not None and k.ndim != ndim:
                    raise ValueError("kernel matrix mixes dimensions")
                ndim = k.ndim
                for off, blk in k.items():
                    taps.setdefault(off, np.zeros((m, m)))[i, j] += blk[0, 0]
        if ndim is None:
            raise ValueError("kernel matrix has no entries")
        return cls(taps)

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    @property
    def blocks(self) -> np.ndarray:
        return self._blocks

    @property
    def ndim(self) -> int:
        return self._offsets.shape[1]

    @property
    def fields(self) -> int:
        return self._blocks.shape[1]

    @property
    def radius(self) -> int:
        """Largest Chebyshev norm over all tap offsets."""
        return int(np.abs(self._offsets).max())

    def axis_reach(self) -> tuple[int, ...]:
        return tuple(int(r) for r in np.abs(self._offsets).max(axis=0))

    def items(self):
        for off, blk in zip(self._offsets, self._blocks):
            yield tuple(int(o) for o in off), blk

    def __len__(self):
        return len(self._offsets)

    def __eq__(self, other):
        if not isinstance(other, StencilKernel):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.fields == 1:
            body = ", ".join(
                f"{off[0] if self.ndim == 1 else off}: {blk[0, 0]:g}" for off, blk in self.items()
            )
        else:
            body = f"{len(self)} taps, {self.fields}x{self.fields} blocks"
        return f"StencilKernel({{{body}}})"


@dataclass(frozen=True, eq=False)
class BoundaryRule:
    """Time-invariant Dirichlet rule for the cells with ``dist <= sigma``.

    ``kind`` is ``"constant"`` (one value per field) or ``"profile"`` (a full
    ``dims + (m,)`` table; only boundary-defined cells are read).
    """

    kind: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in ("constant", "profile"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if self.kind == "constant":
            vals = np.atleast_1d(vals)
            if vals.ndim != 1:
                raise ValueError("constant rule takes one value per field")
        if not np.all(np.isfinite(vals)):
            raise ValueError("boundary values must be finite")
        object.__setattr__(self, "values", _readonly(vals))

    @classmethod
    def dirichlet(cls, value=0.0) -> BoundaryRule:
        return cls("constant", value)

    @classmethod
    def profile(cls, table, shape: GridShape | None = None) -> BoundaryRule:
        """Build a profile rule from a full array, a ``FieldGrid`` or a dict.

        A dict maps ``(cell index, field)`` to a value and needs ``shape``;
        cells it does not mention are zero.
        """
        if isinstance(table, FieldGrid):
            return cls("profile", table.data)
        if isinstance(table, Mapping):
            if shape is None:
                raise ValueError("a dict profile needs the grid shape")
            arr = np.zeros(shape.array_shape)
            for (idx, f), v in table.items():
                idx = (idx,) if np.ndim(idx) == 0 else tuple(idx)
                arr[idx + (f,)] = v
            return cls("profile", arr)
        return cls("profile", table)

    def fields_compatible(self, shape: GridShape) -> bool:
        if self.kind == "constant":
            return self.values.shape[0] in (1, shape.fields)
        return self.values.shape == shape.array_shape

    def full(self, shape: GridShape) -> np.ndarray:
        """Values broadcast to the whole grid (read-only view when possible)."""
        if not self.fields_compatible(shape):
            raise ValueError("boundary rule does not match the grid's fields/shape")
        if self.kind == "constant":
            return np.broadcast_to(self.values, shape.array_shape)
        return self.values


def dist_to_boundary(shape: GridShape | Sequence[int], index) -> int:
    """Shell number of ``index``; the outermost shell is 1."""
    dims = shape.dims if isinstance(shape, GridShape) else tuple(shape)
    index = (index,) if np.ndim(index) == 0 else tuple(index)
    if len(index) != len(dims):
        raise ValueError(f"index {index} has wrong dimension for grid {dims}")
    best = None
    for i, n in zip(index, dims):
        if not 0 <= i < n:
            raise IndexError(f"index {index} out of range for grid {dims}")
        d = min(i + 1, n - i)
        best = d if best is None else min(best, d)
    return int(best)


def max_distance(dims: Sequence[int]) -> int:
    """Largest shell number present, ``ceil(min(dims) / 2)``."""
    return (min(dims) + 1) // 2


def _axis_distances(n: int) -> np.ndarray:
    i = np.arange(n)
    return np.stack([i + 1, n - i])  # (side, index): distance to lo / hi face


@lru_cache(maxsize=64)
def _fields_for(dims: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    d = len(dims)
    dist = None
    owner = None
    for axis, n in enumerate(dims):
        ad = _axis_distances(n)
        for side in (0, 1):
            shp = [1] * d
            shp[axis] = n
            fd = ad[side].reshape(shp)
            face = 2 * axis + side
            if dist is None:
                dist = np.broadcast_to(fd, dims).copy()
                owner = np.full(dims, face, dtype=np.int16)
            else:
                closer = fd < dist  # strict: ties stay with the earlier face
                owner = np.where(closer, face, owner).astype(np.int16)
                dist = np.minimum(dist, fd)
    return _readonly(dist.astype(np.int64)), _readonly(owner)


def distance_field(dims: Sequence[int]) -> np.ndarray:
    """``dist_to_boundary`` evaluated on every cell (read-only array)."""
    return _fields_for(tuple(int(n) for n in dims))[0]


def owner_field(dims: Sequence[int]) -> np.ndarray:
    """Face id ``2*axis + side`` owning each cell.

    A cell belongs to the face it is closest to; ties go to the lowest axis,
    then to the low side.
    """
    return _fields_for(tuple(int(n) for n in dims))[1]


def face_slices(dims: Sequence[int], face: int, lo: int, hi: int) -> tuple[slice, ...]:
    """Index slices of the cells whose distance to ``face`` lies in ``(lo, hi]``."""
    axis, side = divmod(face, 2)
    n = dims[axis]
    sl = [slice(None)] * len(dims)
    sl[axis] = slice(lo, hi) if side == 0 else slice(n - hi, n - lo)
    return tuple(sl)


class BoundaryGeometry:
    """Cached distance/owner data and per-face masks for one grid extent."""

    def __init__(self, dims: Sequence[int]):
        self.dims = tuple(int(n) for n in dims)
        self.dist = distance_field(self.dims)
        self.owner = owner_field(self.dims)
        self.faces = range(2 * len(self.dims))
        self._masks: dict = {}

    def slab(self, face: int, lo: int, hi: int) -> tuple[slice, ...]:
        return face_slices(self.dims, face, lo, hi)

    def owned_mask(self, face: int, lo: int, hi: int) -> np.ndarray:
        """Mask over ``slab(face, lo, hi)`` of cells owned by ``face`` with dist in (lo, hi]."""
        key = (face, lo, hi)
        mask = self._masks.get(key)
        if mask is None:
            sl = self.slab(face, lo, hi)
            d = self.dist[sl]
            mask = _readonly((self.owner[sl] == face) & (d > lo) & (d <= hi))
            self._masks[key] = mask
        return mask

    def copy_band(self, dst: np.ndarray, src: np.ndarray, lo: int, hi: int) -> None:
        """Copy every cell with dist in (lo, hi] from ``src`` to ``dst``."""
        for face in self.faces:
            sl = self.slab(face, lo, hi)
            mask = self.owned_mask(face, lo, hi)
            dst[sl][mask] = src[sl][mask]

    def write_face(self, dst: np.ndarray, face: int, local: np.ndarray, width: int,
                   lo: int, hi: int) -> None:
        """Write owned cells with dist in (lo, hi] from a slab result.

        ``local`` holds values for ``slab(face, 0, width)``.
        """
        axis, side = divmod(face, 2)
        sub = [slice(None)] * len(self.dims)
        sub[axis] = slice(lo, hi) if side == 0 else slice(width - hi, width - lo)
        mask = self.owned_mask(face, lo, hi)
        dst[self.slab(face, lo, hi)][mask] = local[tuple(sub)][mask]


@dataclass(frozen=True, eq=False)
class BandGrid:
    """Per-face slabs of the cells at face-distance ``(lo, hi]``.

    ``slabs[face]`` spans the full extent of every other axis.  Cells in
    several slabs (near corners) are owned by exactly one face; see
    :func:`owner_field`.
    """

    shape: GridShape
    lo: int
    hi: int
    slabs: tuple[np.ndarray, ...]

    def owned(self, face: int) -> np.ndarray:
        return BoundaryGeometry(self.shape.dims).owned_mask(face, self.lo, self.hi)

    def slab_index(self, face: int) -> tuple[slice, ...]:
        return face_slices(self.shape.dims, face, self.lo, self.hi)


def _check_band(shape: GridShape, lo: int, hi: int) -> None:
    if not 0 <= lo < hi:
        raise ValueError(f"band ({lo}, {hi}] is empty or negative")
    top = max_distance(shape.dims)
    if hi > top:
        raise ValueError(f"band ({lo}, {hi}] overlaps itself: hi exceeds ceil(min dims / 2) = {top}")


def slice_band(grid: FieldGrid, lo: int, hi: int) -> BandGrid:
    """Extract the face slabs with face-distance in ``(lo, hi]``."""
    _check_band(grid.shape, lo, hi)
    dims = grid.shape.dims
    slabs = tuple(
        _readonly(grid.data[face_slices(dims, f, lo, hi)].copy()) for f in range(2 * len(dims))
    )
    return BandGrid(grid.shape, lo, hi, slabs)


def scatter_band(grid: FieldGrid, band: BandGrid, lo: int, hi: int) -> FieldGrid:
    """Overwrite every cell with dist in ``(lo, hi]`` from its owning slab."""
    _check_band(grid.shape, lo, hi)
    if band.shape != grid.shape:
        raise ValueError(f"band shape {band.shape} does not match grid {grid.shape}")
    if (band.lo, band.hi) != (lo, hi):
        raise ValueError(f"band covers ({band.lo}, {band.hi}], not ({lo}, {hi}]")
    geo = BoundaryGeometry(grid.shape.dims)
    out = grid.data.copy()
    for face, slab in enumerate(band.slabs):
        expect = grid.data[geo.slab(face, lo, hi)].shape
        if slab.shape != expect:
            raise ValueError(f"slab {face} has shape {slab.shape}, expected {expect}")
        mask = geo.owned_mask(face, lo, hi)
        out[geo.slab(face, lo, hi)][mask] = slab[mask]
    return FieldGrid(grid.shape, out)
