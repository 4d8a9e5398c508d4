"""Built-in benchmark stencils.

Tap counts and radii follow the usual benchmark set (heat1d 3pt r1,
heat2d 5pt r1, seidel2d 9pt r1, jacobi2d 25pt r2, heat3d 7pt r1,
19pt3d 19pt r2).  Coefficients:

* ``heat*``: forward-Euler heat update ``u + alpha * laplacian(u)`` with the
  standard second-difference Laplacian; ``alpha`` defaults to 0.125.
* ``seidel2d``: uniform 1/9 over the 3x3 box (applied Jacobi-style).
* ``jacobi2d``: uniform 1/25 over the 5x5 box.
* ``19pt3d``: uniform 1/19 over the centre, the 12 edge neighbours
  ``(+-1, +-1, 0)`` and permutations, and the 6 axis points at distance 2.
* ``identity1d/2d/3d``: the centre tap plus zero-weight face neighbours, so
  the radius is 1 and the kernel is usable with Dirichlet boundaries.
"""

from __future__ import annotations

from itertools import product

from fftstencil.grid import StencilKernel

__all__ = ["BUILTIN_STENCILS", "builtin_stencil", "heat_kernel"]

DEFAULT_ALPHA = 0.125


def heat_kernel(ndim: int, alpha: float = DEFAULT_ALPHA) -> StencilKernel:
    taps = {(0,) * ndim: 1.0 - 2.0 * ndim * alpha}
    for axis in range(ndim):
        for step in (-1, 1):
            off = [0] * ndim
            off[axis] = step
            taps[tuple(off)] = alpha
    return StencilKernel(taps)


def _box(ndim: int, r: int) -> StencilKernel:
    offs = list(product(range(-r, r + 1), repeat=ndim))
    return StencilKernel({o: 1.0 / len(offs) for o in offs})


def _nineteen_point() -> StencilKernel:
    offs = [(0, 0, 0)]
    offs += [o for o in product((-1, 0, 1), repeat=3) if sum(map(abs, o)) == 2]
    for axis in range(3):
        for step in (-2, 2):
            o = [0, 0, 0]
            o[axis] = step
            offs.append(tuple(o))
    return StencilKernel({o: 1.0 / len(offs) for o in offs})


def _identity(ndim: int) -> StencilKernel:
    k = heat_kernel(ndim, 0.0)
    return k


_FACTORIES = {
    "heat1d": lambda alpha: heat_kernel(1, alpha),
    "heat2d": lambda alpha: heat_kernel(2, alpha),
    "heat3d": lambda alpha: heat_kernel(3, alpha),
    "seidel2d": lambda alpha: _box(2, 1),
    "jacobi2d": lambda alpha: _box(2, 2),
    "19pt3d": lambda alpha: _nineteen_point(),
    "identity1d": lambda alpha: _identity(1),
    "identity2d": lambda alpha: _identity(2),
    "identity3d": lambda alpha: _identity(3),
}

BUILTIN_STENCILS = tuple(_FACTORIES)


def builtin_stencil(name: str, alpha: float = DEFAULT_ALPHA) -> StencilKernel:
    """Return the canonical kernel called ``name``.

    ``alpha`` only affects the ``heat*`` stencils.
    """
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown stencil {name!r}; available: {', '.join(BUILTIN_STENCILS)}"
        ) from None
    return factory(alpha)
