"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when
the extension is unavailable or ``FFTSTENCIL_PURE_PYTHON`` is set.
"""

import numpy as np

NAME = "python"


def apply_stencil(src, offsets, blocks):
    """One periodic stencil application on an array of shape ``dims + (m,)``."""
    src = np.asarray(src, dtype=np.float64)
    d = src.ndim - 1
    axes = tuple(range(d))
    m = src.shape[-1]
    out = np.zeros_like(src)
    for off, blk in zip(offsets, blocks):
        shifted = np.roll(src, tuple(-int(o) for o in off), axis=axes)
        if m == 1:
            out += blk[0, 0] * shifted
        else:
            out += shifted @ blk.T
    return out


def power_blocks(lam, T):
    """Raise each ``m x m`` block of ``lam`` (shape ``(n, m, m)``) to the power ``T``.

    Overflow yields inf/nan silently; callers detect non-finite results.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _power_blocks(lam, T)


def _power_blocks(lam, T):
    lam = np.asarray(lam, dtype=np.complex128)
    T = int(T)
    n, m, _ = lam.shape
    if m == 1:
        result = np.ones(n, dtype=np.complex128)
        base = lam[:, 0, 0].copy()
        while T:
            if T & 1:
                result *= base
            T >>= 1
            if T:
                base *= base
        return result.reshape(n, 1, 1)
    result = np.broadcast_to(np.eye(m, dtype=np.complex128), lam.shape).copy()
    base = lam.copy()
    while T:
        if T & 1:
            result = result @ base
        T >>= 1
        if T:
            base = base @ base
    return result


def hadamard_blocks(lam, x):
    """Per-frequency block times vector: ``y[j] = lam[j] @ x[j]``."""
    lam = np.asarray(lam, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if lam.shape[1] == 1:
        return lam[:, :, 0] * x
    return np.einsum("nfg,ng->nf", lam, x)
