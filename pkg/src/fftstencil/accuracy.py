"""Exact discrete modal solutions used as accuracy ground truth.

Initial data is a constant plus at most three eigenmodes of the stencil, so
the state after ``T`` steps is known in closed form: each mode is scaled by
its amplification factor raised to the ``T``-th power.  Those powers are
evaluated in extended precision with mpmath, which keeps the truth
independent of both solvers.

* Periodic grids use Fourier modes ``exp(2*pi*i * q . x / l)``.  Any real
  scalar kernel works; a tap at offset ``o`` contributes
  ``b * exp(2*pi*i * q . o / l)`` to the factor.
* Dirichlet grids use products of ``sin(pi * q_k * x_k / (l_k - 1))``,
  which vanish on the outermost shell.  This needs a radius-1 kernel whose
  weights are symmetric under flipping each axis and sum to 1, so that the
  constant boundary value is a fixed point.

The constant and amplitudes keep the truth inside ``[0.5, 2]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from fftstencil.grid import BoundaryRule, FieldGrid, GridShape, StencilKernel

__all__ = ["ModalProblem", "modal_problem", "max_relative_error"]

OFFSET = 1.25
AMPLITUDES = (0.4, 0.2, 0.1)
WORKING_DIGITS = 40


@dataclass(frozen=True)
class ModalProblem:
    """Initial grid, boundary rule (``None`` when periodic) and the exact state at ``T``."""

    a0: FieldGrid
    boundary: BoundaryRule | None
    truth: np.ndarray
    factors: tuple[complex, ...]


def _wavevectors(ndim: int) -> list[tuple[int, ...]]:
    return [tuple(j + 1 + ((j + axis) % 2) for axis in range(ndim)) for j in range(len(AMPLITUDES))]


def _mp_power(base, T: int) -> complex:
    with mpmath.workdps(WORKING_DIGITS):
        return complex(mpmath.power(base, T))


def _fourier_factor(k: StencilKernel, q, dims):
    with mpmath.workdps(WORKING_DIGITS):
        total = mpmath.mpc(0)
        for off, blk in k.items():
            turns = mpmath.fsum(mpmath.mpf(o * qk % n) / n for o, qk, n in zip(off, q, dims))
            total += mpmath.mpf(float(blk[0, 0])) * mpmath.expjpi(2 * turns)
        return total


def _sine_factor(k: StencilKernel, q, dims):
    with mpmath.workdps(WORKING_DIGITS):
        total = mpmath.mpf(0)
        for off, blk in k.items():
            term = mpmath.mpf(float(blk[0, 0]))
            for o, qk, n in zip(off, q, dims):
                term *= mpmath.cospi(mpmath.mpf(o * qk) / (n - 1))
            total += term
        return total


def _check_sine_kernel(k: StencilKernel) -> None:
    if k.radius != 1:
        raise ValueError("Dirichlet modal truth needs a radius-1 kernel")
    taps = {off: float(blk[0, 0]) for off, blk in k.items()}
    for off, w in taps.items():
        for axis in range(k.ndim):
            flipped = list(off)
            flipped[axis] = -flipped[axis]
            if taps.get(tuple(flipped), 0.0) != w:
                raise ValueError("Dirichlet modal truth needs weights symmetric in every axis")
    if abs(sum(taps.values()) - 1.0) > 1e-15:
        raise ValueError("Dirichlet modal truth needs weights summing to 1")


def modal_problem(k: StencilKernel, dims, T: int, periodic: bool = True) -> ModalProblem:
    """Build initial data and its exact evolution under ``k`` for ``T`` steps."""
    if k.fields != 1:
        raise ValueError("modal truth is available for scalar fields only")
    dims = tuple(int(n) for n in dims)
    if k.ndim != len(dims):
        raise ValueError(f"kernel is {k.ndim}-D but grid is {len(dims)}-D")
    T = int(T)
    coords = np.indices(dims)
    a0 = np.zeros(dims)
    truth = np.zeros(dims)
    factors = []
    if periodic:
        lam0 = _fourier_factor(k, (0,) * len(dims), dims)
        c_T = _mp_power(lam0, T).real
        for amp, q in zip(AMPLITUDES, _wavevectors(len(dims))):
            # integer phase numerators keep the trig arguments small
            num = sum(((qk * coords[ax]) % n) / n for ax, (qk, n) in enumerate(zip(q, dims)))
            wave = np.exp(2j * np.pi * num)
            fac = _mp_power(_fourier_factor(k, q, dims), T)
            factors.append(fac)
            a0 += amp * wave.real
            truth += (amp * fac * wave).real
        boundary = None
        a0 += OFFSET
        truth += OFFSET * c_T
    else:
        _check_sine_kernel(k)
        if min(dims) < 3:
            raise ValueError("Dirichlet modal truth needs at least 3 cells per axis")
        for amp, q in zip(AMPLITUDES, _wavevectors(len(dims))):
            wave = np.ones(dims)
            for ax, (qk, n) in enumerate(zip(q, dims)):
                wave *= np.sin(np.pi * qk * coords[ax] / (n - 1))
            fac = _mp_power(_sine_factor(k, q, dims), T)
            factors.append(fac)
            a0 += amp * wave
            truth += amp * fac.real * wave
        boundary = BoundaryRule.dirichlet(OFFSET)
        a0 += OFFSET
        truth += OFFSET
        # the solvers hold the whole radius-1 shell at the boundary value
        shell = np.zeros(dims, dtype=bool)
        for ax, n in enumerate(dims):
            shell |= (coords[ax] == 0) | (coords[ax] == n - 1)
        a0[shell] = OFFSET
        truth[shell] = OFFSET
    shape = GridShape(dims, 1)
    return ModalProblem(FieldGrid(shape, a0[..., None]), boundary, truth[..., None], tuple(factors))


def max_relative_error(result: np.ndarray, truth: np.ndarray) -> float:
    return float(np.max(np.abs(result - truth) / np.abs(truth)))
