import numpy as np
import pytest

from fftstencil import StencilKernel, evolve_aperiodic_naive, evolve_periodic_naive, solve_periodic
from fftstencil.accuracy import max_relative_error, modal_problem
from fftstencil.stencils import builtin_stencil, heat_kernel


@pytest.mark.parametrize("dims,T", [((40,), 7), ((12, 10), 5), ((6, 7, 8), 3)])
def test_periodic_truth_matches_naive(dims, T):
    k = heat_kernel(len(dims), 0.1)
    prob = modal_problem(k, dims, T)
    naive = evolve_periodic_naive(prob.a0, k, T)
    assert max_relative_error(naive.data, prob.truth) <= 1e-13


def test_periodic_truth_for_asymmetric_kernel():
    k = StencilKernel({-1: 0.5, 0: 0.3, 2: 0.2})
    prob = modal_problem(k, (25,), 9)
    naive = evolve_periodic_naive(prob.a0, k, 9)
    assert max_relative_error(naive.data, prob.truth) <= 1e-13


@pytest.mark.parametrize("name,dims,T", [("heat1d", (30,), 11), ("seidel2d", (14, 17), 6), ("heat3d", (8, 9, 10), 4)])
def test_dirichlet_truth_matches_naive(name, dims, T):
    k = builtin_stencil(name)
    prob = modal_problem(k, dims, T, periodic=False)
    naive = evolve_aperiodic_naive(prob.a0, k, prob.boundary, T)
    assert max_relative_error(naive.data, prob.truth) <= 1e-13


def test_truth_within_band():
    for periodic in (True, False):
        prob = modal_problem(heat_kernel(1), (1000,), 10**4, periodic=periodic)
        assert 0.5 <= prob.truth.min() and prob.truth.max() <= 2.0
        assert 0.5 <= prob.a0.data.min() and prob.a0.data.max() <= 2.0


def test_factor_extended_precision():
    # lambda_q = 1 - 2 alpha (1 - cos(2 pi q / n)); check the T-th power against a closed form
    n, T, alpha = 1000, 10**6, 0.125
    prob = modal_problem(heat_kernel(1, alpha), (n,), T)
    lam = 1 - 2 * alpha * (1 - np.cos(2 * np.pi * 1 / n))
    assert prob.factors[0].real == pytest.approx(lam ** T, rel=1e-9)


def test_fft_parity_small():
    k = heat_kernel(1)
    prob = modal_problem(k, (200,), 500)
    err_fft = max_relative_error(solve_periodic(prob.a0, k, 500).data, prob.truth)
    err_naive = max_relative_error(evolve_periodic_naive(prob.a0, k, 500).data, prob.truth)
    assert abs(err_fft - err_naive) <= 1e-9 * (1 + err_naive)


@pytest.mark.parametrize("kernel,msg", [
    (StencilKernel({-2: 0.25, 0: 0.5, 2: 0.25}), "radius-1"),
    (StencilKernel({-1: 0.6, 0: 0.0, 1: 0.4}), "symmetric"),
    (StencilKernel({-1: 0.25, 0: 0.25, 1: 0.25}), "summing"),
])
def test_dirichlet_rejections(kernel, msg):
    with pytest.raises(ValueError, match=msg):
        modal_problem(kernel, (20,), 3, periodic=False)


def test_vector_rejected():
    with pytest.raises(ValueError):
        modal_problem(StencilKernel({0: np.eye(2)}), (8,), 1)
