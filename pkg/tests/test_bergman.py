"""Basis coefficients, kernel derivatives, and the derivative kernel series."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from bergtoep.bergman import (
    basis_deriv_coeff,
    d_alpha_beta_closed,
    d_alpha_beta_eval,
    d_alpha_beta_terms,
    kernel_deriv_eval,
    kernel_deriv_norm,
)
from bergtoep.errors import BoundaryError, NumericalFailureError
from bergtoep.numutil import gauss_legendre


def test_basis_deriv_coeff_values():
    assert basis_deriv_coeff(3, 0) == pytest.approx(2.0)
    assert basis_deriv_coeff(3, 2) == pytest.approx(12.0)
    assert basis_deriv_coeff(1, 2) == 0.0


def test_basis_orthonormality_by_quadrature():
    # independent 2D oracle: Gauss-Legendre in t = |z|^2, trapezoid in angle
    t_nodes, t_weights = gauss_legendre(32)
    t_nodes = 0.5 * (t_nodes + 1.0)
    t_weights = 0.5 * t_weights
    n_theta = 32
    for n in range(4):
        for m in range(4):
            acc = 0.0 + 0.0j
            for t, wt in zip(t_nodes, t_weights):
                r = math.sqrt(t)
                ang = 0.0 + 0.0j
                for j in range(n_theta):
                    z = r * cmath.exp(2j * math.pi * j / n_theta)
                    e_n = math.sqrt(n + 1.0) * z**n
                    e_m = math.sqrt(m + 1.0) * z**m
                    ang += e_n * e_m.conjugate()
                acc += wt * ang / n_theta
            expected = 1.0 if n == m else 0.0
            assert acc == pytest.approx(expected, abs=1e-12)


def test_kernel_deriv_values():
    assert kernel_deriv_eval(0.0, 0.0, 0) == pytest.approx(1.0)
    assert kernel_deriv_eval(0.5, 0.0, 1) == pytest.approx(1.0)
    assert kernel_deriv_eval(0.5, 0.5, 2) == pytest.approx(6 * 0.25 / 0.75**4, rel=1e-13)


def test_kernel_deriv_rejects_exterior_points():
    with pytest.raises(BoundaryError):
        kernel_deriv_eval(1.0, 0.0, 0)


def test_kernel_partial_sums_reproduce_kernel():
    # sum over n <= N of e_n(z) conj(e_n(w)) has a geometric tail at 0.8
    rng = np.random.default_rng(7)
    for _ in range(6):
        z = 0.8 * rng.uniform(0, 1) * cmath.exp(2j * math.pi * rng.uniform())
        w = 0.8 * rng.uniform(0, 1) * cmath.exp(2j * math.pi * rng.uniform())
        n_cut = 120
        partial = sum(
            (n + 1.0) * z**n * w.conjugate() ** n for n in range(n_cut + 1)
        )
        exact = kernel_deriv_eval(w, z, 0)  # K_w(z)
        x = 0.64
        tail_bound = sum((n + 1.0) * x**n for n in range(n_cut + 1, n_cut + 400))
        assert abs(partial - exact) <= tail_bound + 1e-13


def test_derivative_kernel_origin_values():
    assert d_alpha_beta_eval(0.0, 0, 0) == pytest.approx(1.0)
    assert d_alpha_beta_eval(0.0, 1, 1) == pytest.approx(2.0)
    assert d_alpha_beta_eval(0.0, 1, 0) == 0.0


def test_derivative_kernel_one_sided_closed_form():
    assert d_alpha_beta_eval(0.5, 1, 0, tol=1e-12) == pytest.approx(
        2 * 0.5 / 0.75**3, rel=1e-11
    )


def test_derivative_kernel_diagonal_closed_form_anchor():
    # the (1,1) closed form 2 (1 + 2|w|^2) (1 - |w|^2)^(-4) pins the
    # normalization that route agreement adjudicates downstream
    for w in (0.0, 0.3, 0.5 + 0.2j, 0.8):
        t = abs(w) ** 2
        expected = 2.0 * (1.0 + 2.0 * t) / (1.0 - t) ** 4
        assert d_alpha_beta_eval(w, 1, 1, tol=1e-12) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("alpha,beta", [(0, 0), (1, 1), (1, 0), (2, 1), (2, 2), (3, 1)])
def test_derivative_kernel_series_matches_product_rule_form(alpha, beta):
    rng = np.random.default_rng(11)
    for _ in range(8):
        w = 0.9 * rng.uniform(0, 1) * cmath.exp(2j * math.pi * rng.uniform())
        series = d_alpha_beta_eval(w, alpha, beta, tol=1e-13)
        closed = d_alpha_beta_closed(w, alpha, beta)
        assert series == pytest.approx(closed, rel=1e-9, abs=1e-12)


def test_derivative_kernel_conjugate_symmetry():
    rng = np.random.default_rng(3)
    for alpha, beta in ((1, 0), (2, 1), (3, 2)):
        for _ in range(5):
            w = 0.85 * rng.uniform(0, 1) * cmath.exp(2j * math.pi * rng.uniform())
            a = d_alpha_beta_eval(w, alpha, beta, tol=1e-13)
            b = d_alpha_beta_eval(w, beta, alpha, tol=1e-13)
            assert abs(a - b.conjugate()) <= 1e-13 * max(abs(a), 1.0)


def test_derivative_kernel_boundary_guard():
    with pytest.raises(BoundaryError):
        d_alpha_beta_eval(0.9999995, 0, 0)


def test_derivative_kernel_term_cap_failure():
    # at the boundary margin the geometric ratio is 1 - 2e-6: no chance
    # within the term cap, and that must surface as a numerical failure
    with pytest.raises(NumericalFailureError):
        d_alpha_beta_eval(1.0 - 1e-6, 2, 2, tol=1e-12)


def test_product_rule_terms_recover_known_expansions():
    assert d_alpha_beta_terms(0, 0) == [(1.0, 0, 0, 2)]
    # order (1,1): 6 t (1-t)^-4 + 2 (1-t)^-3
    assert sorted(d_alpha_beta_terms(1, 1)) == sorted([(6.0, 1, 1, 4), (2.0, 0, 0, 3)])


def test_kernel_deriv_norm_order_zero_is_kernel_norm():
    for z0 in (0.0, 0.3, 0.6 + 0.2j):
        x = abs(z0) ** 2
        assert kernel_deriv_norm(z0, 0) == pytest.approx(1.0 / (1.0 - x), rel=1e-12)


def test_kernel_deriv_norm_against_brute_series():
    z0, gamma = 0.5, 2
    x = abs(z0) ** 2
    total = sum(
        math.comb(p + gamma + 1, p) ** 2 * x**p / (p + gamma + 1) for p in range(400)
    )
    expected = math.factorial(gamma + 1) * math.sqrt(total)
    assert kernel_deriv_norm(z0, gamma) == pytest.approx(expected, rel=1e-12)
