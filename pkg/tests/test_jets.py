"""Jet arithmetic and composition against symbolic and finite-difference oracles."""

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from glnlab.autodiff import EvalError, Jet, apply_arith, apply_unary
from glnlab.autodiff import ops


def seed(x, order):
    return Jet.seed(x, order)


def test_seed_layout():
    j = seed(3.0, 4)
    assert j.coeff == (3.0, 1.0, 0.0, 0.0, 0.0)
    assert j.order == 4


def test_sin_seed_at_zero_order4():
    j = ops.sin(seed(0.0, 4))
    assert np.allclose(j.coeff, [0.0, 1.0, 0.0, -1.0, 0.0], atol=1e-15)


def test_tanh_seed_at_zero_order3():
    # third derivative of tanh at 0 is exactly -2 (checked symbolically)
    j = ops.tanh(seed(0.0, 3))
    assert np.allclose(j.coeff, [0.0, 1.0, 0.0, -2.0], atol=1e-15)


def test_exp_of_constant_jet():
    j = ops.exp(Jet.const(1.7, 2))
    assert j.coeff[0] == pytest.approx(math.exp(1.7), rel=1e-15)
    assert j.coeff[1] == 0.0 and j.coeff[2] == 0.0


def test_mul_square_of_seed():
    j = seed(3.0, 2)
    sq = j * j
    assert sq.coeff == (9.0, 6.0, 2.0)


def test_add_and_div_order1():
    assert (Jet((1.0, 2.0)) + Jet((3.0, 4.0))).coeff == (4.0, 6.0)
    assert (Jet((1.0, 0.0)) / Jet((2.0, 0.0))).coeff == (0.5, 0.0)


def test_tag_entry_points():
    assert apply_arith("add", Jet((1.0, 2.0)), Jet((3.0, 4.0))).coeff == (4.0, 6.0)
    j = apply_unary("sin", seed(0.0, 4))
    assert np.allclose(j.coeff, [0, 1, 0, -1, 0])
    with pytest.raises(ValueError):
        apply_unary("nope", seed(0.0, 1))
    with pytest.raises(ValueError):
        apply_arith("pow", Jet((1.0,)), Jet((1.0,)))


def test_div_by_zero_leading_coefficient():
    with pytest.raises(EvalError):
        Jet((1.0, 1.0)) / Jet((0.0, 1.0))


def test_sqrt_domain_error_names_operation():
    with pytest.raises(EvalError, match="sqrt"):
        ops.sqrt(seed(-2.0, 2))


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        Jet((1.0, 2.0)) + Jet((1.0, 2.0, 3.0))


UNARY_CASES = {
    "sin": sp.sin,
    "cos": sp.cos,
    "tanh": sp.tanh,
    "exp": sp.exp,
    "sigmoid": lambda v: 1 / (1 + sp.exp(-v)),
    "sqrt": sp.sqrt,
    "recip": lambda v: 1 / v,
}


@pytest.mark.parametrize("name", sorted(UNARY_CASES))
@pytest.mark.parametrize("x0", [0.31, 1.07, 2.9])
def test_unary_composition_matches_sympy(name, x0):
    # compose with an inner polynomial so all Faa di Bruno terms are exercised
    xs = sp.Symbol("x")
    inner = 0.4 * xs**3 - 0.8 * xs**2 + 1.3 * xs + 0.9
    expr = UNARY_CASES[name](inner)
    expected = [float(sp.diff(expr, xs, k).subs(xs, x0)) for k in range(5)]

    j = seed(x0, 4)
    inner_jet = 0.4 * (j * j * j) - 0.8 * (j * j) + 1.3 * j + 0.9
    out = apply_unary(name, inner_jet)
    got = [float(c) for c in out.coeff]
    assert np.allclose(got, expected, rtol=1e-10, atol=1e-10)


def test_quotient_matches_sympy():
    xs = sp.Symbol("x")
    num = sp.sin(xs) + 2
    den = sp.cos(xs) + 3
    expr = num / den
    x0 = 0.77
    expected = [float(sp.diff(expr, xs, k).subs(xs, x0)) for k in range(5)]
    j = seed(x0, 4)
    out = (ops.sin(j) + 2.0) / (ops.cos(j) + 3.0)
    assert np.allclose([float(c) for c in out.coeff], expected, rtol=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    a=st.lists(st.floats(-3, 3), min_size=5, max_size=5),
    b=st.lists(st.floats(-3, 3), min_size=5, max_size=5),
)
def test_leibniz_product_is_symmetric_and_linear(a, b):
    ja, jb = Jet(a), Jet(b)
    ab = ja * jb
    ba = jb * ja
    assert np.allclose(ab.coeff, ba.coeff, rtol=1e-12, atol=1e-12)
    two_a = ja + ja
    assert np.allclose((two_a * jb).coeff, [2 * c for c in ab.coeff],
                       rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(x0=st.floats(-2.0, 2.0))
def test_finite_results_within_domain(x0):
    j = seed(x0, 4)
    out = ops.tanh(ops.sin(j) * ops.exp(0.3 * j))
    assert all(np.isfinite(c) for c in out.coeff)


def test_array_coefficients_elementwise():
    x = np.array([0.0, 0.5, 1.5])
    j = seed(x, 2)
    out = ops.sin(j)
    assert np.allclose(out.coeff[0], np.sin(x))
    assert np.allclose(out.coeff[1], np.cos(x))
    assert np.allclose(out.coeff[2], -np.sin(x))


def test_nested_jets_give_mixed_partial():
    # f(x, t) = sin(x * t): inner axis t, outer axis x, both order 1
    x0, t0 = 0.6, 1.3
    t_inner = Jet.seed(t0, 1)
    x_outer = Jet((Jet.const(x0, 1), Jet.const(1.0, 1)))
    f = ops.sin(x_outer * Jet.const(t_inner, 1))
    val = f.coeff[0].coeff[0]
    d_dx = f.coeff[1].coeff[0]
    d_dt = f.coeff[0].coeff[1]
    d_dxdt = f.coeff[1].coeff[1]
    assert val == pytest.approx(math.sin(x0 * t0), rel=1e-12)
    assert d_dx == pytest.approx(t0 * math.cos(x0 * t0), rel=1e-12)
    assert d_dt == pytest.approx(x0 * math.cos(x0 * t0), rel=1e-12)
    expected_mixed = math.cos(x0 * t0) - x0 * t0 * math.sin(x0 * t0)
    assert d_dxdt == pytest.approx(expected_mixed, rel=1e-12)
