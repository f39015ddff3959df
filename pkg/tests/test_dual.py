import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlcheck import dual
from wlcheck.dual import Dual1, finite_diff_grad, lift_eval, scalar_value
from wlcheck.errors import DomainError
from wlcheck.phasespace import PhasePoint

finite = st.floats(min_value=-3.0, max_value=3.0,
                   allow_nan=False, allow_infinity=False)


def test_variable_and_constant_seeding():
    x = Dual1.variable(2.0, 0, 2)
    assert x.val == 2.0
    assert x.grad == (1.0, 0.0)
    c = Dual1.constant(5.0, 2)
    assert c.val == 5.0
    assert c.grad == (0.0, 0.0)


def test_product_and_sum_rules_by_hand():
    # f(x, y) = (x + 2y)(x - y) at (3, 1): value 10, df/dx 7, df/dy -1
    x = Dual1.variable(3.0, 0, 2)
    y = Dual1.variable(1.0, 1, 2)
    f = (x + 2.0 * y) * (x - y)
    assert f.val == 10.0
    assert f.grad == (7.0, -1.0)


def test_right_hand_operators():
    x = Dual1.variable(4.0, 0, 1)
    assert (1.0 + x).val == 5.0
    assert (1.0 - x).grad[0] == -1.0
    assert (3.0 * x).grad[0] == 3.0
    g = 1.0 / x
    assert g.val == 0.25
    assert g.grad[0] == -1.0 / 16.0


def test_quotient_rule():
    x = Dual1.variable(2.0, 0, 2)
    y = Dual1.variable(5.0, 1, 2)
    f = x / y
    assert f.val == 0.4
    assert f.grad[0] == pytest.approx(1.0 / 5.0)
    assert f.grad[1] == pytest.approx(-2.0 / 25.0)


def test_transcendental_chain_rule():
    t = 0.7
    x = Dual1.variable(t, 0, 1)
    f = dual.sin(x * x) + dual.exp(dual.cos(x))
    want_val = math.sin(t * t) + math.exp(math.cos(t))
    want_grad = 2 * t * math.cos(t * t) - math.sin(t) * math.exp(math.cos(t))
    assert f.val == pytest.approx(want_val, abs=1e-14)
    assert f.grad[0] == pytest.approx(want_grad, abs=1e-12)


def test_log_and_sqrt_derivatives():
    x = Dual1.variable(4.0, 0, 1)
    assert dual.log(x).grad[0] == pytest.approx(0.25)
    assert dual.sqrt(x).val == 2.0
    assert dual.sqrt(x).grad[0] == pytest.approx(0.25)


def test_abs_branches():
    x = Dual1.variable(-2.0, 0, 1)
    a = abs(x)
    assert a.val == 2.0
    assert a.grad[0] == -1.0
    y = Dual1.variable(3.0, 0, 1)
    assert abs(y).grad[0] == 1.0


def test_integer_power_fast_path():
    x = Dual1.variable(-2.0, 0, 1)
    f = x ** 3
    assert f.val == -8.0
    assert f.grad[0] == 12.0
    # exponent zero must not evaluate val**(-1)
    z = Dual1.variable(0.0, 0, 1)
    one = z ** 0
    assert one.val == 1.0
    assert one.grad[0] == 0.0


def test_fractional_power_domain():
    x = Dual1.variable(-1.0, 0, 1)
    with pytest.raises(DomainError):
        x ** 0.5
    y = Dual1.variable(4.0, 0, 1)
    assert (y ** 0.5).val == pytest.approx(2.0)


def test_dual_exponent_power():
    # 2^x at x = 3: value 8, derivative ln(2) * 8
    x = Dual1.variable(3.0, 0, 1)
    f = dual.powz(2.0, x)
    assert f.val == pytest.approx(8.0)
    assert f.grad[0] == pytest.approx(math.log(2.0) * 8.0)


def test_powz_float_combinations():
    assert dual.powz(2.0, 3.0) == 8.0
    assert dual.powz(-2.0, 2.0) == 4.0
    with pytest.raises(DomainError):
        dual.powz(-2.0, 0.5)


def test_domain_errors_from_kernels():
    x = Dual1.variable(-1.0, 0, 1)
    with pytest.raises(DomainError):
        dual.sqrt(x)
    with pytest.raises(DomainError):
        dual.log(Dual1.variable(0.0, 0, 1))
    with pytest.raises(DomainError):
        dual.exp(Dual1.variable(1e4, 0, 1))


def test_comparisons_and_float_conversion():
    x = Dual1.variable(1.5, 0, 1)
    assert x > 1.0
    assert x <= 1.5
    assert float(x) == 1.5


def test_scalar_value_unwraps_nesting():
    inner = Dual1(2.5, (1.0,))
    outer = Dual1(inner, (1.0,))
    assert scalar_value(outer) == 2.5
    assert scalar_value(3.25) == 3.25


def test_nested_duals_give_second_derivative():
    # W(u) = u^3: W'(1.5) = 6.75, W''(1.5) = 9
    u = Dual1(1.5, (1.0,))
    t = Dual1(u, (1.0,))
    r = t * t * t
    assert scalar_value(r) == pytest.approx(1.5 ** 3)
    first = r.grad[0]
    assert isinstance(first, Dual1)
    assert first.val == pytest.approx(3 * 1.5 ** 2)
    assert first.grad[0] == pytest.approx(6 * 1.5)


@given(finite, finite)
def test_product_rule_property(a, b):
    x = Dual1.variable(a, 0, 2)
    y = Dual1.variable(b, 1, 2)
    f = x * y
    assert f.grad[0] == pytest.approx(b, abs=1e-12)
    assert f.grad[1] == pytest.approx(a, abs=1e-12)


@given(finite)
def test_difference_of_squares_property(a):
    x = Dual1.variable(a, 0, 1)
    lhs = (x + 1.0) * (x - 1.0)
    rhs = x * x - 1.0
    assert lhs.val == pytest.approx(rhs.val, abs=1e-9)
    assert lhs.grad[0] == pytest.approx(rhs.grad[0], abs=1e-9)


def test_dual_coords_layout():
    xs, vs = dual.dual_coords([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]],
                              [[7.0, 8.0, 9.0], [10.0, 11.0, 12.0]])
    assert xs[1][2].val == 6.0
    assert xs[1][2].grad[5] == 1.0
    assert sum(xs[1][2].grad) == 1.0
    # velocity slots start after all positions
    assert vs[0][0].grad[6] == 1.0
    assert vs[1][1].grad[10] == 1.0


def test_lift_eval_wraps_constants():
    p = PhasePoint([[0.1, 0.2, 0.3]], [[0.0, 0.0, 0.0]])
    r = lift_eval(lambda xs, vs: 2.0, p)
    assert r.val == 2.0
    assert all(g == 0.0 for g in r.grad)


def test_lift_eval_gradient_example():
    # f = x1 * v2 at x1 = 0.5, v2 = 0.25
    p = PhasePoint([[0.5, 0.0, 0.0]], [[0.0, 0.25, 0.0]])
    r = lift_eval(lambda xs, vs: xs[0][0] * vs[0][1], p)
    assert r.val == 0.125
    grad = np.asarray(r.grad)
    want = np.zeros(6)
    want[0] = 0.25   # d/dx1 = v2
    want[4] = 0.5    # d/dv2 = x1
    assert np.allclose(grad, want)


def test_finite_diff_matches_dual_on_fixed_field():
    def f(xs, vs):
        return dual.sin(xs[0][0] * vs[0][2]) + dual.exp(-vs[0][1]) \
            + xs[0][1] ** 3

    p = PhasePoint([[0.3, -0.4, 0.1]], [[0.2, 0.5, -0.6]])
    num = finite_diff_grad(f, p)
    ana = np.asarray(lift_eval(f, p).grad)
    assert np.abs(num - ana).max() < 1e-8


def test_finite_diff_raises_when_stencil_leaves_domain():
    def f(xs, vs):
        return dual.sqrt(xs[0][0])

    p = PhasePoint([[1e-9, 0.0, 0.0]], [[0.0, 0.0, 0.0]])
    with pytest.raises(DomainError):
        finite_diff_grad(f, p)
