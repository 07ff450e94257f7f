import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridfp.contraction import PhiFunction
from hybridfp.volterra import (
    InclusionInstance, NotConverged, SelectionError, apply_inclusion_operator, check_bracket, check_h3,
    check_monotone, delta, kernel_report, kernel_tau, select, solve_inclusion,
)


def exp_instance(n=1000):
    return InclusionInstance("1", "1", "t", "{x}", n=n)


def test_zero_fixed_point():
    inst = InclusionInstance("0", "1", "t", "{x}", n=50)
    assert np.all(apply_inclusion_operator(inst, np.zeros(51)) == 0)


def test_midpoint_constant_integrand():
    inst = InclusionInstance("0", "1", "t", "[0, 1]", n=100)
    x = np.random.default_rng(1).normal(size=101)
    np.testing.assert_allclose(apply_inclusion_operator(inst, x, "midpoint"), inst.t / 2, atol=1e-15)


def test_exp_instance_one_step():
    inst = exp_instance(200)
    np.testing.assert_allclose(apply_inclusion_operator(inst, np.ones(201)), 1 + inst.t, atol=1e-14)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.55, 1.0])
def test_partial_cell_exact_for_linear(c):
    # int_0^sigma s ds = sigma^2 / 2, exact under trapezoid with a split last cell
    inst = InclusionInstance("0", "1", f"{c} + (1 - {c}) * t * t", "{s}", n=37)
    out = apply_inclusion_operator(inst, np.zeros(38))
    np.testing.assert_allclose(out, inst.sigma_values ** 2 / 2, atol=1e-14)


def test_sigma_must_stay_in_unit_interval():
    with pytest.raises(ValueError):
        InclusionInstance("0", "1", "2*t", "{x}", n=10)


def test_selection_rules():
    inst = InclusionInstance("0", "1", "t", "[x/2, x] | {3}", n=4)
    x = np.array([0.0, 1.0, 2.0, 2.8, 4.0])
    np.testing.assert_allclose(select(inst, x, "lower-end"), [0, 0.5, 1, 1.4, 2])
    np.testing.assert_allclose(select(inst, x, "upper-end"), [3, 3, 3, 3, 4])
    np.testing.assert_allclose(select(inst, x, "nearest-to-current"), [0, 1, 2, 2.8, 4])
    # hull midpoints 1.5, 1.75, 2, 2.2, 3
    np.testing.assert_allclose(select(inst, x, "midpoint"), [0, 1, 2, 2.2, 3])
    with pytest.raises(ValueError):
        select(inst, x, "random")


def test_selection_tie_goes_low():
    inst = InclusionInstance("0", "1", "t", "{0} | {2}", n=1)
    assert list(select(inst, np.array([1.0, 1.0]))) == [0.0, 0.0]


def test_malformed_F():
    inst = InclusionInstance("0", "1", "t", "[x, 0]", n=2)
    with pytest.raises(SelectionError):
        select(inst, np.array([-1.0, 0.0, 1.0]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=11, max_size=11), st.sampled_from(
    ["nearest-to-current", "midpoint", "lower-end", "upper-end"]))
def test_selection_membership(xs, rule):
    inst = InclusionInstance("0", "1", "t", "[x - 1, x - 1/2] | [s, s + abs(x)]", n=10)
    x = np.array(xs)
    v = select(inst, x, rule)
    for j in range(11):
        assert v[j] in inst.set_at(j, x[j])


def test_exp_solution_error():
    inst = exp_instance(1000)
    sol = solve_inclusion(inst)
    err = np.max(np.abs(sol.x - np.exp(inst.t)))
    assert sol.converged and err <= 1e-5
    assert err * 1000 ** 2 == pytest.approx(0.2265, rel=0.01)


def test_exp_grid_refinement_order_two():
    errs = [np.max(np.abs(solve_inclusion(exp_instance(n)).x - np.exp(np.linspace(0, 1, n + 1))))
            for n in (250, 500, 1000)]
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_residual_recheck():
    inst = exp_instance(300)
    sol = solve_inclusion(inst)
    again = np.max(np.abs(sol.x - apply_inclusion_operator(inst, sol.x)))
    assert abs(sol.residual - again) <= 1e-12 and sol.residual <= 1e-12


def test_zero_F_gives_q():
    inst = InclusionInstance("t*t - t", "1", "t", "{0}", n=20)
    sol = solve_inclusion(inst)
    assert sol.iterations == 1
    np.testing.assert_array_equal(sol.x, inst.t * inst.t - inst.t)


def test_contraction_to_zero():
    inst = InclusionInstance("0", "1", "t", "{x/2}", n=50)
    sol = solve_inclusion(inst, x0=np.ones(51))
    assert np.max(np.abs(sol.x)) <= 1e-11


def test_rules_pick_different_solutions():
    # F = [x/2, x], k = 1/2: v = c x gives x = e^{c t / 2}
    inst = InclusionInstance("1", "1/2", "t", "[x/2, x]", n=1000)
    for rule, c in (("upper-end", 1.0), ("lower-end", 0.5), ("midpoint", 0.75)):
        sol = solve_inclusion(inst, rule)
        assert np.max(np.abs(sol.x - np.exp(c * inst.t / 2))) <= 1e-6


def test_not_converged():
    inst = exp_instance(50)
    with pytest.raises(NotConverged) as err:
        solve_inclusion(inst, max_iters=3)
    assert not err.value.result.converged and err.value.result.iterations == 3


def test_bracket_reports():
    inst = exp_instance(300)
    M = 1 + 1 * 10.0 * 2
    rep = check_bracket(np.full(301, -M), np.full(301, M), InclusionInstance("1", "1", "t", "[-10, 10]", n=300))
    assert rep.lower_holds and rep.upper_holds
    rep = check_bracket(np.ones(301), np.full(301, 3.0), inst)
    assert rep.lower_holds and not rep.upper_holds
    assert min(rep.upper_violations) == pytest.approx(2 / 3, abs=1 / 300 + 1e-12)
    assert all(t > 2 / 3 for t in rep.upper_violations)
    sol = solve_inclusion(inst)
    rep = check_bracket(sol.x, sol.x, inst, solution=sol.x)
    assert rep.lower_holds and rep.upper_holds and rep.between


def test_kernel_tau():
    assert kernel_tau(InclusionInstance("0", "1/2", "t", "{x}", n=10)) == pytest.approx(math.log(2))
    assert kernel_tau(InclusionInstance("0", "exp(-1)", "t", "{x}", n=10)) == pytest.approx(1.0)
    inst = InclusionInstance("0", "t*s", "t", "{x}", n=10)
    with pytest.warns(UserWarning):
        tau = kernel_tau(inst)
    assert tau == 0 and not kernel_report(inst)["h0_holds"]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        kernel_tau(InclusionInstance("0", "1/2", "t", "{x}", n=10))


def test_delta_examples():
    x, y = np.array([1.0, 2.0]), np.array([0.0, -1.0])
    np.testing.assert_array_equal(delta(x, x, x, x, 0.2, 0.2, 0.2, 0.1), 0)
    np.testing.assert_array_equal(delta(x, y, x, y, alpha=1), np.abs(x - y))
    one, zero = np.ones(3), np.zeros(3)
    np.testing.assert_allclose(delta(one, zero, one, zero, 1 / 8, 1 / 8, 1 / 8, 1 / 8), 3 / 8)
    with pytest.raises(ValueError):
        delta(one, zero, one, zero, 0.5, 0.5, 0.1, 0)


def test_delta_against_hand_formula():
    rng = np.random.default_rng(5)
    x, y, Tx, Ty = rng.normal(size=(4, 20))
    a, b, c, d = 0.1, 0.2, 0.15, 0.1
    ref = [a * abs(x[i] - y[i]) + b * (1 + abs(x[i] - Tx[i])) * abs(y[i] - Ty[i]) / (1 + abs(x[i] - y[i]))
           + c * (abs(x[i] - Tx[i]) + abs(y[i] - Ty[i])) + d * (abs(x[i] - Ty[i]) + abs(y[i] - Tx[i]))
           for i in range(20)]
    np.testing.assert_allclose(delta(x, y, Tx, Ty, a, b, c, d), ref, rtol=1e-14)


def test_monotone_check():
    assert check_monotone(InclusionInstance("0", "1", "t", "[x/2, x]", n=5))["holds"]
    bad = check_monotone(InclusionInstance("0", "1", "t", "[0, 1 - x]", n=5))
    assert not bad["holds"] and bad["x"] < bad["x_next"]


def test_h3_modes():
    inst = InclusionInstance("0", "1/2", "t", "[x/8, x/4]", n=20)
    x, y = np.linspace(0, 1, 21), np.zeros(21)
    phi = PhiFunction.linear(0.99)
    rep = check_h3(inst, x, y, kernel_tau(inst), phi, alpha=1)
    # H(F(x), F(0)) = x/4 against (1/2)(0.99 x)
    assert rep.verdict == "holds-on-samples"
    sel = check_h3(inst, x, y, kernel_tau(inst), phi, alpha=1, mode="selected")
    assert sel.verdict == "holds-on-samples"
    tight = check_h3(inst, x, y, 2.0, phi, alpha=1)
    assert tight.verdict == "violated" and tight.violations[0].x == pytest.approx(0.05)
    with pytest.raises(ValueError):
        check_h3(inst, x, y, 1.0, phi, mode="other")
