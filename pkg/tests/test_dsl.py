import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridfp.dsl import (
    BinOp, Call, CoverageError, DSLSyntaxError, DomainError, EvaluationError, FiniteSetLit,
    IntervalLit, Neg, Num, OverlapError, SetUnion, Var, eval_multi, eval_single, one_sided_limits,
    parse_expr, parse_expr2, parse_expr3, parse_multi, parse_node, parse_single, to_text,
)
from hybridfp.sets import ClosedSet

from conftest import TRIAD_T, KINK_F, RAMP_F, RAMP_T


def test_ramp_maps(ramp):
    f, T = ramp
    assert eval_single(f, 1) == 2
    assert eval_single(f, 2.5) == 3
    assert eval_multi(T, 3) == ClosedSet.interval(0, 0.5)
    assert eval_multi(T, 2) == ClosedSet.interval(1, 2)
    assert f.breakpoints == [0.0, 2.0, 3.0]


def test_simple_maps():
    ident = parse_single("piecewise{ [0,1]: x }")
    assert eval_single(ident, 0.7) == 0.7
    assert eval_single(parse_single("piecewise{ [0,1]: x*x }"), 0.5) == 0.25
    assert eval_single(parse_single(KINK_F), 0.25) == 1.75
    single = parse_multi("piecewise{ [0,1]: {x} }")
    assert eval_multi(single, 0.3) == ClosedSet.point(0.3)
    assert single.is_singleton_valued
    U = parse_multi("piecewise{ [1,3]: {1} | [2,2.5] }")
    assert eval_multi(U, 1) == ClosedSet([(1, 1), (2, 2.5)])
    assert eval_multi(parse_multi(TRIAD_T), 2) == ClosedSet.points([1, 3])


def test_union_symbol_and_functions():
    e = parse_expr("{0} ∪ [1, 2]", ("x",), kind="set")
    assert e(x=0) == ClosedSet([(0, 0), (1, 2)])
    g = parse_expr("exp(x) + ln(x) - sqrt(x) + abs(-x) + 2^3^2")
    assert g(1.0) == pytest.approx(math.e + 0 - 1 + 1 + 512)


def test_fraction_literals_and_precedence():
    assert parse_expr("1/2 + 3*x^2")(2.0) == 12.5
    assert parse_expr("-x^2")(3.0) == -9.0
    assert parse_expr2("x*y - y")(x=2.0, y=3.0) == 3.0
    assert parse_expr3("x + y*z")(x=1.0, y=2.0, z=3.0) == 7.0


def test_array_evaluation_broadcasts_constants():
    xs = np.linspace(0, 1, 5)
    assert parse_expr("3")(xs).shape == (5,)
    assert np.allclose(parse_expr("2*x")(xs), 2 * xs)


@pytest.mark.parametrize("text, pos", [
    ("piecewise{ [0,1] x }", 17),
    ("piecewise{ [0,1]: x + }", 22),
    ("piecewise{ [0,1]: y }", 18),
    ("piecewise{ [0,1]: x ", 20),
    ("piecewise{ [0,1]: x @ 2 }", 20),
])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(DSLSyntaxError) as exc:
        parse_single(text)
    assert exc.value.pos == pos
    assert f"position {pos}" in str(exc.value)


def test_coverage_and_overlap_errors():
    with pytest.raises(CoverageError):
        parse_single("piecewise{ [0,1): x ; (1,2]: x }")
    with pytest.raises(CoverageError):
        parse_single("piecewise{ [0,1): x ; [1.5,2]: x }")
    # closed pieces with a gap define a disconnected domain, not an error
    f = parse_single("piecewise{ [0,1]: x ; [1.5,2]: x }")
    assert f.domain == ClosedSet([(0, 1), (1.5, 2)])
    with pytest.raises(OverlapError):
        parse_single("piecewise{ [0,1]: x ; [1,2]: x }")
    with pytest.raises(OverlapError):
        parse_single("piecewise{ [0,1.5]: x ; [1,2]: x }")


def test_value_validation():
    with pytest.raises(EvaluationError):
        parse_single("piecewise{ [0,1]: 1/x }")
    with pytest.raises(EvaluationError):
        parse_multi("piecewise{ [0,1]: [x, 0] }")
    with pytest.raises(DSLSyntaxError):
        parse_single("piecewise{ [0,1]: [0, 1] }")


def test_out_of_domain():
    f = parse_single(RAMP_F)
    with pytest.raises(DomainError):
        eval_single(f, 3.5)


def test_one_sided_limits_examples(ramp):
    lim = one_sided_limits(parse_single(KINK_F), 1)
    assert (lim.left, lim.at, lim.right) == (1.0, 1.8, 1.8)
    lim = one_sided_limits(ramp[1], 2)
    assert lim.left == ClosedSet.interval(1, 2)
    assert lim.at == ClosedSet.interval(1, 2)
    assert lim.right == ClosedSet.interval(0, 0.5)
    lim = one_sided_limits(parse_single("piecewise{ [0,1]: x*x }"), 0.5)
    assert lim.left == lim.at == lim.right == 0.25
    end = one_sided_limits(ramp[0], 0)
    assert end.left is None and not end.has_left and end.right == 3


def test_limits_match_nearby_evaluation(ramp):
    f, T = ramp
    g = parse_single(KINK_F)
    for fmap in (f, g):
        for x0 in fmap.breakpoints:
            lim = fmap.limits(x0)
            if lim.has_left:
                assert abs(lim.left - fmap(x0 - 1e-9)) <= 1e-6
            if lim.has_right:
                assert abs(lim.right - fmap(x0 + 1e-9)) <= 1e-6
    lim = T.limits(2)
    assert lim.left.hausdorff(T(2 - 1e-9)) <= 1e-6
    assert lim.right.hausdorff(T(2 + 1e-9)) <= 1e-6


def test_map_round_trip(ramp):
    for fmap in ramp:
        again = type(fmap).parse(fmap.to_text())
        assert again == fmap


def test_coverage_random_points(ramp):
    f, T = ramp
    rng = np.random.default_rng(1)
    xs = rng.uniform(0, 3, 1000)
    vals = f.evaluate_many(xs)
    expect = np.where(xs <= 2, 3 - xs, 3.0)
    assert np.array_equal(vals, expect)
    for x in xs[:200]:
        assert T(x) == (ClosedSet.interval(1, 2) if x <= 2 else ClosedSet.interval(0, 0.5))


# -- round-trip property ---------------------------------------------------

nums = st.floats(0, 1e6, allow_nan=False).map(Num)
leaves = st.one_of(nums, st.just(Var("x")))
scalars = st.recursive(
    leaves,
    lambda kids: st.one_of(
        kids.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/^"), kids, kids),
        st.builds(Call, st.sampled_from(["exp", "ln", "sqrt", "abs"]), kids),
    ),
    max_leaves=12,
)
set_atoms = st.one_of(
    st.builds(IntervalLit, scalars, scalars),
    st.lists(scalars, min_size=1, max_size=3).map(lambda xs: FiniteSetLit(tuple(xs))),
)
set_nodes = st.one_of(set_atoms, st.lists(set_atoms, min_size=2, max_size=3).map(lambda xs: SetUnion(tuple(xs))))


@settings(max_examples=300, deadline=None)
@given(scalars)
def test_scalar_ast_round_trip(node):
    assert parse_node(to_text(node), ("x",), kind="scalar") == node


@settings(max_examples=200, deadline=None)
@given(set_nodes)
def test_set_ast_round_trip(node):
    assert parse_node(to_text(node), ("x",), kind="set") == node
