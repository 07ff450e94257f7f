import pytest

from hybridfp.dsl import parse_multi, parse_single
from hybridfp.pairs import (
    HybridPair, UnsupportedSpaceError, check_commuting, check_idempotency, coincidence_points,
    common_fixed_points, detect_ea_clr, in_range, pair_report, range_is_closed, range_pieces,
)
from hybridfp.sets import ClosedSet


def finite_pair(fvals, Tvals, name=""):
    f = "piecewise{ " + " ; ".join(f"[{x},{x}]: {v}" for x, v in fvals.items()) + " }"
    T = "piecewise{ " + " ; ".join(f"[{x},{x}]: {{{','.join(map(str, v))}}}" for x, v in Tvals.items()) + " }"
    return HybridPair(parse_single(f), parse_multi(T), name)


def test_pair_validation():
    with pytest.raises(ValueError):
        HybridPair(parse_single("piecewise{ [0,1]: x + 1 }"), parse_multi("piecewise{ [0,1]: {x} }"))
    with pytest.raises(ValueError):
        HybridPair(parse_single("piecewise{ [0,1]: x }"), parse_multi("piecewise{ [0,2]: {x} }"))


def test_triad(triad_pair):
    assert triad_pair.space_kind == "finite"
    assert coincidence_points(triad_pair) == ClosedSet.points([1, 2])
    assert common_fixed_points(triad_pair) == ClosedSet.point(1)
    c = check_commuting(triad_pair)
    assert (c.commuting, c.weakly_commuting, c.weakly_compatible) == (False, False, False)
    assert c.counterexamples["weakly_compatible"] == 2
    idem = check_idempotency(triad_pair)
    assert not idem.coincidentally and idem.counterexample == 2
    assert idem.occasionally and idem.witness == 1


def test_identity_pair(identity_pair):
    assert coincidence_points(identity_pair) == ClosedSet.interval(0, 1)
    assert common_fixed_points(identity_pair) == ClosedSet.interval(0, 1)
    idem = check_idempotency(identity_pair)
    assert idem.coincidentally and idem.occasionally
    flags = pair_report(identity_pair).flags()
    decidable = {k: v for k, v in flags.items() if v is not None}
    assert all(decidable.values())


def test_finite_commuting_cases():
    swap = finite_pair({0: 1, 1: 0}, {0: [0, 1], 1: [0, 1]})
    assert check_commuting(swap).commuting
    ident = finite_pair({1: 1, 2: 2, 3: 3}, {1: [1, 3], 2: [2], 3: [1]})
    c = check_commuting(ident)
    assert c.commuting and c.weakly_commuting and c.weakly_compatible


def test_commuting_needs_finite_space(ramp_pair):
    with pytest.raises(UnsupportedSpaceError):
        check_commuting(ramp_pair)


def test_ramp(ramp_pair):
    C = coincidence_points(ramp_pair, 1e-3)
    assert len(C.pieces) == 1 and C.min == pytest.approx(1, abs=1e-8) and C.max == pytest.approx(2, abs=1e-8)
    cf = common_fixed_points(ramp_pair)
    assert cf.is_singleton and abs(cf.min - 1.5) <= 1e-6
    idem = check_idempotency(ramp_pair)
    assert not idem.coincidentally and idem.counterexample == 1.0
    assert idem.occasionally and idem.witness == pytest.approx(1.5, abs=1e-9)
    ea = detect_ea_clr(ramp_pair)
    assert ea.ea and ea.clr_f and ea.f_range_closed
    w = ea.clr_witness
    assert w.t in w.A and ramp_pair.f(w.u) == pytest.approx(w.t)


def test_ramp_sequence(ramp_pair):
    # x_n = 1 + 1/n: f x_n -> 2 = f(1), T x_n -> [1, 2]
    lim_f, lim_T = ramp_pair.f.limits(1.0), ramp_pair.T.limits(1.0)
    assert lim_f.right == 2 == ramp_pair.f(1.0) and lim_T.right == ClosedSet.interval(1, 2)


def test_range_of_f(kink_pairs):
    f, g = kink_pairs
    rf = range_pieces(f.f)
    assert [(c.lo, c.hi, c.lo_closed, c.hi_closed) for c in rf] == [(1.0, 2.0, False, True)]
    assert not range_is_closed(f.f) and range_is_closed(g.f)
    assert not in_range(1.0, rf) and in_range(1.8, rf) and in_range(2.0, rf)


def test_kink_limits(kink_pairs):
    f, g = kink_pairs
    ea = detect_ea_clr(f)
    w = ea.ea_witness
    assert ea.ea and (w.x0, w.side, w.t) == (1.0, "left", 1.0)
    assert w.A == ClosedSet.interval(0.5, 1.5)
    assert not ea.f_range_closed
    eg = detect_ea_clr(g)
    assert eg.clr_f and eg.f_range_closed


def test_kink_f_coincidences_give_clr(kink_pairs):
    # 2 - x lies in [1/2, 3/2] for x in [1/2, 1), so f has coincidence
    # points with T and constant sequences there realize CLR_f
    f, _ = kink_pairs
    C = coincidence_points(f)
    assert C.min == pytest.approx(0.5, abs=1e-8) and C.max == pytest.approx(1.0, abs=1e-9)
    assert f.f(0.5) == 1.5 and 1.5 in f.T(0.5)
    ea = detect_ea_clr(f)
    assert ea.clr_f
    w = ea.clr_witness
    assert w.t in w.A and in_range(w.t, range_pieces(f.f))


def test_finite_ea_equals_nonempty_coincidence(triad_pair):
    assert detect_ea_clr(triad_pair).ea
    empty = finite_pair({1: 2, 2: 1}, {1: [1], 2: [2]})
    assert coincidence_points(empty) is None
    r = detect_ea_clr(empty)
    assert not r.ea and not r.clr_f


def test_report_invariants(ramp_pair, triad_pair, kink_pairs, identity_pair):
    for pair in (ramp_pair, triad_pair, *kink_pairs, identity_pair):
        rep = pair_report(pair)
        if rep.common_fixed is not None:
            assert rep.coincidence is not None
            for x in rep.common_fixed.endpoints():
                assert abs(pair.f(x) - x) <= 1e-9 and pair.defect(x) <= 1e-9
        if rep.ea.clr_f:
            assert rep.ea.ea
        assert rep.remark_implication_holds
        if rep.idempotency.coincidentally:
            assert rep.idempotency.occasionally
        flags = rep.flags()
        assert flags["compatible"] is None and flags["non-compatible"] is None
