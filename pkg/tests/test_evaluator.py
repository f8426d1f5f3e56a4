import itertools

import pytest
from hypothesis import given, settings, strategies as st

from snrn.checker import check_term
from snrn.evaluator import (
    ArgumentError,
    EvalLimits,
    Evaluator,
    LimitExceeded,
    eval_term,
    run_deep,
    trace,
    value_of,
)
from snrn.stdlib import S0, S1, app, lookup, succs
from snrn.terms import Comp, Cond, PrecFunction, Proj, Snrn, SnrnCase, Srn, Zero, sum_measure


def tower(e, a):
    return (1 << (1 << e)) * a


def L(x):
    return x.bit_length()


def test_cond_example():
    assert value_of(Cond(), (), (2, 5, 9)) == 5
    assert value_of(Cond(), (), (3, 5, 9)) == 9


def test_f0_examples():
    f0 = lookup("f0")
    assert value_of(f0, (0,), (1,)) == 2
    assert value_of(f0, (3,), (1,)) == 16


def test_initial_functions():
    assert value_of(S0, (), (5,)) == 10
    assert value_of(S1, (), (5,)) == 11
    assert value_of(lookup("m"), (0,), (7,)) == 7
    assert value_of(Zero(2, 1), (3, 4), (5,)) == 0
    assert value_of(Proj(2, 1, 3), (3, 4), (5,)) == 5


def test_f0_closed_form_small():
    f0 = lookup("f0")
    for x in range(16):
        for a in range(8):
            assert value_of(f0, (x,), (a,)) == tower(L(x), a)


def test_f1_closed_form_small():
    f1 = lookup("f1")
    ev = Evaluator()
    for x, y, z in itertools.product(range(4), repeat=3):
        assert ev.eval(f1, (x, y, z), (3,)).value == tower(L(x) * L(y) + L(z), 3)


def test_f2_base_and_small():
    f2 = lookup("f2")
    assert value_of(f2, (0,) * 6, (3,)) == 6
    assert run_deep(value_of, f2, (1, 1, 1, 1, 1, 1), (1,)) == tower(3, 1)


def test_trace_f0_measures():
    events = trace(lookup("f0"), (2,), (1,))
    assert [e.kind for e in events] == ["unfold", "unfold", "base"]
    assert [e.measure for e in events[:2]] == [2, 1]


def test_trace_f0_base_only():
    events = trace(lookup("f0"), (0,), (1,))
    assert [e.kind for e in events] == ["base"]


def test_trace_f1_case_order():
    words = [e.word for e in trace(lookup("f1"), (1, 1, 1), (1,)) if e.kind == "unfold"]
    want = iter(words)
    assert all(w in want for w in ("111", "11Z", "1ZZ"))


@pytest.mark.parametrize("name,xs", [("f0", (13,)), ("f1", (3, 2, 5)), ("A1", (6,))])
def test_measure_strictly_decreases_on_every_unfold(name, xs):
    for e in trace(lookup(name), xs, (1,)):
        assert all(p < e.measure for p in e.pred_measures)


def _srn_as_snrn(srn: Srn) -> Snrn:
    k, l = srn.g.sig
    A = tuple(Proj(k + 1, l + 1, k + 1 + i) for i in range(1, l + 1))
    pf = PrecFunction.uniform((2,))
    return Snrn(
        1, k, srn.g,
        (("0", SnrnCase(srn.h0, A, A)), ("1", SnrnCase(srn.h1, A, A))),
        (pf, pf, pf),
    )


def test_srn_and_its_nested_encoding_agree():
    r = Proj(2, 2, 4)
    # f(y, x; a) appends the bits of y reversed, with x's parity deciding the pad bit
    h0 = app(Cond(), 2, 2, Proj(2, 2, 2), succs("0", 2, 2, r), succs("10", 2, 2, r), select=())
    h1 = succs("1", 2, 2, r)
    srn = Srn(Comp(S1, (), (Proj(1, 1, 2),), 1, 1), h0, h1)
    nested = _srn_as_snrn(srn)
    assert check_term(srn).ok and check_term(nested).ok
    for y in range(256):
        for x in (0, 1, 6):
            assert value_of(srn, (y, x), (5,)) == value_of(nested, (y, x), (5,))


def test_limits():
    f0 = lookup("f0")
    with pytest.raises(LimitExceeded) as e:
        eval_term(f0, (255,), (1,), EvalLimits(max_bits=64))
    assert e.value.kind == "bits"
    with pytest.raises(LimitExceeded) as e:
        eval_term(f0, (255,), (1,), EvalLimits(max_cost=10))
    assert e.value.kind == "cost"
    with pytest.raises(ValueError):
        EvalLimits(max_cost=0)
    with pytest.raises(ValueError):
        EvalLimits(max_seconds=0)


def test_wall_clock_limit():
    # f2 at all-7 inputs doubles 2^39 times; it cannot finish in a millisecond
    with pytest.raises(LimitExceeded) as e:
        eval_term(lookup("f2"), (7,) * 6, (1,), EvalLimits(max_seconds=0.001))
    assert e.value.kind == "time"
    assert eval_term(lookup("f0"), (3,), (1,), EvalLimits(max_seconds=5.0)).value == 16


def test_argument_count_checked():
    with pytest.raises(ArgumentError):
        value_of(lookup("f0"), (1, 2), (1,))


def test_cost_is_deterministic_and_peak_covers_value():
    f1 = lookup("f1")
    a = eval_term(f1, (3, 2, 1), (1,))
    b = eval_term(f1, (3, 2, 1), (1,))
    assert a == b
    assert a.peak_bits >= L(a.value)


def test_comp_cost_is_additive():
    f0 = lookup("f0")
    inner = eval_term(f0, (3,), (1,))
    twice = Comp(f0, (1,), (Comp(f0, (1,), (Proj(1, 1, 2),), 1, 1),), 1, 1)
    outer = eval_term(f0, (3,), (inner.value,))
    total = eval_term(twice, (3,), (1,))
    assert total.value == outer.value
    # one projection, two compositions
    assert total.cost == inner.cost + outer.cost + 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 63), st.integers(0, 63))
def test_bellantoni_m_is_shift(y, b):
    assert value_of(lookup("m"), (y,), (b,)) == b >> L(y)
