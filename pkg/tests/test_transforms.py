import itertools

import pytest

from corpus import iteration_corpus, length_bound, lifted_bounds, nested_corpus
from snrn.checker import check_term
from snrn.evaluator import Evaluator, run_deep, value_of
from snrn.polynomial import Polynomial
from snrn.stdlib import S0, S1, app, mk_unary_add
from snrn.terms import PrecFunction, Proj, TermError, Zero
from snrn.transforms import (
    COROLLARY23,
    LengthPolyPair,
    SimultaneousDef,
    corollary_lift,
    lifted_system,
    oracle_iterate,
    oracle_simultaneous_eval,
    simultaneous_to_single,
    single_recursion,
)

HALVE = PrecFunction.uniform((2,))


def doubling_counting():
    """f1 shifts a1 left, f2 appends a one bit to a2."""
    a1, a2 = Proj(1, 2, 2), Proj(1, 2, 3)
    h = (app(S0, 1, 2, a1, select=()), app(S1, 1, 2, a2, select=()))
    return SimultaneousDef(1, 1, 2, h, HALVE, HALVE, g=(Zero(1, 0), Zero(1, 0)))


def test_oracle_identity_fixed_point():
    d = SimultaneousDef(1, 1, 1, (Proj(1, 1, 2),), HALVE, HALVE)
    for y in range(16):
        assert oracle_simultaneous_eval(d, (y,), (3,), (9,)) == [9]


def test_oracle_doubling_counting():
    d = doubling_counting()
    for y in range(16):
        assert oracle_simultaneous_eval(d, (y,), (1,), (0, 0)) == [0, (1 << (1 << y.bit_length())) - 1]
    assert oracle_simultaneous_eval(d, (0,), (1,), (5, 2)) == [10, 5]


def test_transform_doubling_counting():
    d = doubling_counting()
    ts = simultaneous_to_single(d, LengthPolyPair(components=(length_bound(1, 1),) * 2))
    assert all(check_term(t).ok and tuple(t.sig) == (2, 0) for t in ts)
    ev = Evaluator()
    for y, x in itertools.product(range(8), range(4)):
        got = [ev.eval(t, (y, x), ()).value for t in ts]
        assert got == oracle_simultaneous_eval(d, (y,), (x,), (0, 0))


def test_transform_with_uniform_windows():
    d = doubling_counting()
    # |f2| <= 2^|y| bits, seeds are zero
    polys = LengthPolyPair(Polynomial(1, ()), Polynomial(2, ((1,), ())))
    ts = simultaneous_to_single(d, polys)
    ev = Evaluator()
    for y, x in itertools.product(range(8), range(4)):
        assert [ev.eval(t, (y, x), ()).value for t in ts] == oracle_simultaneous_eval(d, (y,), (x,), (0, 0))


def test_single_component_is_plain_recursion():
    a = Proj(1, 1, 2)
    d = SimultaneousDef(1, 1, 1, (app(S1, 1, 1, a, select=()),), HALVE, HALVE, g=(Zero(1, 0),))
    (t,) = simultaneous_to_single(d, LengthPolyPair(components=(length_bound(1, 1),)))
    fhat = single_recursion(d, LengthPolyPair(components=(length_bound(1, 1),)))
    for y in range(16):
        assert value_of(t, (y, 2), ()) == (1 << (1 << y.bit_length())) - 1
        assert value_of(fhat, (y, y, 2), (0,)) == value_of(t, (y, 2), ())


def test_too_small_windows_are_detected():
    d = doubling_counting()
    ts = simultaneous_to_single(d, LengthPolyPair(components=(Polynomial(2, ()),) * 2))
    ev = Evaluator()
    wrong = sum(
        [ev.eval(t, (y, 0), ()).value for t in ts] != oracle_simultaneous_eval(d, (y,), (0,), (0, 0))
        for y in range(8)
    )
    assert wrong > 0


def test_paired_intermediate_respects_window():
    d = doubling_counting()
    b = length_bound(1, 1)
    polys = LengthPolyPair(components=(b, b))
    fhat = single_recursion(d, polys)
    for y, x in itertools.product(range(8), range(4)):
        code = value_of(fhat, (y, y, x), (0, 0))
        assert code.bit_length() <= 2 * (1 << b((y.bit_length(), x.bit_length())))


@pytest.mark.parametrize("case", nested_corpus(n=8, seed=11), ids=lambda c: c[0].name)
def test_generated_systems_small(case):
    d, polys = case
    ts = simultaneous_to_single(d, polys)
    assert all(check_term(t).ok for t in ts)
    ev = Evaluator()
    for ys in itertools.product(range(4), repeat=d.k):
        for xs in itertools.product(range(4), repeat=d.m):
            seeds = [ev.eval(g, xs, ()).value for g in d.g]
            got = [run_deep(ev.eval, t, ys + xs, ()).value for t in ts]
            assert got == oracle_simultaneous_eval(d, ys, xs, seeds)


def test_malformed_system_rejected():
    d = SimultaneousDef(1, 1, 2, (Proj(1, 2, 2),), HALVE, HALVE)
    assert d.problems()
    with pytest.raises(TermError):
        single_recursion(d, LengthPolyPair(components=(length_bound(1, 1),) * 2))


def test_oracle_iterate_examples():
    g, h = (Zero(0, 0),), (app(S1, 0, 1, Proj(0, 1, 1), select=()),)
    assert oracle_iterate(g, h, 0, ()) == [0]
    assert oracle_iterate(g, h, 4, ()) == [15]
    with pytest.raises(ValueError):
        oracle_iterate(g, h, -1, ())


def unary_counter(m=1):
    a = Proj(m, 1, m + 1)
    return SimultaneousDef(0, m, 1, (app(S1, m, 1, a, select=()),), shape=COROLLARY23, g=(Zero(m, 0),))


def test_iteration_counter():
    d = unary_counter()
    p = Polynomial.parse("x1")
    (t,) = corollary_lift(d, p, lifted_bounds(p, 1, 1))
    assert check_term(t).ok and tuple(t.sig) == (1, 0)
    assert value_of(t, (3,), ()) == 15
    for x in range(64):
        assert value_of(t, (x,), ()) == (1 << (1 << x.bit_length())) - 1


def test_iteration_constant_polynomial():
    d = unary_counter(0)
    (t,) = corollary_lift(d, Polynomial(0, ()), LengthPolyPair(components=(Polynomial(0, ((),)),)))
    assert value_of(t, (), ()) == 1
    (t3,) = corollary_lift(d, Polynomial.parse("3"), LengthPolyPair(components=(Polynomial(0, ((),)),)))
    assert value_of(t3, (), ()) == 255


def test_lifted_system_matches_unary_addition():
    # F(y, x; f(z, x;)) = f(A1(y; z), x;) where f(z, x;) applies h |z| times
    d = unary_counter()
    F, slots = lifted_system(d, Polynomial.parse("x1"))
    A1 = mk_unary_add()
    h = d.h
    for y in range(8):
        for z in range(4):
            start = oracle_iterate(d.g, h, z.bit_length(), (1,))
            lhs = oracle_simultaneous_eval(F, (y,), (1,), start)
            count = value_of(A1, (y,), (z,)).bit_length()
            assert lhs == oracle_iterate(d.g, h, count, (1,))


@pytest.mark.parametrize("case", iteration_corpus(), ids=lambda c: c[0].name)
def test_iteration_corpus_small(case):
    d, p = case
    ts = corollary_lift(d, p, lifted_bounds(p, d.m, d.l))
    assert all(check_term(t).ok and tuple(t.sig) == (d.m, 0) for t in ts)
    ev = Evaluator()
    for xs in itertools.product(range(8), repeat=d.m):
        if p.at(xs) > 5:
            continue
        got = [run_deep(ev.eval, t, xs, ()).value for t in ts]
        assert got == oracle_iterate(d.g, d.h, 1 << p.at(xs), xs)
