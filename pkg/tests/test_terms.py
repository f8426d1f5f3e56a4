import pytest
from hypothesis import given, strategies as st

from snrn.terms import (
    Comp,
    Cond,
    PrecFunction,
    Proj,
    TermError,
    TypeSymbol,
    binary_length,
    in_domain,
    select,
    sum_measure,
    term_size,
    type_of,
    type_word,
    word_domain,
)

nats = st.integers(min_value=0, max_value=2**40)


@pytest.mark.parametrize("y,want", [(0, TypeSymbol.Z), (6, TypeSymbol.ZERO_BIT), (5, TypeSymbol.ONE_BIT)])
def test_type_of_examples(y, want):
    assert type_of(y) == want


def test_type_word_examples():
    assert type_word((6, 0, 1)) == "0Z1"
    assert type_word((1,)) == "1"
    assert type_word((0, 0)) == "ZZ"
    assert not in_domain("ZZ", 2)
    with pytest.raises(TermError):
        type_word(())


@pytest.mark.parametrize("j,want", [(2, 7), (5, 3), (4, 1)])
def test_select_examples(j, want):
    assert select(j, (3, 7, 2)) == want


def test_select_rejects_out_of_range():
    with pytest.raises(TermError):
        select(7, (3, 7, 2))


@pytest.mark.parametrize("x,n", [(0, 0), (1, 1), (6, 3)])
def test_binary_length_examples(x, n):
    assert binary_length(x) == n


@given(nats)
def test_type_z_iff_zero(y):
    assert (type_of(y) == TypeSymbol.Z) == (y == 0)


@given(st.lists(nats, min_size=1, max_size=5))
def test_word_in_domain_iff_nonzero(ys):
    assert in_domain(type_word(ys), len(ys)) == (max(ys) != 0)


@given(st.lists(nats, min_size=1, max_size=5), st.data())
def test_select_projection_laws(ys, data):
    k = len(ys)
    j = data.draw(st.integers(1, 2 * k))
    v = select(j, ys)
    if j <= k:
        assert v == ys[j - 1]
    else:
        assert 2 * v <= ys[j - k - 1] <= 2 * v + 1


@given(st.integers(min_value=1, max_value=2**60))
def test_binary_length_shift(x):
    assert binary_length(2 * x) == binary_length(x) + 1
    assert binary_length(2 * x + 1) == binary_length(x) + 1


def test_word_domain_size():
    # 3^(k+m) words minus those whose first k symbols are all Z
    assert len(list(word_domain(3, 3))) == 27 - 1
    assert len(list(word_domain(4, 2))) == 81 - 9


def test_sum_measure():
    # lengths (2, 1), base 3: 2*3 + 1
    assert sum_measure(2, (3,), (1,)) == 7
    with pytest.raises(TermError):
        sum_measure(1, (3,), (1,))


def test_prec_function_first_match_and_expand():
    pf = PrecFunction(2, (("Z_", (1, 4)), ("__", (3, 2))))
    assert pf.resolve("Z1") == (1, 4)
    assert pf.resolve("10") == (3, 2)
    assert len(pf.expand()) == 8
    with pytest.raises(TermError):
        PrecFunction(2, (("__", (1, 5)),))


def test_signatures_and_sharing():
    ident = Comp(Cond(), (), (Proj(0, 3, 1), Proj(0, 3, 2), Proj(0, 3, 3)))
    assert tuple(ident.sig) == (0, 3)
    shared = Proj(0, 1, 1)
    t = Comp(Cond(), (), (shared, shared, shared))
    assert term_size(t) == 3
    with pytest.raises(TermError):
        Proj(1, 1, 3).sig
