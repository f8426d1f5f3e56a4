import itertools
import time

import pytest
from hypothesis import given, strategies as st

from snrn.bounds import (
    BoundCertificate,
    Box,
    check_length_bound,
    check_pred_decrease,
    check_time_bound,
    derive_length_certificate,
    derive_time_certificate,
    max2_inequality,
    predecessor_lengths,
    sum_measure,
)
from snrn.checker import is_pred
from snrn.evaluator import EvalLimits
from snrn.stdlib import C, P, S0, app, lookup
from snrn.terms import Proj, TermError


def test_sum_measure_examples():
    assert sum_measure(1, (6,)) == 3
    assert sum_measure(2, (3, 1)) == 7
    assert sum_measure(3, (0, 0, 0)) == 0
    # lengths (3, 2) with base 4, and the predecessor (2, 3) with lengths (2, 2), base 3
    assert sum_measure(2, (5,), (3,)) == 14
    assert sum_measure(2, (2,), (3,)) == 8
    with pytest.raises(TermError):
        sum_measure(1, (1,), (1,))


def test_predecessor_lengths_match_value_enumeration():
    # every member of P(y, x) found by brute force has its length tuple listed
    k = 1
    for yx in itertools.product(range(8), repeat=2):
        if yx[0] == 0:
            continue
        lens = predecessor_lengths(k, tuple(v.bit_length() for v in yx))
        for vu in itertools.product(range(8), repeat=2):
            if is_pred(vu, yx, k):
                assert tuple(v.bit_length() for v in vu) in lens


@pytest.mark.parametrize("k,m", [(1, 1), (2, 0), (3, 0), (2, 1)])
def test_pred_decrease_at_threshold(k, m):
    for d in (k + m, k + m + 1):
        rep = check_pred_decrease(k, m, d, itertools.product(range(8), repeat=k + m))
        assert rep.ok and rep.checked > 0, str(rep)


def test_pred_decrease_fails_below_threshold_is_rejected():
    with pytest.raises(TermError):
        check_pred_decrease(2, 1, 2, [(1, 1, 1)])


def test_length_certificates():
    assert derive_length_certificate(S0).length_c == 1
    assert derive_length_certificate(lookup("f0")).length_c == 3
    two = app(S0, 0, 1, app(P, 0, 1, Proj(0, 1, 1), select=()), select=())
    # Proj inside counts too: S0 (1) + [P (1) + Proj (1) + 1] + 1
    assert derive_length_certificate(app(S0, 0, 1, Proj(0, 1, 1), select=())).length_c == 3
    assert derive_length_certificate(two).length_c == 5


def test_time_certificates():
    cert = derive_time_certificate(S0)
    assert (cert.time_c, cert.time_d) == (1, 1)
    f0 = derive_time_certificate(lookup("f0"))
    assert f0.time_d >= 2
    inner = derive_time_certificate(Proj(0, 1, 1))
    comp = derive_time_certificate(app(S0, 0, 1, Proj(0, 1, 1), select=()))
    assert comp.time_c == 2 * max(comp.length_c, inner.time_c)
    assert comp.provenance and "Comp" in comp.provenance[-1]


def test_length_bound_f0_passes():
    f0 = lookup("f0")
    rep = check_length_bound(f0, derive_length_certificate(f0), Box(8, 8), "f0")
    assert rep.ok and rep.checked == 64
    assert rep.min_slack_bits >= 0
    assert "result: pass" in str(rep)


def test_length_bound_falsified_with_zero_constant():
    f0 = lookup("f0")
    rep = check_length_bound(f0, BoundCertificate(0, 0, 0), Box(8, 8), "f0")
    assert not rep.ok
    assert any(xs == (3,) for xs, _, _ in rep.witnesses)


def test_box_reports_limit_hits_and_deadline():
    f0 = lookup("f0")
    cert = derive_length_certificate(f0)
    rep = check_length_bound(f0, cert, Box(8, 4), "f0", limits=EvalLimits(max_bits=8))
    assert rep.ok and rep.skipped and not rep.complete
    assert rep.checked + rep.skipped == 32
    late = check_length_bound(f0, cert, Box(8, 4), "f0", deadline=time.monotonic() - 1)
    assert late.truncated and late.checked == 0 and not late.complete
    assert check_length_bound(f0, cert, Box(8, 4), "f0").complete


def test_length_bound_successor():
    rep = check_length_bound(S0, derive_length_certificate(S0), Box(1, 16))
    assert rep.ok


@pytest.mark.parametrize("name,box", [("f0", Box(8, 8)), ("f1", Box(4, 4)), ("A1", Box(8, 8))])
def test_time_bound_passes(name, box):
    t = lookup(name)
    rep = check_time_bound(t, derive_time_certificate(t), box, name)
    assert rep.ok, str(rep)
    assert rep.kind == "abstract-cost"


def test_time_bound_falsified_with_zero_constant():
    f0 = lookup("f0")
    cert = derive_time_certificate(f0)
    weak = BoundCertificate(cert.length_c, 0, cert.time_d)
    rep = check_time_bound(f0, weak, Box(8, 8), "f0")
    assert not rep.ok and rep.witnesses


def test_cond_certificates_hold():
    rep = check_length_bound(C, derive_length_certificate(C), Box(1, 8))
    assert rep.ok and rep.checked == 512


@given(st.integers(1, 200), st.integers(0, 10**6))
def test_max2_inequality(exp, amax):
    assert max2_inequality(exp, amax)


def test_max2_needs_positive_exponent():
    # exponents c(Σ+1) are at least 1 since every certificate has c >= 1
    assert not max2_inequality(0, 2)
