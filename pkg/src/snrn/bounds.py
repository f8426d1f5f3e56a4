"""Length and running-time certificates, and empirical checks of both.

Certificates are derived by structural recursion over a term and claim

* length: ``|f(x; a)| <= 2^(c (S + 1)) + max|a|`` with ``S = Σ(k, x)``;
* time: ``cost(f, x, a) <= 2^(c (S + 1)) * max(2, |a|)`` with ``S = Σ(d, x)``,

where ``cost`` is the evaluator's abstract unit-cost count, not machine time.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .evaluator import EvalLimits, Evaluator, LimitExceeded, run_deep
from .terms import (
    Comp,
    Cond,
    Pred,
    Proj,
    Snrn,
    Srn,
    Succ,
    Term,
    TermError,
    Zero,
    binary_length,
    sum_measure,
)

__all__ = [
    "BoundCertificate",
    "Box",
    "BoundReport",
    "PredReport",
    "sum_measure",
    "predecessor_lengths",
    "check_pred_decrease",
    "derive_length_certificate",
    "derive_time_certificate",
    "check_length_bound",
    "check_time_bound",
    "max2_inequality",
]


# --------------------------------------------------------------------------
# Measure decrease along predecessors


def _len_measure(d: int, lens: Sequence[int]) -> int:
    base = max(lens, default=0) + 1
    return sum(n * base ** (d - i) for i, n in enumerate(lens, 1))


def predecessor_lengths(k: int, lens: Sequence[int]) -> set[tuple[int, ...]]:
    """Length tuples of the members of ``P(y, x)`` for ``y, x`` of lengths ``lens``.

    The measure reads only lengths, and halving shortens by exactly one bit,
    so the set can be enumerated over lengths instead of values.
    """
    width = len(lens)
    if not 1 <= k <= width:
        raise TermError(f"recursion count {k} outside 1..{width}")
    ys = lens[:k]
    pool_k = set(ys) | {max(n - 1, 0) for n in ys}
    pool = pool_k | set(lens[k:]) | {max(n - 1, 0) for n in lens[k:]}
    out: set[tuple[int, ...]] = set()
    for n in range(k):
        if ys[n] == 0:
            continue
        head = tuple(lens[:n]) + (ys[n] - 1,)
        for mid in itertools.product(sorted(pool_k), repeat=k - n - 1):
            for tail in itertools.product(sorted(pool), repeat=width - k):
                out.add(head + mid + tail)
    return out


@dataclass
class PredReport:
    k: int
    m: int
    d: int
    checked: int = 0
    counterexamples: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def __str__(self) -> str:
        head = f"pred-decrease k={self.k} m={self.m} d={self.d}: {self.checked} pairs"
        if self.ok:
            return head + " pass"
        return head + f" FAIL e.g. {self.counterexamples[0]}"


def check_pred_decrease(
    k: int, m: int, d: int, samples: Iterable[Sequence[int]]
) -> PredReport:
    """Check ``Σ(d, v, u) < Σ(d, y, x)`` for every ``(v, u)`` in ``P(y, x)``.

    ``samples`` are value tuples ``(y_1..y_k, x_1..x_m)``; tuples whose
    recursion part is all zero have no predecessors and are skipped.
    Counterexamples are reported as (lengths of (y, x), lengths of (v, u)).
    """
    if d < k + m:
        raise TermError(f"measure exponent {d} below arity {k + m}")
    rep = PredReport(k, m, d)
    seen: set[tuple[int, ...]] = set()
    for sample in samples:
        if len(sample) != k + m:
            raise TermError(f"sample {tuple(sample)} is not of width {k + m}")
        lens = tuple(binary_length(v) for v in sample)
        if lens in seen or not any(lens[:k]):
            continue
        seen.add(lens)
        top = _len_measure(d, lens)
        for pl in predecessor_lengths(k, lens):
            rep.checked += 1
            if _len_measure(d, pl) >= top:
                rep.counterexamples.append((lens, pl))
    return rep


# --------------------------------------------------------------------------
# Certificates


@dataclass
class BoundCertificate:
    """Constants for the length bound (``length_c``) and time bound (``time_c``, ``time_d``).

    ``provenance`` has one line per distinct node: its path, kind and constants.
    """

    length_c: int
    time_c: int
    time_d: int
    provenance: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        return f"length c={self.length_c}; abstract-cost c={self.time_c} d={self.time_d}"


class _Deriver:
    def __init__(self) -> None:
        self.memo: dict[int, tuple[int, int, int]] = {}
        self.lines: list[str] = []

    def run(self, t: Term, path: tuple[int, ...]) -> tuple[int, int, int]:
        key = id(t)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        res, kind = self._node(t, path)
        self.memo[key] = res
        where = "/".join(map(str, path)) or "<root>"
        self.lines.append(f"{where} {kind}: length c={res[0]} time c={res[1]} d={res[2]}")
        return res

    def _node(self, t: Term, path):
        if isinstance(t, (Zero, Proj, Succ, Pred, Cond)):
            sig = t.sig
            return (1, 1, sig.k + sig.l), type(t).__name__
        if isinstance(t, Comp):
            kids = [self.run(t.g, path + (0,))]
            kids += [self.run(h, path + (i + 1,)) for i, h in enumerate(t.safe)]
            outer = t.outer()
            lc = sum(c for c, _, _ in kids) + 1
            tc = 2 * max([lc] + [c for _, c, _ in kids])
            td = 2 * max([outer.k + outer.l] + [d for _, _, d in kids])
            return (lc, tc, td), "Comp"
        if isinstance(t, Srn):
            kids = [self.run(x, path + (i,)) for i, x in enumerate((t.g, t.h0, t.h1))]
            return self._recursion(kids, t.sig, 1), "Srn"
        if isinstance(t, Snrn):
            parts = [t.g] + [x for _, case in t.cases for x in case.terms()]
            kids = [self.run(x, path + (i,)) for i, x in enumerate(parts)]
            return self._recursion(kids, t.sig, t.g.sig.l), "Snrn"
        raise TermError(f"cannot certify node {type(t).__name__}")

    @staticmethod
    def _recursion(kids, sig, l):
        lc = max(c for c, _, _ in kids) + 2
        c0 = lc
        tc = 2 * max([l + 1, c0] + [c for _, c, _ in kids])
        td = 2 * max([sig.k + sig.l] + [d for _, _, d in kids])
        return lc, tc, td


def _derive(t: Term) -> BoundCertificate:
    d = _Deriver()
    lc, tc, td = run_deep(d.run, t, ())
    return BoundCertificate(lc, tc, td, d.lines)


def derive_length_certificate(t: Term) -> BoundCertificate:
    """Certificate whose ``length_c`` bounds output lengths; time fields are filled too."""
    return _derive(t)


def derive_time_certificate(t: Term) -> BoundCertificate:
    """Certificate whose ``time_c``/``time_d`` bound the evaluator's unit cost."""
    return _derive(t)


# --------------------------------------------------------------------------
# Empirical checks


@dataclass(frozen=True)
class Box:
    """Exhaustive sample box: every normal argument ``< normal``, every safe ``< safe``.

    ``points`` overrides the product with an explicit list of ``(xs, as_)``.
    """

    normal: int = 8
    safe: int = 8
    points: Optional[tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]] = None

    def iterate(self, k: int, l: int):
        if self.points is not None:
            yield from self.points
            return
        for xs in itertools.product(range(self.normal), repeat=k):
            for as_ in itertools.product(range(self.safe), repeat=l):
                yield xs, as_

    def __str__(self) -> str:
        if self.points is not None:
            return f"{len(self.points)} points"
        return f"x<{self.normal}, a<{self.safe}"


@dataclass
class BoundReport:
    name: str
    kind: str
    constants: str
    box: str
    checked: int = 0
    min_slack_bits: Optional[float] = None
    witnesses: list[tuple[tuple[int, ...], tuple[int, ...], int]] = field(default_factory=list)
    skipped: int = 0
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.witnesses

    @property
    def complete(self) -> bool:
        """Every box point was evaluated (no limit hits, no deadline stop)."""
        return not self.skipped and not self.truncated

    def __str__(self) -> str:
        lines = [
            f"term: {self.name}",
            f"bound: {self.kind}",
            f"constants: {self.constants}",
            f"box: {self.box}",
            f"points: {self.checked}",
            f"skipped (limit): {self.skipped}",
            f"truncated: {self.truncated}",
            f"min slack (bits): {self.min_slack_bits}",
            f"result: {'pass' if self.ok else 'FAIL'}",
        ]
        for xs, as_, v in self.witnesses[:5]:
            lines.append(f"witness: x={xs} a={as_} observed={v}")
        return "\n".join(lines)


def _log2(n: int) -> float:
    return math.log2(n) if n > 0 else float("-inf")


def _as_float(exp: int) -> float:
    # derived exponents can be far beyond float range
    return float(exp) if exp.bit_length() < 1000 else math.inf


def _exceeds(exp: int, extra_log: float, observed: int) -> tuple[bool, float]:
    """Compare ``observed`` with ``2^exp * 2^extra_log``; return (violated, slack bits)."""
    slack = _as_float(exp) + extra_log - _log2(observed)
    if observed <= 0:
        return False, slack
    if exp > observed.bit_length() + 2:
        return False, slack
    return slack < 0, slack


def _run_box(t, box, name, kind, constants, limits, measure, deadline=None):
    sig = t.sig
    ev = Evaluator(limits or EvalLimits())
    rep = BoundReport(name, kind, constants, str(box))

    def body():
        for xs, as_ in box.iterate(sig.k, sig.l):
            if deadline is not None and time.monotonic() > deadline:
                rep.truncated = True
                return
            try:
                out = ev.eval(t, xs, as_, deadline=deadline)
            except LimitExceeded:
                if deadline is not None and time.monotonic() >= deadline:
                    rep.truncated = True
                    return
                rep.skipped += 1
                continue
            violated, slack, observed = measure(xs, as_, out)
            rep.checked += 1
            if rep.min_slack_bits is None or slack < rep.min_slack_bits:
                rep.min_slack_bits = slack
            if violated:
                rep.witnesses.append((tuple(xs), tuple(as_), observed))

    run_deep(body)
    return rep


def check_length_bound(
    t: Term, cert: BoundCertificate, box: Box = Box(), name: str = "term",
    limits: Optional[EvalLimits] = None, deadline: Optional[float] = None,
) -> BoundReport:
    """Evaluate over ``box`` and test ``|f(x;a)| <= 2^(c(Σ(k,x)+1)) + max|a|``."""
    c = cert.length_c
    k = t.sig.k

    def measure(xs, as_, out):
        n = binary_length(out.value)
        amax = max((binary_length(a) for a in as_), default=0)
        exp = c * (sum_measure(k, xs) + 1)
        if exp > 62:
            return False, _as_float(exp) - _log2(max(n - amax, 1)), n
        bound = (1 << exp) + amax
        return n > bound, _log2(bound) - _log2(max(n, 1)), n

    return _run_box(t, box, name, "length", f"c={c}", limits, measure, deadline)


def check_time_bound(
    t: Term, cert: BoundCertificate, box: Box = Box(), name: str = "term",
    limits: Optional[EvalLimits] = None, deadline: Optional[float] = None,
) -> BoundReport:
    """Evaluate over ``box`` and test ``cost <= 2^(c(Σ(d,x)+1)) * max(2,|a|)`` (abstract cost)."""
    c, d = cert.time_c, cert.time_d

    def measure(xs, as_, out):
        m2 = max([2] + [binary_length(a) for a in as_])
        # with c >= 1 and a nonzero length the exponent is at least 2^(d - k);
        # once that passes the bit length of the cost the point holds, and the
        # exact power would run to millions of bits for large d
        if c >= 1 and any(xs) and d - len(xs) > out.cost.bit_length().bit_length():
            return False, math.inf, out.cost
        exp = c * (sum_measure(d, xs) + 1)
        return _exceeds(exp, _log2(m2), out.cost) + (out.cost,)

    return _run_box(t, box, name, "abstract-cost", f"c={c} d={d}", limits, measure, deadline)


def max2_inequality(exp: int, amax: int) -> bool:
    """``2^exp + amax <= 2^exp * max(2, amax)``; holds for ``exp >= 1`` (not at 0, amax >= 2)."""
    return (1 << exp) + amax <= (1 << exp) * max(2, amax)
