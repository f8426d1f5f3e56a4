"""Call-by-value interpreter with a unit-cost model, resource limits and tracing.

Cost is the cost of the naive (unshared) evaluation: 1 per initial-function
application, 1 per composition node and 1 per recursion unfolding, plus the
cost of every sub-evaluation.  Results are memoized per invocation, and a
cache hit charges the cost that was recorded when the entry was computed, so
the reported cost does not depend on sharing.
"""

from __future__ import annotations

import math
import sys
import threading
import time
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Optional, Sequence

from .terms import (
    STRICT,
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
    iter_nodes,
    mentions,
    sum_measure,
)


class LimitExceeded(RuntimeError):
    """An evaluation budget tripped; ``kind`` is ``cost``, ``bits``, ``depth`` or ``time``."""

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind} limit exceeded" + (f": {detail}" if detail else ""))
        self.kind = kind


class ArgumentError(TermError):
    """Argument counts do not match the term's signature."""


@dataclass(frozen=True)
class EvalLimits:
    max_cost: int = 10**40
    max_bits: int = 1 << 24
    max_depth: int = 200_000
    # wall-clock budget per eval() call; None means unlimited
    max_seconds: Optional[float] = None

    def __post_init__(self) -> None:
        if self.max_cost <= 0 or self.max_bits <= 0 or self.max_depth <= 0:
            raise ValueError("evaluation limits must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("evaluation limits must be positive")


@dataclass(frozen=True)
class EvalOutcome:
    value: int
    cost: int
    peak_bits: int


@dataclass(frozen=True)
class TraceEvent:
    """One recursion unfolding (``kind == "unfold"``) or base case."""

    path: tuple[int, ...]
    kind: str
    normals: tuple[int, ...]
    word: Optional[str] = None
    v1: Optional[tuple[int, ...]] = None
    v2: Optional[tuple[int, ...]] = None
    v3: Optional[tuple[int, ...]] = None
    measure: int = 0
    pred_measures: tuple[int, ...] = ()


def _node_paths(t: Term) -> dict[int, tuple[int, ...]]:
    paths: dict[int, tuple[int, ...]] = {}
    stack = [(t, ())]
    while stack:
        node, path = stack.pop()
        if id(node) in paths:
            continue
        paths[id(node)] = path
        for i, c in reversed(list(enumerate(node.children()))):
            stack.append((c, path + (i,)))
    return paths


_STACK_BYTES = 1 << 29


_deep = threading.local()


def run_deep(fn, *args):
    """Run ``fn`` in a thread with a large C stack and a raised recursion limit.

    Nested calls from inside such a thread run directly, so a whole sweep can
    be wrapped once instead of paying for a thread per evaluation.
    """
    if getattr(_deep, "active", False):
        return fn(*args)
    box: dict = {}

    def target():
        _deep.active = True
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 1_000_000))
        try:
            box["value"] = fn(*args)
        except BaseException as e:  # re-raised in the caller's thread
            box["error"] = e
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(_STACK_BYTES)
    try:
        th = threading.Thread(target=target)
        th.start()
    finally:
        threading.stack_size(old_size)
    th.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


class Evaluator:
    """Reusable interpreter; the memo cache persists across :meth:`eval` calls.

    Reusing one instance over many inputs shares sub-results between them,
    which is what makes exhaustive sweeps affordable.
    """

    def __init__(self, limits: Optional[EvalLimits] = None, cache_cap: int = 2_000_000,
                 trace: bool = False):
        self.limits = limits or EvalLimits()
        self.cache_cap = cache_cap
        self.cache: dict = {}
        self.tracing = trace
        self.events: list[TraceEvent] = []
        self._seen: set = set()
        self._paths: dict[int, tuple[int, ...]] = {}
        self._depth = [0]
        self._stop_at = [math.inf]
        self._compiled: dict[int, tuple] = {}
        self._parents: dict[int, int] = {}

    # -- public ------------------------------------------------------------

    def eval(self, t: Term, xs: Sequence[int] = (), as_: Sequence[int] = (),
             deadline: Optional[float] = None) -> EvalOutcome:
        """Evaluate ``t``; ``deadline`` is an absolute ``time.monotonic()`` cutoff."""
        xs = tuple(int(x) for x in xs)
        as_ = tuple(int(a) for a in as_)
        sig = t.sig
        if len(xs) != sig.k or len(as_) != sig.l:
            raise ArgumentError(
                f"term has signature {sig}, got {len(xs)} normal and {len(as_)} safe arguments"
            )
        if any(v < 0 for v in xs + as_):
            raise ArgumentError("arguments must be natural numbers")
        if self.tracing:
            self._paths = _node_paths(t)
        self._depth[0] = 0
        secs = self.limits.max_seconds
        stop = math.inf if secs is None else time.monotonic() + secs
        if deadline is not None and deadline < stop:
            stop = deadline
        self._stop_at[0] = stop
        if id(t) not in self._compiled:
            self._count_parents(t)
        value, cost, peak = run_deep(self._fn(t), xs, as_)
        peak = max(peak, value.bit_length())
        return EvalOutcome(value, cost, peak)

    # -- compilation -------------------------------------------------------
    #
    # Each node becomes a closure ``fn(xs, as_) -> (value, cost, peak_bits)``.
    # Only recursion nodes are memoized; everything else is cheap to redo.

    def _count_parents(self, t):
        for node in iter_nodes(t):
            if id(node) in self._compiled:
                continue
            for c in node.children():
                self._parents[id(c)] = self._parents.get(id(c), 0) + 1

    def _fn(self, t):
        entry = self._compiled.get(id(t))
        if entry is None:
            entry = (t, self._compile(t))
            self._compiled[id(t)] = entry
        return entry[1]

    def _compile(self, t):
        typ = type(t)
        if typ is Zero:
            res = (0, 1, 0)
            return lambda xs, as_: res
        if typ is Proj:
            if t.j <= t.k:
                i = t.j - 1

                def proj_normal(xs, as_):
                    v = xs[i]
                    return v, 1, v.bit_length()

                return proj_normal
            i = t.j - t.k - 1

            def proj_safe(xs, as_):
                v = as_[i]
                return v, 1, v.bit_length()

            return proj_safe
        if typ is Succ:
            b = t.bit

            def succ(xs, as_):
                v = 2 * as_[0] + b
                return v, 1, v.bit_length()

            return succ
        if typ is Pred:
            def pred(xs, as_):
                v = as_[0] >> 1
                return v, 1, v.bit_length()

            return pred
        if typ is Cond:
            def cond(xs, as_):
                v = as_[2] if as_[0] & 1 else as_[1]
                return v, 1, v.bit_length()

            return cond
        if typ is Comp:
            return self._compile_comp(t)
        if typ is Srn:
            return self._compile_srn(t)
        if typ is Snrn:
            return self._compile_snrn(t)
        raise TermError(f"cannot evaluate {typ.__name__}")

    def _check(self, cost, peak):
        lim = self.limits
        if cost > lim.max_cost:
            raise LimitExceeded("cost", f"{cost} > {lim.max_cost}")
        if peak > lim.max_bits:
            raise LimitExceeded("bits", f"{peak} > {lim.max_bits}")

    def _compile_comp(self, t: Comp):
        g = self._fn(t.g)
        hs = [self._fn(h) for h in t.safe]
        sel = tuple(i - 1 for i in t.select)
        max_cost, max_bits = self.limits.max_cost, self.limits.max_bits
        check = self._check

        if sel == tuple(range(t.sig.k)):
            def pick(xs):
                return xs
        elif not sel:
            def pick(xs):
                return ()
        else:
            def pick(xs):
                return tuple([xs[i] for i in sel])

        # fixed-arity variants avoid the list and loop of the general case
        if len(hs) == 1:
            (h1,) = hs

            def comp(xs, as_):
                v1, c1, p1 = h1(xs, as_)
                v, c, p = g(pick(xs), (v1,))
                cost = c1 + c + 1
                if p1 > p:
                    p = p1
                if cost > max_cost or p > max_bits:
                    check(cost, p)
                return v, cost, p
        elif len(hs) == 2:
            h1, h2 = hs

            def comp(xs, as_):
                v1, c1, p1 = h1(xs, as_)
                v2, c2, p2 = h2(xs, as_)
                v, c, p = g(pick(xs), (v1, v2))
                cost = c1 + c2 + c + 1
                if p1 > p:
                    p = p1
                if p2 > p:
                    p = p2
                if cost > max_cost or p > max_bits:
                    check(cost, p)
                return v, cost, p
        elif len(hs) == 3:
            h1, h2, h3 = hs

            def comp(xs, as_):
                v1, c1, p1 = h1(xs, as_)
                v2, c2, p2 = h2(xs, as_)
                v3, c3, p3 = h3(xs, as_)
                v, c, p = g(pick(xs), (v1, v2, v3))
                cost = c1 + c2 + c3 + c + 1
                if p1 > p:
                    p = p1
                if p2 > p:
                    p = p2
                if p3 > p:
                    p = p3
                if cost > max_cost or p > max_bits:
                    check(cost, p)
                return v, cost, p
        else:
            def comp(xs, as_):
                cost = 1
                peak = 0
                vals = []
                for h in hs:
                    v, c, p = h(xs, as_)
                    vals.append(v)
                    cost += c
                    if p > peak:
                        peak = p
                v, c, p = g(pick(xs), tuple(vals))
                cost += c
                if p > peak:
                    peak = p
                if cost > max_cost or peak > max_bits:
                    check(cost, peak)
                return v, cost, peak

        if self._parents.get(id(t), 0) < 2:
            return comp
        # shared subterms are memoized like recursion nodes
        nid = id(t)
        cache = self.cache
        store = self._store

        def shared_comp(xs, as_):
            key = (nid, xs, as_)
            hit = cache.get(key)
            if hit is not None:
                return hit
            return store(key, comp(xs, as_))

        return shared_comp

    def _out_of_time(self):
        raise LimitExceeded("time", "wall-clock budget used up")

    def _too_deep(self):
        self._depth[0] = 0
        raise LimitExceeded("depth", f"nesting above {self.limits.max_depth}")

    def _store(self, key, res):
        cost, peak = res[1], res[2]
        if cost > self.limits.max_cost or peak > self.limits.max_bits:
            self._check(cost, peak)
        cache = self.cache
        if len(cache) >= self.cache_cap:
            cache.clear()
        cache[key] = res
        return res

    def _compile_srn(self, t: Srn):
        g = self._fn(t.g)
        h0 = self._fn(t.h0)
        h1 = self._fn(t.h1)
        nid = id(t)
        cache = self.cache
        me = self
        depth = self._depth
        stop_at = self._stop_at
        clock = time.monotonic
        tracing = self.tracing
        cap = self.cache_cap
        max_cost, max_bits, max_depth = self.limits.max_cost, self.limits.max_bits, self.limits.max_depth

        def srn(xs, as_):
            key = (nid, xs, as_)
            hit = cache.get(key)
            if hit is not None:
                return hit
            # no finally: an exception aborts the run and eval() resets the depth
            d = depth[0] + 1
            if d > max_depth:
                me._too_deep()
            if clock() > stop_at[0]:
                me._out_of_time()
            depth[0] = d
            y = xs[0]
            if y == 0:
                if tracing:
                    me._emit(t, xs, "base")
                v, c, p = g(xs[1:], as_)
                res = (v, c + 1, p)
            else:
                half = (y >> 1,) + xs[1:]
                if tracing:
                    me._emit(t, xs, "unfold", str(y & 1), half, half, half)
                r, c1, p1 = srn(half, as_)
                v, c2, p2 = (h1 if y & 1 else h0)(half, as_ + (r,))
                res = (v, c1 + c2 + 1, p1 if p1 > p2 else p2)
            depth[0] = d - 1
            if res[1] > max_cost or res[2] > max_bits:
                me._check(res[1], res[2])
            if len(cache) >= cap:
                cache.clear()
            cache[key] = res
            return res

        return srn

    def _snrn_entry(self, t: Snrn, w: str):
        case = t.case_for(w)
        if case is None:
            raise TermError(f"no case for type word {w}")
        sels = []
        for pf in t.precs:
            sel = pf.resolve(w)
            if sel is None:
                raise TermError(f"prec table undefined on {w}")
            sels.append(sel)
        last = t.k + t.m + len(case.t) + 1
        needs = (
            any(mentions(s, last) for s in case.s),
            any(mentions(x, last) for x in case.t),
            mentions(case.h, last),
        )
        # selections index into ``src + halves(src)``; itemgetter of one index
        # returns a bare item, so those are wrapped back into a tuple
        getters = []
        for sel in sels:
            idx = [j - 1 for j in sel]
            if len(idx) == 1:
                one = itemgetter(idx[0])
                getters.append(lambda ext, one=one: (one(ext),))
            else:
                getters.append(itemgetter(*idx))
        return (
            tuple(getters),
            self._params(case.s),
            self._params(case.t),
            self._fn(case.h),
            needs,
        )

    def _params(self, terms):
        """One closure ``(xs, as_) -> (values, cost, peak)`` for a list of parameter terms."""
        n = len(terms)
        if n == 0:
            empty = ((), 0, 0)
            return lambda xs, as_: empty
        if all(type(x) is Proj for x in terms):
            # projections index straight into ``xs + as_``
            idx = [x.j - 1 for x in terms]
            if n == 1:
                i = idx[0]

                def one(xs, as_):
                    v = (xs + as_)[i]
                    return (v,), 1, v.bit_length()

                return one
            get = itemgetter(*idx)
            bits = int.bit_length

            def projs(xs, as_):
                vals = get(xs + as_)
                return vals, n, max(map(bits, vals))

            return projs
        fns = [self._fn(x) for x in terms]

        def general(xs, as_):
            cost = peak = 0
            vals = []
            for f in fns:
                v, c, p = f(xs, as_)
                vals.append(v)
                cost += c
                if p > peak:
                    peak = p
            return tuple(vals), cost, peak

        return general

    def _compile_snrn(self, t: Snrn):
        g = self._fn(t.g)
        k = t.k
        strict = t.mode == STRICT
        nid = id(t)
        table: dict[str, tuple] = {}
        by_src: dict[tuple, tuple] = {}
        cache = self.cache
        me = self
        depth = self._depth
        stop_at = self._stop_at
        clock = time.monotonic
        tracing = self.tracing
        cap = self.cache_cap
        max_cost, max_bits, max_depth = self.limits.max_cost, self.limits.max_bits, self.limits.max_depth

        def snrn(xs, as_):
            key = (nid, xs, as_)
            hit = cache.get(key)
            if hit is not None:
                return hit
            d = depth[0] + 1
            if d > max_depth:
                me._too_deep()
            if clock() > stop_at[0]:
                me._out_of_time()
            depth[0] = d
            res = step(xs, as_)
            depth[0] = d - 1
            if res[1] > max_cost or res[2] > max_bits:
                me._check(res[1], res[2])
            if len(cache) >= cap:
                cache.clear()
            cache[key] = res
            return res

        def step(xs, as_):
            ys = xs[:k]
            if not any(ys):
                if tracing:
                    me._emit(t, xs, "base")
                v, c, p = g(xs[k:], as_)
                return v, c + 1, p
            src = ys if strict else xs
            found = by_src.get(src)
            if found is None:
                w = "".join(["Z" if y == 0 else ("1" if y & 1 else "0") for y in src])
                entry = table.get(w)
                if entry is None:
                    entry = table[w] = me._snrn_entry(t, w)
                if len(by_src) >= 100_000:
                    by_src.clear()
                found = by_src[src] = (w, entry)
            w, (getters, s_run, t_run, h_fn, (need3, need2, need1)) = found
            ext = src + tuple([y >> 1 for y in src])
            rest = xs[k:] if strict else ()
            v1, v2, v3 = [get(ext) + rest for get in getters]
            if tracing:
                me._emit(t, xs, "unfold", w, v1, v2, v3)
            # innermost first: c from f(v3; a), then b from f(v2; c), then h.
            # A recursive value no step term reads is not computed.
            cost = 1
            peak = 0
            if need3:
                r, c, peak = snrn(v3, as_)
                cost += c
            else:
                r = 0
            cs, c, p = s_run(v3, as_ + (r,))
            cost += c
            if p > peak:
                peak = p
            if need2:
                r, c, p = snrn(v2, cs)
                cost += c
                if p > peak:
                    peak = p
            else:
                r = 0
            bs, c, p = t_run(v2, as_ + (r,))
            cost += c
            if p > peak:
                peak = p
            if need1:
                r, c, p = snrn(v1, bs)
                cost += c
                if p > peak:
                    peak = p
            else:
                r = 0
            v, c, p = h_fn(v1, as_ + (r,))
            return v, cost + c, peak if peak > p else p

        return snrn

    # -- tracing -----------------------------------------------------------

    def _emit(self, t, xs, kind, word=None, v1=None, v2=None, v3=None):
        key = (id(t), xs)
        if key in self._seen:
            return
        self._seen.add(key)
        d = len(xs)
        measure = sum_measure(d, xs)
        preds = tuple(sum_measure(d, v) for v in (v1, v2, v3)) if v1 is not None else ()
        self.events.append(
            TraceEvent(self._paths.get(id(t), ()), kind, xs, word, v1, v2, v3, measure, preds)
        )


def eval_term(t: Term, xs: Sequence[int] = (), as_: Sequence[int] = (),
              limits: Optional[EvalLimits] = None) -> EvalOutcome:
    """Evaluate ``t`` on normal arguments ``xs`` and safe arguments ``as_``."""
    return Evaluator(limits).eval(t, xs, as_)


def value_of(t: Term, xs: Sequence[int] = (), as_: Sequence[int] = ()) -> int:
    return eval_term(t, xs, as_).value


def trace(t: Term, xs: Sequence[int] = (), as_: Sequence[int] = (),
          limits: Optional[EvalLimits] = None) -> list[TraceEvent]:
    """Recursion events of evaluating ``t``, in the order they are first reached."""
    ev = Evaluator(limits, trace=True)
    ev.eval(t, xs, as_)
    return ev.events
