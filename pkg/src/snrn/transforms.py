"""Simultaneous nested recursion reduced to a single recursion by pairing.

Two shapes are handled.  ``theorem21`` systems recur on ``k`` positions with

    f_j(0, x; a) = h_j(x; a)
    f_j(y, x; a) = f_j(v1, x; f_1(v2, x; a), ..., f_l(v2, x; a))

(or ``f_j(v1, x; a)`` on words whose step kind is ``pass``).
``corollary23`` systems are plain simultaneous recursion on notation with
``y``-independent steps; :func:`corollary_lift` evaluates them at the numeral
``2^(2^p(|x|)) - 1`` without ever forming that numeral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .checker import check_term, validate_prec_function
from .evaluator import EvalLimits, Evaluator, run_deep
from .polynomial import Polynomial
from .stdlib import PairingKit, cascade_rules, mk_pairing
from .terms import (
    Comp,
    PrecFunction,
    Proj,
    Snrn,
    SnrnCase,
    Term,
    TermError,
    Zero,
    pattern_matches,
    pattern_regions,
    region_example,
    select_all,
)

THEOREM21 = "theorem21"
COROLLARY23 = "corollary23"
NESTED = "nested"
PASS = "pass"


@dataclass
class SimultaneousDef:
    k: int
    m: int
    l: int
    h: tuple[Term, ...]
    prec1: Optional[PrecFunction] = None
    prec2: Optional[PrecFunction] = None
    shape: str = THEOREM21
    g: tuple[Term, ...] = ()
    kinds: tuple[tuple[str, str], ...] = ()
    name: str = ""
    _kind_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.h = tuple(self.h)
        self.g = tuple(self.g)
        if not self.kinds and self.k > 0:
            self.kinds = (("_" * self.k, NESTED),)
        self.kinds = tuple((p, kd) for p, kd in self.kinds)

    def kind_for(self, word: str) -> str:
        kind = self._kind_cache.get(word)
        if kind is None:
            for pattern, kd in self.kinds:
                if pattern_matches(pattern, word):
                    kind = kd
                    break
            else:
                raise TermError(f"no step kind for word {word}")
            self._kind_cache[word] = kind
        return kind

    def problems(self) -> list[str]:
        """Reasons the definition is malformed (empty when it is fine)."""
        out = []
        if len(self.h) != self.l:
            out.append(f"expected {self.l} step functions, got {len(self.h)}")
        for i, t in enumerate(self.h, 1):
            rep = check_term(t)
            if not rep.ok or tuple(rep.signature) != (self.m, self.l):
                out.append(f"h{i}: needs signature ({self.m},{self.l}): {rep}")
        if self.g and len(self.g) != self.l:
            out.append(f"expected {self.l} seeds, got {len(self.g)}")
        for i, t in enumerate(self.g, 1):
            rep = check_term(t)
            if not rep.ok or tuple(rep.signature) != (self.m, 0):
                out.append(f"g{i}: needs signature ({self.m},0): {rep}")
        if self.shape == THEOREM21:
            if self.k < 1:
                out.append("recursion needs k >= 1")
            for n, pf in ((1, self.prec1), (2, self.prec2)):
                if pf is None or pf.width != self.k:
                    out.append(f"prec{n} must have width {self.k}")
                    continue
                rep = validate_prec_function(pf, "strict")
                out.extend(f"prec{n}: {v}" for v in rep.violations)
            for pattern, kd in self.kinds:
                if len(pattern) != self.k or kd not in (NESTED, PASS):
                    out.append(f"bad step kind {pattern}:{kd}")
            patterns = [p for p, _ in self.kinds]
            for region, idx in pattern_regions(patterns, self.k, self.k):
                if idx is None:
                    out.append(f"step kinds not total: {region_example(region, self.k)}")
        elif self.shape != COROLLARY23:
            out.append(f"unknown shape {self.shape!r}")
        return out


@dataclass(frozen=True)
class LengthPolyPair:
    """``|g_j(x)| <= 2^p_g(|x|)`` and ``|f_j(y,x;a)| <= 2^p_f(|y|,|x|) + max|a|``.

    ``components``, when given, replaces both: ``|f_j(v,x;g(x))| <= 2^b_j(|y|,|x|)``
    for every ``v`` reached from ``y``, one polynomial over ``(y, x)`` per ``j``.
    """

    p_g: Optional[Polynomial] = None
    p_f: Optional[Polynomial] = None
    components: Optional[tuple[Polynomial, ...]] = None


# --------------------------------------------------------------------------
# Reference semantics


def oracle_simultaneous_eval(d: SimultaneousDef, ys, xs, as_, limits: Optional[EvalLimits] = None):
    """All ``f_j(y, x; a)`` by direct memoized recursion on the equations."""
    if d.shape != THEOREM21:
        raise TermError("oracle_simultaneous_eval needs a theorem21 system")
    ys, xs, as_ = tuple(ys), tuple(xs), tuple(as_)
    ev = Evaluator(limits)
    memo: dict = {}
    k = d.k

    def f(y, a):
        key = (y, a)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if not any(y):
            res = tuple(ev.eval(h, xs, a).value for h in d.h)
        else:
            w = "".join("Z" if v == 0 else ("1" if v & 1 else "0") for v in y)
            v1 = select_all(d.prec1.resolve(w), y)
            if d.kind_for(w) == PASS:
                res = f(v1, a)
            else:
                v2 = select_all(d.prec2.resolve(w), y)
                res = f(v1, f(v2, a))
        memo[key] = res
        return res

    if len(ys) != k or len(xs) != d.m or len(as_) != d.l:
        raise TermError("argument counts do not match the system")
    return list(run_deep(f, ys, as_))


def oracle_iterate(g: Sequence[Term], h: Sequence[Term], count: int, xs,
                   limits: Optional[EvalLimits] = None) -> list[int]:
    """Apply ``a -> (h_1(x;a), ..., h_l(x;a))`` ``count`` times to ``g(x;)``."""
    if count < 0:
        raise ValueError("count must be >= 0")
    xs = tuple(xs)
    ev = Evaluator(limits)
    vals = tuple(ev.eval(t, xs, ()).value for t in g)
    for _ in range(count):
        vals = tuple(ev.eval(t, xs, vals).value for t in h)
    return list(vals)


# --------------------------------------------------------------------------
# Tuple coding with the pairing kits


class _Coder:
    """Nested pairing of an ``l``-tuple over normals ``pos`` of an arity-``K`` frame.

    Components are taken in ``order``; level ``i`` pairs component
    ``order[i]`` with the code of the remaining ones using the window
    ``2^windows[i]``, and the last component is stored as is.
    """

    def __init__(self, order: Sequence[int], windows: Sequence[Polynomial]):
        self.order = tuple(order)
        self.windows = tuple(w if w.chain_realizable() else w.chain_closure() for w in windows)
        self.kits: dict[int, PairingKit] = {}

    @classmethod
    def uniform(cls, p: Polynomial, l: int) -> "_Coder":
        """Every level of an ``r``-value code uses the window ``2^(p + r - 2)``."""
        return cls(range(l), [p.shifted(l - i - 2) for i in range(l - 1)])

    @classmethod
    def from_bounds(cls, bounds: Sequence[Polynomial]) -> "_Coder":
        """Per-component length exponents; large components are nested outermost."""
        probe = [b([64] * b.nvars) for b in bounds]
        order = sorted(range(len(bounds)), key=lambda j: (-probe[j], j))
        windows: list[Polynomial] = []
        rest = bounds[order[-1]]
        for j in reversed(order[:-1]):
            w = bounds[j].join(rest)
            windows.append(w)
            rest = w.shifted(1)
        return cls(order, windows[::-1])

    def kit(self, i: int) -> PairingKit:
        if i not in self.kits:
            self.kits[i] = mk_pairing(self.windows[i])
        return self.kits[i]

    def encode(self, vals: Sequence[Term], pos, K, L) -> Term:
        code = vals[self.order[-1]]
        for i in range(len(self.order) - 2, -1, -1):
            code = Comp(self.kit(i).Pi, tuple(pos), (vals[self.order[i]], code, Zero(K, L)), K, L)
        return code

    def decode_all(self, code: Term, pos, K, L) -> list[Term]:
        """Terms for every component, sharing the chain of second projections."""
        out: list[Optional[Term]] = [None] * len(self.order)
        rest = code
        for i in range(len(self.order) - 1):
            kit = self.kit(i)
            out[self.order[i]] = Comp(kit.Pi1, tuple(pos), (rest, Zero(K, L)), K, L)
            rest = Comp(kit.Pi2, tuple(pos), (rest, Zero(K, L)), K, L)
        out[self.order[-1]] = rest
        return out  # type: ignore[return-value]


def _coder(d: SimultaneousDef, polys: LengthPolyPair) -> _Coder:
    """Coder over the ``k + m`` normals ``(z, x)`` of the paired recursion."""
    n = d.k + d.m
    if polys.components is not None:
        if len(polys.components) != d.l:
            raise TermError(f"need {d.l} component bounds, got {len(polys.components)}")
        return _Coder.from_bounds([b.reindexed(n, list(range(1, n + 1))) for b in polys.components])
    if polys.p_g is None or polys.p_f is None:
        raise TermError("length polynomials p_g and p_f are required without component bounds")
    pg = polys.p_g.reindexed(n, [d.k + i for i in range(1, d.m + 1)])
    pf = polys.p_f.reindexed(n, list(range(1, n + 1)))
    return _Coder.uniform(pf.plus(pg).shifted(1), d.l)


def auto_polys(d: SimultaneousDef) -> LengthPolyPair:
    """Window polynomials from structural length certificates.

    With ``S`` the sum of the argument lengths, ``c (S+1)^(n-1) S + c``
    dominates ``c (Σ(n, .) + 1)`` for ``n`` arguments.
    """
    from .bounds import derive_length_certificate

    def dominating(c: int, n: int) -> Polynomial:
        if n == 0:
            return Polynomial(0, ((),)).scaled(c)
        s = Polynomial.length_sum(n)
        return s.shifted(1).power(n - 1).times(s).shifted(1).scaled(c)

    cg = max((derive_length_certificate(t).length_c for t in d.g), default=1)
    ch = max(derive_length_certificate(t).length_c for t in d.h) + 2
    return LengthPolyPair(dominating(cg, d.m), dominating(ch, d.k + d.m))


def _lift(t: Term, select, K, L, safe) -> Term:
    return Comp(t, tuple(select), tuple(safe), K, L)


def single_recursion(d: SimultaneousDef, polys: Union[LengthPolyPair, str] = "auto") -> Term:
    """The paired recursion ``F(y, z, x; a)`` coding ``(f_1, .., f_l)(y, x; a)``.

    ``z`` carries a copy of ``y`` so that the pairing window depends on the
    original recursion arguments and stays fixed while ``y`` descends.
    """
    probs = d.problems()
    if d.shape != THEOREM21 or probs:
        raise TermError("; ".join(probs) or "single_recursion needs a theorem21 system")
    if polys == "auto":
        polys = auto_polys(d)
    k, m, l = d.k, d.m, d.l
    n = k + m
    coder = _coder(d, polys)
    # base over (z, x); step terms over (y, z, x) with safe (a, r)
    base_pos = range(1, n + 1)
    A = [Proj(n, l, n + i) for i in range(1, l + 1)]
    hs = [_lift(h, range(k + 1, n + 1), n, l, A) for h in d.h]
    base = coder.encode(hs, base_pos, n, l)
    K, L = k + n, l + 1
    step_pos = range(k + 1, K + 1)
    a = [Proj(K, L, K + i) for i in range(1, l + 1)]
    r = Proj(K, L, K + L)
    nested = SnrnCase(r, tuple(coder.decode_all(r, step_pos, K, L)), tuple(a))
    passing = SnrnCase(r, tuple(a), tuple(a))
    cases = tuple((p, nested if kd == NESTED else passing) for p, kd in d.kinds)
    return Snrn(k, n, base, cases, (d.prec1, d.prec2, d.prec2))


def simultaneous_to_single(d: SimultaneousDef, polys: Union[LengthPolyPair, str] = "auto",
                           g: Optional[Sequence[Term]] = None) -> list[Term]:
    """Terms ``f_j(y, x; g(x;))`` of signature ``(k+m, 0)``, one per ``j``."""
    g = tuple(g) if g is not None else d.g
    if polys == "auto":
        polys = auto_polys(d)
    if len(g) != d.l:
        raise TermError(f"need {d.l} seed terms g_j")
    fhat = single_recursion(d, polys)
    k, m, l = d.k, d.m, d.l
    n = k + m
    seeds = [_lift(t, range(k + 1, n + 1), n, 0, ()) for t in g]
    coded = Comp(fhat, tuple(range(1, k + 1)) + tuple(range(1, n + 1)), tuple(seeds), n, 0)
    if l == 1:
        return [coded]
    return _coder(d, polys).decode_all(coded, range(1, n + 1), n, 0)


# --------------------------------------------------------------------------
# Large-numeral substitution


def _iterated_steps(h: Sequence[Term], m: int, l: int, c: int) -> list[Term]:
    """The step map composed with itself ``2^c`` times (shared subterms)."""
    cur = list(h)
    for _ in range(c):
        A = [Proj(m, l, m + i) for i in range(1, l + 1)]
        inner = [_lift(t, range(1, m + 1), m, l, A) for t in cur]
        cur = [_lift(t, range(1, m + 1), m, l, inner) for t in cur]
    return cur


def lifted_system(d: SimultaneousDef, p: Polynomial) -> tuple[SimultaneousDef, tuple[int, ...]]:
    """The doubling system over the slots of ``p`` and the slot-to-variable map.

    ``F_j(slots, x; g(x;))`` is ``f_j(2^(2^p) - 1, x;)`` where ``p`` is read
    off the slot lengths.
    """
    if d.shape != COROLLARY23:
        raise TermError("corollary_lift needs a corollary23 system")
    if p.nvars != d.m:
        raise TermError(f"polynomial over {p.nvars} variables, system has m={d.m}")
    lay = p.layout()
    steps = _iterated_steps(d.h, d.m, d.l, lay.constant)
    if lay.k == 0:
        return SimultaneousDef(0, d.m, d.l, tuple(steps), shape=COROLLARY23, g=d.g), ()
    rules = cascade_rules(lay)
    pf = PrecFunction(lay.k, tuple((pat, sel) for pat, _, sel in rules))
    kinds = tuple((pat, NESTED if kd == "double" else PASS) for pat, kd, _ in rules)
    F = SimultaneousDef(lay.k, d.m, d.l, tuple(steps), pf, pf, THEOREM21, d.g, kinds,
                        name=f"{d.name}@{p}")
    return F, lay.slot_vars


def corollary_lift(d: SimultaneousDef, p: Polynomial,
                   polys: Union[LengthPolyPair, str] = "auto") -> list[Term]:
    """Terms of signature ``(m, 0)`` computing ``f_j(2^(2^p(|x|)) - 1, x;)``.

    ``polys`` bounds the lifted system, whose recursion arguments are the
    slots of ``p`` followed by ``x``.
    """
    F, slot_vars = lifted_system(d, p)
    m = d.m
    if F.k == 0:
        seeds = list(d.g)
        return [_lift(t, range(1, m + 1), m, 0, seeds) for t in F.h]
    terms = simultaneous_to_single(F, polys)
    select = tuple(slot_vars) + tuple(range(1, m + 1))
    return [Comp(t, select, (), m, 0) for t in terms]
