"""Well-formedness of terms: arities, the normal/safe discipline and ≺-tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .terms import (
    RELAXED,
    STRICT,
    Comp,
    Cond,
    PrecFunction,
    Pred,
    Proj,
    Signature,
    Snrn,
    Srn,
    Succ,
    Term,
    TermError,
    Zero,
    pattern_regions,
    region_example,
)


@dataclass(frozen=True)
class Violation:
    path: tuple[int, ...]
    kind: str
    detail: str = ""

    def __str__(self) -> str:
        where = "/".join(map(str, self.path)) or "<root>"
        return f"{where}: {self.kind}" + (f" [{self.detail}]" if self.detail else "")


@dataclass
class CheckReport:
    ok: bool
    signature: Optional[Signature] = None
    violations: list[Violation] = field(default_factory=list)

    def __str__(self) -> str:
        if self.ok:
            return f"ok {self.signature}" if self.signature else "ok"
        return "\n".join(str(v) for v in self.violations)


# --------------------------------------------------------------------------
# ≺-function validation


def _region_failures(
    region: list[str], sel: Sequence[int], width: int, k: int, lax: bool
) -> list[tuple[str, str]]:
    """Words of ``region`` on which ``sel`` is not a legal predecessor choice."""
    for i in range(width):
        pos = i + 1
        j = sel[i]
        if j == pos:
            continue
        if j != width + pos:
            return [("".join(region), f"position {pos}: index {j} is neither identity nor pivot")]
        c = region[i]
        if c == "_":
            out = []
            for sub in ("Z", "N"):
                r = list(region)
                r[i] = sub
                if all(x == "Z" for x in r[:k]):
                    continue
                out.extend(_region_failures(r, sel, width, k, lax))
            return out
        if c == "Z":
            if lax:
                continue
            return [("".join(region), f"position {pos} halves a zero component")]
        if pos > k:
            return [("".join(region), f"pivot {pos} is not a recursion position")]
        for i2 in range(i + 1, k):
            j2 = sel[i2]
            if not (j2 <= k or width < j2 <= width + k):
                return [("".join(region), f"recursion position {i2 + 1} drawn from parameter index {j2}")]
        return []
    return [("".join(region), "no component strictly decreases")]


def validate_prec_function(
    pf: PrecFunction, mode: str = "strict", k: Optional[int] = None
) -> CheckReport:
    """Check that ``pf`` picks a ≺-predecessor on every word of its domain.

    ``mode`` is ``"strict"`` (the syntactic pivot shape) or ``"lax"``, which
    also accepts halving a zero component before the pivot.  ``k`` is the
    number of recursion positions when ``pf`` acts on ``k`` recursion
    arguments followed by parameters; the pivot must then lie in the first
    ``k`` positions and the rest of those positions must be drawn from them.
    """
    if mode not in ("strict", "lax"):
        raise TermError(f"unknown validation mode {mode!r}")
    width = pf.width
    k = width if k is None else k
    violations = []
    patterns = [p for p, _ in pf.rules]
    for region, idx in pattern_regions(patterns, width, k):
        if idx is None:
            violations.append(
                Violation((), "prec table not total", region_example(region, k))
            )
            continue
        for bad, why in _region_failures(list(region), pf.rules[idx][1], width, k, mode == "lax"):
            violations.append(Violation((), "not a predecessor choice", f"{bad}: {why}"))
    return CheckReport(not violations, None, violations)


def _is_prec(v: Sequence[int], y: Sequence[int]) -> bool:
    pool = set(y) | {a >> 1 for a in y}
    for n in range(len(y)):
        if y[n] != 0 and v[n] == y[n] >> 1 and all(
            v[i] in pool for i in range(n + 1, len(y))
        ):
            return True
        if v[n] != y[n]:
            return False
    return False


def is_pred(vu: Sequence[int], yx: Sequence[int], k: int) -> bool:
    """``(v, u) ≺ (y, x)`` as whole tuples and ``v ≺ y`` on the first ``k``."""
    if len(vu) != len(yx):
        raise TermError(f"tuple lengths differ: {len(vu)} vs {len(yx)}")
    if not 1 <= k <= len(yx):
        raise TermError(f"recursion count {k} outside 1..{len(yx)}")
    return _is_prec(vu, yx) and _is_prec(vu[:k], yx[:k])


# --------------------------------------------------------------------------
# Terms


class _Checker:
    def __init__(self, lax: bool):
        self.lax = lax
        self.violations: list[Violation] = []
        self.done: dict[int, Optional[Signature]] = {}

    def fail(self, path, kind, detail=""):
        self.violations.append(Violation(tuple(path), kind, detail))
        return None

    def check(self, t, path) -> Optional[Signature]:
        key = id(t)
        if key in self.done:
            return self.done[key]
        sig = self._check(t, path)
        self.done[key] = sig
        return sig

    def _check(self, t, path) -> Optional[Signature]:
        if not isinstance(t, Term):
            return self.fail(path, "not a term", repr(t))
        if isinstance(t, Zero):
            if t.k < 0 or t.l < 0:
                return self.fail(path, "negative arity")
            return Signature(t.k, t.l)
        if isinstance(t, Proj):
            if t.k < 0 or t.l < 0 or not 1 <= t.j <= t.k + t.l:
                return self.fail(path, "projection index out of range", f"{t.j} of {t.k}+{t.l}")
            return Signature(t.k, t.l)
        if isinstance(t, Succ):
            if t.bit not in (0, 1):
                return self.fail(path, "successor bit must be 0 or 1")
            return Signature(0, 1)
        if isinstance(t, Pred):
            return Signature(0, 1)
        if isinstance(t, Cond):
            return Signature(0, 3)
        if isinstance(t, Comp):
            return self._comp(t, path)
        if isinstance(t, Srn):
            return self._srn(t, path)
        if isinstance(t, Snrn):
            return self._snrn(t, path)
        return self.fail(path, "unknown node", type(t).__name__)

    def _comp(self, t: Comp, path):
        gs = self.check(t.g, path + [0])
        hs = [self.check(h, path + [i + 1]) for i, h in enumerate(t.safe)]
        if gs is None or any(h is None for h in hs):
            return None
        for ix in t.select:
            if not isinstance(ix, int):
                return self.fail(path, "normal position fed from safe computation", repr(ix))
        try:
            outer = t.outer()
        except (TermError, AttributeError) as e:
            return self.fail(path, "cannot determine signature", str(e))
        ok = True
        if len(t.select) != gs.k:
            self.fail(path, "normal arity mismatch", f"g takes {gs.k}, selected {len(t.select)}")
            ok = False
        if len(t.safe) != gs.l:
            self.fail(path, "safe arity mismatch", f"g takes {gs.l}, given {len(t.safe)}")
            ok = False
        for ix in t.select:
            if not 1 <= ix <= outer.k:
                self.fail(path, "normal selection out of range", f"{ix} of {outer.k}")
                ok = False
        for i, h in enumerate(hs):
            if h != outer:
                self.fail(path + [i + 1], "safe argument signature mismatch", f"{h} vs {outer}")
                ok = False
        return outer if ok else None

    def _srn(self, t: Srn, path):
        gs = self.check(t.g, path + [0])
        h0 = self.check(t.h0, path + [1])
        h1 = self.check(t.h1, path + [2])
        if gs is None or h0 is None or h1 is None:
            return None
        want = Signature(gs.k + 1, gs.l + 1)
        ok = True
        for i, h in ((1, h0), (2, h1)):
            if h != want:
                self.fail(path + [i], "step signature mismatch", f"{h} vs {want}")
                ok = False
        return Signature(gs.k + 1, gs.l) if ok else None

    def _snrn(self, t: Snrn, path):
        if t.k < 1:
            return self.fail(path, "recursion needs at least one position", f"k={t.k}")
        if t.m < 0:
            return self.fail(path, "negative parameter count")
        if t.mode not in (STRICT, RELAXED):
            return self.fail(path, "unknown mode", t.mode)
        gs = self.check(t.g, path + [0])
        if gs is None:
            return None
        ok = True
        if gs.k != t.m:
            self.fail(path + [0], "base signature mismatch", f"{gs} vs ({t.m},{gs.l})")
            ok = False
        l = gs.l
        width = t.word_length
        if len(t.precs) != 3:
            return self.fail(path, "expected three prec tables")
        for n, pf in enumerate(t.precs, 1):
            if not isinstance(pf, PrecFunction) or pf.width != width:
                self.fail(path, f"prec{n} has wrong width", f"want {width}")
                ok = False
                continue
            rep = validate_prec_function(pf, "lax" if self.lax else "strict", t.k)
            for v in rep.violations:
                self.fail(path, f"prec{n}: {v.kind}", v.detail)
                ok = False
        patterns = []
        for p, _ in t.cases:
            if len(p) != width or any(c not in "01Z_" for c in p):
                self.fail(path, "bad case pattern", p)
                ok = False
            patterns.append(p)
        if not ok:
            return None
        for region, idx in pattern_regions(patterns, width, t.k):
            if idx is None:
                self.fail(path, "case table not total", region_example(region, t.k))
                ok = False
        want = Signature(t.k + t.m, l + 1)
        child = 1
        for ci, (pattern, case) in enumerate(t.cases):
            if len(case.t) != l or len(case.s) != l:
                self.fail(path, "case needs l t- and s-components", f"{pattern}: l={l}")
                ok = False
            for term in case.terms():
                s = self.check(term, path + [child])
                if s is None:
                    ok = False
                elif s != want:
                    self.fail(path + [child], "step signature mismatch", f"{pattern}: {s} vs {want}")
                    ok = False
                child += 1
        return Signature(t.k + t.m, l) if ok else None


def check_term(t: Term, lax: bool = False) -> CheckReport:
    """Decide whether ``t`` is a well-formed term; never raises on bad trees."""
    c = _Checker(lax)
    try:
        sig = c.check(t, [])
    except RecursionError:
        c.fail([], "term too deep to check")
        sig = None
    ok = sig is not None and not c.violations
    return CheckReport(ok, sig if ok else None, c.violations)
