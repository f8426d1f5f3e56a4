"""Builders for the concrete functions: exponential towers, pairing, concatenation.

All builders share one construction.  A chain-realizable polynomial ``p`` is
laid out as recursion slots (see :class:`SlotLayout`); a single nested
recursion then walks the slots so that the value ``p`` of the slot lengths
drops by one exactly at the "doubling" words and is unchanged elsewhere.
A *family* supplies the base function (for ``p = 0``) and the doubling step;
constants in ``p`` are absorbed by unrolling the doubling step in the base.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .polynomial import Polynomial, SlotLayout
from .terms import (
    Comp,
    Cond,
    Pred,
    PrecFunction,
    Proj,
    Snrn,
    SnrnCase,
    Srn,
    Succ,
    Term,
    Zero,
    mentions,
)

S0 = Succ(0)
S1 = Succ(1)
P = Pred()
C = Cond()

P0 = Polynomial(1, ((1,),))
P1 = Polynomial(3, ((1, 2), (3,)))
P2 = Polynomial(6, ((1, 2, 3), (4, 5), (6,)))


def app(f: Term, k: int, l: int, *safe: Term, select=None) -> Term:
    """``f(x_1..x_k; safe...)`` as a composition of signature ``(k, l)``."""
    if select is None:
        select = tuple(range(1, f.sig.k + 1))
    return Comp(f, tuple(select), tuple(safe), k, l)


def succs(bits: str, k: int, l: int, arg: Term) -> Term:
    """Append ``bits`` (left to right) to the value of ``arg``."""
    t = arg
    for b in bits:
        t = app(S1 if b == "1" else S0, k, l, t, select=())
    return t


# --------------------------------------------------------------------------
# Levels: a family member realized at a fixed normal arity


class Level:
    """Terms of every family at one normal arity ``k``.

    At the base (``k == 0``) they compute the family for the constant part of
    ``p``; at slot level they are recursions over the slots.
    """

    def __init__(self, k: int):
        self.k = k
        self.terms: dict[str, Term] = {}

    def __getitem__(self, name: str) -> Term:
        return self.terms[name]

    def call(self, name: str, L: int, *safe: Term) -> Term:
        return app(self.terms[name], self.k, L, *safe)

    def derive(self) -> None:
        """Compositional members: L, M2, R2, L2 from M and R."""
        k = self.k
        t = self.terms
        if "M" in t and "M2" not in t:
            a = Proj(k, 1, k + 1)
            t["M2"] = app(t["M"], k, 1, app(t["M"], k, 1, a))
        if "R" in t and "L" not in t:
            a = Proj(k, 1, k + 1)
            z = Zero(k, 1)
            t["L"] = app(t["R"], k, 1, app(t["R"], k, 1, a, z), z)
        if "R" in t and "M" in t and "R2" not in t:
            a, c = Proj(k, 2, k + 1), Proj(k, 2, k + 2)
            t["R2"] = app(t["R"], k, 2, app(t["M"], k, 2, a), app(t["R"], k, 2, a, c))
        if "R2" in t and "L2" not in t:
            a = Proj(k, 1, k + 1)
            z = Zero(k, 1)
            t["L2"] = app(t["R2"], k, 1, app(t["R2"], k, 1, a, z), z)


def _safe(k: int, L: int) -> tuple[list[Term], Term]:
    """Step-term projections: the ``L - 1`` safe arguments and the recursive value."""
    return [Proj(k, L, k + i) for i in range(1, L)], Proj(k, L, k + L)


# Doubling steps.  Each receives the aux level (same arity as the step) and
# returns the case used where ``p`` of the slot lengths drops by one.


def _double_tower(aux: Level, k: int) -> SnrnCase:
    (a,), r = _safe(k, 2)
    return SnrnCase(r, (r,), (a,))


def _double_R(aux: Level, k: int) -> SnrnCase:
    (a, c), r = _safe(k, 3)
    return SnrnCase(r, (aux.call("M", 3, a), r), (a, c))


def _double_Pi(aux: Level, k: int) -> SnrnCase:
    (a, b, c), r = _safe(k, 4)
    return SnrnCase(
        r,
        (aux.call("M", 4, a), aux.call("M", 4, b), r),
        (aux.call("L", 4, a), aux.call("L", 4, b), c),
    )


def _double_Pij(aux: Level, k: int) -> SnrnCase:
    (a, c), r = _safe(k, 3)
    return SnrnCase(r, (aux.call("M2", 3, a), r), (aux.call("L2", 3, a), c))


def _bases() -> dict[str, Term]:
    """Family members for ``p = 0`` (window of one bit, two for Pi1/Pi2)."""
    a1, c2 = Proj(0, 2, 1), Proj(0, 2, 2)
    a3, b3, c3 = Proj(0, 3, 1), Proj(0, 3, 2), Proj(0, 3, 3)

    def bit(L, sel, c, one, zero):
        return app(C, 0, L, sel, succs(zero, 0, L, c), succs(one, 0, L, c), select=())

    pi = app(
        C, 0, 3, a3,
        bit(3, b3, c3, "01", "00"),
        bit(3, b3, c3, "11", "10"),
        select=(),
    )
    return {
        "tower": S0,
        "A1": S1,
        "M": P,
        "R": bit(2, a1, c2, "1", "0"),
        "Pi": pi,
        "Pi1": bit(2, app(P, 0, 2, a1, select=()), c2, "1", "0"),
        "Pi2": bit(2, a1, c2, "1", "0"),
    }


_FAMILIES: dict[str, tuple[int, Callable[[Level, int], SnrnCase]]] = {
    "tower": (1, _double_tower),
    "A1": (1, _double_tower),
    "M": (1, _double_tower),
    "R": (2, _double_R),
    "Pi": (3, _double_Pi),
    "Pi1": (2, _double_Pij),
    "Pi2": (2, _double_Pij),
}
_ORDER = ("tower", "A1", "M", "R", "Pi", "Pi1", "Pi2")


def _unroll(f: Term, case: SnrnCase, l: int) -> Term:
    """One doubling step at arity 0 with ``f`` standing for the recursive call."""
    A = [Proj(0, l, i) for i in range(1, l + 1)]
    if any(mentions(s, l + 1) for s in case.s):
        fa = app(f, 0, l, *A)
    else:
        fa = Zero(0, l)
    cs = [app(s, 0, l, *A, fa) for s in case.s]
    fc = app(f, 0, l, *cs)
    bs = [app(t, 0, l, *A, fc) for t in case.t]
    fb = app(f, 0, l, *bs)
    return app(case.h, 0, l, *A, fb)


def _pass_case(k: int, l: int) -> SnrnCase:
    A, r = _safe(k, l + 1)
    return SnrnCase(r, tuple(A), tuple(A))


def cascade_rules(layout: SlotLayout) -> list[tuple[str, str, tuple[int, ...]]]:
    """``(pattern, kind, indices)`` per rightmost nonzero slot, in match order.

    ``kind`` is ``double`` (a linear slot), ``refill`` (last slot of a
    monomial of degree >= 2; the next monomial is refilled from the others)
    or ``drain`` (any other slot, whose monomial is already zero).
    """
    k = layout.k
    out = []
    for r in range(k):
        pattern = "_" * (r + 1) + "Z" * (k - r - 1)
        sel = list(range(1, k + 1))
        sel[r] = k + r + 1
        gi = layout.group_of(r)
        g = layout.groups[gi]
        if len(g) == 1:
            kind = "double"
        elif r == g[-1]:
            kind = "refill"
            for q, src in zip(layout.groups[gi + 1], g[:-1]):
                sel[q] = src + 1
        else:
            kind = "drain"
        out.append((pattern, kind, tuple(sel)))
    return out


def _cascade(layout: SlotLayout, base: Term, double: SnrnCase, l: int) -> Term:
    k = layout.k
    rules = cascade_rules(layout)
    pf = PrecFunction(k, tuple((p, sel) for p, _, sel in rules))
    passing = _pass_case(k, l)
    cases = tuple((p, double if kind == "double" else passing) for p, kind, _ in rules)
    return Snrn(k, 0, base, cases, (pf, pf, pf))


class Cascade:
    """All families over the slot layout of one polynomial."""

    def __init__(self, p: Polynomial):
        self.poly = p
        self.layout = p.layout()
        self.base = self._base_level(self.layout.constant)
        self.slots = self._slot_level()

    @staticmethod
    def _base_level(c: int) -> Level:
        lv = Level(0)
        lv.terms.update(_bases())
        lv.derive()
        for _ in range(c):
            nxt = Level(0)
            for name in _ORDER:
                l, dbl = _FAMILIES[name]
                nxt.terms[name] = _unroll(lv[name], dbl(lv, 0), l)
            nxt.derive()
            lv = nxt
        return lv

    def _slot_level(self) -> Level:
        k = self.layout.k
        if k == 0:
            return self.base
        lv = Level(k)
        for name in _ORDER:
            l, dbl = _FAMILIES[name]
            lv.terms[name] = _cascade(self.layout, self.base[name], dbl(lv, k), l)
            lv.derive()
        return lv

    def over_vars(self, name: str) -> Term:
        """The family member as a function of the polynomial's variables."""
        t = self.slots[name]
        l = t.sig.l
        n = self.poly.nvars
        safe = [Proj(n, l, n + i) for i in range(1, l + 1)]
        return Comp(t, tuple(self.layout.slot_vars), tuple(safe), n, l)


_CASCADES: dict[Polynomial, Cascade] = {}


def cascade_for(p: Polynomial) -> Cascade:
    c = _CASCADES.get(p)
    if c is None:
        c = _CASCADES[p] = Cascade(p)
    return c


# --------------------------------------------------------------------------
# Public builders


def mk_exp_tower(p: Polynomial) -> Term:
    """``f(x; a) = 2^(2^p(|x|)) * a``; with no slots this is the base alone."""
    cas = cascade_for(p)
    if p.nvars == 0:
        return cas.base["tower"]
    if list(cas.layout.slot_vars) == list(range(1, p.nvars + 1)):
        return cas.slots["tower"]
    return cas.over_vars("tower")


def f0() -> Term:
    return mk_exp_tower(P0)


def f1() -> Term:
    return mk_exp_tower(P1)


def f2() -> Term:
    return mk_exp_tower(P2)


@dataclass
class PairingKit:
    """Pairing and its parts over the variables of ``poly``.

    With ``W = 2^p(|x|)``: ``M(x;a) = a >> W``, ``L(x;a) = a mod 2^W``,
    ``R(x;a,c)`` appends the low ``W`` bits of ``a`` reversed to ``c``,
    ``Pi(x;a,b,c)`` appends the interleaving ``a_0 b_0 .. a_{W-1} b_{W-1}``
    (``a_0`` leftmost) to ``c``, and ``Pi1``/``Pi2`` recover the ``a`` and
    ``b`` bits of a ``2W``-bit interleaving, appended to ``c``.
    """

    poly: Polynomial
    M: Term
    L: Term
    R: Term
    Pi: Term
    Pi1: Term
    Pi2: Term
    M2: Term
    L2: Term


def mk_pairing(p: Polynomial) -> PairingKit:
    cas = cascade_for(p)
    if p.nvars == 0:
        g = cas.base.terms.get
    else:
        g = cas.over_vars
    return PairingKit(p, g("M"), g("L"), g("R"), g("Pi"), g("Pi1"), g("Pi2"), g("M2"), g("L2"))


def mk_bellantoni_pair() -> tuple[Term, Term]:
    """``(pi, m)``: bit interleaving over ``|y|`` bits and ``m(y;b) = b >> |y|``."""
    m = Srn(Proj(0, 1, 1), app(P, 1, 2, Proj(1, 2, 3), select=()), app(P, 1, 2, Proj(1, 2, 3), select=()))
    r = Proj(1, 3, 4)
    ma = app(m, 1, 3, Proj(1, 3, 2))
    mb = app(m, 1, 3, Proj(1, 3, 3))

    def pick(bits0, bits1):
        return app(C, 1, 3, mb, succs(bits0, 1, 3, r), succs(bits1, 1, 3, r), select=())

    h = app(C, 1, 3, ma, pick("00", "01"), pick("10", "11"), select=())
    pi = Srn(Zero(0, 2), h, h)
    return pi, m


def mk_concat(n: int) -> tuple[Term, Term]:
    """``(oplus, oplus_n)``: two-bit coding of a binary string and its n-fold chain."""
    if n < 1:
        raise ValueError("concatenation needs n >= 1")
    r = Proj(1, 2, 3)
    g = succs("00", 0, 1, Proj(0, 1, 1))
    oplus = Srn(g, succs("10", 1, 2, r), succs("11", 1, 2, r))
    chain: Term = Zero(n, 0)
    for i in range(1, n + 1):
        chain = Comp(oplus, (i,), (chain,), n, 0)
    return oplus, chain


def mk_unary_add() -> Term:
    """``A1(y; a)``: ``2^|y|`` applications of ``S1`` to ``a``."""
    lay = SlotLayout(((0,),), (1,), 0, 1)
    (a,), rv = _safe(1, 2)
    return _cascade(lay, S1, SnrnCase(rv, (rv,), (a,)), 1)


def parse_poly_name(text: str) -> Polynomial:
    """``p0``/``p1``/``p2`` or an infix polynomial."""
    named = {"p0": P0, "p1": P1, "p2": P2}
    return named.get(text) or Polynomial.parse(text)


def lookup(name: str) -> Term:
    """Stdlib term by name: f0 f1 f2 pi m oplus A1 or ``FAMILY@poly``."""
    if name.startswith("tower@"):
        return mk_exp_tower(parse_poly_name(name[len("tower@"):]))
    if "@" in name:
        fam, poly = name.split("@", 1)
        if fam not in ("M", "L", "R", "Pi", "Pi1", "Pi2", "M2", "L2"):
            raise KeyError(f"unknown pairing member {fam!r}")
        return getattr(mk_pairing(parse_poly_name(poly)), fam)
    fixed: dict[str, Callable[[], Term]] = {
        "f0": f0,
        "f1": f1,
        "f2": f2,
        "pi": lambda: mk_bellantoni_pair()[0],
        "m": lambda: mk_bellantoni_pair()[1],
        "oplus": lambda: mk_concat(1)[0],
        "A1": mk_unary_add,
    }
    if name not in fixed:
        raise KeyError(f"unknown stdlib term {name!r}")
    return fixed[name]()


STDLIB_NAMES = ("f0", "f1", "f2", "pi", "m", "oplus", "A1",
                "M@p0", "R@p0", "L@p0", "Pi@p0", "Pi1@p0", "Pi2@p0")
