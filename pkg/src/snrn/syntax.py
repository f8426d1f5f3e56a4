"""Parenthesized prefix syntax for terms and term documents.

::

    (zero K L) (proj K L J) (succ B) (pred) (cond)
    (comp G :select (I ...) :safe (H ...) [:sig (K L)])
    (srn G H0 H1)
    (snrn :k K :m M [:mode strict|relaxed] :g G
          :prec1 PF :prec2 PF :prec3 PF
          :cases (("PATTERN" :h H :t (T ...) :s (S ...)) ...))
    (prec WIDTH ("PATTERN" (J ...)) ...)

A document is a sequence of ``(def NAME TERM)`` forms; a bare symbol refers
to an earlier definition or a standard-library name.  Numerals are decimal
or ``0b`` binary, and ``;`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .terms import (
    RELAXED,
    STRICT,
    Comp,
    Cond,
    PrecFunction,
    Pred,
    Proj,
    Snrn,
    SnrnCase,
    Srn,
    Succ,
    Term,
    TermError,
    Zero,
)


class ParseError(TermError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


# --------------------------------------------------------------------------
# Reading


@dataclass
class Sym:
    name: str
    line: int
    col: int


@dataclass
class Str:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r'\s+|;[^\n]*|\(|\)|"[^"\n]*"|[^\s()";]+')


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        tok = m.group()
        if not tok.isspace() and not tok.startswith(";"):
            yield tok, line, pos - start + 1
        nl = tok.count("\n")
        if nl:
            line += nl
            start = pos + tok.rindex("\n") + 1
        pos = m.end()


def read_all(text: str) -> list:
    """S-expressions of ``text`` as nested ``SList``/``Sym``/``Str``/``int``."""
    stack: list[SList] = [SList([], 1, 1)]
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append(SList([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif tok.startswith('"'):
            stack[-1].items.append(Str(tok[1:-1], line, col))
        elif re.fullmatch(r"\d+|0b[01]+", tok):
            stack[-1].items.append(int(tok, 0))
        else:
            stack[-1].items.append(Sym(tok, line, col))
    if len(stack) != 1:
        top = stack[-1]
        raise ParseError("missing ')'", top.line, top.col)
    return stack[0].items


# --------------------------------------------------------------------------
# Building terms


_FORMS = {"zero", "proj", "succ", "pred", "cond", "comp", "srn", "snrn"}


def _where(x) -> tuple[int, int]:
    return (getattr(x, "line", 0), getattr(x, "col", 0))


def _fail(x, msg: str):
    raise ParseError(msg, *_where(x))


class _Builder:
    def __init__(self, resolve: Callable[[str], Optional[Term]]):
        self.resolve = resolve

    def term(self, x) -> Term:
        if isinstance(x, Sym):
            t = self.resolve(x.name)
            if t is None:
                _fail(x, f"unknown name {x.name!r}")
            return t
        if not isinstance(x, SList) or not x.items or not isinstance(x.items[0], Sym):
            _fail(x, "expected a term")
        head, args = x.items[0].name, x.items[1:]
        fn = getattr(self, "_" + head, None) if head in _FORMS else None
        if fn is None:
            _fail(x, f"unknown form {head!r}")
        try:
            return fn(x, args)
        except ParseError:
            raise
        except (TermError, TypeError, ValueError) as e:
            _fail(x, str(e))

    @staticmethod
    def ints(x, args, n):
        if len(args) != n or not all(isinstance(a, int) for a in args):
            _fail(x, f"expected {n} numerals")
        return args

    @staticmethod
    def keywords(x, args) -> dict:
        out = {}
        if len(args) % 2:
            _fail(x, "keyword without value")
        for key, val in zip(args[::2], args[1::2]):
            if not isinstance(key, Sym) or not key.name.startswith(":"):
                _fail(key, "expected a :keyword")
            if key.name in out:
                _fail(key, f"duplicate {key.name}")
            out[key.name] = val
        return out

    @staticmethod
    def int_list(x) -> tuple[int, ...]:
        if not isinstance(x, SList) or not all(isinstance(i, int) for i in x.items):
            _fail(x, "expected a list of numerals")
        return tuple(x.items)

    def term_list(self, x) -> tuple[Term, ...]:
        if not isinstance(x, SList):
            _fail(x, "expected a list of terms")
        return tuple(self.term(i) for i in x.items)

    def _zero(self, x, args):
        return Zero(*self.ints(x, args, 2))

    def _proj(self, x, args):
        return Proj(*self.ints(x, args, 3))

    def _succ(self, x, args):
        return Succ(*self.ints(x, args, 1))

    def _pred(self, x, args):
        self.ints(x, args, 0)
        return Pred()

    def _cond(self, x, args):
        self.ints(x, args, 0)
        return Cond()

    def _comp(self, x, args):
        if not args:
            _fail(x, "comp needs a head term")
        g = self.term(args[0])
        kw = self.keywords(x, args[1:])
        extra = set(kw) - {":select", ":safe", ":sig"}
        if extra:
            _fail(x, f"unknown keywords {sorted(extra)}")
        select = self.int_list(kw[":select"]) if ":select" in kw else ()
        safe = self.term_list(kw[":safe"]) if ":safe" in kw else ()
        k = l = None
        if ":sig" in kw:
            k, l = self.int_list(kw[":sig"])
        return Comp(g, select, safe, k, l)

    def _srn(self, x, args):
        if len(args) != 3:
            _fail(x, "srn needs three terms")
        return Srn(*(self.term(a) for a in args))

    def _prec(self, x, args):
        if not args or not isinstance(args[0], int):
            _fail(x, "prec needs a width")
        rules = []
        for r in args[1:]:
            if not (isinstance(r, SList) and len(r.items) == 2 and isinstance(r.items[0], Str)):
                _fail(r, 'expected ("PATTERN" (J ...))')
            rules.append((r.items[0].text, self.int_list(r.items[1])))
        return PrecFunction(args[0], tuple(rules))

    def prec_value(self, x) -> PrecFunction:
        if isinstance(x, SList) and x.items and isinstance(x.items[0], Sym) and x.items[0].name == "prec":
            try:
                return self._prec(x, x.items[1:])
            except ParseError:
                raise
            except (TermError, TypeError, ValueError) as e:
                _fail(x, str(e))
        _fail(x, "expected (prec ...)")

    def _snrn(self, x, args):
        kw = self.keywords(x, args)
        need = {":k", ":m", ":g", ":prec1", ":prec2", ":prec3", ":cases"}
        missing = need - set(kw)
        if missing:
            _fail(x, f"missing {sorted(missing)}")
        extra = set(kw) - need - {":mode"}
        if extra:
            _fail(x, f"unknown keywords {sorted(extra)}")
        mode = kw.get(":mode")
        mode = STRICT if mode is None else getattr(mode, "name", None)
        if mode not in (STRICT, RELAXED):
            _fail(x, "mode must be strict or relaxed")
        cases = []
        if not isinstance(kw[":cases"], SList):
            _fail(x, ":cases needs a list")
        for c in kw[":cases"].items:
            if not (isinstance(c, SList) and c.items and isinstance(c.items[0], Str)):
                _fail(c, 'expected ("PATTERN" :h H :t (..) :s (..))')
            ckw = self.keywords(c, c.items[1:])
            if set(ckw) != {":h", ":t", ":s"}:
                _fail(c, "a case needs exactly :h :t :s")
            case = SnrnCase(self.term(ckw[":h"]), self.term_list(ckw[":t"]), self.term_list(ckw[":s"]))
            cases.append((c.items[0].text, case))
        precs = tuple(self.prec_value(kw[f":prec{i}"]) for i in (1, 2, 3))
        return Snrn(kw[":k"], kw[":m"], self.term(kw[":g"]), tuple(cases), precs, mode)


def _stdlib_resolver(name: str) -> Optional[Term]:
    from .stdlib import lookup

    try:
        return lookup(name)
    except (KeyError, ValueError):
        return None


def parse_term(text: str, env: Optional[dict[str, Term]] = None) -> Term:
    """One term; bare names resolve in ``env`` and then the standard library."""
    env = env or {}
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected one term, found {len(forms)} forms")
    return _Builder(lambda n: env.get(n) or _stdlib_resolver(n)).term(forms[0])


@dataclass
class TermDocument:
    """Named definitions in order, with the position of each ``def``."""

    defs: dict[str, Term] = field(default_factory=dict)
    positions: dict[str, tuple[int, int]] = field(default_factory=dict)

    def public(self) -> dict[str, Term]:
        return {k: v for k, v in self.defs.items() if not k.startswith("_")}


def parse_document(text: str) -> TermDocument:
    doc = TermDocument()
    b = _Builder(lambda n: doc.defs.get(n) or _stdlib_resolver(n))
    for form in read_all(text):
        if not (isinstance(form, SList) and len(form.items) == 3
                and isinstance(form.items[0], Sym) and form.items[0].name == "def"
                and isinstance(form.items[1], Sym)):
            _fail(form, "expected (def NAME TERM)")
        name = form.items[1].name
        if name in doc.defs:
            _fail(form.items[1], f"duplicate definition {name!r}")
        doc.defs[name] = b.term(form.items[2])
        doc.positions[name] = _where(form)
    return doc


# --------------------------------------------------------------------------
# Printing


def _prec_text(pf: PrecFunction) -> str:
    rules = " ".join(f'("{p}" ({" ".join(map(str, ix))}))' for p, ix in pf.rules)
    return f"(prec {pf.width}" + (f" {rules})" if rules else ")")


def _children(t: Term) -> list[Term]:
    if isinstance(t, Comp):
        return [t.g, *t.safe]
    if isinstance(t, Srn):
        return [t.g, t.h0, t.h1]
    if isinstance(t, Snrn):
        return [t.g] + [x for _, c in t.cases for x in c.terms()]
    return []


def _render(t: Term, name_of: Callable[[Term], Optional[str]]) -> str:
    def sub(x: Term) -> str:
        n = name_of(x)
        return n if n is not None else _render(x, name_of)

    if isinstance(t, Zero):
        return f"(zero {t.k} {t.l})"
    if isinstance(t, Proj):
        return f"(proj {t.k} {t.l} {t.j})"
    if isinstance(t, Succ):
        return f"(succ {t.bit})"
    if isinstance(t, Pred):
        return "(pred)"
    if isinstance(t, Cond):
        return "(cond)"
    if isinstance(t, Comp):
        out = f"(comp {sub(t.g)} :select ({' '.join(map(str, t.select))}) :safe ({' '.join(sub(h) for h in t.safe)})"
        if t.k is not None or t.l is not None:
            sig = t.outer()
            out += f" :sig ({sig.k} {sig.l})"
        return out + ")"
    if isinstance(t, Srn):
        return f"(srn {sub(t.g)} {sub(t.h0)} {sub(t.h1)})"
    if isinstance(t, Snrn):
        cases = " ".join(
            f'("{p}" :h {sub(c.h)} :t ({" ".join(sub(x) for x in c.t)}) :s ({" ".join(sub(x) for x in c.s)}))'
            for p, c in t.cases
        )
        p1, p2, p3 = (_prec_text(pf) for pf in t.precs)
        return (f"(snrn :k {t.k} :m {t.m} :mode {t.mode} :g {sub(t.g)} "
                f":prec1 {p1} :prec2 {p2} :prec3 {p3} :cases ({cases}))")
    raise TermError(f"cannot print {type(t).__name__}")


def print_term(t: Term) -> str:
    """Inline text of ``t``; shared subterms are repeated (see ``print_document``)."""
    return _render(t, lambda x: None)


def print_document(defs: dict[str, Term], share: bool = True) -> str:
    """``(def ...)`` forms; with ``share`` every subterm used twice gets its own ``_N`` definition."""
    names: dict[int, str] = {}
    lines: list[str] = []
    if share:
        uses: dict[int, int] = {}
        order: list[Term] = []
        seen: set[int] = set()
        roots = list(defs.values())
        stack = [(t, False) for t in reversed(roots)]
        for t in roots:
            uses[id(t)] = uses.get(id(t), 0) + 1
        while stack:
            t, done = stack.pop()
            if done:
                order.append(t)
                continue
            if id(t) in seen:
                continue
            seen.add(id(t))
            stack.append((t, True))
            for c in _children(t):
                uses[id(c)] = uses.get(id(c), 0) + 1
                stack.append((c, False))
        root_ids = {id(t) for t in roots}
        n = 0
        for t in order:
            if uses.get(id(t), 0) > 1 and id(t) not in root_ids and _children(t):
                n += 1
                name = f"_{n}"
                lines.append(f"(def {name} {_render(t, lambda x: names.get(id(x)))})")
                names[id(t)] = name
    for name, t in defs.items():
        lines.append(f"(def {name} {_render(t, lambda x: names.get(id(x)))})")
        names.setdefault(id(t), name)
    return "\n".join(lines) + "\n"
