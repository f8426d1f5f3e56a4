"""Term language of the algebras B and N.

Numbers are plain Python ints read in binary notation.  Terms are frozen
dataclasses; a node's signature (normal arity, safe arity) is computed on
first use and cached on the node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence


class TermError(ValueError):
    """Raised for malformed arguments to term-level helpers."""


# --------------------------------------------------------------------------
# Numbers, type symbols, modified projections


def binary_length(x: int) -> int:
    if x < 0:
        raise TermError(f"negative number {x}")
    return x.bit_length()


class TypeSymbol(str, Enum):
    ZERO_BIT = "0"
    ONE_BIT = "1"
    Z = "Z"


SYMBOLS = "01Z"


def type_of(y: int) -> TypeSymbol:
    if y == 0:
        return TypeSymbol.Z
    return TypeSymbol.ONE_BIT if y & 1 else TypeSymbol.ZERO_BIT


def type_word(ys: Sequence[int]) -> str:
    """Componentwise type of ``ys`` as a string over ``0``, ``1``, ``Z``."""
    if len(ys) == 0:
        raise TermError("type_word needs a nonempty tuple")
    return "".join("Z" if y == 0 else ("1" if y & 1 else "0") for y in ys)


def select(j: int, ys: Sequence[int]) -> int:
    """Modified projection: ``ys[j]`` for j <= k, ``ys[j-k] // 2`` above."""
    k = len(ys)
    if not 1 <= j <= 2 * k:
        raise TermError(f"projection index {j} outside 1..{2 * k}")
    if j <= k:
        return ys[j - 1]
    return ys[j - k - 1] >> 1


def select_all(indices: Sequence[int], ys: Sequence[int]) -> tuple[int, ...]:
    k = len(ys)
    return tuple(ys[j - 1] if j <= k else ys[j - k - 1] >> 1 for j in indices)


def in_domain(word: str, k: int) -> bool:
    """Membership of ``word`` in the SNRN word domain: first ``k`` not all Z."""
    return any(c != "Z" for c in word[:k])


def word_domain(length: int, k: int) -> Iterator[str]:
    """All words of ``length`` symbols whose first ``k`` symbols are not all Z.

    ``word_domain(k, k)`` is Σ^k_0; ``word_domain(k + m, k)`` is Σ^{k,m}_0.
    """
    for t in itertools.product(SYMBOLS, repeat=length):
        w = "".join(t)
        if in_domain(w, k):
            yield w


def pattern_matches(pattern: str, word: str) -> bool:
    return len(pattern) == len(word) and all(
        p == "_" or p == c for p, c in zip(pattern, word)
    )


def check_pattern(pattern: str, length: int) -> None:
    if len(pattern) != length or any(c not in "01Z_" for c in pattern):
        raise TermError(f"bad type-word pattern {pattern!r} for width {length}")


# --------------------------------------------------------------------------
# Pattern regions


_CLASS_SYMBOLS = {"0": "0", "1": "1", "Z": "Z", "N": "01", "_": "01Z"}


def _classes_of(symbols: str) -> list[str]:
    """Cover ``symbols`` with one named class, or with single symbols."""
    for name, syms in _CLASS_SYMBOLS.items():
        if set(syms) == set(symbols):
            return [name]
    return list(symbols)


def pattern_regions(
    patterns: Sequence[str], length: int, k: int
) -> Iterator[tuple[str, Optional[int]]]:
    """Partition the word domain by first-match over ``patterns``.

    Yields ``(region, index)`` where ``region`` is a string over
    ``0 1 Z N _`` (``N`` = 0 or 1, ``_`` = anything) and ``index`` is the
    first pattern matching every word of the region, or ``None`` when no
    pattern matches.  Regions lying wholly outside the domain are dropped.
    Positions are only split where the live patterns disagree, so uniform
    tables stay small regardless of width.
    """

    def walk(i: int, prefix: list[str], alive: list[int]) -> Iterator[tuple[str, Optional[int]]]:
        if k and all(c == "Z" for c in prefix[:k]) and len(prefix) >= k:
            return
        if not alive:
            yield "".join(prefix) + "_" * (length - i), None
            return
        if i == length:
            yield "".join(prefix), alive[0]
            return
        groups: dict[tuple[int, ...], list[str]] = {}
        for s in SYMBOLS:
            acc = tuple(a for a in alive if patterns[a][i] in ("_", s))
            groups.setdefault(acc, []).append(s)
        for acc, syms in groups.items():
            for cls in _classes_of("".join(syms)):
                yield from walk(i + 1, prefix + [cls], list(acc))

    yield from walk(0, [], list(range(len(patterns))))


def region_example(region: str, k: int) -> str:
    """A concrete in-domain word inside ``region`` (first choice order 1, 0, Z)."""
    word = []
    for i, c in enumerate(region):
        if c in "01Z":
            word.append(c)
        else:
            word.append("1")
    w = "".join(word)
    if in_domain(w, k):
        return w
    raise TermError(f"region {region} has no in-domain word")


# --------------------------------------------------------------------------
# ≺-function tables


@dataclass(frozen=True)
class PrecFunction:
    """Table choosing a modified projection per position and type word.

    ``rules`` is an ordered list of ``(pattern, indices)``; the first pattern
    matching a word decides the indices ``(j_1, ..., j_width)`` with each
    ``j_i`` in ``1..2*width``.
    """

    width: int
    rules: tuple[tuple[str, tuple[int, ...]], ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple((p, tuple(ix)) for p, ix in self.rules))
        for pattern, ix in self.rules:
            check_pattern(pattern, self.width)
            if len(ix) != self.width:
                raise TermError(f"rule {pattern} has {len(ix)} indices, expected {self.width}")
            for j in ix:
                if not 1 <= j <= 2 * self.width:
                    raise TermError(f"index {j} outside 1..{2 * self.width}")

    def resolve(self, word: str) -> Optional[tuple[int, ...]]:
        try:
            return self._cache[word]
        except KeyError:
            pass
        found = None
        for pattern, ix in self.rules:
            if pattern_matches(pattern, word):
                found = ix
                break
        self._cache[word] = found
        return found

    @classmethod
    def uniform(cls, indices: Sequence[int]) -> "PrecFunction":
        return cls(len(indices), (("_" * len(indices), tuple(indices)),))

    def expand(self, k: Optional[int] = None) -> dict[str, tuple[int, ...]]:
        """Total map over the word domain (``k`` defaults to the width)."""
        k = self.width if k is None else k
        out = {}
        for w in word_domain(self.width, k):
            ix = self.resolve(w)
            if ix is None:
                raise TermError(f"prec table undefined on {w}")
            out[w] = ix
        return out


# --------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Signature:
    k: int
    l: int

    def __post_init__(self) -> None:
        if self.k < 0 or self.l < 0:
            raise TermError(f"negative arity in ({self.k},{self.l})")

    def __iter__(self):
        return iter((self.k, self.l))

    def __str__(self) -> str:
        return f"({self.k},{self.l})"


class Term:
    """Base class of term nodes."""

    __slots__ = ()

    @property
    def sig(self) -> Signature:
        cached = self.__dict__.get("_sig")
        if cached is None:
            cached = self._signature()
            object.__setattr__(self, "_sig", cached)
        return cached

    def _signature(self) -> Signature:
        raise NotImplementedError

    def children(self) -> tuple["Term", ...]:
        return ()


@dataclass(frozen=True)
class Zero(Term):
    k: int
    l: int

    def _signature(self):
        return Signature(self.k, self.l)


@dataclass(frozen=True)
class Proj(Term):
    k: int
    l: int
    j: int

    def _signature(self):
        if not 1 <= self.j <= self.k + self.l:
            raise TermError(f"projection index {self.j} outside 1..{self.k + self.l}")
        return Signature(self.k, self.l)


@dataclass(frozen=True)
class Succ(Term):
    bit: int

    def _signature(self):
        if self.bit not in (0, 1):
            raise TermError(f"successor bit must be 0 or 1, got {self.bit}")
        return Signature(0, 1)


@dataclass(frozen=True)
class Pred(Term):
    def _signature(self):
        return Signature(0, 1)


@dataclass(frozen=True)
class Cond(Term):
    def _signature(self):
        return Signature(0, 3)


@dataclass(frozen=True)
class Comp(Term):
    """Safe composition ``f(x; a) = g(x_i1..x_in; h_1(x; a)..h_m(x; a))``.

    ``k``/``l`` fix the outer signature; when omitted they are taken from the
    first safe argument (or ``(max select, 0)`` if there is none).
    """

    g: Term
    select: tuple[int, ...] = ()
    safe: tuple[Term, ...] = ()
    k: Optional[int] = None
    l: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "select", tuple(self.select))
        object.__setattr__(self, "safe", tuple(self.safe))

    def outer(self) -> Signature:
        if self.k is not None and self.l is not None:
            return Signature(self.k, self.l)
        if self.safe:
            s = self.safe[0].sig
            return Signature(s.k if self.k is None else self.k, s.l if self.l is None else self.l)
        return Signature(
            max(self.select, default=0) if self.k is None else self.k,
            0 if self.l is None else self.l,
        )

    def _signature(self):
        return self.outer()

    def children(self):
        return (self.g,) + self.safe


@dataclass(frozen=True)
class Srn(Term):
    """Safe recursion on notation on the first normal argument."""

    g: Term
    h0: Term
    h1: Term

    def _signature(self):
        s = self.g.sig
        return Signature(s.k + 1, s.l)

    def children(self):
        return (self.g, self.h0, self.h1)


@dataclass(frozen=True)
class SnrnCase:
    h: Term
    t: tuple[Term, ...]
    s: tuple[Term, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", tuple(self.t))
        object.__setattr__(self, "s", tuple(self.s))

    def terms(self) -> tuple[Term, ...]:
        return (self.h,) + self.t + self.s


STRICT = "strict"
RELAXED = "relaxed"


@dataclass(frozen=True)
class Snrn(Term):
    """Safe nested recursion on notation over ``k`` recursion positions.

    ``cases`` maps type-word patterns to step components by first match;
    ``precs`` holds the three ≺-function tables choosing the predecessors
    used at the s-, t- and h-levels (in that order of evaluation the
    tables are ``precs[2]``, ``precs[1]``, ``precs[0]``).
    """

    k: int
    m: int
    g: Term
    cases: tuple[tuple[str, SnrnCase], ...]
    precs: tuple[PrecFunction, PrecFunction, PrecFunction]
    mode: str = STRICT
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cases", tuple((p, c) for p, c in self.cases))
        object.__setattr__(self, "precs", tuple(self.precs))

    @property
    def word_length(self) -> int:
        return self.k if self.mode == STRICT else self.k + self.m

    def _signature(self):
        return Signature(self.k + self.m, self.g.sig.l)

    def case_for(self, word: str) -> Optional[SnrnCase]:
        try:
            return self._cache[word]
        except KeyError:
            pass
        found = None
        for pattern, case in self.cases:
            if pattern_matches(pattern, word):
                found = case
                break
        self._cache[word] = found
        return found

    def children(self):
        out = [self.g]
        for _, case in self.cases:
            out.extend(case.terms())
        return tuple(out)


def iter_nodes(t: Term) -> Iterator[Term]:
    """Each distinct node (by identity) reachable from ``t``, parents first."""
    seen: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(reversed(node.children()))


def term_size(t: Term) -> int:
    return sum(1 for _ in iter_nodes(t))


def sum_measure(d: int, ys: Sequence[int], xs: Sequence[int] = ()) -> int:
    """``Σ(d, y, x)``: lengths weighted by powers of ``X = max length + 1``."""
    k, m = len(ys), len(xs)
    if d < k + m:
        raise TermError(f"measure exponent {d} below arity {k + m}")
    lens = [binary_length(v) for v in ys] + [binary_length(v) for v in xs]
    base = max(lens, default=0) + 1
    return sum(n * base ** (d - i) for i, n in enumerate(lens, 1))


def mentions(t: Term, j: int) -> bool:
    """Whether argument ``j`` of ``t``'s frame can influence its value.

    Conservative: recursion nodes and composition heads are assumed to read
    every argument they are given.
    """
    if isinstance(t, Proj):
        return t.j == j
    if isinstance(t, Zero):
        return False
    if isinstance(t, (Succ, Pred)):
        return j == 1
    if isinstance(t, Cond):
        return True
    if isinstance(t, Comp):
        k = t.outer().k
        if j <= k:
            return j in t.select or any(mentions(h, j) for h in t.safe)
        return any(mentions(h, j) for h in t.safe)
    return True
