"""Polynomials over argument lengths, and their layout as recursion slots."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class Polynomial:
    """Sum of monomials over ``nvars`` variables with coefficient 1 each.

    A monomial is a sorted tuple of 1-based variable indices; repetition of a
    monomial realizes a coefficient and the empty tuple is the constant 1.
    """

    nvars: int
    monomials: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        mons = tuple(tuple(sorted(m)) for m in self.monomials)
        for m in mons:
            for i in m:
                if not 1 <= i <= self.nvars:
                    raise ValueError(f"variable x{i} outside x1..x{self.nvars}")
        object.__setattr__(self, "monomials", mons)

    @classmethod
    def parse(cls, text: str, nvars: int | None = None) -> "Polynomial":
        """Parse ``"x1*x2 + 2*x3 + x1^2 + 1"`` (no parentheses)."""
        mons: list[tuple[int, ...]] = []
        top = 0
        src = text.replace(" ", "")
        if not src:
            raise ValueError("empty polynomial")
        for term in src.split("+"):
            if not term:
                raise ValueError(f"bad polynomial {text!r}")
            coef = 1
            vars_: list[int] = []
            for factor in term.split("*"):
                m = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
                if m:
                    i = int(m.group(1))
                    if i < 1:
                        raise ValueError(f"bad variable {factor!r}")
                    vars_.extend([i] * int(m.group(2) or 1))
                    top = max(top, i)
                elif re.fullmatch(r"\d+", factor):
                    coef *= int(factor)
                else:
                    raise ValueError(f"bad factor {factor!r} in {text!r}")
            mons.extend([tuple(vars_)] * coef)
        if nvars is None:
            nvars = top
        elif top > nvars:
            raise ValueError(f"{text!r} uses x{top} but only {nvars} variables")
        return cls(nvars, tuple(mons))

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.monomials), default=0)

    @property
    def constant(self) -> int:
        return sum(1 for m in self.monomials if not m)

    def __call__(self, lengths: Sequence[int]) -> int:
        if len(lengths) != self.nvars:
            raise ValueError(f"expected {self.nvars} lengths, got {len(lengths)}")
        total = 0
        for m in self.monomials:
            v = 1
            for i in m:
                v *= lengths[i - 1]
            total += v
        return total

    def at(self, xs: Sequence[int]) -> int:
        """Value at the binary lengths of ``xs``."""
        return self([x.bit_length() for x in xs])

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for m, n in Counter(self.monomials).items():
            body = "*".join(f"x{i}" for i in m)
            if not body:
                parts.append(str(n))
            else:
                parts.append(body if n == 1 else f"{n}*{body}")
        return " + ".join(parts)

    def plus(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(max(self.nvars, other.nvars), self.monomials + other.monomials)

    def join(self, other: "Polynomial") -> "Polynomial":
        """Coefficient-wise maximum, which dominates both operands."""
        a, b = Counter(self.monomials), Counter(other.monomials)
        mons = []
        for m in sorted(set(a) | set(b)):
            mons.extend([m] * max(a[m], b[m]))
        return Polynomial(max(self.nvars, other.nvars), tuple(mons))

    def shifted(self, c: int) -> "Polynomial":
        return Polynomial(self.nvars, self.monomials + ((),) * c)

    def times(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(
            max(self.nvars, other.nvars),
            tuple(a + b for a in self.monomials for b in other.monomials),
        )

    def power(self, n: int) -> "Polynomial":
        out = Polynomial(self.nvars, ((),))
        for _ in range(n):
            out = out.times(self)
        return out

    def scaled(self, c: int) -> "Polynomial":
        return Polynomial(self.nvars, self.monomials * c)

    def reindexed(self, nvars: int, mapping: Sequence[int]) -> "Polynomial":
        """Rename variable ``i`` to ``mapping[i - 1]`` in a space of ``nvars``."""
        return Polynomial(nvars, tuple(tuple(mapping[i - 1] for i in m) for m in self.monomials))

    @classmethod
    def length_sum(cls, nvars: int) -> "Polynomial":
        """``|x_1| + ... + |x_n|``."""
        return cls(nvars, tuple((i,) for i in range(1, nvars + 1)))

    # -- slot layout -------------------------------------------------------

    def chain_realizable(self) -> bool:
        counts = Counter(len(m) for m in self.monomials if m)
        return all(counts[d - 1] >= counts[d] for d in counts if d >= 2)

    def chain_closure(self) -> "Polynomial":
        """Smallest-effort dominating polynomial whose slot layout exists.

        Adds prefixes of the highest monomials until every monomial of
        degree ``d >= 2`` can be followed by its own monomial of degree d-1.
        """
        mons = list(self.monomials)
        for d in range(self.degree, 1, -1):
            high = [m for m in mons if len(m) == d]
            low = sum(1 for m in mons if len(m) == d - 1)
            for m in high[low:]:
                mons.append(m[: d - 1])
        return Polynomial(self.nvars, tuple(mons))

    def layout(self) -> "SlotLayout":
        if not self.chain_realizable():
            raise ValueError(
                f"{self} has no cascade layout: each monomial of degree d >= 2 "
                f"needs its own monomial of degree d-1 (see chain_closure)"
            )
        pool = sorted((m for m in self.monomials if m), key=lambda m: (-len(m), m))
        ordered: list[tuple[int, ...]] = []
        while pool:
            m = pool.pop(0)
            ordered.append(m)
            d = len(m) - 1
            while d >= 1:
                nxt = next(x for x in pool if len(x) == d)
                pool.remove(nxt)
                ordered.append(nxt)
                d -= 1
        groups = []
        slot_vars: list[int] = []
        for m in ordered:
            start = len(slot_vars)
            slot_vars.extend(m)
            groups.append(tuple(range(start, start + len(m))))
        return SlotLayout(tuple(groups), tuple(slot_vars), self.constant, self.nvars)


@dataclass(frozen=True)
class SlotLayout:
    """Monomials laid out left to right as groups of 0-based slot positions.

    Every group of size ``d >= 2`` is immediately followed by a group of size
    ``d - 1``; ``slot_vars[i]`` is the variable feeding slot ``i``.
    """

    groups: tuple[tuple[int, ...], ...]
    slot_vars: tuple[int, ...]
    constant: int
    nvars: int

    @property
    def k(self) -> int:
        return len(self.slot_vars)

    def value(self, slot_lengths: Sequence[int]) -> int:
        total = self.constant
        for g in self.groups:
            v = 1
            for i in g:
                v *= slot_lengths[i]
            total += v
        return total

    def group_of(self, slot: int) -> int:
        for n, g in enumerate(self.groups):
            if slot in g:
                return n
        raise IndexError(slot)
