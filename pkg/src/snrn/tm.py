"""One-tape Turing machines: a direct simulator and a compiler into closed terms.

Tape cells hold ``0``, ``1`` or ``B`` with two-bit codes ``2``, ``3``, ``0``.
The tape left and right of the head is kept as two numbers whose least
significant code is the cell next to the head, so blanks far away vanish.
Moves are coded ``L = 2``, ``H = 0``, ``R = 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

from .polynomial import Polynomial
from .stdlib import C, P, app, mk_concat, mk_pairing, succs
from .terms import Comp, Proj, Term, TermError, Zero
from .transforms import COROLLARY23, LengthPolyPair, SimultaneousDef, corollary_lift

SYMBOL_CODE = {"0": 2, "1": 3, "B": 0}
CODE_SYMBOL = {v: k for k, v in SYMBOL_CODE.items()}
MOVE_CODE = {"L": 2, "H": 0, "R": 1}

# component order of the simulated configuration
STAT, SYMB, DIREC, LEFT, RIGHT = range(5)
COMPONENTS = ("stat", "symb", "direc", "left", "right")


@dataclass
class TMSpec:
    """States ``0..states`` (1 initial, 0 halting) and a total transition table.

    ``delta[(q, s)] = (q', w, move)`` for ``q >= 1`` and ``s`` in ``0 1 B``.
    """

    states: int
    delta: dict[tuple[int, str], tuple[int, str, str]]
    inputs: int = 1
    name: str = ""

    def problems(self) -> list[str]:
        out = []
        if self.states < 1:
            out.append("need at least the initial state 1")
        if self.inputs < 1:
            out.append("need at least one input")
        for q in range(1, self.states + 1):
            for s in "01B":
                if (q, s) not in self.delta:
                    out.append(f"no transition for state {q} reading {s}")
        for (q, s), (q2, w, mv) in self.delta.items():
            if not 1 <= q <= self.states or s not in SYMBOL_CODE:
                out.append(f"transition from ({q}, {s}) outside the table domain")
            if not 0 <= q2 <= self.states or w not in SYMBOL_CODE or mv not in MOVE_CODE:
                out.append(f"bad transition ({q}, {s}) -> ({q2}, {w}, {mv})")
        return out

    def validate(self) -> "TMSpec":
        probs = self.problems()
        if probs:
            raise TermError("; ".join(probs))
        return self

    def step_codes(self, q: int, code: int) -> Optional[tuple[int, int, int]]:
        """``(q', written code, move code)`` or ``None`` where the machine is frozen."""
        if q == 0 or q > self.states or code not in CODE_SYMBOL:
            return None
        q2, w, mv = self.delta[(q, CODE_SYMBOL[code])]
        return q2, SYMBOL_CODE[w], MOVE_CODE[mv]

    @classmethod
    def from_json(cls, data: Union[str, Mapping]) -> "TMSpec":
        if isinstance(data, str):
            data = json.loads(data)
        delta = {}
        for row in data["delta"]:
            q, s, q2, w, mv = row
            delta[(int(q), str(s))] = (int(q2), str(w), str(mv))
        return cls(int(data["states"]), delta, int(data.get("inputs", 1)), str(data.get("name", ""))).validate()

    def to_json(self) -> str:
        rows = [[q, s, q2, w, mv] for (q, s), (q2, w, mv) in sorted(self.delta.items())]
        return json.dumps({"name": self.name, "states": self.states, "inputs": self.inputs, "delta": rows})


def load_tm(path: Union[str, Path]) -> TMSpec:
    return TMSpec.from_json(Path(path).read_text())


@dataclass(frozen=True)
class TMConfig:
    state: int
    symb: int
    direc: int
    left: int
    right: int

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.state, self.symb, self.direc, self.left, self.right)


# --------------------------------------------------------------------------
# Simulation


def encode_inputs(xs: Sequence[int]) -> int:
    """Initial right part: ``x_n`` next to the head, low bit first, one blank between inputs."""
    code = 0
    for x in xs:
        code <<= 2
        for b in bin(x)[2:] if x else "":
            code = (code << 2) | (3 if b == "1" else 2)
    return code


def initial_config(xs: Sequence[int]) -> TMConfig:
    return TMConfig(1, 0, MOVE_CODE["R"], 0, encode_inputs(xs))


def step_config(tm: TMSpec, c: TMConfig) -> TMConfig:
    nxt = tm.step_codes(c.state, c.symb)
    if nxt is None:
        return c
    q2, w, mv = nxt
    if mv == MOVE_CODE["R"]:
        return TMConfig(q2, c.right & 3, mv, (c.left << 2) | w, c.right >> 2)
    if mv == MOVE_CODE["L"]:
        return TMConfig(q2, c.left & 3, mv, c.left >> 2, (c.right << 2) | w)
    return TMConfig(q2, w, mv, c.left, c.right)


def simulate_tm(tm: TMSpec, xs: Sequence[int], steps: int) -> TMConfig:
    """Configuration after ``steps`` steps; the halting state is absorbing."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    c = initial_config(xs)
    for _ in range(steps):
        if c.state == 0:
            break
        c = step_config(tm, c)
    return c


def halting_time(tm: TMSpec, xs: Sequence[int], limit: int = 1 << 20) -> Optional[int]:
    c = initial_config(xs)
    for n in range(limit + 1):
        if c.state == 0:
            return n
        c = step_config(tm, c)
    return None


def simulate_flat(tm: TMSpec, xs: Sequence[int], steps: int) -> tuple[int, int, dict[int, str]]:
    """Reference run on an explicit tape: ``(state, head, cells)``."""
    cells: dict[int, str] = {}
    pos = 1
    for i, x in enumerate(reversed(list(xs))):
        if i:
            pos += 1
        for b in reversed(bin(x)[2:]) if x else "":
            cells[pos] = b
            pos += 1
    head, q = 0, 1
    for _ in range(steps):
        if q == 0:
            break
        q, w, mv = tm.delta[(q, cells.get(head, "B"))]
        cells[head] = w
        head += {"L": -1, "H": 0, "R": 1}[mv]
    return q, head, cells


def flat_view(state: int, head: int, cells: Mapping[int, str]) -> tuple[int, int, int, int]:
    """``(state, symb, left, right)`` codes of a flat tape, for comparison."""

    def pack(positions):
        code = 0
        for p in positions:
            code = (code << 2) | SYMBOL_CODE[cells.get(p, "B")]
        return code

    lo = min(cells, default=head)
    hi = max(cells, default=head)
    left = pack(range(min(lo, head), head))
    right = pack(range(max(hi, head), head, -1))
    return state, SYMBOL_CODE[cells.get(head, "B")], left, right


def decode_output(left: int, q: Polynomial, xs: Sequence[int]) -> int:
    """The output bits stored at the even positions of ``left``, low bit nearest the head.

    Only the ``2^(q(|x|)+1)`` low bits of ``left`` are read, as the pairing
    window of the compiled term does.
    """
    w = 1 << q.at(xs)
    left &= (1 << (2 * w)) - 1
    out = 0
    i = 0
    while left >> (2 * i):
        out |= ((left >> (2 * i)) & 1) << i
        i += 1
    return out


def run_tm(tm: TMSpec, xs: Sequence[int], p: Polynomial) -> int:
    """Decoded output after ``2^p(|x|)`` steps."""
    return decode_output(simulate_tm(tm, xs, 1 << p.at(xs)).left, output_window(tm, p), xs)


# --------------------------------------------------------------------------
# Table compilation


def _bit(v: Term, j: int, k: int, l: int) -> Term:
    for _ in range(j):
        v = app(P, k, l, v, select=())
    return v


def _const(v: int, k: int, l: int) -> Term:
    return succs(bin(v)[2:] if v else "", k, l, Zero(k, l))


def decision_tree(
    args: Sequence[tuple[Term, int]], leaf: Callable[[tuple[int, ...]], Term], k: int, l: int
) -> Term:
    """``C``-tree over the low bits of each ``(term, nbits)``; ``leaf`` gets the values read."""
    memo: dict[tuple[int, ...], Term] = {}

    def leaf_of(vals):
        if vals not in memo:
            memo[vals] = leaf(vals)
        return memo[vals]

    def grow(i: int, j: int, vals: tuple[int, ...], acc: int) -> Term:
        if i == len(args):
            return leaf_of(vals)
        term, nbits = args[i]
        if j == nbits:
            return grow(i + 1, 0, vals + (acc,), 0)
        zero = grow(i, j + 1, vals, acc)
        one = grow(i, j + 1, vals, acc | (1 << j))
        if zero is one:
            return zero
        return app(C, k, l, _bit(term, j, k, l), zero, one, select=())

    return grow(0, 0, (), 0)


def compile_table(table: Mapping[tuple[int, ...], int], input_bits: Sequence[int],
                  default: int = 0) -> Term:
    """A safe-only term of signature ``(0, n)`` computing ``table`` on the low bits of its inputs."""
    n = len(input_bits)
    for key, v in table.items():
        if len(key) != n or any(not 0 <= a < (1 << b) for a, b in zip(key, input_bits)) or v < 0:
            raise TermError(f"table entry {key} -> {v} outside the declared bounds")
    args = [(Proj(0, n, i), b) for i, b in enumerate(input_bits, 1)]
    return decision_tree(args, lambda vals: _const(table.get(vals, default), 0, n), 0, n)


def transition_tables(tm: TMSpec) -> tuple[dict, dict, dict]:
    """Next state, written code and move code as maps on ``(state, symbol code)``; frozen entries keep their inputs."""
    nq, ws, mvs = {}, {}, {}
    sbits = max(tm.states.bit_length(), 1)
    for q in range(1 << sbits):
        for code in range(4):
            nxt = tm.step_codes(q, code)
            if nxt is None:
                nq[(q, code)], ws[(q, code)], mvs[(q, code)] = q, code, MOVE_CODE["H"]
            else:
                nq[(q, code)], ws[(q, code)], mvs[(q, code)] = nxt
    return nq, ws, mvs


# --------------------------------------------------------------------------
# The five-component recursion


def step_terms(tm: TMSpec) -> tuple[Term, ...]:
    """``Δ_1..Δ_5`` as terms of signature ``(n, 5)`` over the previous configuration."""
    n = tm.inputs
    K, L = n, 5
    stat, symb, direc, left, right = (Proj(K, L, K + i) for i in range(1, 6))
    sbits = max(tm.states.bit_length(), 1)
    args = [(stat, sbits), (symb, 2)]

    def low2(v: Term) -> Term:
        high = _bit(v, 1, K, L)
        return app(
            C, K, L, v,
            app(C, K, L, high, _const(0, K, L), _const(2, K, L), select=()),
            app(C, K, L, high, _const(1, K, L), _const(3, K, L), select=()),
            select=(),
        )

    def push(v: Term, code: int) -> Term:
        return succs(format(code, "02b"), K, L, v)

    def pop(v: Term) -> Term:
        return _bit(v, 2, K, L)

    frozen = (stat, symb, direc, left, right)

    def leaf(which: int):
        def build(vals):
            q, code = vals
            nxt = tm.step_codes(q, code)
            if nxt is None:
                return frozen[which]
            q2, w, mv = nxt
            if which == STAT:
                return _const(q2, K, L)
            if which == DIREC:
                return _const(mv, K, L)
            if which == SYMB:
                if mv == MOVE_CODE["R"]:
                    return low2(right)
                if mv == MOVE_CODE["L"]:
                    return low2(left)
                return _const(w, K, L)
            if which == LEFT:
                if mv == MOVE_CODE["R"]:
                    return push(left, w)
                return pop(left) if mv == MOVE_CODE["L"] else left
            if mv == MOVE_CODE["L"]:
                return push(right, w)
            return pop(right) if mv == MOVE_CODE["R"] else right

        return build

    return tuple(decision_tree(args, leaf(i), K, L) for i in range(5))


def initial_terms(n: int) -> tuple[Term, ...]:
    """Seeds of signature ``(n, 0)``: state 1, blank, right move, empty left, inputs on the right."""
    _, chain = mk_concat(n)
    return (_const(1, n, 0), Zero(n, 0), _const(MOVE_CODE["R"], n, 0), Zero(n, 0), chain)


def tm_system(tm: TMSpec) -> SimultaneousDef:
    tm.validate()
    return SimultaneousDef(
        1, tm.inputs, 5, step_terms(tm), shape=COROLLARY23, g=initial_terms(tm.inputs),
        name=tm.name or "tm",
    )


def component_bounds(tm: TMSpec, p: Polynomial) -> LengthPolyPair:
    """Length exponents for the five components over the lifted ``(slots, x)``.

    After at most ``2^p`` steps ``|left| <= 2^(p+1)`` and
    ``|right| <= 2 Σ|x_i| + 2n + 2^(p+1) <= 2^(join(p+1, Σ|x_i|+n)+1)``.
    """
    n = tm.inputs
    k = p.layout().k
    N = k + n
    xs = [k + i for i in range(1, n + 1)]
    pp = p.reindexed(N, xs)
    S = Polynomial.length_sum(n).reindexed(N, xs)

    def const(c: int) -> Polynomial:
        return Polynomial(N, ((),) * c)

    def log_bits(v: int) -> Polynomial:
        return const(max(v.bit_length() - 1, 0).bit_length())

    left = pp.shifted(1)
    right = left.join(S.shifted(n)).shifted(1)
    return LengthPolyPair(components=(log_bits(tm.states), const(1), const(1), left, right))


def output_window(tm: TMSpec, p: Polynomial) -> Polynomial:
    """``Q`` with ``|Left| <= 2^(Q+1)``: the left part only holds cells the head crossed."""
    return p if p.nvars == tm.inputs else p.reindexed(tm.inputs, list(range(1, p.nvars + 1)))


@dataclass
class CompiledTM:
    term: Term
    components: list[Term]
    q: Polynomial
    system: SimultaneousDef = field(repr=False)


def compile_tm_parts(tm: TMSpec, p: Polynomial) -> CompiledTM:
    tm.validate()
    n = tm.inputs
    if p.nvars > n:
        raise TermError(f"step polynomial uses {p.nvars} variables, machine has {n} inputs")
    p = output_window(tm, p)
    d = tm_system(tm)
    if not p.chain_realizable():
        p = p.chain_closure()
    comps = corollary_lift(d, p, component_bounds(tm, p))
    q = p
    kit = mk_pairing(q)
    xs = tuple(range(1, n + 1))
    bits = Comp(kit.Pi2, xs, (comps[LEFT], Zero(n, 0)), n, 0)
    term = Comp(kit.R, xs, (bits, Zero(n, 0)), n, 0)
    return CompiledTM(term, comps, q, d)


def compile_tm(tm: TMSpec, p: Polynomial) -> Term:
    """Closed term of signature ``(n, 0)`` computing the machine's output after ``2^p`` steps."""
    return compile_tm_parts(tm, p).term


# --------------------------------------------------------------------------
# Corpus


def _machine(name: str, states: int, rows: Sequence[tuple[int, str, int, str, str]]) -> TMSpec:
    return TMSpec(states, {(q, s): (q2, w, mv) for q, s, q2, w, mv in rows}, 1, name).validate()


def scan_machine() -> TMSpec:
    """Walks over the input and halts on the blank after it."""
    return _machine("scan", 2, [
        (1, "0", 2, "0", "R"), (1, "1", 2, "1", "R"), (1, "B", 2, "B", "R"),
        (2, "0", 2, "0", "R"), (2, "1", 2, "1", "R"), (2, "B", 0, "B", "H"),
    ])


def flip_machine() -> TMSpec:
    """Complements every input bit on the way over it."""
    return _machine("flip", 2, [
        (1, "0", 2, "0", "R"), (1, "1", 2, "1", "R"), (1, "B", 2, "B", "R"),
        (2, "0", 2, "1", "R"), (2, "1", 2, "0", "R"), (2, "B", 0, "B", "H"),
    ])


def increment_machine() -> TMSpec:
    """Adds one, low bit first, then copies the rest."""
    return _machine("increment", 3, [
        (1, "0", 2, "0", "R"), (1, "1", 2, "1", "R"), (1, "B", 2, "B", "R"),
        (2, "1", 2, "0", "R"), (2, "0", 3, "1", "R"), (2, "B", 0, "1", "R"),
        (3, "0", 3, "0", "R"), (3, "1", 3, "1", "R"), (3, "B", 0, "B", "H"),
    ])


def parity_machine() -> TMSpec:
    """Erases the input and leaves the parity of its ones."""
    return _machine("parity", 3, [
        (1, "0", 2, "0", "R"), (1, "1", 2, "1", "R"), (1, "B", 2, "B", "R"),
        (2, "0", 2, "B", "R"), (2, "1", 3, "B", "R"), (2, "B", 0, "0", "R"),
        (3, "0", 3, "B", "R"), (3, "1", 2, "B", "R"), (3, "B", 0, "1", "R"),
    ])


CORPUS: dict[str, Callable[[], TMSpec]] = {
    "scan": scan_machine,
    "flip": flip_machine,
    "increment": increment_machine,
    "parity": parity_machine,
}

# 2^(|x|+1) >= |x| + 3 covers every corpus machine
CORPUS_STEPS = Polynomial.parse("x1+1")
