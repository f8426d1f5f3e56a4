"""Command line: check, evaluate, compile machines, certify bounds, run demos.

Exit status is 0 on success, 1 when a check or bound fails and 2 on usage
or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bounds import Box, check_length_bound, check_time_bound, derive_time_certificate
from .checker import check_term
from .evaluator import EvalLimits, Evaluator, LimitExceeded, run_deep
from .stdlib import STDLIB_NAMES, lookup, parse_poly_name
from .syntax import ParseError, TermDocument, parse_document, print_document
from .terms import Term, TermError

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(items: Sequence[str]) -> tuple[int, ...]:
    out = []
    for item in items:
        for part in item.split(","):
            if part.strip():
                try:
                    out.append(int(part, 0))
                except ValueError:
                    raise UsageError(f"not a numeral: {part!r}")
    if any(v < 0 for v in out):
        raise UsageError("arguments must be natural numbers")
    return tuple(out)


def _load(path: str) -> TermDocument:
    if path == "std":
        doc = TermDocument()
        for name in STDLIB_NAMES:
            doc.defs[name] = lookup(name)
        return doc
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    return parse_document(text)


def _term(path: str, name: str) -> Term:
    if path == "std":
        try:
            return lookup(name)
        except (KeyError, ValueError) as e:
            raise UsageError(str(e))
    doc = _load(path)
    if name not in doc.defs:
        raise UsageError(f"{path} has no definition {name!r}")
    return doc.defs[name]


def cmd_check(args) -> int:
    doc = _load(args.file)
    status = OK
    for name, t in doc.public().items():
        rep = check_term(t, lax=args.lax)
        if rep.ok:
            print(f"{name}: ok {rep.signature}")
        else:
            status = FAILED
            print(f"{name}: FAIL")
            for v in rep.violations:
                print(f"  {v}")
    return status


def cmd_eval(args) -> int:
    t = _term(args.file, args.name)
    rep = check_term(t)
    if not rep.ok:
        print(f"{args.name}: not well formed\n{rep}", file=sys.stderr)
        return FAILED
    xs, as_ = _ints(args.normal), _ints(args.safe)
    limits = EvalLimits(
        max_cost=args.max_cost or EvalLimits.max_cost,
        max_bits=args.max_bits or EvalLimits.max_bits,
        max_seconds=args.max_seconds or None,
    )
    ev = Evaluator(limits, trace=args.trace)
    try:
        out = ev.eval(t, xs, as_)
    except LimitExceeded as e:
        print(f"{args.name}: {e}", file=sys.stderr)
        return FAILED
    if args.trace:
        for e in ev.events:
            where = "/".join(map(str, e.path)) or "<root>"
            extra = f" word={e.word} v1={e.v1} v2={e.v2} v3={e.v3}" if e.kind == "unfold" else ""
            print(f"{e.kind} {where} normals={e.normals}{extra} measure={e.measure}")
    print(out.value)
    if args.cost:
        print(f"cost {out.cost} peak-bits {out.peak_bits}", file=sys.stderr)
    return OK


def cmd_compile_tm(args) -> int:
    from .tm import compile_tm, load_tm

    try:
        tm = load_tm(args.tm)
    except OSError as e:
        raise UsageError(f"cannot read {args.tm}: {e.strerror}")
    except (KeyError, ValueError) as e:
        raise UsageError(f"bad machine file: {e}")
    p = parse_poly_name(args.poly)
    term = compile_tm(tm, p)
    name = args.name or tm.name or "main"
    rep = check_term(term)
    text = print_document({name: term})
    if args.output:
        Path(args.output).write_text(text)
        print(f"{name}: {rep} -> {args.output}")
    else:
        sys.stdout.write(text)
    return OK if rep.ok else FAILED


def _box(spec: Optional[str]) -> Box:
    if not spec:
        return Box(8, 16)
    try:
        normal, safe = (int(v) for v in spec.split(","))
    except ValueError:
        raise UsageError("--box takes NORMAL,SAFE exclusive bounds, e.g. 8,16")
    return Box(normal, safe)


def cmd_bounds(args) -> int:
    t = _term(args.file, args.name)
    rep = check_term(t)
    if not rep.ok:
        print(f"{args.name}: not well formed\n{rep}", file=sys.stderr)
        return FAILED
    cert = derive_time_certificate(t)
    box = _box(args.box)
    status = OK
    for check in (check_length_bound, check_time_bound):
        r = check(t, cert, box, args.name)
        print(r)
        print()
        if not r.ok:
            status = FAILED
    if args.provenance:
        print("\n".join(cert.provenance))
    return status


DEMOS = ("towers", "pairing", "tm", "bounds")


def cmd_demo(args) -> int:
    from .bounds import check_pred_decrease
    from .tm import CORPUS, CORPUS_STEPS, compile_tm, run_tm

    name = args.name
    ev = Evaluator()
    if name == "towers":
        for fn, xs, as_ in (("f0", (3,), (1,)), ("f1", (1, 1, 0), (1,)), ("f2", (0, 0, 0, 0, 0, 0), (3,))):
            v = run_deep(ev.eval, lookup(fn), xs, as_).value
            print(f"{fn}{xs};{as_} = {v}")
    elif name == "pairing":
        kit_name = "p0"
        pi, pi2 = lookup(f"Pi@{kit_name}"), lookup(f"Pi2@{kit_name}")
        code = ev.eval(pi, (1,), (2, 3, 0)).value
        print(f"Pi(1; 2, 3, 0) = {code}; Pi2(1; {code}, 0) = {ev.eval(pi2, (1,), (code, 0)).value}")
    elif name == "tm":
        for mname, mk in CORPUS.items():
            t = compile_tm(mk(), CORPUS_STEPS)
            vals = [run_deep(ev.eval, t, (x,), ()).value for x in range(8)]
            want = [run_tm(mk(), (x,), CORPUS_STEPS) for x in range(8)]
            print(f"{mname}: {vals} {'matches' if vals == want else 'DIFFERS FROM'} the simulator")
    elif name == "bounds":
        import itertools

        rep = check_pred_decrease(2, 1, 3, itertools.product(range(16), repeat=3))
        print(rep)
        f0 = lookup("f0")
        print(check_length_bound(f0, derive_time_certificate(f0), Box(8, 8), "f0"))
    else:
        raise UsageError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="snrn", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check every definition of a term file")
    p.add_argument("file", help='term file, or "std" for the standard library')
    p.add_argument("--lax", action="store_true", help="accept halving zero components before the pivot")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("eval", help="evaluate a definition")
    p.add_argument("file", help='term file, or "std"')
    p.add_argument("name")
    p.add_argument("--normal", nargs="*", default=[], help="normal arguments")
    p.add_argument("--safe", nargs="*", default=[], help="safe arguments")
    p.add_argument("--max-cost", type=int, default=0)
    p.add_argument("--max-bits", type=int, default=0)
    p.add_argument("--max-seconds", type=float, default=0, help="wall-clock budget")
    p.add_argument("--trace", action="store_true", help="print one line per recursion event")
    p.add_argument("--cost", action="store_true", help="report abstract cost on stderr")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("compile-tm", help="compile a Turing machine into a closed term")
    p.add_argument("tm", help="machine JSON file")
    p.add_argument("--poly", required=True, help="step polynomial, e.g. x1+2")
    p.add_argument("--name", default="")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_compile_tm)

    p = sub.add_parser("bounds", help="derive and validate length and cost certificates")
    p.add_argument("file", help='term file, or "std"')
    p.add_argument("name")
    p.add_argument("--box", help="NORMAL,SAFE exclusive bounds of the sample box (default 8,16)")
    p.add_argument("--provenance", action="store_true")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("demo", help="small end-to-end demonstrations")
    p.add_argument("name", choices=DEMOS)
    p.set_defaults(fn=cmd_demo)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return run_deep(args.fn, args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return USAGE
    except TermError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
