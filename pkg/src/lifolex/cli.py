"""Command-line front end.

Subcommands::

    lifolex run SCRIPT        execute an operation script
    lifolex dump SCRIPT       execute a script silently, print the final trie
    lifolex fuzz ...          lockstep random testing against the oracle
    lifolex bench ...         counter-bounded complexity benchmark

Exit codes: 0 success, 1 divergence or bound violation, 2 usage or script
error.
"""
import argparse
import re
import sys

from . import _kernels as K
from .bitstr import BitString, encode_key
from .lifo import EnvironmentUnderflow, LifoLexikon

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

_INT = re.compile(r"[+-]?\d+\Z")


class ScriptError(Exception):
    def __init__(self, line, message):
        super().__init__(f"{message} at line {line}")
        self.line = line


def parse_key(token) -> BitString:
    """``b:0101`` is a raw bit literal (``b:`` alone is the empty key);
    anything else is UTF-8 text."""
    if token.startswith("b:"):
        return BitString.from_bits(token[2:])
    return encode_key(token)


def parse_value(token):
    return int(token) if _INT.match(token) else token


def _format_stats(stats, extra=None):
    parts = [f"outer_iters={stats.outer_iters}", f"compares={stats.compares}",
             f"link_steps={stats.link_steps}", f"nodes_visited={stats.nodes_visited}",
             "d_seq=[" + ",".join(map(str, stats.d_seq)) + "]"]
    if extra:
        parts.extend(extra)
    return " ".join(parts)


_ARITY = {"insert": 2, "search": 1, "remove": 1, "open": 0, "close": 0, "dump": 0, "stats": 0}


def run_script(lines, lx=None, quiet=False):
    """Execute script lines against ``lx`` (a fresh dictionary by default).

    Returns ``(lx, output_lines)``; raises :class:`ScriptError`.
    """
    lx = lx if lx is not None else LifoLexikon()
    out = []
    last = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cmd, *args = line.split()
        if cmd not in _ARITY:
            raise ScriptError(lineno, f"unknown command {cmd!r}")
        if len(args) != _ARITY[cmd]:
            raise ScriptError(lineno, f"{cmd} takes {_ARITY[cmd]} argument(s)")
        try:
            key = parse_key(args[0]) if args else None
        except ValueError as e:
            raise ScriptError(lineno, str(e)) from None
        if cmd == "insert":
            lx.insert(key, parse_value(args[1]))
            rep = lx.last_insert
            last = (rep, [f"copies={rep.copies}"])
        elif cmd == "remove":
            lx.remove(key)
            last = (lx.last_insert, [f"copies={lx.last_insert.copies}"])
        elif cmd == "search":
            missing = object()
            value, outcome = lx.find(key, missing)
            last = (outcome.stats, None)
            out.append("ABSENT" if value is missing else f"FOUND {value}")
        elif cmd == "open":
            lx.open_environment()
        elif cmd == "close":
            try:
                lx.close_environment()
            except EnvironmentUnderflow:
                raise ScriptError(lineno, "environment underflow") from None
        elif cmd == "dump":
            out.extend(lx.dump().splitlines())
        elif cmd == "stats":
            out.append("(no traversal yet)" if last is None else _format_stats(*last))
    return lx, ([] if quiet else out)


def _read_script(path):
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as f:
        return f.read().splitlines()


def cmd_run(args):
    try:
        lx, out = run_script(_read_script(args.script), LifoLexikon(trace=args.trace))
    except ScriptError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for line in out:
        print(line)
    if args.trace:
        print(lx.arena.dump_trace())
    return EXIT_OK


def cmd_dump(args):
    try:
        lx, _ = run_script(_read_script(args.script), quiet=True)
    except (ScriptError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(lx.dump())
    return EXIT_OK


_MUTANTS = {"none": K.RULE_TRACKED, "flip": K.RULE_FLIPPED, "literal": K.RULE_LITERAL}


def cmd_fuzz(args):
    from .fuzz import fuzz

    status = EXIT_OK
    for run in range(args.runs):
        report = fuzz(args.seed + run, args.ops, args.max_depth, args.min_bits, args.max_bits,
                      splice_rule=_MUTANTS[args.inject_mutation], purity=args.purity)
        print(report.render(args.timing))
        if not report.passed:
            status = EXIT_VIOLATION
            break
    return status


def _int_list(text):
    try:
        return [int(float(t)) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def cmd_bench(args):
    from .bench import bench

    report = bench(args.n, args.s, args.seed)
    print(report.render(args.timing))
    return EXIT_VIOLATION if report.violations else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="lifolex", description="Scoped bit-trie dictionary tools")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute an operation script")
    r.add_argument("script", help="script file, or - for stdin")
    r.add_argument("--trace", action="store_true", help="print the arena allocation log")
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("dump", help="execute a script and print the final trie")
    d.add_argument("script")
    d.set_defaults(func=cmd_dump)

    f = sub.add_parser("fuzz", help="random lockstep test against the oracle")
    f.add_argument("--seed", type=int, default=1)
    f.add_argument("--ops", type=int, default=100_000)
    f.add_argument("--max-depth", type=int, default=32)
    f.add_argument("--min-bits", type=int, default=0)
    f.add_argument("--max-bits", type=int, default=512)
    f.add_argument("--runs", type=int, default=1, help="consecutive seeds to run")
    f.add_argument("--purity", choices=("full", "off"), default="full")
    f.add_argument("--inject-mutation", choices=sorted(_MUTANTS), default="none",
                   help=argparse.SUPPRESS)
    f.add_argument("--timing", action="store_true", help="include wall time in the report")
    f.set_defaults(func=cmd_fuzz)

    b = sub.add_parser("bench", help="counter-bounded complexity benchmark")
    b.add_argument("--n", type=_int_list, default=[1000, 10000, 100000])
    b.add_argument("--s", type=_int_list, default=[128])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--timing", action="store_true", help="add a wall-time column")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fuzz" and (args.ops < 0 or args.max_depth < 1 or args.runs < 1
                                   or not 0 <= args.min_bits <= args.max_bits):
        parser.error("invalid numeric arguments")
    if args.command == "bench" and (not args.n or not args.s or min(args.n + args.s) < 1):
        parser.error("--n and --s need positive values")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
