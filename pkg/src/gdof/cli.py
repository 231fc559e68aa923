"""Command-line front end.

Every command reads a network file (or ``-`` for stdin) and prints either a
human-readable summary or, with ``--json``, a report object
``{"command", "input_digest", "results", "timing_ms"}``.  Exit codes: 0 ok,
2 parse or validation error, 3 regime refusal, 4 property or verification
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from typing import Callable, Sequence

from . import bc, generators, schemes, theorems
from .cycles import Cycle, parse_cycle, parse_partition
from .errors import GdofError, RegimeError
from .network import ChannelMatrix, classify, format_rational, parse_network
from .tin import ptin_sum, solve_lp1, tina_sum, tina_sum_oracle

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_PROPERTY = 0, 2, 3, 4

# JSON keys holding exact rationals that get a decimal twin under --decimal
_NUMERIC_KEYS = {"value", "upper", "lower", "tina", "total", "final_delta", "chain_bound",
                 "observed_max"}


class CommandFailed(Exception):
    """Carries a finished result together with a nonzero exit code."""

    def __init__(self, code: int, results, text: str):
        super().__init__(text)
        self.code = code
        self.results = results
        self.text = text


# bytes read during the current run, so stdin is consumed once and digests
# describe exactly what was parsed
_inputs: dict[str, bytes] = {}


def _read(path: str) -> bytes:
    if path not in _inputs:
        if path == "-":
            _inputs[path] = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as f:
                _inputs[path] = f.read()
    return _inputs[path]


def _load(path: str) -> tuple[ChannelMatrix, bytes]:
    data = _read(path)
    return parse_network(data), data


def _users(text: str) -> list[int]:
    try:
        users = [int(x) for x in text.replace(" ", "").strip("{}").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a user list: {text!r}") from None
    if not users:
        raise argparse.ArgumentTypeError("user list is empty")
    return users


def _annotate(obj):
    """Add ``<key>_decimal`` next to every exact rational under a numeric key."""
    if isinstance(obj, list):
        return [_annotate(x) for x in obj]
    if not isinstance(obj, dict):
        return obj
    out = {}
    for k, v in obj.items():
        out[k] = _annotate(v)
        if k in _NUMERIC_KEYS and isinstance(v, str):
            try:
                out[f"{k}_decimal"] = format_rational(Fraction(v), True).split("≈")[1].rstrip(")")
            except ValueError:
                pass
    return out


# commands: each returns (results, text) or raises CommandFailed

def cmd_classify(args, fmt):
    m, _ = _load(args.network)
    r = classify(m)
    return r.to_json(), r.render()


def cmd_sum(args, fmt):
    m, _ = _load(args.network)
    if args.subset:
        S = args.subset
        r = ptin_sum(m, S)
        results = {"subset": sorted(set(S)), **r.to_json()}
        lines = [f"P-TIN(S={{{','.join(map(str, sorted(set(S))))}}}) = {fmt(r.value)} "
                 f"via {r.partition}" + ("" if r.sls_certified else "  [upper bound: not SLS]")]
        if args.oracle:
            sol = solve_lp1(m, S)
            results["oracle"] = {"value": str(sol.value),
                                 "point": {str(k): str(v) for k, v in sorted(sol.point.d.items())}}
            lines.append(f"simplex oracle = {fmt(sol.value)} at d = "
                         + ", ".join(f"d{k}={v}" for k, v in sorted(sol.point.d.items())))
        return results, "\n".join(lines)
    if args.oracle:
        r = tina_sum_oracle(m)
        results = {"tina": str(r.value), "best_subset": list(r.best_subset), "method": "oracle"}
        return results, f"TINA = {fmt(r.value)} via S={{{','.join(map(str, r.best_subset))}}} (simplex oracle)"
    r = tina_sum(m)
    results = {"tina": str(r.value), **r.to_json()}
    return results, (f"TINA = {fmt(r.value)} via {r.result.partition} "
                     f"on S={{{','.join(map(str, r.best_subset))}}}")


def _render_bound(rep: bc.BcBoundReport, fmt) -> str:
    lines = [f"BC sum-GDoF <= {fmt(rep.value)}  (method {rep.method}, witness {rep.witness})"]
    for s in rep.trace:
        lines.append(f"  stage {s.index}: S={{{','.join(map(str, s.S))}}} partition {s.partition} "
                     f"N={s.N} combined {s.combined}")
    if "chain_bound" in rep.extras:
        lines.append(f"  TINA {fmt(rep.extras['tina'])}, stages {rep.extras['Lambda']}, "
                     f"chain constant {fmt(rep.extras['chain_bound'])}")
    return "\n".join(lines)


def cmd_bound(args, fmt):
    m, _ = _load(args.network)
    method = args.method
    if method == "cycle":
        c = parse_cycle(args.cycle) if args.cycle else Cycle(tuple(range(1, m.K + 1)))
        rep = bc.BcBoundReport(bc.bc_cycle_bound(m, c), "cycle", c)
    elif method == "partition":
        p = parse_partition(args.partition) if args.partition else None
        if p is None:
            bc.require_sls(m)
            p = bc.p_optimal_partition(m, range(1, m.K + 1))
        rep = bc.BcBoundReport(bc.bc_partition_bound(m, p), "partition", p)
    elif method == "iterative":
        rep = bc.iterative_bound(m)
    else:
        rep = bc.bc_sum_upper(m)
    return rep.to_json(), _render_bound(rep, fmt)


def cmd_ratio(args, fmt):
    m, _ = _load(args.network)
    scheme = None
    if args.scheme:
        scheme = schemes.LayeredScheme.loads(_read(args.scheme))
    r = bc.ratio_report(m, scheme)
    results = r.to_json()
    lines = [f"TINA = {fmt(r.tina)}", f"BC upper bound = {fmt(r.bc_upper.value)} ({r.bc_upper.method})",
             f"ratio upper = {fmt(r.upper)}"]
    if r.lower is not None:
        lines.append(f"ratio lower = {fmt(r.lower)} (scheme total {fmt(r.verified_total)})")
    if scheme is not None and r.lower is None:
        verdict = schemes.verify_scheme(m, scheme)
        results["scheme"] = verdict.to_json()
        lines.append(_render_failures(verdict, fmt))
        raise CommandFailed(EXIT_PROPERTY, results, "\n".join(lines))
    return results, "\n".join(lines)


def _render_failures(verdict: schemes.SchemeVerdict, fmt) -> str:
    out = []
    for r in verdict.receivers:
        f = r.failed
        if f is not None:
            out.append(f"scheme fails at receiver {r.receiver}, step {len(r.steps)} ({f.message}): "
                       f"needs {fmt(f.gdof)} but level {fmt(f.level)} - floor {fmt(f.floor)} "
                       f"leaves slack {fmt(f.slack)}")
    return "\n".join(out)


def cmd_scheme_verify(args, fmt):
    m, _ = _load(args.network)
    s = schemes.LayeredScheme.loads(_read(args.scheme))
    v = schemes.verify_scheme(m, s)
    lines = []
    for r in v.receivers:
        steps = " → ".join(f"{st.message}[{fmt(st.slack)}]" for st in r.steps) or "(nothing)"
        lines.append(f"receiver {r.receiver}: {'ok' if r.ok else 'FAIL'}  {steps}")
    lines.append(f"verified sum-GDoF = {fmt(v.total)}")
    if not v.ok:
        lines.append(_render_failures(v, fmt))
        raise CommandFailed(EXIT_PROPERTY, v.to_json(), "\n".join(lines))
    return v.to_json(), "\n".join(lines)


_FAMILIES: dict[str, Callable] = {
    "symmetric": lambda a: generators.symmetric_network(a.K, a.a),
    "cyclic": lambda a: generators.ctin_cyclic_network(a.K),
    "tree": lambda a: generators.tree_network(a.n, a.nu),
    "fig1": lambda a: generators.fig1_network(),
    "half-cross": lambda a: generators.half_cross_network(a.K),
    "random": lambda a: generators.random_in_regime(a.K, a.regime, a.seed),
    "scheme-ctin": lambda a: schemes.ctin_bc_scheme(a.K),
    "scheme-tree": lambda a: schemes.tree_bc_scheme(a.n),
    "scheme-symmetric": lambda a: schemes.symmetric_bc_scheme(a.K, a.a),
}


def cmd_gen(args, fmt):
    obj = _FAMILIES[args.family](args)
    return obj.to_json(), None


def _ks(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if any(k < 2 or k > 8 for k in out):
        raise argparse.ArgumentTypeError("K must lie in 2..8")
    return out


def cmd_verify_theorems(args, fmt):
    results = theorems.run_suites(args.K, args.samples, args.seed, only=args.suite or None)
    payload = {"K": args.K, "samples": args.samples, "seed": args.seed,
               "suites": [r.to_json() for r in results]}
    text = theorems.summary_table(results)
    failed = [r for r in results if not r.ok]
    if failed:
        lines = [text, ""]
        for r in failed:
            f = r.failures[0]
            lines.append(f"{r.name} (K={r.K}) failed: {f.message}")
            if f.matrix is not None:
                lines.append(json.dumps(f.matrix.to_json(), ensure_ascii=False))
        raise CommandFailed(EXIT_PROPERTY, payload, "\n".join(lines))
    return payload, text


def build_parser() -> argparse.ArgumentParser:
    def flags(default):
        # the subcommand copies use SUPPRESS so they never reset a flag given
        # before the subcommand name
        f = argparse.ArgumentParser(add_help=False)
        f.add_argument("--json", action="store_true", default=default, help="print a JSON report")
        f.add_argument("--decimal", action="store_true", default=default,
                       help="annotate exact values with a 6-digit decimal")
        return f

    common = flags(argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="gdof", description=__doc__.splitlines()[0],
                                parents=[flags(False)])
    sub = p.add_subparsers(dest="command", required=True)

    def net(name, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("network", help="network JSON file, or - for stdin")
        return sp

    net("classify", "regime membership with witnesses").set_defaults(fn=cmd_classify)

    sp = net("sum", "polyhedral-TIN or TINA sum-GDoF")
    sp.add_argument("--subset", type=_users, help="users, e.g. 1,2,3 (default: TINA over all subsets)")
    sp.add_argument("--oracle", action="store_true", help="also solve the LP by exact simplex")
    sp.set_defaults(fn=cmd_sum)

    sp = net("bound", "BC sum-GDoF upper bound")
    sp.add_argument("--method", choices=("cycle", "partition", "iterative", "auto"), default="auto")
    sp.add_argument("--cycle", help='cycle for --method cycle, e.g. "(1→2→3)" or "(1->2->3)"')
    sp.add_argument("--partition", help='partition for --method partition, e.g. "{(1),(2→3)}"')
    sp.set_defaults(fn=cmd_bound)

    sp = net("ratio", "bracket BC/TINA for one network")
    sp.add_argument("--scheme", help="layered scheme JSON giving the lower end")
    sp.set_defaults(fn=cmd_ratio)

    sp = net("scheme-verify", "successive-decoding check of a layered scheme")
    sp.add_argument("scheme", help="scheme JSON file")
    sp.set_defaults(fn=cmd_scheme_verify)

    sp = sub.add_parser("gen", help="emit a network or scheme JSON", parents=[common])
    sp.add_argument("family", choices=sorted(_FAMILIES))
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--a", type=Fraction, default=Fraction(1, 2))
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--nu", type=Fraction, default=Fraction(1))
    sp.add_argument("--regime", choices=generators.REGIMES, default="SLS")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", help="write to a file instead of stdout")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("verify-theorems", help="run the property suites", parents=[common])
    sp.add_argument("--K", type=_ks, default=[2, 3, 4, 5, 6], help="K values, e.g. 4 or 2-6 or 2,4")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--suite", action="append", choices=[n for n, _ in theorems.SUITES],
                    help="run only this suite (repeatable)")
    sp.set_defaults(fn=cmd_verify_theorems)
    return p


def _digest(args) -> str | None:
    data = _inputs.get(getattr(args, "network", None))
    return None if data is None else hashlib.sha256(data).hexdigest()


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK

    def fmt(x):
        return format_rational(x, args.decimal)

    _inputs.clear()
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        results, text = args.fn(args, fmt)
    except CommandFailed as e:
        code, results, text = e.code, e.results, e.text
    except RegimeError as e:
        code, results = EXIT_REGIME, {"error": str(e), "regime": None if e.report is None else e.report.to_json()}
        text = f"refused: {e}"
    except (GdofError, ValueError, OSError) as e:
        code, results, text = EXIT_INPUT, {"error": str(e)}, f"error: {e}"
    elapsed = int((time.perf_counter() - t0) * 1000)

    if args.command == "gen" and code == EXIT_OK:
        body = json.dumps(results, ensure_ascii=False, indent=None)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as f:
                f.write(body + "\n")
        else:
            print(body)
        return code

    if args.json:
        report = {"command": ["gdof", *argv], "input_digest": _digest(args),
                  "results": _annotate(results) if args.decimal else results,
                  "timing_ms": elapsed}
        print(json.dumps(report, ensure_ascii=False))
    else:
        out = sys.stdout if code in (EXIT_OK, EXIT_PROPERTY) else sys.stderr
        print(text, file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
