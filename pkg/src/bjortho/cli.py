"""Command line: ``bjortho check | verify | examples``.

Exit status: 0 success or asserted verdict matched, 1 mismatch or failed
experiment, 2 inconclusive verdict, 3 bad input or any other error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from bjortho.errors import BJError
from bjortho.problem import ProblemError, decision_inputs, load_problem, solve
from bjortho.verdict import Decision, Verdict, validate_verdict
from bjortho.verify import run_experiments, worked_examples

EXIT_OK, EXIT_MISMATCH, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which collides with "inconclusive"
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bjortho", description="Birkhoff-James orthogonality decisions and experiments.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("check", help="decide one problem file")
    c.add_argument("path", help="problem file (YAML or JSON)")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--assert-orthogonal", action="store_true", help="exit 1 unless orthogonal")
    g.add_argument("--assert-not", action="store_true", help="exit 1 unless not orthogonal")
    c.add_argument("--certificate", choices=("json",), help="print only the certificate as JSON")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--method", choices=("auto", "generic"), default="auto",
                   help="auto picks the space-specific criterion; generic minimises directly")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", help="run the experiment suite")
    v.add_argument("--filter", default=None, help="substring of experiment names")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=None, help="override trial counts (fixtures always run)")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--list", action="store_true", help="list experiment names and exit")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("examples", help="expected-vs-observed table for the worked examples")
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.set_defaults(func=cmd_examples)
    return ap


# ---------------------------------------------------------------------------
# check


def format_verdict(v: Verdict, cert_ok: bool, problems: list) -> str:
    lines = [
        f"decision: {v.decision.value}",
        f"method: {v.method}",
        f"margin: {v.margin!r} ({v.margin_kind})",
    ]
    tol = " ".join(f"{k}={val!r}" for k, val in v.tolerances_used.items())
    lines.append(f"tolerances: {tol}")
    if v.certificate is None:
        lines.append("certificate: none")
    else:
        cd = v.certificate.to_dict()
        lines.append(f"certificate: {cd.pop('kind')}")
        for k, val in cd.items():
            lines.append(f"  {k}: {json.dumps(val)}")
    lines.append(f"certificate check: {'ok' if cert_ok else 'FAILED'}")
    lines += [f"  {p}" for p in problems]
    for key in ("hull_vertices", "separating_normal", "attainment_set"):
        if key in v.details:
            lines.append(f"{key}: {json.dumps(v.to_dict()['details'][key])}")
    return "\n".join(lines)


def cmd_check(args) -> int:
    pb = load_problem(args.path)
    verdict = solve(pb, method=args.method, seed=args.seed)
    x, y = decision_inputs(pb)
    check = validate_verdict(verdict, x, y)
    if args.certificate == "json":
        cert = None if verdict.certificate is None else verdict.certificate.to_dict()
        print(json.dumps(cert, sort_keys=True))
    elif args.format == "json":
        doc = verdict.to_dict()
        doc["certificate_valid"] = check.ok
        doc["certificate_problems"] = check.problems
        print(json.dumps(doc, sort_keys=True))
    else:
        print(format_verdict(verdict, check.ok, check.problems))
    return check_status(verdict.decision, args.assert_orthogonal, args.assert_not)


def check_status(decision: Decision, want_orth: bool, want_not: bool) -> int:
    if decision is Decision.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    if want_orth:
        return EXIT_OK if decision is Decision.ORTHOGONAL else EXIT_MISMATCH
    if want_not:
        return EXIT_OK if decision is Decision.NOT_ORTHOGONAL else EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify / examples


def cmd_verify(args) -> int:
    from bjortho.verify import select

    if args.list:
        for e in select(args.filter):
            print(f"{e.name} (default trials {e.default_trials})")
        return EXIT_OK
    if args.trials is not None and args.trials < 0:
        raise UsageError("--trials must be >= 0")
    try:
        reports = run_experiments(args.filter, seed=args.seed, trials=args.trials)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    ok = all(r.ok for r in reports)
    if args.format == "json":
        print(json.dumps({"ok": ok, "reports": [r.to_dict() for r in reports]}, sort_keys=True))
    else:
        for r in reports:
            print(r.to_text())
        print(f"{sum(r.ok for r in reports)}/{len(reports)} experiments passed")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_examples(args) -> int:
    rows = worked_examples()
    if args.format == "json":
        keys = ("example", "quantity", "expected", "observed", "passed")
        print(json.dumps([dict(zip(keys, r)) for r in rows], sort_keys=True))
    else:
        head = ("example", "quantity", "expected", "observed", "")
        widths = [max(len(str(r[i])) for r in rows + [head]) for i in range(4)]
        fmt = lambda r: "  ".join(str(c).ljust(w) for c, w in zip(r[:4], widths)) + ("  " + r[4]).rstrip()
        print(fmt(head))
        print("  ".join("-" * w for w in widths))
        for r in rows:
            print(fmt(r[:4] + ("ok" if r[4] else "MISMATCH",)))
    return EXIT_OK if all(r[4] for r in rows) else EXIT_MISMATCH


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"bjortho: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ProblemError as exc:
        print(f"bjortho: invalid problem file: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (BJError, OSError, ValueError) as exc:
        print(f"bjortho: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # the exit-status contract covers every failure
        print(f"bjortho: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
