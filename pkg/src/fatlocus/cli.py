"""``fatlocus`` command line: JSON in, JSON out.

Exit status is 0 when a result was produced (negative verdicts included), 2 on
invalid input and 3 when an internal consistency check fails.
"""
import argparse
import json
import os
import sys

from fatlocus.configuration import GENERATOR_KINDS, Configuration, CurveClass, detect_curves, generate
from fatlocus.critical import build_critical_scheme, verify_critical_scheme
from fatlocus.embedding import EmbeddingSpace, Point
from fatlocus.errors import ConsistencyError, FatlocusError, QueryError
from fatlocus.identifiability import decomposition_locus, hessian_criterion
from fatlocus.loci import (
    certify_base_curve,
    certify_contact_curve,
    classify,
    in_span_point,
    in_span_tangent,
    span_summary,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSISTENCY = 3


def _load(arg, stdin):
    """Inline JSON, ``-`` for stdin, or a file path."""
    if arg is None or arg == "-":
        text = stdin.read()
    elif arg.lstrip().startswith(("{", "[")):
        text = arg
    else:
        if not os.path.exists(arg):
            raise FatlocusError(f"no such file: {arg}")
        with open(arg) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FatlocusError(f"invalid JSON: {exc}") from None


def _config(args, stdin):
    return Configuration.from_json(_load(args.config, stdin))


def _point(space, data):
    if isinstance(data, dict):
        if "point" not in data:
            raise QueryError("query JSON needs a 'point' entry")
        data = data["point"]
    return Point.parse(space, data)


def _need(value, flag):
    if value is None:
        raise QueryError(f"{flag} is required")
    return value


def cmd_span(args, stdin):
    a = _config(args, stdin)
    return span_summary(a).to_json()


def cmd_member(args, stdin):
    a = _config(args, stdin)
    q = _point(a.space, _load(_need(args.query, "--query"), stdin))
    return {"point": in_span_point(a, q).to_json(), "tangent": in_span_tangent(a, q).to_json()}


def cmd_contact(args, stdin):
    a = _config(args, stdin)
    if args.curve is not None:
        c = CurveClass.from_json(a.space, _load(args.curve, stdin))
        return {"contact": certify_contact_curve(a, c).to_json(),
                "base": certify_base_curve(a, c).to_json()}
    q = _point(a.space, _load(_need(args.query, "--curve or --query"), stdin))
    return {"tangent": in_span_tangent(a, q).to_json()}


def cmd_lines(args, stdin):
    a = _config(args, stdin)
    return [{"curve": c.to_json(), "incidence": list(inc)} for c, inc in detect_curves(a, args.min_count)]


def cmd_classify(args, stdin):
    a = _config(args, stdin)
    reports = classify(a, args.budget, args.seed)
    return {"span": span_summary(a).to_json(),
            "reports": {k: reports[k].to_json() for k in sorted(reports)}}


def cmd_critical(args, stdin):
    a = _config(args, stdin)
    q = _point(a.space, _load(_need(args.query, "--query"), stdin))
    z = build_critical_scheme(a, q)
    return {"scheme": z.to_json(), "verification": verify_critical_scheme(z).to_json()}


def cmd_identifiable(args, stdin):
    a = _config(args, stdin)
    out = {"report": hessian_criterion(a, args.budget, args.seed).to_json()}
    if args.locus:
        out["decomposition_locus"] = decomposition_locus(a, strict=False, budget=args.budget,
                                                         seed=args.seed).to_json()
    return out


def cmd_gen(args, stdin):
    space = EmbeddingSpace.parse(args.space)
    return generate(args.kind, space, args.r, args.seed, args.height, args.factor).to_json()


def cmd_run_suites(args, stdin):
    from fatlocus.suites import SUITES, run_suite

    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(name, args.seed).to_json() for name in names]
    for res in results:
        for chk in res["checks"]:
            mark = "PASS" if chk["passed"] else "FAIL"
            print(f"{mark}  {res['suite']:<24} {chk['name']:<44} {chk['instances']:>5}", file=sys.stderr)
    out = results[0] if len(results) == 1 else {"suites": results,
                                                 "passed": all(r["passed"] for r in results)}
    failed = not all(r["passed"] for r in results)
    return out, (EXIT_CONSISTENCY if failed else EXIT_OK)


def build_parser():
    from fatlocus.suites import SUITES

    p = argparse.ArgumentParser(prog="fatlocus", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--config", help="configuration JSON: path, inline JSON or '-' (default stdin)")
        return s

    with_config("span", "rank, h0 and h1 of the span of the double points")
    s = with_config("member", "is a point (or its tangent space) in the span")
    s.add_argument("--query")
    s = with_config("contact", "tangential contact along a curve or at a point")
    s.add_argument("--curve")
    s.add_argument("--query")
    s = with_config("lines", "lines / e_i-curves through many points")
    s.add_argument("--min-count", type=int, default=2)
    for name, help_text in (("classify", "base, strong base and Terracini reports"),
                            ("identifiable", "sufficient identifiability test")):
        s = with_config(name, help_text)
        s.add_argument("--budget", type=int, default=200)
        s.add_argument("--seed", type=int, default=0)
        if name == "identifiable":
            s.add_argument("--locus", action="store_true", help="also describe the decomposition locus")
    s = with_config("critical", "critical scheme for (A, q)")
    s.add_argument("--query")
    s = sub.add_parser("gen", help="generate a structured configuration")
    s.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    s.add_argument("--space", required=True, help="veronese:n:d or sv:n1:d1,n2:d2,...")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--height", type=int, default=10)
    s.add_argument("--factor", type=int)
    s = sub.add_parser("verify-paper", help="run a named verification suite")
    s.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    s.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "span": cmd_span,
    "member": cmd_member,
    "contact": cmd_contact,
    "lines": cmd_lines,
    "classify": cmd_classify,
    "critical": cmd_critical,
    "identifiable": cmd_identifiable,
    "gen": cmd_gen,
    "verify-paper": cmd_run_suites,
}


def run(argv=None, stdin=None, stdout=None):
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        result = COMMANDS[args.command](args, stdin)
    except ConsistencyError as exc:
        print(f"fatlocus: consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (FatlocusError, ValueError, KeyError, TypeError) as exc:
        print(f"fatlocus: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code = EXIT_OK
    if isinstance(result, tuple):
        result, code = result
    stdout.write(json.dumps(result, sort_keys=True, indent=2) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
