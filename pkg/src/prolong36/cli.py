"""Command-line front end.

    prolong36 growth  DOC [--at POINT|random] [--seed N] [--max-depth K]
    prolong36 prolong DOC --kind KIND [--then KIND ...] [--out FILE]
    prolong36 check   DOC --structure {b3-23,b3-123,b3-13,b3-13-strict}
    prolong36 svc     DOC --claim NAME
    prolong36 model   --name {F123,F23,F13,F3,example} [--m POLY]
    prolong36 golden  --dir DIR [--update]

Every command prints one report; ``--json`` prints it as byte-stable JSON.
Exit status: 0 pass, 1 certificate or claim failure, 2 input error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import io
import os
import random
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from typing import Any, Sequence

from . import errors as E
from .document import DistributionDocument, document_from, dump_json, load_document
from .flags import derived_flag, growth_at_point
from .hamiltonian import CLAIMS, verify_tangency_claim
from .models import MODEL_NAMES, build_example_family, build_model, check_bracket_table, gradation_algebra
from .prolongation import ProlongationResult, prolong_dual, prolong_fiber_line, prolong_projective, prolong_svc_cone
from .structures import check_b3_13, check_b3_23, check_b3_123
from .towers import routes_coincide

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

KINDS = ("projective", "fiber-line", "dual", "svc-cone")
STRUCTURES = ("b3-23", "b3-123", "b3-13", "b3-13-strict")

# errors caused by the input rather than by the engine
_INPUT_ERRORS = (
    E.DocumentError,
    E.ScalarParseError,
    E.UnknownModel,
    E.UnknownClaim,
    E.UnknownCoordinate,
    E.GrowthMismatch,
    E.RankMismatch,
    E.ChartMismatch,
    E.DependentFrame,
    E.PoleAtPoint,
    E.IncompleteValuation,
    E.ConstantM,
)


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 2 through our own path
        raise _Usage(message)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the raw JSON report")
    p = _Parser(prog="prolong36", description="Flags, prolongations and B3 structures of (3,6)-distributions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("growth", parents=[common], help="growth vector of a distribution")
    g.add_argument("document")
    g.add_argument("--at", help="'random' or comma-separated name=value pairs")
    g.add_argument("--seed", type=int, default=0, help="seed for --at random")
    g.add_argument("--max-depth", type=int, default=None)

    pr = sub.add_parser("prolong", parents=[common], help="prolong a (3,6)-distribution")
    pr.add_argument("document")
    pr.add_argument("--kind", required=True, choices=KINDS)
    pr.add_argument("--then", action="append", default=[], choices=KINDS)
    pr.add_argument("--out", help="write the prolonged document here")

    c = sub.add_parser("check", parents=[common], help="structure certificate for a split distribution")
    c.add_argument("document")
    c.add_argument("--structure", required=True, choices=STRUCTURES)

    s = sub.add_parser("svc", parents=[common], help="singular velocity cone tangency claims")
    s.add_argument("document")
    s.add_argument("--claim", required=True)

    m = sub.add_parser("model", parents=[common], help="emit a null-flag model or the example family")
    m.add_argument("--name", required=True)
    m.add_argument("--m", default="formal", help="'formal' or a polynomial in x6 (example only)")

    gd = sub.add_parser("golden", parents=[common], help="regenerate or compare golden reports")
    gd.add_argument("--dir", required=True)
    gd.add_argument("--update", action="store_true")
    return p


# ---------------------------------------------------------------------------
# rendering


def _render(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return lines
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return [pad + ", ".join(_scalar(v) for v in value)]
        lines = []
        for v in value:
            sub = _render(v, indent + 1)
            if sub:
                sub[0] = pad + "- " + sub[0].lstrip()
            lines.extend(sub)
        return lines
    return [pad + _scalar(value)]


def _scalar(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(dump_json(report))
        return
    head = report["command"]
    print(f"== {head['name']} ==")
    for line in _render(report["results"]):
        print(line)
    print(f"status: {'PASS' if report['passed'] else 'FAIL'}")


def _report(name: str, options: dict, doc: DistributionDocument | None, results: dict, passed: bool) -> dict:
    out: dict[str, Any] = {"command": {"name": name, "options": options}}
    if doc is not None:
        out.update(doc.to_dict())
    out["results"] = results
    out["passed"] = passed
    return out


# ---------------------------------------------------------------------------
# commands


def _point(spec: str, names: Sequence[str], seed: int) -> dict[str, Fraction]:
    if spec == "random":
        rng = random.Random(seed)
        out = {}
        for n in names:
            num = rng.choice([k for k in range(-9, 10) if k])
            out[n] = Fraction(num, rng.randint(1, 5))
        return out
    out = {}
    for part in spec.split(","):
        if "=" not in part:
            raise E.DocumentError(f"bad --at entry {part!r}; expected name=value")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise E.DocumentError(f"bad value {v!r} for {k.strip()}") from None
    return out


def cmd_growth(args) -> tuple[dict, int]:
    doc = load_document(args.document)
    D = doc.distribution
    report = derived_flag(D, args.max_depth)
    results: dict[str, Any] = {"growth": report.growth, "rank": D.rank, "dim": D.dim}
    point = doc.points
    if args.at is not None:
        names = sorted({n for level in report.all_brackets for v in level for n in v.names()} | set(D.chart.coordinates))
        point = _point(args.at, names, args.seed)
    if point is not None:
        results["point"] = {k: str(v) for k, v in sorted(point.items())}
        results["growth_at_point"] = growth_at_point(D, point, point, args.max_depth)
    passed = True
    expected = doc.expect.get("growth")
    if expected is not None:
        results["expected_growth"] = list(expected)
        passed = list(expected) == report.growth
    opts = {"at": args.at, "seed": args.seed if args.at == "random" else None, "max_depth": args.max_depth}
    return _report("growth", opts, doc, results, passed), EXIT_PASS if passed else EXIT_FAIL


def _stage(result: ProlongationResult) -> dict:
    out: dict[str, Any] = {
        "kind": result.kind.replace("_", "-"),
        "new_coordinates": list(result.chart_extension),
        "solved": {k: str(v) for k, v in result.solved_coefficients.items()},
        "growth": list(result.growth),
        "certificate": result.certificate.to_dict() if result.certificate else None,
    }
    if result.criterion is not None:
        out["cone_criterion"] = result.criterion.to_dict()
    return out


def cmd_prolong(args) -> tuple[dict, int]:
    doc = load_document(args.document)
    D = doc.distribution
    kinds = [args.kind] + list(args.then)
    stages: list[ProlongationResult] = []
    extra: dict[str, Any] = {}
    for kind in kinds:
        prev = stages[-1] if stages else None
        if kind == "projective" and prev is None:
            stages.append(prolong_projective(D))
        elif kind == "dual" and prev is None:
            stages.append(prolong_dual(D))
        elif kind == "fiber-line" and prev is not None and prev.kind == "projective":
            stages.append(prolong_fiber_line(prev))
        elif kind == "svc-cone" and prev is not None and prev.kind == "dual":
            cone = prolong_svc_cone(prev)
            stages.append(cone)
            fiber = prolong_fiber_line(prolong_projective(prev.base))
            comparison = routes_coincide(fiber, cone)
            extra["coincides with projective->fiber-line"] = comparison.coincide
            extra["route_comparison"] = comparison.to_dict()
        else:
            after = f"after {prev.kind.replace('_', '-')}" if prev else "as the first step"
            raise E.DocumentError(
                f"--kind {kind} cannot run {after}; chains are projective -> fiber-line and dual -> svc-cone"
            )
    last = stages[-1]
    out_doc = document_from(last.distribution, last.splitting, {"growth": list(last.growth)})
    results: dict[str, Any] = {"stages": [_stage(s) for s in stages]}
    results.update(extra)
    passed = all(s.certificate is None or s.certificate.overall for s in stages)
    if "coincides with projective->fiber-line" in extra:
        passed = passed and extra["coincides with projective->fiber-line"]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out_doc.dumps())
        results["written"] = os.path.basename(args.out)
    opts = {"kind": args.kind, "then": list(args.then)}
    return _report("prolong", opts, out_doc, results, passed), EXIT_PASS if passed else EXIT_FAIL


def cmd_check(args) -> tuple[dict, int]:
    doc = load_document(args.document)
    split = doc.split()
    if split is None:
        raise E.DocumentError("check needs a 'splitting' block")
    D = split.distribution
    if args.structure == "b3-23":
        cert = check_b3_23(D, split)
    elif args.structure == "b3-123":
        cert = check_b3_123(D, split)
    else:
        mode = "strict" if args.structure.endswith("strict") else "generalized"
        cert = check_b3_13(D, split, mode)
    results = cert.to_dict()
    fail = cert.first_failure
    if fail is not None:
        results["first_failure"] = fail.to_dict()
    return _report("check", {"structure": args.structure}, doc, results, cert.overall), (
        EXIT_PASS if cert.overall else EXIT_FAIL
    )


def cmd_svc(args) -> tuple[dict, int]:
    if args.claim not in CLAIMS:
        raise E.UnknownClaim(f"unknown claim {args.claim!r}; known: {', '.join(CLAIMS)}")
    doc = load_document(args.document)
    obj = doc.split() or doc.distribution
    try:
        report = verify_tangency_claim(args.claim, obj, strict=False)
    except E.ClaimFailed as exc:
        results = {"claim": args.claim, "passed": False, "error": str(exc), "residue": exc.residue}
        return _report("svc", {"claim": args.claim}, doc, results, False), EXIT_FAIL
    return _report("svc", {"claim": args.claim}, doc, report.to_dict(), report.passed), (
        EXIT_PASS if report.passed else EXIT_FAIL
    )


def _model_results(name: str) -> tuple[DistributionDocument, dict, bool]:
    M = build_model(name)
    growth = derived_flag(M.distribution).growth
    named = M.corrected_named or M.named
    table = M.corrected_table or M.table
    printed = check_bracket_table(M.named, M.table)
    engine = check_bracket_table(named, table)
    grad = gradation_algebra(M)
    expect = {
        "model": name,
        "growth": list(M.growth),
        "named_fields": [v.to_literal() for v in named],
        "bracket_table": [str(r) for r in table],
    }
    results = {
        "free_coordinates": list(M.free),
        "solved_entries": {k: str(v) for k, v in M.solved.items()},
        "nullity_zero": all(v.is_zero() for v in M.nullity_residues().values()),
        "constraints_match_printed": all(M.constraints[k] == M.printed_constraints[k] for k in M.constraints),
        "pfaff_system": [f.to_literal() for f in M.pfaff],
        "pfaff_matches_printed": M.pfaff_matches_printed(),
        "frame_matches_printed": M.frame_matches_printed(),
        "growth": growth,
        "bracket_table": [c.to_dict() for c in engine],
        "printed_table_mismatches": [str(c.relation) for c in printed if not c.passed],
        "gradation": [str(grad.relation(r.i, r.j)) for r in table],
    }
    ok = (
        results["nullity_zero"]
        and results["constraints_match_printed"]
        and results["pfaff_matches_printed"]
        and results["frame_matches_printed"]
        and growth == list(M.growth)
        and all(c.passed for c in engine)
    )
    return document_from(M.distribution, M.splitting, expect), results, ok


def cmd_model(args) -> tuple[dict, int]:
    if args.name == "example":
        D = build_example_family(args.m)
        growth = derived_flag(D).growth
        doc = document_from(D, None, {"model": "example", "growth": [3, 6]})
        results = {"m": args.m, "growth": growth}
        ok = growth == [3, 6]
    elif args.name in MODEL_NAMES:
        doc, results, ok = _model_results(args.name)
    else:
        raise E.UnknownModel(f"unknown model {args.name!r}; choose from {', '.join(MODEL_NAMES + ('example',))}")
    if not ok:
        raise E.Inconsistent(f"model {args.name} failed its own construction checks")
    return _report("model", {"name": args.name}, doc, results, True), EXIT_PASS


GOLDEN_CASES: tuple[tuple[str, tuple[str, ...]], ...] = tuple(
    (f"model_{n}", ("model", "--name", n, "--json")) for n in MODEL_NAMES + ("example",)
)


def cmd_golden(args) -> tuple[dict, int]:
    if args.update:
        os.makedirs(args.dir, exist_ok=True)
    outcomes = {}
    for name, argv in GOLDEN_CASES:
        status, text = run(list(argv))
        path = os.path.join(args.dir, f"{name}.json")
        if args.update:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            outcomes[name] = "written"
            continue
        try:
            with open(path, encoding="utf-8") as fh:
                expected = fh.read()
        except OSError:
            outcomes[name] = "missing"
            continue
        outcomes[name] = "match" if expected == text and status == EXIT_PASS else "differs"
    passed = all(v in ("match", "written") for v in outcomes.values())
    return _report("golden", {"update": args.update}, None, outcomes, passed), EXIT_PASS if passed else EXIT_FAIL


COMMANDS = {
    "growth": cmd_growth,
    "prolong": cmd_prolong,
    "check": cmd_check,
    "svc": cmd_svc,
    "model": cmd_model,
    "golden": cmd_golden,
}


def _dispatch(argv: Sequence[str]) -> int:
    try:
        args = _parser().parse_args(list(argv))
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report, status = COMMANDS[args.command](args)
    except _INPUT_ERRORS as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except E.Prolong36Error as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args.json)
    return status


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Run a command and capture its standard output."""
    buf = io.StringIO()
    with redirect_stdout(buf):
        status = _dispatch(argv)
    return status, buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    return _dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
