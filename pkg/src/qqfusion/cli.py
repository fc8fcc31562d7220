"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 methods disagree, 3 internal
consistency failure (an identity that must hold did not).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cartan import FusionInput, cartan_from_name
from .evaluation import change_of_basis_is_inverse_A1, fusion_decompose_ctz, fusion_decompose_matrix
from .fermionic import MultiplicityResult, fusion_decompose_fermionic
from .qsystem import (
    check_linear_recursion_A1,
    check_minus_one,
    check_residuals,
    check_same_seed_commutation,
    check_translation_A1,
    shared_table,
)
from .scalars import QPoly, TheoremViolation

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_VIOLATION = 0, 1, 2, 3
METHODS = ("msum", "nsum", "matrix", "ctz")

NUMBERING_HELP = """\
Node numbering (Bourbaki):
  A_r  chain 1-2-...-r
  D_r  chain 1-2-...-(r-2), nodes r-1 and r both attached to r-2
  E_r  chain 1-3-4-...-r, node 2 attached to node 4
KR modules are given as --kr ALPHA:LEVEL[xCOUNT], e.g. --kr 1:2x2 is two copies
of the module with highest weight 2*omega_1.  Multiplicities are polynomials in
v = q^-1.  The environment variable QQFUSION_THREADS caps worker processes for
the fermionic sums.
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class CliRequest:
    command: str
    algebra: str = "A1"
    kr_list: list[tuple[int, int, int]] = field(default_factory=list)
    lambda_weight: Optional[tuple[int, ...]] = None
    method: str = "msum"
    k_override: Optional[int] = None
    format: str = "text"
    n_max: int = 3


def parse_kr(text: str) -> tuple[int, int, int]:
    """``"1:2x3"`` -> ``(1, 2, 3)``; the count defaults to 1."""
    try:
        head, sep, count = text.partition("x")
        alpha, level = head.split(":")
        out = (int(alpha), int(level), int(count) if sep else 1)
    except ValueError:
        raise UsageError(f"bad KR module {text!r}; expected ALPHA:LEVEL[xCOUNT]") from None
    if out[0] < 1 or out[1] < 1 or out[2] < 1:
        raise UsageError(f"bad KR module {text!r}; all fields must be positive")
    return out


def parse_weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"bad weight {text!r}; expected comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qqfusion",
        description="Graded fusion multiplicities of KR modules for simply-laced algebras.",
        epilog=NUMBERING_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, with_kr=True):
        p.add_argument("--algebra", default="A1", help="A<r>, D<r> (r>=4), E6, E7 or E8")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if with_kr:
            p.add_argument("--kr", action="append", default=[], metavar="ALPHA:LEVEL[xCOUNT]")
            p.add_argument("-k", "--k", dest="k_override", type=int, default=None, help="truncation level")

    for name, help_text in (
        ("decompose", "all components of the fusion product"),
        ("multiplicity", "graded multiplicity of one component (needs --lambda)"),
    ):
        p = sub.add_parser(name, help=help_text, epilog=NUMBERING_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        common(p)
        p.add_argument("--lambda", dest="lambda_weight", default=None, metavar="a,b,...")
        p.add_argument("--method", choices=METHODS + ("all",), default="msum")

    p = sub.add_parser("verify", help="run every applicable method and compare")
    common(p)
    p.add_argument("--lambda", dest="lambda_weight", default=None, metavar="a,b,...")

    p = sub.add_parser("qsolve", help="print the quantum Q-system solutions")
    common(p, with_kr=False)
    p.add_argument("--n-max", type=int, default=3)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    common(p, with_kr=False)
    return parser


def request_from_args(args: argparse.Namespace) -> CliRequest:
    req = CliRequest(command=args.command, algebra=args.algebra, format=args.format)
    req.kr_list = [parse_kr(x) for x in getattr(args, "kr", [])]
    if getattr(args, "lambda_weight", None):
        req.lambda_weight = parse_weight(args.lambda_weight)
    req.method = getattr(args, "method", "all" if args.command == "verify" else "msum")
    req.k_override = getattr(args, "k_override", None)
    req.n_max = getattr(args, "n_max", 3)
    return req


# rendering --------------------------------------------------------------------------

def _weight_label(ell) -> str:
    return "V[" + ",".join(str(x) for x in ell) + "]"


def render_text(result: MultiplicityResult) -> str:
    items = result.sorted_items()
    if not items:
        return "0"
    return " | ".join(f"{_weight_label(ell)}: {poly}" for ell, poly in items)


def result_to_json(result: MultiplicityResult) -> dict:
    return {
        "algebra": result.algebra,
        "v_means": "q^-1",
        "k_used": result.k_used,
        "method": result.method,
        "components": [
            {"lambda": list(ell), "coeffs": {str(e): str(c) for e, c in sorted(poly.raw_terms.items())}}
            for ell, poly in result.sorted_items()
        ],
    }


def render_json(result: MultiplicityResult) -> str:
    return json.dumps(result_to_json(result), indent=2)


def parse_json(text: str) -> MultiplicityResult:
    data = json.loads(text)
    entries = {
        tuple(comp["lambda"]): QPoly({int(e): int(c) for e, c in comp["coeffs"].items()})
        for comp in data["components"]
    }
    return MultiplicityResult(data["algebra"], entries, method=data["method"], k_used=int(data["k_used"]))


# dispatch ---------------------------------------------------------------------------

def _fusion_input(req: CliRequest) -> FusionInput:
    try:
        cartan = cartan_from_name(req.algebra)
        counts = [((a, i), c) for a, i, c in req.kr_list]
        return FusionInput(cartan, tuple(counts), lambda_weight=req.lambda_weight, k=req.k_override)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def applicable_methods(fi: FusionInput) -> list[str]:
    return list(METHODS) if fi.cartan.name == "A1" else ["msum", "nsum", "matrix"]


def compute(fi: FusionInput, method: str) -> MultiplicityResult:
    if method in ("msum", "nsum"):
        return fusion_decompose_fermionic(fi, method, k=fi.k)
    if method == "matrix":
        return fusion_decompose_matrix(fi)
    if method == "ctz":
        if fi.cartan.name != "A1":
            raise UsageError("method ctz is only available for A1")
        return fusion_decompose_ctz(fi)
    raise UsageError(f"unknown method {method}")


def _diff_report(results: dict[str, MultiplicityResult]) -> list[str]:
    names = list(results)
    ref = results[names[0]]
    lines = []
    weights = sorted(set().union(*(r.entries for r in results.values())), reverse=True)
    for ell in weights:
        vals = {n: results[n].entries.get(ell, QPoly()) for n in names}
        if len(set(vals.values())) > 1:
            lines.append(f"{_weight_label(ell)}: " + ", ".join(f"{n}={v}" for n, v in vals.items()))
    if not lines and any(r != ref for r in results.values()):
        lines.append("results differ")
    return lines


def _run_fusion(req: CliRequest, out) -> int:
    fi = _fusion_input(req)
    if req.command == "multiplicity" and fi.lambda_weight is None:
        raise UsageError("multiplicity needs --lambda")
    if req.command == "verify" or req.method == "all":
        methods = applicable_methods(fi)
    else:
        methods = [req.method]
    results = {m: compute(fi, m) for m in methods}
    first = results[methods[0]]
    agree = all(r == first for r in results.values())

    if req.format == "json":
        payload = result_to_json(first)
        if len(methods) > 1:
            payload["method"] = "all" if agree else first.method
            payload["methods_agree"] = agree
            payload["methods"] = methods
        print(json.dumps(payload, indent=2), file=out)
    elif req.command == "multiplicity":
        print(str(first.entries.get(fi.lambda_weight, QPoly())), file=out)
    else:
        print(render_text(first), file=out)

    if len(methods) > 1:
        if agree:
            if req.format == "text":
                print(f"({', '.join(methods)} agree)", file=out)
        else:
            for line in _diff_report(results):
                print(f"MISMATCH {line}", file=sys.stderr)
            return EXIT_MISMATCH
    return EXIT_OK


def _run_qsolve(req: CliRequest, out) -> int:
    if req.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    try:
        cartan = cartan_from_name(req.algebra)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = shared_table(cartan, req.n_max)
    keys = [(a, n) for n in range(-1, req.n_max + 1) for a in range(1, cartan.rank + 1)]
    if req.format == "json":
        payload = {
            "algebra": cartan.name,
            "entries": [{"alpha": a, "n": n, "value": str(table[(a, n)])} for a, n in keys],
        }
        print(json.dumps(payload, indent=2), file=out)
    else:
        for a, n in keys:
            print(f"Q[{a},{n}] = {table[(a, n)]}", file=out)
    return EXIT_OK


def _run_selftest(req: CliRequest, out) -> int:
    try:
        cartan = cartan_from_name(req.algebra)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    n_max = 4 if cartan.rank <= 2 else 3
    table = shared_table(cartan, n_max)
    reports = [check_residuals(table), check_same_seed_commutation(table), check_minus_one(table)]
    if cartan.name == "A1":
        reports += [check_linear_recursion_A1(table), check_translation_A1(table)]
    lines = [str(r) for r in reports]
    ok = all(r.ok for r in reports)
    if cartan.name == "A1":
        inv = change_of_basis_is_inverse_A1(8)
        lines.append(f"change of basis inverse: {'ok' if inv else 'FAILED'}")
        ok = ok and inv

    # route agreement on a small input
    fi = FusionInput(cartan, (((1, 1), 2),) + ((((cartan.rank, 1), 1),) if cartan.rank > 1 else ()))
    results = {m: compute(fi, m) for m in applicable_methods(fi)}
    agree = len({tuple(sorted(r.entries.items())) for r in results.values()}) == 1
    lines.append(f"route agreement on {fi.counts}: {'ok' if agree else 'FAILED'}")
    ok = ok and agree

    if req.format == "json":
        print(json.dumps({"algebra": cartan.name, "ok": ok, "checks": lines}, indent=2), file=out)
    else:
        print("\n".join(lines), file=out)
    return EXIT_OK if ok else EXIT_VIOLATION


def run(req: CliRequest, out=None) -> int:
    out = out or sys.stdout
    if req.command in ("decompose", "multiplicity", "verify"):
        return _run_fusion(req, out)
    if req.command == "qsolve":
        return _run_qsolve(req, out)
    if req.command == "selftest":
        return _run_selftest(req, out)
    raise UsageError(f"unknown command {req.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(request_from_args(args))
    except UsageError as exc:
        print(f"qqfusion: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TheoremViolation as exc:
        print(f"qqfusion: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
