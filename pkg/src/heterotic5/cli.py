"""Command-line front end.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on parse or usage errors, 3 on internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from heterotic5.connection import (
    curvature,
    curvature_table,
    instanton_connection,
    levi_civita,
    pontrjagin_P,
    render_table,
    with_torsion,
)
from heterotic5.exterior import render_form
from heterotic5.heterotic import (
    AnomalyError,
    Report,
    anomaly_solve,
    classify_probe,
    cylinder_checks,
    full_report,
    identity_suite,
    motion_check,
    parallel_check,
)
from heterotic5.liealg import DSLError, jacobi_check, load_algebra
from heterotic5.ring import RingError, parse_ring
from heterotic5._expr import ExprError
from heterotic5.su2 import Check, HeteroticBackground, SU2Structure, instanton_check, structure_check, susy_check

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3
CHECK_GROUPS = ("jacobi", "structure", "susy", "instanton", "parallel", "identities", "cylinder", "all")


class UsageError(Exception):
    pass


def _load(path: str):
    p = Path(path)
    if not p.exists():
        bundled = resources.files("heterotic5") / "data" / p.name
        if bundled.is_file():
            p = Path(str(bundled))
        else:
            raise UsageError(f"{path}: no such file")
    return load_algebra(p)


def _triple(text: str):
    parts = [x.strip() for x in text.split(",")]
    if len(parts) != 3 or not all(parts):
        raise UsageError(f"expected three comma-separated values, got {text!r}")
    try:
        return [parse_ring(x) for x in parts]
    except (ExprError, RingError) as exc:
        raise UsageError(f"bad instanton parameter in {text!r}: {exc}") from None


def _structure(src, alg) -> SU2Structure:
    if src.structure is not None:
        return SU2Structure.from_source(src.structure)
    if alg.dim == 5:
        return SU2Structure.standard()
    raise UsageError(f"{src.name}: no structure block and dim {alg.dim} != 5")


def _connection(selector: str, alg, bg):
    if selector == "lc":
        return levi_civita(alg), "lc"
    if selector in ("plus", "minus"):
        return with_torsion(levi_civita(alg), bg.flux, 1 if selector == "plus" else -1), selector
    if selector.startswith("inst:"):
        return instanton_connection(alg, *_triple(selector[5:])), selector
    raise UsageError(f"unknown connection {selector!r}; expected lc, plus, minus or inst:l,m,t")


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.src = _load(args.input)
        self.alg = self.src.to_algebra()
        self._bg = None

    @property
    def structure(self):
        return _structure(self.src, self.alg)

    @property
    def bg(self):
        if self._bg is None:
            self._bg = HeteroticBackground(self.alg, self.structure)
        return self._bg

    def conn(self):
        return _connection(self.args.conn, self.alg, self.bg)

    def inst(self):
        return instanton_connection(self.alg, *_triple(self.args.inst))


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _checks_report(ctx: _Ctx) -> Report:
    what = ctx.args.what
    alg = ctx.alg
    report = Report(alg.name)
    groups = CHECK_GROUPS[:-1] if what == "all" else (what,)
    for g in groups:
        if g == "jacobi":
            r = jacobi_check(alg)
            report.checks.append(Check("jacobi", r.ok, None if r.ok else f"d(de{r.index}) = {render_form(r.witness)}"))
        elif g == "structure":
            report.checks.extend(structure_check(alg, ctx.structure).checks)
        elif g == "susy":
            report.checks.extend(susy_check(alg, ctx.structure).checks)
        elif g == "instanton":
            conn, name = ctx.conn()
            chk = instanton_check(alg, ctx.structure, curvature(alg, conn))
            report.checks.append(Check(f"instanton_R[{name}]", chk.ok, chk.witness))
        elif g == "parallel":
            report.checks.append(parallel_check(alg, ctx.bg))
        elif g == "identities":
            report.checks.extend(identity_suite(alg, ctx.bg).checks)
        elif g == "cylinder":
            report.checks.extend(cylinder_checks(alg, ctx.structure))
    return report


def _render(args, report: Report) -> str:
    return report.to_json() if args.format == "json" else report.to_text()


def cmd_check(args) -> int:
    ctx = _Ctx(args)
    if args.what != "jacobi" and not jacobi_check(ctx.alg).ok:
        args.what = "jacobi"
    report = _checks_report(ctx)
    _emit(args, _render(args, report))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_curvature(args) -> int:
    ctx = _Ctx(args)
    conn, _ = ctx.conn()
    text = render_table(curvature_table(curvature(ctx.alg, conn)), args.format)
    _emit(args, text + "\n")
    return EXIT_OK


def cmd_pontrjagin(args) -> int:
    ctx = _Ctx(args)
    conn, name = ctx.conn()
    P = render_form(pontrjagin_P(ctx.alg, conn))
    text = json.dumps({"connection": name, "P": P}, indent=2) + "\n" if args.format == "json" else f"P = {P}\n"
    _emit(args, text)
    return EXIT_OK


def cmd_anomaly(args) -> int:
    ctx = _Ctx(args)
    conn, name = ctx.conn()
    try:
        res = anomaly_solve(ctx.alg, ctx.bg, conn, ctx.inst())
    except AnomalyError as exc:
        _emit(args, json.dumps({"error": str(exc)}, indent=2) + "\n" if args.format == "json" else f"no solution: {exc}\n")
        return EXIT_FAIL
    a = res.alpha_prime
    if args.format == "json":
        text = json.dumps({"connection": name, "alpha_prime": {"num": str(a.num), "den": str(a.den)},
                           "domains": [res.positivity_domain]}, indent=2) + "\n"
    else:
        text = f"alpha' = ({a.num})/({a.den})\ndomain: alpha' > 0 <=> {res.positivity_domain}\n"
    _emit(args, text)
    return EXIT_OK


def cmd_motion(args) -> int:
    ctx = _Ctx(args)
    conn, name = ctx.conn()
    inst = ctx.inst()
    report = Report(ctx.alg.name)
    try:
        res = anomaly_solve(ctx.alg, ctx.bg, conn, inst)
    except AnomalyError as exc:
        report.checks.append(Check("anomaly", False, str(exc)))
    else:
        report.checks.append(Check("anomaly", True))
        report.alpha_prime = {"num": str(res.alpha_prime.num), "den": str(res.alpha_prime.den)}
        report.domains.append(f"alpha' > 0 <=> {res.positivity_domain}")
        report.checks.extend(motion_check(ctx.alg, ctx.bg, conn, inst, res.alpha_prime).checks())
    _emit(args, _render(args, report))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_report(args) -> int:
    ctx = _Ctx(args)
    if not jacobi_check(ctx.alg).ok:
        args.what = "jacobi"
        report = _checks_report(ctx)
    else:
        conn, name = ctx.conn()
        report = full_report(ctx.alg, ctx.structure, conn, ctx.inst(), name)
    _emit(args, _render(args, report))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_probe(args) -> int:
    pr = classify_probe(args.samples, args.seed)
    if args.format == "json":
        text = json.dumps({"samples": pr.samples, "seed": pr.seed, "nullspace_dim": pr.nullspace_dim,
                           "counterexamples": pr.counterexamples, "lambda_witness": pr.lambda_witness},
                          indent=2) + "\n"
    else:
        text = (f"samples: {pr.samples}\nseed: {pr.seed}\nclosed-structure subspace dim: {pr.nullspace_dim}\n"
                f"lambda obstruction: {pr.lambda_witness}\ncounterexamples: {len(pr.counterexamples)}\n")
        for ce in pr.counterexamples:
            text += f"  {json.dumps(ce, sort_keys=True)}\n"
    _emit(args, text)
    return EXIT_OK if pr.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heterotic5", description="Exact checks for invariant heterotic backgrounds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", metavar="PATH")
    bg = argparse.ArgumentParser(add_help=False, parents=[common])
    bg.add_argument("input", help="algebra file (.alg)")
    bg.add_argument("--conn", default="plus", help="lc | plus | minus | inst:l,m,t (default plus)")
    bg.add_argument("--inst", default="l,m,t", help="instanton parameters l,m,t (default symbolic l,m,t)")

    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("check", parents=[bg], help="run a group of checks")
    p.add_argument("--what", choices=CHECK_GROUPS, default="all")
    p.set_defaults(func=cmd_check)
    for verb, func, helptext in (
        ("curvature", cmd_curvature, "curvature 2-forms of a connection"),
        ("pontrjagin", cmd_pontrjagin, "P = sum_{i<j} Omega^i_j ^ Omega^i_j"),
        ("anomaly", cmd_anomaly, "solve the anomaly condition for alpha'"),
        ("motion", cmd_motion, "residuals of the equations of motion"),
        ("report", cmd_report, "every check for one background"),
    ):
        sub.add_parser(verb, parents=[bg], help=helptext).set_defaults(func=func)
    p = sub.add_parser("probe", parents=[common], help="sample the classification ansatz")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DSLError as exc:
        print(f"{getattr(args, 'input', '')}:{exc.line}:{exc.col}: error: {exc.message}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
