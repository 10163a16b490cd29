"""Command-line entry point: ``liebound <subcommand> ...``.

Exit codes: 0 ok, 1 verification failure or violated invariant, 2 invalid
input, 3 budget refusal.  Every subcommand prints one report; with
``--format json`` (the default) it is a single JSON document whose only
run-dependent field is ``timing``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from liebound import chevalley, fparith, gradedsym, orbits, rootsys, verify
from liebound.errors import BudgetExceeded, InputError, InvariantViolation

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _window(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like r0:r1, got {text!r}")


def _add_system(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("root system")
    g.add_argument("--system", "-s", help='selector "FAMILY:RANK", e.g. B:4')
    g.add_argument("--type", dest="family", help="family letter A-G")
    g.add_argument("--rank", type=int)
    g.add_argument("--cartan", type=Path, help='JSON file {"cartan": [[...], ...]}')


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--budget", type=int, default=orbits.DEFAULT_BUDGET,
                   help="maximum projective points for exhaustive enumeration")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liebound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("u-table", help="table of dim G, u, dual Coxeter number and |S| per root system")
    p.add_argument("--systems", help="comma-separated selectors (default: A1-A8, B2-B6, C2-C6, D3-D8, E6-E8, F4, G2)")
    _add_common(p)

    p = sub.add_parser("brute-force", help="minimum orbit dimension of the adjoint representation")
    _add_system(p)
    p.add_argument("-p", "--prime", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=("jacobi", "table", "adtheta", "derhyp", "graded", "all"))
    p.add_argument("--slow", action="store_true", help="include E6-E8 in the Jacobi suite")
    _add_common(p)

    p = sub.add_parser("variety", help="family of orbit subspaces g.v over all projective points")
    p.add_argument("--rep", required=True,
                   help='"gl:N", "sl:N", "zero:D", "adjoint:FAMILY:RANK", or a JSON representation file')
    p.add_argument("-p", "--prime", type=int)
    _add_common(p)

    p = sub.add_parser("rootsys", help="roots, highest root, 2rho and invariants of one system")
    _add_system(p)
    _add_common(p)

    p = sub.add_parser("export", help="Chevalley structure constants as JSON")
    _add_system(p)
    _add_common(p)

    p = sub.add_parser("ideal", help="checks on a homogeneous ideal in F_p[v1..vd]")
    p.add_argument("--ideal", required=True, help='JSON list of polynomial strings, or a file containing one')
    p.add_argument("--nvars", type=int, required=True)
    p.add_argument("-p", "--prime", type=int, required=True)
    p.add_argument("--check", choices=("member", "dstable", "control", "closure"), required=True)
    p.add_argument("--poly", help="polynomial for member/closure")
    p.add_argument("--phi", help="JSON list of d x d matrices for closure (default: identity)")
    p.add_argument("--window", type=_window, default=gradedsym.DEFAULT_WINDOW)
    p.add_argument("--degree-bound", type=int)
    p.add_argument("--piece-budget", type=int, default=gradedsym.DEFAULT_PIECE_BUDGET)
    _add_common(p)
    return parser


# -- selectors -------------------------------------------------------------------


def _root_system(args) -> rootsys.RootSystem:
    if args.cartan is not None:
        try:
            text = args.cartan.read_text()
        except OSError as exc:
            raise InputError(f"cannot read {args.cartan}: {exc}") from exc
        return rootsys.from_cartan_json(text)
    if args.system:
        return rootsys.parse_selector(args.system)
    if args.family and args.rank is not None:
        return rootsys.build_root_system(args.family.upper(), args.rank)
    raise InputError("give --system FAMILY:RANK, --type/--rank, or --cartan FILE")


def _rep(selector: str, p: int | None) -> orbits.LieRep:
    path = Path(selector)
    if selector.endswith(".json") or path.is_file():
        try:
            rep = orbits.LieRep.from_json(path.read_text())
        except OSError as exc:
            raise InputError(f"cannot read {selector}: {exc}") from exc
        if p is not None and p != rep.p:
            raise InputError(f"--prime {p} disagrees with p={rep.p} in {selector}")
        return rep
    if p is None:
        raise InputError("--prime is required for built-in representations")
    kind, _, rest = selector.partition(":")
    try:
        if kind == "gl":
            return orbits.gl_natural_rep(int(rest), p)
        if kind == "sl":
            return orbits.sl_natural_rep(int(rest), p)
        if kind == "zero":
            return orbits.zero_rep(int(rest), p)
        if kind == "adjoint":
            alg = chevalley.structure_constants(rootsys.parse_selector(rest))
            return chevalley.adjoint_rep(alg, p)
    except ValueError as exc:
        raise InputError(f"bad representation selector {selector!r}") from exc
    raise InputError(f"unknown representation selector {selector!r}")


# -- subcommands -------------------------------------------------------------------


def cmd_u_table(args) -> tuple[dict, str]:
    if args.systems:
        systems = []
        for sel in args.systems.split(","):
            rs = rootsys.parse_selector(sel)
            systems.append((rs.family, rs.rank))
    else:
        systems = list(rootsys.TABLE_SYSTEMS)
    rows = [verify.table_row(f, n) for f, n in systems]
    return {"rows": rows}, "ok"


def _two_rho_theta(rs: rootsys.RootSystem) -> int:
    if rs.family is not None:
        return rootsys.u_invariant(rs)
    val = rootsys.inner_product(rs, rootsys.weyl_vector_doubled(rs), rootsys.highest_root(rs))
    return int(val) if val.denominator == 1 else val


def cmd_brute_force(args) -> tuple[dict, str]:
    rs = _root_system(args)
    p = fparith.check_modulus(args.prime)
    alg = chevalley.structure_constants(rs)
    rep = chevalley.adjoint_rep(alg, p)
    target = _two_rho_theta(rs)
    nice = rootsys.is_nice_prime(rs, p) if rs.family else None
    e_theta = alg.basis_vector(alg.e(rootsys.highest_root(rs)))
    warnings = []
    if nice is False:
        warnings.append(f"p={p} is not a nice prime for {rs.name}; (2rho, theta) is not claimed here")
    elif nice is None:
        warnings.append("custom Cartan matrix: nice-prime status unknown")
    results = {
        "system": rs.name,
        "p": p,
        "nice_prime": nice,
        "two_rho_theta": target,
        "e_theta": e_theta.tolist(),
        "warnings": warnings,
    }
    try:
        if args.mode == "exhaustive":
            report = orbits.min_orbit_dim_exhaustive(rep, budget=args.budget, threads=args.threads)
            falsified = report.u != target
        else:
            report = orbits.min_orbit_dim_sampled(rep, args.samples, args.seed, [e_theta],
                                                  threads=args.threads)
            falsified = report.u < target
    except BudgetExceeded as exc:
        results["message"] = str(exc)
        return results, "refused"
    results["report"] = report.to_dict()
    # a mismatch only falsifies anything at a nice prime
    return results, "violation" if (falsified and nice) else "ok"


def cmd_verify(args) -> tuple[dict, str]:
    checks, _ = verify.run_suite(args.suite, slow=args.slow)
    results = {"checks": [c.to_dict() for c in checks],
               "passed": sum(c.passed for c in checks), "total": len(checks)}
    return results, "ok" if all(c.passed for c in checks) else "violation"


def cmd_variety(args) -> tuple[dict, str]:
    rep = _rep(args.rep, args.prime)
    fam = orbits.variety_family(rep, budget=args.budget, threads=args.threads)
    return fam.to_dict(), "ok"


def cmd_rootsys(args) -> tuple[dict, str]:
    rs = _root_system(args)
    theta = rootsys.highest_root(rs)
    out = {
        "system": rs.name,
        "cartan": [list(r) for r in rs.cartan],
        "positive_roots": [list(r) for r in rs.positive_roots],
        "highest_root": list(theta),
        "two_rho": list(rootsys.weyl_vector_doubled(rs)),
        "simple_root_lengths": [str(rs.gram[i][i]) for i in range(rs.rank)],
        "two_rho_theta": str(rootsys.inner_product(rs, rootsys.weyl_vector_doubled(rs), theta)),
        "special_roots": [list(b) for b in rootsys.special_roots(rs)],
    }
    if rs.family is None:
        out.update(u="unsupported", dual_coxeter="unsupported", dim_G=rootsys.dim_g(rs))
    else:
        w = rootsys.weyl_data(rs)
        out.update(u=w.u, dual_coxeter=w.dual_coxeter, dim_G=rootsys.dim_g(rs))
    return out, "ok"


def cmd_export(args) -> tuple[dict, str]:
    alg = chevalley.structure_constants(_root_system(args))
    return alg.to_dict(), "ok"


def cmd_ideal(args) -> tuple[dict, str]:
    p = fparith.check_modulus(args.prime)
    text = args.ideal
    if not text.lstrip().startswith("[") and Path(text).is_file():
        text = Path(text).read_text()
    J = gradedsym.HomIdeal.from_json(text, args.nvars, p, budget=args.piece_budget)
    out: dict = {"ideal": json.loads(J.to_json()), "check": args.check}
    if args.check in ("member", "closure"):
        if not args.poly:
            raise InputError(f"--poly is required for --check {args.check}")
        f = gradedsym.parse_poly(args.poly, args.nvars, p)
        out["poly"] = gradedsym.format_poly(f)
    if args.check == "member":
        if not f.is_homogeneous:
            raise InputError("membership needs a homogeneous polynomial")
        out["result"] = gradedsym.hom_membership(J, f)
    elif args.check == "dstable":
        out["result"] = gradedsym.d_stability_check(J)
    elif args.check == "control":
        bound = args.degree_bound
        if bound is None:
            raise InputError("--degree-bound is required for --check control")
        rep = gradedsym.control_check(J, bound)
        out.update(result=rep.result, degree_bound=bound, first_failure=rep.first_failure,
                   dims=[list(x) for x in rep.dims], note=rep.note)
    else:
        if args.phi:
            try:
                phis = [np.asarray(m, dtype=np.int64) for m in json.loads(args.phi)]
            except (json.JSONDecodeError, TypeError, ValueError) as exc:
                raise InputError(f"--phi must be a JSON list of square matrices: {exc}") from exc
        else:
            phis = [np.eye(args.nvars, dtype=np.int64)]
        rep = gradedsym.s_closure_test(J, f, phis, args.window)
        out.update(result=rep.result, window=list(rep.window),
                   failures=[list(x) for x in rep.failures], note=rep.note)
    return out, "ok"


COMMANDS = {
    "u-table": cmd_u_table,
    "brute-force": cmd_brute_force,
    "verify": cmd_verify,
    "variety": cmd_variety,
    "rootsys": cmd_rootsys,
    "export": cmd_export,
    "ideal": cmd_ideal,
}


# -- rendering -------------------------------------------------------------------


def dump_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _markdown_table(rows: list[dict]) -> str:
    """Systems as columns, quantities as rows."""
    header = "| Φ | " + " | ".join(r["system"] for r in rows) + " |"
    sep = "|---|" + "---:|" * len(rows)
    lines = [header, sep]
    for key, title in (("dim_G", "dim G"), ("u", "u"), ("dual_coxeter", "ĥ"), ("special_roots", "#S")):
        lines.append(f"| {title} | " + " | ".join(str(r[key]) for r in rows) + " |")
    return "\n".join(lines)


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, json.dumps(v) if isinstance(v, (list, dict)) else v


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(report)
    results = report["results"]
    rows = results.get("rows") if isinstance(results, dict) else None
    if report["subcommand"] == "verify":
        rows = results["checks"]
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            w.writerows(_flatten(results))
        return buf.getvalue().rstrip("\n")
    if report["subcommand"] == "u-table":
        return _markdown_table(rows)
    if rows:
        keys = list(rows[0])
        lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
        lines += ["| " + " | ".join(str(r[k]) for k in keys) + " |" for r in rows]
        return "\n".join(lines)
    lines = ["| key | value |", "|---|---|"]
    lines += [f"| {k} | {v} |" for k, v in _flatten(results)]
    return "\n".join(lines)


def _inputs(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("format",):
            continue
        out[k] = str(v) if isinstance(v, Path) else (list(v) if isinstance(v, tuple) else v)
    out.pop("threads", None)
    return out


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv``, dispatch, and return ``(exit_code, rendered_report)``."""
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        return EXIT_INPUT, "error: --threads must be >= 1"
    t0 = time.perf_counter()
    try:
        results, status = COMMANDS[args.command](args)
        code = {"ok": EXIT_OK, "violation": EXIT_FAIL, "refused": EXIT_BUDGET}[status]
    except BudgetExceeded as exc:
        results, status, code = {"message": str(exc)}, "refused", EXIT_BUDGET
    except InvariantViolation as exc:
        results, status, code = {"message": str(exc)}, "violation", EXIT_FAIL
    except InputError as exc:
        return EXIT_INPUT, f"error: {exc}"
    report = {
        "subcommand": args.command,
        "inputs": _inputs(args),
        "results": results,
        "status": status,
        "timing": round(time.perf_counter() - t0, 6),
    }
    if status != "ok":
        return code, dump_json(report)
    return code, render(report, args.format)


def main(argv=None) -> int:
    code, text = run(argv)
    stream = sys.stderr if code == EXIT_INPUT else sys.stdout
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
