"""Command-line front end.

Exit codes: ``analyze`` 0 passes / 1 refuted / 2 input error; ``falsify`` 0
found / 3 none within budget; ``verify`` 0 pass / 1 fail / 2 malformed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Iterable, Optional

from . import catalog
from .analyzer import (
    NOT_WN,
    SearchBudget,
    default_workers,
    falsify_holder,
    falsify_lemma,
    necessary_conditions_pipeline,
)
from .certificates import CertificateFormatError, dumps, verify
from .density import (
    BruteForceRefused,
    DensityBudgetExceeded,
    EdgeAssignment,
    MEMORY_BUDGET,
    brute_force_density,
    brute_force_multilinear,
    density,
    edge_deleted_densities,
    multilinear_density,
)
from .graphon import GraphonFormatError, parse_graphon
from .graphs import Graph, GraphFormatError, delete_edge, parse_edge_list, parse_graph6, to_graph6
from .selftest import run_all

EXIT_INPUT = 2
EXIT_NOT_FOUND = 3


class InputError(Exception):
    pass


# -- records ----------------------------------------------------------------


def format_records(records: Iterable[tuple[str, object]]) -> str:
    lines = []
    for key, value in records:
        text = str(value).replace("\n", " ")
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def parse_records(text: str) -> list[tuple[str, str]]:
    """Inverse of :func:`format_records`."""
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if "=" not in line:
            raise ValueError(f"not a key=value record: {line!r}")
        key, value = line.split("=", 1)
        out.append((key, value))
    return out


def _fmt(x: float) -> str:
    return f"{x:.15g}"


# -- inputs -----------------------------------------------------------------


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--name", help="catalog name, e.g. C4, K_3_3, torus_6_6, C4+C6")
    src.add_argument("--graph6", help="graph6 string")
    src.add_argument("--graph6-file", type=Path, help="file whose first line is graph6")
    src.add_argument("--edges", type=Path, help="edge-list file ('u v' per line)")


def _add_budget_args(p: argparse.ArgumentParser) -> None:
    d = SearchBudget()
    p.add_argument("--restarts", type=int, default=d.restarts)
    p.add_argument("--steps", type=int, default=d.steps)
    p.add_argument("--q-values", type=int, nargs="+", default=list(d.q_values))
    p.add_argument("--value-cap", type=float, default=d.value_cap)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--tolerance", type=float, default=d.tolerance, help="minimum violation/gap for a certificate")
    p.add_argument("--workers", type=int, default=None, help="parallel restarts (default: NORMCHECK_THREADS or 1)")


def _budget(args) -> SearchBudget:
    try:
        return SearchBudget(
            restarts=args.restarts,
            steps=args.steps,
            q_values=tuple(args.q_values),
            value_cap=args.value_cap,
            seed=args.seed,
            tolerance=args.tolerance,
            workers=args.workers if args.workers is not None else default_workers(),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _graph(args) -> Graph:
    try:
        if args.name:
            return catalog.build(args.name)
        if args.graph6:
            return parse_graph6(args.graph6)
        if args.graph6_file:
            lines = [ln for ln in _read(args.graph6_file).splitlines() if ln.strip()]
            if not lines:
                raise InputError(f"{args.graph6_file}: empty file")
            return parse_graph6(lines[0])
        return parse_edge_list(_read(args.edges))
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    except (GraphFormatError, ValueError) as exc:
        raise InputError(f"graph input: {exc}") from None


def _graphon(path: Path):
    try:
        return parse_graphon(_read(path))
    except GraphonFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


# -- commands ---------------------------------------------------------------


def cmd_analyze(args, out) -> int:
    g = _graph(args)
    report = necessary_conditions_pipeline(g, _budget(args), name=args.name)
    records: list[tuple[str, object]] = [
        ("graph.n", g.n),
        ("graph.k", g.k),
        ("graph.graph6", to_graph6(g)),
    ]
    if report.known_status:
        records.append(("known_status", report.known_status))
    for c in report.checks:
        status = "skipped" if c.passed is None else ("pass" if c.passed else "fail")
        records.append((f"check.{c.name}", status))
        if c.detail and c.passed is not None:
            records.append((f"check.{c.name}.detail", c.detail))
    if report.part_degrees:
        records.append(("part_degrees", f"{report.part_degrees[0]} {report.part_degrees[1]}"))
    if report.lemma_certificate:
        lc = report.lemma_certificate
        records += [
            ("lemma.edge_lo", f"e{lc.edge_lo + 1}"),
            ("lemma.edge_hi", f"e{lc.edge_hi + 1}"),
            ("lemma.gap", _fmt(lc.gap)),
        ]
    if report.holder_certificate:
        records.append(("holder.violation", _fmt(report.holder_certificate.violation)))
    if report.implementation_flag:
        records.append(("implementation_flag", "true"))
    records.append(("verdict", report.verdict))
    if report.reason:
        records.append(("reason", report.reason))
    if report.caveat:
        records.append(("caveat", report.caveat))
    if args.format == "kv":
        out.write(format_records(records))
    else:
        out.write(f"graph: {report.summary}\n")
        if report.known_status:
            out.write(f"literature: {report.known_status}\n")
        for c in report.checks:
            status = "SKIP" if c.passed is None else ("PASS" if c.passed else "FAIL")
            detail = f": {c.detail}" if c.detail and c.passed is not None else ""
            out.write(f"  [{status}] {c.name}{detail}\n")
        out.write(f"verdict: {report.verdict}" + (f" ({report.reason})" if report.reason else "") + "\n")
        if report.caveat:
            out.write(f"note: {report.caveat}\n")
    return 1 if report.verdict == NOT_WN else 0


def cmd_density(args, out) -> int:
    g = _graph(args)
    try:
        if args.multilinear:
            kernels = [_graphon(p) for p in args.multilinear]
            if len(kernels) != g.k:
                raise InputError(f"--multilinear needs {g.k} kernels (one per edge), got {len(kernels)}")
            a = EdgeAssignment(g, tuple(kernels))
            val = brute_force_multilinear(a) if args.brute_force else multilinear_density(a, args.memory_budget)
            out.write(f"{_fmt(val.value)}\n")
            out.write(f"method={val.method}\n")
            return 0
        if args.graphon is None:
            raise InputError("--graphon or --multilinear is required")
        h = _graphon(args.graphon)
        if args.edge_deleted:
            if args.brute_force:
                ts = [brute_force_density(delete_edge(g, l), h).value for l in range(g.k)]
                method = "oracle"
            else:
                ts = edge_deleted_densities(g, h, args.memory_budget)
                method = "contraction"
            out.write(" ".join(_fmt(t) for t in ts) + "\n")
            out.write(f"method={method}\n")
            return 0
        val = brute_force_density(g, h) if args.brute_force else density(g, h, args.memory_budget)
        out.write(f"{_fmt(val.value)}\n")
        out.write(f"method={val.method}\n")
        if val.plan is not None:
            out.write(f"induced_width={val.plan.induced_width}\n")
        return 0
    except (BruteForceRefused, DensityBudgetExceeded) as exc:
        raise InputError(str(exc)) from None


def cmd_falsify(args, out) -> int:
    g = _graph(args)
    budget = _budget(args)
    cert = falsify_lemma(g, budget) if args.target == "lemma" else falsify_holder(g, budget)
    if cert is None:
        out.write("none found\n")
        return EXIT_NOT_FOUND
    text = dumps(cert)
    if args.output:
        args.output.write_text(text)
        out.write(f"certificate written to {args.output}\n")
    else:
        out.write(text)
    return 0


def cmd_verify(args, out) -> int:
    try:
        res = verify(_read(args.certificate), force_oracle=args.oracle)
    except (CertificateFormatError, BruteForceRefused) as exc:
        raise InputError(f"{args.certificate}: {exc}") from None
    for key, val in res.values.items():
        out.write(f"{key}={_fmt(val)}\n")
    for msg in res.messages:
        out.write(f"error={msg}\n")
    out.write(f"method={res.method}\n")
    out.write(f"result={'pass' if res.ok else 'fail'}\n")
    return 0 if res.ok else 1


def cmd_catalog(args, out) -> int:
    if args.action == "list":
        for e in catalog.listing():
            note = f" ({e.note})" if e.note else ""
            out.write(f"{e.name}\tn={e.graph.n}\tk={e.graph.k}\t{e.known_status}{note}\n")
        return 0
    if not args.names:
        raise InputError("catalog build needs a name")
    for name in args.names:
        try:
            out.write(to_graph6(catalog.build(name)) + "\n")
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    return 0


def cmd_selftest(args, out) -> int:
    results = run_all(quick=args.quick, seed=args.seed)
    if args.format == "kv":
        recs = []
        for r in results:
            recs += [
                (f"suite.{r.name}", "pass" if r.passed else "fail"),
                (f"suite.{r.name}.cases", r.cases),
                (f"suite.{r.name}.worst", f"{r.worst:.3e}"),
            ]
        recs.append(("result", "pass" if all(r.passed for r in results) else "fail"))
        out.write(format_records(recs))
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"[{status}] {r.name}: {r.cases} cases, worst {r.worst:.3e}, {r.seconds:.2f}s\n")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the necessary-condition pipeline")
    _add_graph_args(p)
    _add_budget_args(p)
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("density", help="homomorphism densities")
    _add_graph_args(p)
    p.add_argument("--graphon", type=Path, help="graphon text file")
    p.add_argument("--multilinear", type=Path, nargs="+", metavar="KERNEL", help="one graphon file per edge")
    p.add_argument("--edge-deleted", action="store_true", help="print t_G-e_l(h) for every edge")
    p.add_argument("--brute-force", action="store_true", help="use the enumeration oracle")
    p.add_argument("--memory-budget", type=int, default=MEMORY_BUDGET)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("falsify", help="search for a refuting certificate")
    _add_graph_args(p)
    _add_budget_args(p)
    p.add_argument("--target", choices=("lemma", "holder"), required=True)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("verify", help="re-check a certificate file")
    p.add_argument("certificate", type=Path)
    p.add_argument("--oracle", action="store_true", help="force brute-force evaluation")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list or build named graphs")
    p.add_argument("action", choices=("list", "build"))
    p.add_argument("names", nargs="*")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("selftest", help="run the property suites")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
