"""Command-line interface.

Exit codes: 0 success/pass, 1 candidate rejected by ``verify``, 2 input error,
3 internal invariant breach, 4 no pure unsegmented equilibrium found.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from segforge.designer import SigmaStar, check_plausibility, design_sigma_star, supported_equilibrium
from segforge.documents import candidate_from_doc, design_to_doc, dumps, load_json, read_market
from segforge.errors import (
    GridTooLarge,
    InputError,
    InvariantBreach,
    NonpositiveBenchmarkProfit,
)
from segforge.extremal import verify_extremal_segmentation
from segforge.market import Market, efficient_surplus
from segforge.report import RunReport, Table, fmt
from segforge.verifier import (
    EquilibriumReport,
    candidate_from_design,
    compare_to_benchmark,
    find_unsegmented_pure_equilibria,
    minimax_report,
    min_trade_surplus,
    verify_public_equilibrium,
)

EXIT_OK, EXIT_REJECTED, EXIT_INPUT, EXIT_BREACH, EXIT_NO_BENCHMARK = 0, 1, 2, 3, 4

log = logging.getLogger("segforge")


def _vec(xs: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(x) for x in xs) + ")"


def _owner(owner: int | None) -> str:
    return "residual" if owner is None else f"firm {owner}"


def segmentation_table(s: SigmaStar) -> Table:
    m = s.parent
    table = Table(
        "Segmentation",
        ["segment", "mass"] + [_vec(t.values) for t in m.types] + ["owner", "prices"],
    )
    cand = candidate_from_design(s)
    for k, (seg, cs) in enumerate(zip(s.segments, cand.segments)):
        table.add(f"x{k + 1}", seg.weight, *[str(q) for q in seg.composition], _owner(seg.owner), _vec(cs.prices))
    table.add("total", sum((seg.weight for seg in s.segments), Fraction(0)), *[str(t.mass) for t in m.types], "", "")
    return table


def design_report(m: Market) -> tuple[RunReport, dict]:
    """Run the full design pipeline with every self-check; raises InvariantBreach on failure."""
    s = design_sigma_star(m, check=True)
    outcome = supported_equilibrium(s)
    minimax = minimax_report(m)

    checks = Table("Verification", ["check", "result", "detail"])
    breaches = []

    def record(name: str, ok: bool, detail: str = "") -> None:
        checks.add(name, "pass" if ok else "FAIL", detail)
        if not ok:
            breaches.append(f"{name}: {detail}")

    record("segments recombine to market", check_plausibility(s))
    for i, fd in sorted(s.per_firm.items()):
        rep = verify_extremal_segmentation(fd.w_segmentation)
        record(f"firm {i} extremal segmentation", rep.passed, rep.failure or "")
    eq = verify_public_equilibrium(candidate_from_design(s))
    record("no profitable deviation", eq.passed, f"{len(eq.violations())} violations")
    record("allocation efficient", outcome.efficient)
    for e in minimax:
        record(f"firm {e.firm} profit equals minimax", outcome.profits[e.firm] == e.minimax_profit)

    firms = Table(
        "Firms",
        ["firm", "cost", "uniform price", "uniform profit", "equilibrium profit", "minimax", "witness"],
    )
    for e in minimax:
        fd = s.per_firm.get(e.firm)
        firms.add(
            f"firm {e.firm}",
            m.costs[e.firm],
            fd.star_price if fd else "-",
            fd.star_profit if fd else Fraction(0),
            outcome.profits[e.firm],
            e.minimax_profit,
            e.witness_price,
        )

    surplus = Table("Surplus", ["quantity", "value"])
    surplus.add("consumer surplus", outcome.consumer_surplus)
    surplus.add("total surplus", outcome.total_surplus)
    surplus.add("efficient surplus", efficient_surplus(m))
    surplus.add("efficient", "yes" if outcome.efficient else "no")

    report = RunReport([segmentation_table(s), firms, surplus, checks])
    if breaches:
        raise InvariantBreach("; ".join(breaches))
    return report, design_to_doc(s, outcome, minimax)


def deviation_table(rep: EquilibriumReport) -> Table:
    table = Table(
        "Deviations",
        ["segment", "firm", "price", "profit", "best response", "best profit", "profitable"],
    )
    for r in rep.rows:
        best = f"just below {r.best_price}" if r.from_below else str(r.best_price)
        table.add(f"x{r.segment + 1}", f"firm {r.firm}", r.price, r.profit, best, r.best_profit,
                  "YES" if r.profitable else "no")
    return table


def cmd_design(args: argparse.Namespace) -> int:
    m = read_market(args.input)
    report, doc = design_report(m)
    if args.out:
        Path(args.out).write_text(dumps(doc))
        report.notes.append(f"design written to {args.out}")
    sys.stdout.write(report.render(args.csv))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    m = read_market(args.input)
    cand = candidate_from_doc(m, load_json(args.candidate))
    rep = verify_public_equilibrium(cand)
    report = RunReport([deviation_table(rep)])
    for r in rep.violations():
        where = "just below " if r.from_below else ""
        report.notes.append(
            f"firm {r.firm} in x{r.segment + 1}: deviating to {where}{r.best_price} "
            f"raises profit from {r.profit} to {r.best_profit}"
        )
    report.notes.append("PASS: equilibrium" if rep.passed else "FAIL: profitable deviation exists")
    sys.stdout.write(report.render(args.csv))
    return EXIT_OK if rep.passed else EXIT_REJECTED


def benchmark_report(m: Market) -> tuple[RunReport, bool]:
    """Compare designed profits with every pure unsegmented equilibrium found."""
    s = design_sigma_star(m)
    outcome = supported_equilibrium(s)
    minimax = minimax_report(m)
    u_min = min_trade_surplus(m)
    report = RunReport()
    try:
        benchmarks = find_unsegmented_pure_equilibria(m)
    except GridTooLarge as exc:
        benchmarks = []
        report.notes.append(f"unsegmented search skipped: {exc}")

    table = Table(
        "Benchmark comparison",
        ["benchmark prices", "ties", "firm", "unsegmented profit", "designed profit", "minimax", "status"],
    )
    for b in benchmarks:
        try:
            comp = compare_to_benchmark(m, b, s)
            if comp.covered:
                status = "strictly worse" if comp.all_strictly_worse else "NOT strictly worse"
            else:
                status = "comparison not covered (some trade surplus is zero)"
        except NonpositiveBenchmarkProfit:
            status = "not applicable: a benchmark profit is not positive"
        for e in minimax:
            table.add(_vec(b.prices), b.tie_policy, f"firm {e.firm}", b.profits[e.firm],
                      outcome.profits[e.firm], e.minimax_profit, status)
    if not benchmarks:
        for e in minimax:
            table.add("none found", "-", f"firm {e.firm}", "-", outcome.profits[e.firm], e.minimax_profit,
                      "no pure equilibrium on grid (possibly mixed)")
    report.tables.append(table)
    holds = "holds" if u_min > 0 else "fails"
    report.notes.append(f"positive trade surplus condition {holds}: minimum v_i - c_i = {fmt(u_min)}")
    return report, bool(benchmarks)


def cmd_benchmark(args: argparse.Namespace) -> int:
    m = read_market(args.input)
    report, found = benchmark_report(m)
    sys.stdout.write(report.render(args.csv))
    return EXIT_OK if found else EXIT_NO_BENCHMARK


def cmd_minimax(args: argparse.Namespace) -> int:
    m = read_market(args.input)
    table = Table("Minimax profits", ["firm", "cost", "minimax profit", "witness price"])
    for e in minimax_report(m):
        table.add(f"firm {e.firm}", m.costs[e.firm], e.minimax_profit, e.witness_price)
    sys.stdout.write(RunReport([table]).render(args.csv))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segforge",
        description="Consumer-optimal public segmentation for differentiated Bertrand markets.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="build the segmentation, its equilibrium and checks")
    p.add_argument("input")
    p.add_argument("--out", help="write the design (a valid verify candidate) as JSON")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("verify", help="check a priced segmentation for profitable deviations")
    p.add_argument("input")
    p.add_argument("candidate")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("benchmark", help="compare with pure unsegmented equilibria")
    p.add_argument("input")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("minimax", help="each firm's guaranteed profit")
    p.add_argument("input")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_minimax)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantBreach as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
