"""Command-line front end.

Exit status: 0 success, 2 input/format error, 3 infeasible scenario,
4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import io
import logging
import os
import sys
import tempfile
from pathlib import Path

from roundtax import kernels
from roundtax.distributions import load_profile_dir, sample_data_dir
from roundtax.errors import DataFormatError, RoundTaxError
from roundtax.expectation import expected_tax_per_transaction
from roundtax.money import format_rule, parse_rule
from roundtax.report import (
    ReportContext,
    build_report,
    format_items,
    format_table,
    report_items,
    scenario_items,
)
from roundtax.scenarios import aggregate, extremize_cash_shares, parse_scenario
from roundtax.simulation import SimulationConfig, simulate, write_sample

log = logging.getLogger("roundtax")

# published revenue shares add up to 99.9%
CLI_SHARE_TOLERANCE = 1.5e-3


def _add_common(p: argparse.ArgumentParser, taxes: bool = True) -> None:
    p.add_argument("--profiles", type=Path, default=None,
                   help="directory with endings.csv, baskets.csv, profiles.csv (default: shipped sample_text)")
    p.add_argument("--rule", default="israel_2008",
                   help="rule name (israel_2008, symmetric_5, ...) or 'grid=10; down=1-4; up=5-9'")
    p.add_argument("--share-tolerance", type=float, default=CLI_SHARE_TOLERANCE,
                   help="allowed deviation of summed revenue shares from 1 (default: %(default)g)")
    p.add_argument("--out", type=Path, default=None, help="write a key=value summary here")
    if taxes:
        p.add_argument("--tax-source", choices=("exact", "published", "simulate"), default="exact",
                       help="where per-transaction taxes come from (default: exact)")
        p.add_argument("--n", type=int, default=10_000, help="simulated transactions per store")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--total-revenue", type=float, default=ReportContext.total_revenue)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roundtax", description="Estimate the rounding tax of cash rounding rules.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expect", help="exact expected tax per cash transaction")
    _add_common(p, taxes=False)

    p = sub.add_parser("simulate", help="Monte Carlo estimate per store type")
    _add_common(p, taxes=False)
    p.add_argument("--n", type=int, default=10_000, help="transactions per store (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    p.add_argument("--store", default=None, help="simulate only this store")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=("cython", "numpy"), default=None)
    p.add_argument("--dump", type=Path, default=None,
                   help="write txn_index,basket_size,residue,delta_agorot rows (needs a single store)")

    p = sub.add_parser("aggregate", help="annual tax under a cash-share scenario file")
    _add_common(p)
    p.add_argument("--scenario", type=Path, required=True, help="file of store=share lines")

    p = sub.add_parser("extremize", help="cash shares that maximize/minimize the total tax")
    _add_common(p)
    p.add_argument("--scenario", type=Path, default=None, help="file providing overall=<share>")
    p.add_argument("--overall", type=float, default=None, help="overall cash share (default 0.25)")
    p.add_argument("--sense", choices=("max", "min"), default="max")
    p.add_argument("--weights", choices=("revenue", "transactions"), default="revenue")

    p = sub.add_parser("report", help="full table: equal, max and min scenarios")
    _add_common(p)
    p.add_argument("--overall", type=float, default=0.25)
    p.add_argument("--weights", choices=("revenue", "transactions"), default="revenue")
    p.add_argument("--per-capita", action="store_true")
    p.add_argument("--share-of-revenue", action="store_true")
    p.add_argument("--population", type=float, default=ReportContext.population)
    p.add_argument("--exchange-rate", type=float, default=ReportContext.exchange_rate)
    p.add_argument("--plot-data", type=Path, default=None,
                   help="write plot-ready long CSV (series,store,x,value)")
    return parser


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read: {exc.strerror}", source=str(path)) from None


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _profiles(args):
    path = args.profiles if args.profiles is not None else sample_data_dir()
    return load_profile_dir(path, share_tolerance=args.share_tolerance)


def _taxes(args, profiles, rule):
    if args.tax_source == "published":
        missing = [p.name for p in profiles if p.published_tax is None]
        if missing:
            raise DataFormatError(f"no published_tax_per_txn for {missing}")
        return [p.published_tax for p in profiles]
    if args.tax_source == "simulate":
        config = SimulationConfig(args.n, args.seed, rule)
        return [simulate(p, config).mean_tax for p in profiles]
    return [expected_tax_per_transaction(p, rule) for p in profiles]


def cmd_expect(args):
    rule = parse_rule(args.rule)
    profiles = _profiles(args)
    items = {"rule": format_rule(rule)}
    lines = [f"Expected rounding tax per cash transaction, rule {rule}",
             f"{'store':<24} {'tax/txn (NIS)':>14} {'avg items':>10}"]
    for p in profiles:
        tax = expected_tax_per_transaction(p, rule)
        items[f"{p.name}.tax_per_txn"] = tax
        items[f"{p.name}.avg_items"] = p.avg_items_per_trip
        lines.append(f"{p.name:<24} {tax:>14.4f} {p.avg_items_per_trip:>10.2f}")
    return "\n".join(lines) + "\n", items, {}


def cmd_simulate(args):
    rule = parse_rule(args.rule)
    profiles = _profiles(args)
    if args.store is not None:
        profiles = [p for p in profiles if p.name == args.store]
        if not profiles:
            raise DataFormatError(f"unknown store {args.store!r}")
    if args.dump is not None and len(profiles) != 1:
        raise DataFormatError("--dump needs a single store; pass --store")
    config = SimulationConfig(args.n, args.seed, rule)
    backend = kernels.get(args.backend).NAME
    items = {"rule": format_rule(rule), "n": args.n, "seed": args.seed, "backend": backend}
    lines = [f"Monte Carlo, {args.n} transactions per store, seed {args.seed}, rule {rule} [{backend}]",
             f"{'store':<24} {'mean (NIS)':>11} {'std err':>10} {'exact':>10}"]
    files = {}
    for p in profiles:
        res = simulate(p, config, keep_sample=args.dump is not None, workers=args.workers, backend=args.backend)
        exact = expected_tax_per_transaction(p, rule)
        items[f"{p.name}.mean_tax"] = res.mean_tax
        items[f"{p.name}.std_error"] = res.std_error
        items[f"{p.name}.exact_tax"] = exact
        lines.append(f"{p.name:<24} {res.mean_tax:>11.5f} {res.std_error:>10.5f} {exact:>10.5f}")
        if args.dump is not None:
            buf = io.StringIO()
            write_sample(res, buf)
            files[args.dump] = buf.getvalue()
    return "\n".join(lines) + "\n", items, files


def _aggregate_lines(title, scenario, result):
    lines = [title, f"{'store':<24} {'cash share':>10} {'tax (NIS/yr)':>14}"]
    for n, tax in result.per_store_tax.items():
        lines.append(f"{n:<24} {100 * scenario[n]:>9.1f}% {tax:>14,.0f}")
    lines.append(f"{'total':<24} {'':>10} {result.total_tax:>14,.0f}")
    lines.append(f"share of revenue: {100 * result.share_of_revenue:.5f}%")
    return "\n".join(lines) + "\n"


def cmd_aggregate(args):
    rule = parse_rule(args.rule)
    profiles = _profiles(args)
    scenario, _ = parse_scenario(_read_text(args.scenario), str(args.scenario))
    if scenario is None:
        raise DataFormatError("scenario file lists no store shares", source=str(args.scenario))
    entries = list(zip(profiles, _taxes(args, profiles, rule)))
    result = aggregate(entries, scenario, args.total_revenue)
    return _aggregate_lines(f"Aggregate rounding tax: {scenario.label or args.scenario}", scenario, result), \
        scenario_items(scenario, result), {}


def cmd_extremize(args):
    rule = parse_rule(args.rule)
    profiles = _profiles(args)
    overall = args.overall
    if overall is None and args.scenario is not None:
        _, overall = parse_scenario(_read_text(args.scenario), str(args.scenario))
    if overall is None:
        overall = 0.25
    entries = list(zip(profiles, _taxes(args, profiles, rule)))
    scenario, result = extremize_cash_shares(entries, overall, args.sense, args.weights, args.total_revenue)
    return _aggregate_lines(f"Cash shares that {args.sense}imize the total tax at overall {overall:g}",
                            scenario, result), scenario_items(scenario, result), {}


def _plot_data(report) -> str:
    rows = ["series,store,x,value"]
    for p in report.profiles:
        rows += [f"ending,{p.name},{d},{q!r}" for d, q in enumerate(p.endings.p)]
        rows += [f"basket,{p.name},{n},{q!r}" for n, q in p.baskets.items()]
    for key, res in (("equal", report.equal), ("max", report.maximum), ("min", report.minimum)):
        rows += [f"tax_{key},{n},,{v!r}" for n, v in res.per_store_tax.items()]
    return "\n".join(rows) + "\n"


def cmd_report(args):
    rule = parse_rule(args.rule)
    profiles = _profiles(args)
    ctx = ReportContext(args.total_revenue, args.population, args.exchange_rate)
    report = build_report(profiles, _taxes(args, profiles, rule), args.overall, args.weights, ctx)
    items = report_items(report)
    items = {"rule": format_rule(rule), "tax_source": args.tax_source, **items}
    files = {args.plot_data: _plot_data(report)} if args.plot_data is not None else {}
    return format_table(report, args.per_capita, args.share_of_revenue), items, files


COMMANDS = {
    "expect": cmd_expect,
    "simulate": cmd_simulate,
    "aggregate": cmd_aggregate,
    "extremize": cmd_extremize,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        text, items, files = COMMANDS[args.command](args)
        # everything is computed before anything is written
        for path, content in files.items():
            _write_atomic(path, content)
        if args.out is not None:
            _write_atomic(args.out, format_items(items))
    except RoundTaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
