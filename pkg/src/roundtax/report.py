"""Table-style reports and per-capita / share-of-revenue metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from roundtax.distributions import StoreProfile
from roundtax.errors import DomainError, InvariantBreach
from roundtax.scenarios import (
    AggregateResult,
    CashShareScenario,
    aggregate,
    extremize_cash_shares,
    uniform_scenario,
)


@dataclass(frozen=True)
class ReportContext:
    """Israel, 2013 by default."""

    total_revenue: float = 40.8e9  # NIS, FMCG market
    population: float = 8.1e6
    exchange_rate: float = 3.6097  # NIS per USD

    def __post_init__(self):
        for name in ("total_revenue", "population", "exchange_rate"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class DerivedMetrics:
    per_capita_nis: float
    per_capita_cents: float
    share_of_revenue: float


def derived_metrics(total_tax: float, ctx: ReportContext = ReportContext()) -> DerivedMetrics:
    per_capita = total_tax / ctx.population
    return DerivedMetrics(per_capita, per_capita / ctx.exchange_rate * 100.0, total_tax / ctx.total_revenue)


@dataclass(frozen=True)
class Report:
    profiles: tuple[StoreProfile, ...]
    taxes: tuple[float, ...]
    overall_share: float
    weights: str
    equal: AggregateResult
    maximum: AggregateResult
    minimum: AggregateResult
    context: ReportContext

    def metrics(self) -> dict[str, DerivedMetrics]:
        return {
            "min": derived_metrics(self.minimum.total_tax, self.context),
            "equal": derived_metrics(self.equal.total_tax, self.context),
            "max": derived_metrics(self.maximum.total_tax, self.context),
        }


def build_report(
    profiles: Sequence[StoreProfile],
    taxes: Sequence[float],
    overall_share: float = 0.25,
    weights: str = "revenue",
    context: ReportContext = ReportContext(),
) -> Report:
    entries = list(zip(profiles, taxes))
    equal = aggregate(entries, uniform_scenario(profiles, overall_share), context.total_revenue)
    _, hi = extremize_cash_shares(entries, overall_share, "max", weights, context.total_revenue)
    _, lo = extremize_cash_shares(entries, overall_share, "min", weights, context.total_revenue)
    if not lo.total_tax <= hi.total_tax + 1e-9 * max(1.0, abs(hi.total_tax)):
        raise InvariantBreach("minimum scenario exceeds maximum scenario")
    return Report(tuple(profiles), tuple(taxes), overall_share, weights, equal, hi, lo, context)


def apportion(values: Sequence[float]) -> tuple[list[int], int]:
    """Round to whole units so the rows add up to the once-rounded total.

    Largest-remainder method: floor every row, then hand the missing units
    to the rows with the largest fractional parts.
    """
    total = round(math.fsum(values))
    floors = [math.floor(v) for v in values]
    missing = total - sum(floors)
    order = sorted(range(len(values)), key=lambda i: (-(values[i] - floors[i]), i))
    for i in order[:missing]:
        floors[i] += 1
    return floors, total


def _money(x: int) -> str:
    return f"{x:,d}"


def format_table(report: Report, per_capita: bool = False, share_of_revenue: bool = False) -> str:
    names = [p.name for p in report.profiles]
    cols = {}
    for key, res in (("equal", report.equal), ("max", report.maximum), ("min", report.minimum)):
        cols[key] = apportion([res.per_store_tax[n] for n in names])
    txn_rows, txn_total = apportion([p.annual_transactions for p in report.profiles])
    width = max(12, *(len(n) for n in names))
    head = (f"{'store':<{width}} {'tax/txn':>8} {'revenue%':>9} {'txns(000)':>11} "
            f"{'equal':>11} {'max':>11} {'min':>11} {'max share':>10} {'min share':>10}")
    lines = [f"Rounding tax, overall cash share {report.overall_share:g} ({report.weights} weights)",
             head, "-" * len(head)]
    hi_shares = report.maximum.extremal_shares
    lo_shares = report.minimum.extremal_shares
    for i, (p, tax) in enumerate(zip(report.profiles, report.taxes)):
        lines.append(
            f"{p.name:<{width}} {tax:>8.4f} {100 * p.revenue_share:>9.2f} {_money(txn_rows[i]):>11} "
            f"{_money(cols['equal'][0][i]):>11} {_money(cols['max'][0][i]):>11} "
            f"{_money(cols['min'][0][i]):>11} {100 * hi_shares[p.name]:>9.1f}% {100 * lo_shares[p.name]:>9.1f}%"
        )
    lines.append("-" * len(head))
    rev_total = 100 * math.fsum(p.revenue_share for p in report.profiles)
    lines.append(
        f"{'total':<{width}} {'':>8} {rev_total:>9.2f} {_money(txn_total):>11} "
        f"{_money(cols['equal'][1]):>11} {_money(cols['max'][1]):>11} {_money(cols['min'][1]):>11}"
    )
    metrics = report.metrics()
    if per_capita:
        lines.append("")
        for key in ("min", "equal", "max"):
            m = metrics[key]
            lines.append(f"per capita ({key:>5}): NIS {m.per_capita_nis:.4f} = {m.per_capita_cents:.2f} US cents")
    if share_of_revenue:
        lines.append("")
        for key in ("min", "equal", "max"):
            lines.append(f"share of revenue ({key:>5}): {100 * metrics[key].share_of_revenue:.5f}%")
    return "\n".join(lines) + "\n"


def report_items(report: Report) -> dict[str, float | str]:
    """Full-precision values, keyed ``<store>.<field>`` and ``total.<field>``."""
    out: dict[str, float | str] = {
        "overall_share": report.overall_share,
        "weights": report.weights,
    }
    for p, tax in zip(report.profiles, report.taxes):
        n = p.name
        out[f"{n}.tax_per_txn"] = tax
        out[f"{n}.revenue_share"] = p.revenue_share
        out[f"{n}.transactions_thousands"] = p.annual_transactions
        out[f"{n}.equal_tax"] = report.equal.per_store_tax[n]
        out[f"{n}.max_tax"] = report.maximum.per_store_tax[n]
        out[f"{n}.min_tax"] = report.minimum.per_store_tax[n]
        out[f"{n}.max_share"] = report.maximum.extremal_shares[n]
        out[f"{n}.min_share"] = report.minimum.extremal_shares[n]
    out["total.equal_tax"] = report.equal.total_tax
    out["total.max_tax"] = report.maximum.total_tax
    out["total.min_tax"] = report.minimum.total_tax
    for key, m in report.metrics().items():
        out[f"metrics.{key}.per_capita_nis"] = m.per_capita_nis
        out[f"metrics.{key}.per_capita_cents"] = m.per_capita_cents
        out[f"metrics.{key}.share_of_revenue"] = m.share_of_revenue
    return out


def format_items(items: dict[str, float | str]) -> str:
    """One ``key=value`` line per item; floats use their round-trip repr."""
    return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n" for k, v in items.items())


def parse_items(text: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in text.splitlines() if line and not line.startswith("#"))


def scenario_items(scenario: CashShareScenario, result: AggregateResult, prefix: str = "") -> dict[str, float | str]:
    out: dict[str, float | str] = {}
    if scenario.label:
        out["label"] = scenario.label
    for n, tax in result.per_store_tax.items():
        out[f"{prefix}{n}.cash_share"] = scenario[n]
        out[f"{prefix}{n}.tax"] = tax
    out[f"{prefix}total.tax"] = result.total_tax
    out[f"{prefix}total.share_of_revenue"] = result.share_of_revenue
    return out
