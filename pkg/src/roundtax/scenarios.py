"""Economy-wide rounding tax under cash-share scenarios.

A store's annual tax is ``tax per transaction * transactions * cash share``.
The extremal scenarios solve the linear program

    max/min  sum_s T_s c_s   s.t.  sum_s w_s c_s = overall,  0 <= c_s <= 1

where ``T_s`` is the store's annual tax at a 100% cash share and ``w_s`` its
weight (revenue share by default). With one equality constraint and box
bounds the optimum is greedy in ``T_s / w_s``: fill stores in ratio order
until the budget runs out, leaving at most one share strictly inside (0, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from roundtax.distributions import StoreProfile
from roundtax.errors import DataFormatError, DomainError, InfeasibleScenarioError, InvariantBreach

DEFAULT_TOTAL_REVENUE = 40.8e9
CONSTRAINT_TOL = 1e-9

StoreTax = tuple[StoreProfile, float]


@dataclass(frozen=True)
class CashShareScenario:
    shares: Mapping[str, float]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "shares", dict(self.shares))
        for store, c in self.shares.items():
            if not 0.0 <= c <= 1.0:
                raise DomainError(f"cash share for {store!r} is {c}, outside [0, 1]")

    def __getitem__(self, store: str) -> float:
        return self.shares[store]


@dataclass(frozen=True)
class AggregateResult:
    per_store_tax: dict[str, float]
    total_tax: float
    share_of_revenue: float
    extremal_shares: CashShareScenario | None = field(default=None)


def uniform_scenario(profiles: Sequence[StoreProfile], share: float, label: str = "") -> CashShareScenario:
    return CashShareScenario({p.name: share for p in profiles}, label or f"equal {share:g}")


def annual_tax_at_full_cash(profile: StoreProfile, tax: float) -> float:
    """NIS per year if every transaction were paid in cash."""
    return tax * profile.annual_transactions * 1000.0


def aggregate(
    entries: Sequence[StoreTax],
    scenario: CashShareScenario,
    total_revenue: float = DEFAULT_TOTAL_REVENUE,
) -> AggregateResult:
    names = [p.name for p, _ in entries]
    missing = [n for n in names if n not in scenario.shares]
    if missing:
        raise DomainError(f"scenario has no cash share for {missing}")
    extra = sorted(set(scenario.shares) - set(names))
    if extra:
        raise DomainError(f"scenario names unknown stores {extra}")
    per_store = {p.name: annual_tax_at_full_cash(p, tax) * scenario[p.name] for p, tax in entries}
    total = math.fsum(per_store.values())
    return AggregateResult(per_store, total, total / total_revenue)


def store_weights(profiles: Sequence[StoreProfile], weights: str = "revenue") -> dict[str, float]:
    """Constraint weights: revenue shares, or each store's share of transactions."""
    if weights == "revenue":
        return {p.name: p.revenue_share for p in profiles}
    if weights == "transactions":
        total = math.fsum(p.annual_transactions for p in profiles)
        return {p.name: p.annual_transactions / total for p in profiles}
    raise DomainError(f"unknown weighting {weights!r}; use 'revenue' or 'transactions'")


def greedy_shares(
    values: Mapping[str, float], weights: Mapping[str, float], overall: float, sense: str = "max"
) -> dict[str, float]:
    """Solve the single-constraint box LP by ratio ordering.

    Ties in ``value / weight`` are broken by store name.
    """
    if sense not in ("max", "min"):
        raise DomainError(f"sense must be 'max' or 'min', got {sense!r}")
    if not 0.0 <= overall <= 1.0:
        raise InfeasibleScenarioError(f"overall cash share {overall} outside [0, 1]")
    capacity = math.fsum(weights.values())
    if overall > capacity + CONSTRAINT_TOL:
        raise InfeasibleScenarioError(
            f"overall cash share {overall} exceeds the attainable maximum {capacity!r}"
        )
    sign = 1.0 if sense == "max" else -1.0
    shares: dict[str, float] = {}
    # zero-weight stores cost nothing: take them only if they help the objective
    for s, w in weights.items():
        if w == 0.0:
            shares[s] = 1.0 if sign * values[s] > 0 else 0.0
    order = sorted((s for s, w in weights.items() if w > 0.0),
                   key=lambda s: (-sign * values[s] / weights[s], s))
    budget = overall
    for s in order:
        w = weights[s]
        if budget <= 0.0:
            shares[s] = 0.0
        elif w <= budget + 1e-12:
            shares[s] = 1.0
            budget = max(budget - w, 0.0)
        else:
            shares[s] = budget / w
            budget = 0.0
    used = math.fsum(weights[s] * c for s, c in shares.items())
    if abs(used - overall) > CONSTRAINT_TOL:
        raise InvariantBreach(f"greedy solution uses {used!r} of overall share {overall!r}")
    return {s: shares[s] for s in weights}


def extremize_cash_shares(
    entries: Sequence[StoreTax],
    overall_share: float,
    sense: str = "max",
    weights: str = "revenue",
    total_revenue: float = DEFAULT_TOTAL_REVENUE,
) -> tuple[CashShareScenario, AggregateResult]:
    """Store cash shares that maximize or minimize the total tax at a fixed overall share."""
    profiles = [p for p, _ in entries]
    values = {p.name: annual_tax_at_full_cash(p, tax) for p, tax in entries}
    shares = greedy_shares(values, store_weights(profiles, weights), overall_share, sense)
    scenario = CashShareScenario(shares, f"{sense} at overall {overall_share:g} ({weights} weights)")
    result = aggregate(entries, scenario, total_revenue)
    interior = [s for s, c in shares.items() if 0.0 < c < 1.0]
    if len(interior) > 1:
        raise InvariantBreach(f"more than one interior share: {interior}")
    return scenario, AggregateResult(result.per_store_tax, result.total_tax, result.share_of_revenue, scenario)


def parse_scenario(text: str, source: str = "scenario") -> tuple[CashShareScenario | None, float | None]:
    """Parse ``store=share`` lines plus optional ``overall=`` and ``label=``.

    Blank lines and ``#`` comments are ignored. Returns the scenario (None
    when no store lines are present) and the overall share (None if absent).
    """
    shares: dict[str, float] = {}
    overall = None
    label = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataFormatError(f"expected key=value, got {raw!r}", source=source, row=lineno)
        key, value = (x.strip() for x in line.split("=", 1))
        if key == "label":
            label = value
            continue
        try:
            number = float(value)
        except ValueError:
            raise DataFormatError(f"{key}: not a number: {value!r}", source=source, row=lineno) from None
        if not 0.0 <= number <= 1.0:
            raise DataFormatError(f"{key}: share {number} outside [0, 1]", source=source, row=lineno)
        if key == "overall":
            overall = number
        elif key in shares:
            raise DataFormatError(f"duplicate store {key!r}", source=source, row=lineno)
        else:
            shares[key] = number
    return (CashShareScenario(shares, label) if shares else None), overall
