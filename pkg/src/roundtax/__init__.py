"""Rounding-tax estimation for cash rounding rules."""
from roundtax.distributions import (
    BasketSizeDistribution,
    EndingDistribution,
    StoreProfile,
    load_profile_dir,
    load_profiles,
    mean_basket_size,
)
from roundtax.errors import DataFormatError, DomainError, InfeasibleScenarioError, InvariantBreach
from roundtax.expectation import ResidueDistribution, convolve_endings, expected_tax_per_transaction
from roundtax.kernels import BACKEND
from roundtax.money import MinorUnits, RoundingRule, delta_by_residue, parse_rule, round_amount, rounding_delta
from roundtax.report import ReportContext, build_report, derived_metrics
from roundtax.scenarios import AggregateResult, CashShareScenario, aggregate, extremize_cash_shares
from roundtax.simulation import SimulationConfig, SimulationResult, simulate

__version__ = "0.1.0"
