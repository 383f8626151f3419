"""Exit criteria. Each test records one PASS/FAIL line, shown in the terminal summary."""
import contextlib
import math
import time

import numpy as np
import pytest

from roundtax import kernels
from roundtax.distributions import BasketSizeDistribution, EndingDistribution, load_profile_dir, sample_data_dir
from roundtax.expectation import expected_tax_agorot, expected_tax_per_transaction
from roundtax.money import RoundingRule, round_amount, rounding_delta
from roundtax.report import ReportContext, derived_metrics
from roundtax.scenarios import aggregate, extremize_cash_shares, greedy_shares, uniform_scenario
from roundtax.simulation import SimulationConfig, simulate

from conftest import TABLE1, make_profile
from oracles import brute_force_tax_agorot, grid_search_3

# columns 4, 5, 6 of the published table
PRINTED = {
    "equal": {"supermarkets_drugstores": 353_962, "small_grocery": 143_836, "convenience": 9_482},
    "max": {"supermarkets_drugstores": 150_371, "small_grocery": 575_343, "convenience": 37_926},
    "min": {"supermarkets_drugstores": 422_390, "small_grocery": 0, "convenience": 0},
}
PRINTED_TOTAL = {"equal": 507_280, "max": 763_641, "min": 422_390}
TOTAL_RTOL = 0.005
# column 1 is printed to 4 decimals
TAX_HALF_UNIT = 0.00005


@contextlib.contextmanager
def criterion(log, number, title):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        log.append(f"FAIL  criterion {number}: {title}")
        raise
    log.append(f"PASS  criterion {number}: {title} ({time.perf_counter() - start:.2f}s)")


@pytest.fixture
def entries():
    return [(make_profile(n, revenue_share=w, txns=t, tax=tax), tax) for n, (tax, w, t) in TABLE1.items()]


def _scenarios(entries):
    equal = aggregate(entries, uniform_scenario([p for p, _ in entries], 0.25))
    s_max, hi = extremize_cash_shares(entries, 0.25, "max")
    s_min, lo = extremize_cash_shares(entries, 0.25, "min")
    return {"equal": equal, "max": hi, "min": lo}, s_max, s_min


def test_c1_worked_example(acceptance_log):
    with criterion(acceptance_log, 1, "two 9-ending items cost exactly NIS 0.02 (exact and simulated)"):
        rule = RoundingRule.israel_2008()
        p = make_profile(endings=EndingDistribution.point_mass(9), baskets=BasketSizeDistribution.point_mass(2))
        assert rounding_delta(1998, rule).value == 2
        assert expected_tax_per_transaction(p, rule) == 0.02
        res = simulate(p, SimulationConfig(10_000, 2013, rule))
        assert res.mean_tax == 0.02 and res.std_error == 0.0


def test_c2_table1(acceptance_log, entries):
    with criterion(acceptance_log, 2, "Table 1 equal/max/min totals within 0.5%, extremal shares within 0.1 pp"):
        results, s_max, s_min = _scenarios(entries)
        for key, printed in PRINTED_TOTAL.items():
            assert abs(results[key].total_tax - printed) / printed < TOTAL_RTOL, key
        # per-store rows: consistent with the column-1 value at its printed precision
        txns = {n: t for n, (_, _, t) in TABLE1.items()}
        shares = {"equal": {n: 0.25 for n in txns}, "max": s_max.shares, "min": s_min.shares}
        for key, rows in PRINTED.items():
            for store, printed in rows.items():
                bound = TAX_HALF_UNIT * txns[store] * 1000 * shares[key][store] + 0.5
                assert abs(results[key].per_store_tax[store] - printed) <= bound, (key, store)
        sup = results["equal"].per_store_tax["supermarkets_drugstores"]
        assert abs(sup - 353_962) / 353_962 < TOTAL_RTOL
        assert abs(100 * s_max["supermarkets_drugstores"] - 10.6) <= 0.1
        assert abs(100 * s_min["supermarkets_drugstores"] - 29.8) <= 0.1
        assert s_max["small_grocery"] == s_max["convenience"] == 1.0
        assert s_min["small_grocery"] == s_min["convenience"] == 0.0


def test_c3_share_of_revenue_band(acceptance_log, entries):
    with criterion(acceptance_log, 3, "share of NIS 40.8bn revenue in [0.001%, 0.002%] for min/equal/max"):
        results, _, _ = _scenarios(entries)
        for key in ("min", "equal", "max"):
            pct = 100 * derived_metrics(results[key].total_tax, ReportContext()).share_of_revenue
            assert 0.001 <= pct <= 0.002, (key, pct)


def test_c4_per_capita_band(acceptance_log, entries):
    with criterion(acceptance_log, 4, "per capita NIS 0.052-0.094 (1.4-2.6 cents); paper's 0.05-0.09 / 1.4-2.5 recovered"):
        results, _, _ = _scenarios(entries)
        ctx = ReportContext()
        lo = derived_metrics(results["min"].total_tax, ctx)
        hi = derived_metrics(results["max"].total_tax, ctx)
        assert (round(lo.per_capita_nis, 3), round(hi.per_capita_nis, 3)) == (0.052, 0.094)
        assert (round(lo.per_capita_cents, 1), round(hi.per_capita_cents, 1)) == (1.4, 2.6)
        # the paper rounds to whole agorot first, then converts
        assert (round(lo.per_capita_nis, 2), round(hi.per_capita_nis, 2)) == (0.05, 0.09)
        cents = [round(round(m.per_capita_nis, 2) / ctx.exchange_rate * 100, 1) for m in (lo, hi)]
        assert cents == [1.4, 2.5]


def test_c5_oracle_equivalence(acceptance_log):
    with criterion(acceptance_log, 5, "exact expectation == brute force within 1e-12 on 1000 random profiles"):
        start = time.perf_counter()
        rng = np.random.default_rng(20131)
        rules = [RoundingRule.israel_2008(), RoundingRule.symmetric(5)]
        worst = 0.0
        for _ in range(1000):
            digits = rng.choice(10, size=rng.integers(1, 4), replace=False)
            p = np.zeros(10)
            p[digits] = rng.dirichlet(np.ones(len(digits)))
            endings = EndingDistribution(tuple(p))
            sizes = rng.choice(np.arange(1, 5), size=rng.integers(1, 5), replace=False)
            baskets = BasketSizeDistribution(tuple(sizes.tolist()), tuple(rng.dirichlet(np.ones(len(sizes)))))
            rule = rules[rng.integers(2)]
            got = expected_tax_agorot(endings, baskets, rule)
            want = brute_force_tax_agorot(endings, baskets, rule.grid, set(rule.up_residues))
            worst = max(worst, abs(got - want))
        assert worst <= 1e-12, worst
        assert time.perf_counter() - start < 10


def test_c6_monte_carlo_coverage(acceptance_log):
    with criterion(acceptance_log, 6, f"MC mean within 4 SE of exact in >=97.5% of 200 runs x 10k ({kernels.BACKEND})"):
        start = time.perf_counter()
        rule = RoundingRule.israel_2008()
        profiles = load_profile_dir(sample_data_dir(), share_tolerance=1.5e-3)
        for p in profiles:
            exact = expected_tax_per_transaction(p, rule)
            hits = 0
            for seed in range(200):
                res = simulate(p, SimulationConfig(10_000, seed, rule))
                hits += abs(res.mean_tax - exact) <= 4 * res.std_error
            assert hits >= 195, (p.name, hits)
        assert time.perf_counter() - start < 30


def test_c7_extremizer_vs_grid(acceptance_log):
    with criterion(acceptance_log, 7, "greedy optimum == 1e-3 grid search within one step, <=1 interior share (50 instances)"):
        start = time.perf_counter()
        rng = np.random.default_rng(7)
        names = ["a", "b", "c"]
        for _ in range(50):
            values = rng.uniform(0, 1e6, 3)
            weights = rng.dirichlet(np.ones(3))
            overall = rng.uniform(0, 1)
            for sense in ("max", "min"):
                shares = greedy_shares(dict(zip(names, values)), dict(zip(names, weights)), overall, sense)
                assert sum(0.0 < c < 1.0 for c in shares.values()) <= 1
                got = math.fsum(v * shares[n] for n, v in zip(names, values))
                best, slack = grid_search_3(values, weights, overall, sense)
                # greedy is never beaten by a feasible grid point
                if sense == "max":
                    assert got >= best - 1e-6
                else:
                    assert got <= best + 1e-6
                assert abs(got - best) <= slack
        assert time.perf_counter() - start < 30


def test_c8_rounding_algebra(acceptance_log):
    with criterion(acceptance_log, 8, f"rounding algebra on 10^6 amounts, both shipped rules ({kernels.BACKEND})"):
        start = time.perf_counter()
        rng = np.random.default_rng(8)
        impl = kernels.active
        for rule in (RoundingRule.israel_2008(), RoundingRule.symmetric(5)):
            g = rule.grid
            up = [0] + [int(r in rule.up_residues) for r in range(1, g)]
            a = rng.integers(0, 10**12, size=10**6)
            k = rng.integers(0, 10**6, size=10**6)
            rounded = impl.round_amounts(a, g, up)
            delta = rounded - a
            assert np.array_equal(impl.round_amounts(rounded, g, up), rounded)
            assert not np.any(rounded % g)
            assert np.all((delta > -g) & (delta < g))
            shifted = a + k * g
            assert np.array_equal(impl.round_amounts(shifted, g, up) - shifted, delta)
            # the scalar API agrees with the bulk kernel
            for x, r in zip(a[:20_000].tolist(), rounded[:20_000].tolist()):
                assert round_amount(x, rule).value == r
        assert time.perf_counter() - start < 5
