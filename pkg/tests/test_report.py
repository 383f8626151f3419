import math

import pytest
from hypothesis import given, strategies as st

from roundtax.errors import DomainError
from roundtax.report import (
    ReportContext,
    apportion,
    build_report,
    derived_metrics,
    format_items,
    format_table,
    parse_items,
    report_items,
)


def test_derived_metrics_min():
    m = derived_metrics(422_390, ReportContext(40.8e9, 8.1e6, 3.6097))
    assert m.per_capita_nis == pytest.approx(0.0521, abs=5e-5)
    assert m.per_capita_cents == pytest.approx(1.44, abs=5e-3)
    assert 100 * m.share_of_revenue == pytest.approx(0.00104, abs=5e-6)


def test_derived_metrics_max():
    m = derived_metrics(763_641)
    assert m.per_capita_nis == pytest.approx(0.0943, abs=5e-5)
    assert m.per_capita_cents == pytest.approx(2.61, abs=5e-3)
    assert 100 * m.share_of_revenue == pytest.approx(0.00187, abs=5e-6)


def test_derived_metrics_zero():
    m = derived_metrics(0.0)
    assert (m.per_capita_nis, m.per_capita_cents, m.share_of_revenue) == (0.0, 0.0, 0.0)


def test_context_must_be_positive():
    with pytest.raises(DomainError):
        ReportContext(population=0)


@given(st.lists(st.floats(0, 1e7), min_size=1, max_size=8))
def test_apportion_sums_to_rounded_total(values):
    rows, total = apportion(values)
    assert sum(rows) == total == round(math.fsum(values))
    assert all(abs(r - v) < 1 for r, v in zip(rows, values))


def _table1_report(table1_entries):
    profiles = [p for p, _ in table1_entries]
    return build_report(profiles, [t for _, t in table1_entries])


def test_printed_rows_add_up(table1_entries):
    text = format_table(_table1_report(table1_entries))
    lines = text.splitlines()
    body = [ln for ln in lines[3:] if ln and not ln.startswith("-")]
    stores, total = body[:-1], body[-1]
    for col in (4, 5, 6):
        store_vals = [int(ln.split()[col].replace(",", "")) for ln in stores]
        assert sum(store_vals) == int(total.split()[col - 1].replace(",", ""))


def test_machine_and_human_agree(table1_entries):
    report = _table1_report(table1_entries)
    items = parse_items(format_items(report_items(report)))
    text = format_table(report, per_capita=True, share_of_revenue=True)
    total_line = next(ln for ln in text.splitlines() if ln.startswith("total"))
    for key in ("equal", "max", "min"):
        assert f"{round(float(items[f'total.{key}_tax'])):,d}" in total_line
    for key in ("min", "max"):
        assert f"NIS {float(items[f'metrics.{key}.per_capita_nis']):.4f}" in text
    assert float(items["total.max_tax"]) == report.maximum.total_tax


def test_items_round_trip_floats(table1_entries):
    report = _table1_report(table1_entries)
    items = report_items(report)
    parsed = parse_items(format_items(items))
    for k, v in items.items():
        if isinstance(v, float):
            assert float(parsed[k]) == v
