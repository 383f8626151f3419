import pytest

from roundtax import kernels
from roundtax.distributions import BasketSizeDistribution, EndingDistribution, StoreProfile
from roundtax.money import RoundingRule

BACKENDS = ["numpy"] + (["cython"] if kernels.compiled_kernels is not None else [])

# published per-transaction tax (NIS), revenue share, transactions (thousands)
TABLE1 = {
    "supermarkets_drugstores": (0.0075, 0.838, 188_856),
    "small_grocery": (0.0058, 0.153, 98_822),
    "convenience": (0.0048, 0.008, 7_856),
}


def make_profile(name="store", endings=None, baskets=None, revenue_share=1.0, txns=1000.0, tax=None):
    return StoreProfile(
        name,
        endings if endings is not None else EndingDistribution.uniform(),
        baskets if baskets is not None else BasketSizeDistribution.point_mass(1),
        revenue_share,
        txns,
        tax,
    )


@pytest.fixture
def israel():
    return RoundingRule.israel_2008()


@pytest.fixture
def sym5():
    return RoundingRule.symmetric(5)


@pytest.fixture
def table1_entries():
    return [(make_profile(n, revenue_share=w, txns=t, tax=tax), tax) for n, (tax, w, t) in TABLE1.items()]


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
