"""Exact expected rounding tax per cash transaction.

The last digit of a basket total is the sum of the items' last digits mod
10, so its law is an n-fold cyclic convolution of the ending distribution.
Weighting the rounding delta of each residue by that law, and averaging over
basket sizes, gives the value the Monte Carlo estimator converges to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from roundtax.distributions import BasketSizeDistribution, EndingDistribution, StoreProfile
from roundtax.errors import DomainError, InvariantBreach
from roundtax.money import MINOR_PER_MAJOR, RoundingRule, delta_by_residue

MODULUS = 10
RESIDUE_TOL = 1e-12


@dataclass(frozen=True)
class ResidueDistribution:
    """Probability of each last digit 0..9 of a basket total."""

    r: tuple[float, ...]

    def __post_init__(self):
        if len(self.r) != MODULUS:
            raise InvariantBreach(f"residue distribution needs {MODULUS} entries")
        total = math.fsum(self.r)
        if abs(total - 1.0) > RESIDUE_TOL or min(self.r) < -RESIDUE_TOL:
            raise InvariantBreach(f"residue distribution not normalized (sum {total!r})")

    def __getitem__(self, residue: int) -> float:
        return self.r[residue]


def cyclic_convolution(a: Sequence[float], b: Sequence[float]) -> tuple[float, ...]:
    """Law of (X + Y) mod len(a) for independent X ~ a, Y ~ b."""
    m = len(a)
    if len(b) != m:
        raise ValueError("cyclic convolution needs equal lengths")
    return tuple(math.fsum(a[i] * b[(k - i) % m] for i in range(m)) for k in range(m))


def _identity() -> tuple[float, ...]:
    return (1.0,) + (0.0,) * (MODULUS - 1)


def _power(base: Sequence[float], n: int) -> tuple[float, ...]:
    result = _identity()
    square = tuple(base)
    while n:
        if n & 1:
            result = cyclic_convolution(result, square)
        n >>= 1
        if n:
            square = cyclic_convolution(square, square)
    return result


def convolve_endings(endings: EndingDistribution, n: int) -> ResidueDistribution:
    """Distribution of the sum of ``n`` i.i.d. endings, mod 10.

    Uses repeated squaring, so the cost is O(log n) convolutions.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"item count must be a positive integer, got {n!r}")
    return ResidueDistribution(_power(endings.p, n))


def residue_kernel(rule: RoundingRule) -> tuple[int, ...]:
    """Delta in agorot for each basket-total residue mod 10."""
    if MODULUS % rule.grid != 0:
        raise DomainError(f"rule grid {rule.grid} does not divide {MODULUS}")
    table = delta_by_residue(rule)
    return tuple(table[r % rule.grid] for r in range(MODULUS))


def expected_tax_agorot(
    endings: EndingDistribution, baskets: BasketSizeDistribution, rule: RoundingRule
) -> float:
    kernel = residue_kernel(rule)
    # powers[k] holds the 2**k-fold convolution; shared across basket sizes
    powers = [tuple(endings.p)]
    while (1 << len(powers)) <= baskets.max_size:
        powers.append(cyclic_convolution(powers[-1], powers[-1]))
    terms = []
    for n, q in baskets.items():
        if q == 0.0:
            continue
        dist = _identity()
        k = 0
        while n:
            if n & 1:
                dist = cyclic_convolution(dist, powers[k])
            n >>= 1
            k += 1
        ResidueDistribution(dist)
        terms.extend(q * dist[r] * kernel[r] for r in range(MODULUS) if kernel[r])
    return math.fsum(terms)


def expected_tax_per_transaction(profile: StoreProfile, rule: RoundingRule) -> float:
    """Expected rounding tax of one cash transaction, in NIS."""
    value = expected_tax_agorot(profile.endings, profile.baskets, rule) / MINOR_PER_MAJOR
    if not abs(value) < rule.grid / MINOR_PER_MAJOR:
        raise InvariantBreach(f"{profile.name}: expected tax {value} outside the rounding bound")
    return value
