"""Two-stage Monte Carlo estimate of the rounding tax per cash transaction.

Stage 1 draws a basket size, stage 2 draws one price ending per item; the
delta of the rounded basket total is recorded and averaged.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

import numpy as np

from roundtax import kernels
from roundtax.distributions import StoreProfile
from roundtax.errors import DomainError, InvariantBreach
from roundtax.expectation import residue_kernel
from roundtax.money import MINOR_PER_MAJOR, RoundingRule

BLOCK = 1 << 16
_MASK64 = (1 << 64) - 1
_SEED_SALT = 0x243F6A8885A308D3


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_key(seed: int) -> int:
    """64-bit key from which every transaction's substream is derived."""
    return _mix64(seed ^ _SEED_SALT)


def sampling_table(probs) -> np.ndarray:
    """Cumulative table for inverse-CDF draws.

    Entries from the last positive mass onward are pinned to exactly 1.0 so
    a uniform in [0, 1) can never select a zero-probability tail entry.
    """
    probs = np.asarray(probs, dtype=np.float64)
    cdf = np.cumsum(probs)
    cdf[int(np.flatnonzero(probs > 0)[-1]):] = 1.0
    return cdf


@dataclass(frozen=True)
class SimulationConfig:
    n_transactions: int = 10_000
    seed: int = 0
    rule: RoundingRule = field(default_factory=RoundingRule.israel_2008)

    def __post_init__(self):
        if self.n_transactions < 1:
            raise DomainError("n_transactions must be at least 1")
        if not 0 <= self.seed <= _MASK64:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimulationResult:
    """Sample mean and standard error of the tax, in NIS per transaction.

    The per-transaction arrays are only kept when requested.
    """

    mean_tax: float
    std_error: float
    n: int
    per_transaction_deltas: np.ndarray | None = None
    basket_sizes: np.ndarray | None = None
    residues: np.ndarray | None = None


def simulate(
    profile: StoreProfile,
    config: SimulationConfig,
    *,
    keep_sample: bool = False,
    workers: int = 1,
    backend: str | None = None,
) -> SimulationResult:
    """Simulate ``config.n_transactions`` cash transactions for one store type.

    Results depend only on (profile, config): the block partition and the
    number of worker threads do not change them.
    """
    impl = kernels.get(backend)
    kernel = np.array(residue_kernel(config.rule), dtype=np.int64)
    sizes = np.array(profile.baskets.sizes, dtype=np.int64)
    basket_cdf = sampling_table(profile.baskets.probs)
    ending_cdf = sampling_table(profile.endings.p)
    key = stream_key(config.seed)
    n = config.n_transactions

    def run(start):
        return impl.simulate_block(key, start, min(start + BLOCK, n), sizes, basket_cdf, ending_cdf, kernel)

    starts = range(0, n, BLOCK)
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, starts))
    else:
        blocks = [run(s) for s in starts]

    total = sum(int(d.sum()) for _, _, d in blocks)
    total_sq = sum(int((d * d).sum()) for _, _, d in blocks)
    mean = Fraction(total, n)
    var = Fraction(n * total_sq - total * total, n * (n - 1)) if n > 1 else Fraction(0)
    mean_tax = float(mean / MINOR_PER_MAJOR)
    std_error = math.sqrt(var / n) / MINOR_PER_MAJOR
    bound = config.rule.grid / MINOR_PER_MAJOR
    if not (-bound < mean_tax < bound):
        raise InvariantBreach(f"simulated mean {mean_tax} outside the rounding bound")

    if keep_sample:
        bs, rs, ds = (np.concatenate(parts) for parts in zip(*blocks))
        return SimulationResult(mean_tax, std_error, n, ds, bs, rs)
    return SimulationResult(mean_tax, std_error, n)


def write_sample(result: SimulationResult, out: TextIO) -> None:
    """Write ``txn_index,basket_size,residue,delta_agorot`` rows."""
    if result.per_transaction_deltas is None:
        raise ValueError("simulation was run without keep_sample=True")
    out.write("txn_index,basket_size,residue,delta_agorot\n")
    for i, (n, r, d) in enumerate(zip(result.basket_sizes.tolist(), result.residues.tolist(),
                                      result.per_transaction_deltas.tolist())):
        out.write(f"{i},{n},{r},{d}\n")
