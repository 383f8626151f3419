"""Numpy implementation of the hot kernels.

Must stay bit-identical to ``_ckernels.pyx``; ``tests/test_kernels.py``
checks the two against each other whenever the extension is built.

Random stream (counter-based, SplitMix64 finalizer as the mixing function):

    base(i)   = mix64(key + (i + 1) * GOLDEN)
    draw(i,k) = mix64(base(i) + (k + 1) * GOLDEN)
    u         = (draw >> 11) * 2**-53          in [0, 1)

Transaction ``i`` uses ``k = 0`` for its basket size and ``k = 1..n`` for
its item endings, so every transaction depends on (key, i) alone.
"""
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_TWO_M53 = 2.0 ** -53

NAME = "numpy"


def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _unit(z):
    return (z >> _S11).astype(np.float64) * _TWO_M53


def simulate_block(key, start, stop, basket_sizes, basket_cdf, ending_cdf, kernel):
    """Simulate transactions ``start..stop-1``.

    Returns (basket size, total residue mod 10, delta in agorot) per
    transaction, each as an int64 array.
    """
    key = np.uint64(key)
    idx = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = mix64(key + (idx + np.uint64(1)) * GOLDEN)
        u0 = _unit(mix64(base + GOLDEN))
        sizes = np.asarray(basket_sizes, dtype=np.int64)[
            np.searchsorted(basket_cdf, u0, side="right")
        ]
        offsets = np.zeros(len(sizes), dtype=np.int64)
        np.cumsum(sizes[:-1], out=offsets[1:])
        owner = np.repeat(np.arange(len(sizes)), sizes)
        k = (np.arange(int(sizes.sum()), dtype=np.int64) - offsets[owner] + 2).astype(np.uint64)
        u = _unit(mix64(base[owner] + k * GOLDEN))
    digits = np.searchsorted(ending_cdf, u, side="right").astype(np.int64)
    residues = np.add.reduceat(digits, offsets) % 10 if len(sizes) else digits[:0]
    deltas = np.asarray(kernel, dtype=np.int64)[residues]
    return sizes, residues, deltas


def round_amounts(amounts, grid, up):
    """Vectorised rounding; ``up[r]`` is 1 where residue r rounds up."""
    a = np.asarray(amounts, dtype=np.int64)
    if a.size and a.min() < 0:
        raise ValueError("cannot round a negative amount")
    r = a % grid
    up = np.asarray(up, dtype=np.int64)
    return a - r + up[r] * grid
