"""Price-ending and basket-size distributions per store type, plus CSV I/O.

Three comma-separated files describe a profile set:

``endings.csv``   ``store,d0,d1,...,d9``  one row per store
``baskets.csv``   ``store,size,prob``     long format, one row per (store, size)
``profiles.csv``  ``store,revenue_share,annual_transactions_thousands``
                  and optionally ``published_tax_per_txn`` (NIS)

Basket files list explicit sizes only. An open-ended bucket such as
"15 or more" has to be written as a single representative size.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from roundtax.errors import DataFormatError

log = logging.getLogger(__name__)

PROB_TOL = 1e-9
SHARE_TOL = 1e-6

ENDINGS_HEADER = ["store"] + [f"d{d}" for d in range(10)]
BASKETS_HEADER = ["store", "size", "prob"]
PROFILES_HEADER = ["store", "revenue_share", "annual_transactions_thousands"]
PROFILES_OPTIONAL = ["published_tax_per_txn"]


def _check_probs(probs: Sequence[float], what: str) -> None:
    for x in probs:
        if not (0.0 <= x <= 1.0) or math.isnan(x):
            raise DataFormatError(f"{what}: probability {x!r} outside [0, 1]")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_TOL:
        raise DataFormatError(f"{what}: probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class EndingDistribution:
    """Probability of each last digit 0..9 of a posted price (in agorot)."""

    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) != 10:
            raise DataFormatError(f"ending distribution needs 10 entries, got {len(p)}")
        _check_probs(p, "ending distribution")
        object.__setattr__(self, "p", p)

    def __getitem__(self, digit: int) -> float:
        return self.p[digit]

    @classmethod
    def point_mass(cls, digit: int) -> "EndingDistribution":
        return cls(tuple(1.0 if d == digit else 0.0 for d in range(10)))

    @classmethod
    def uniform(cls) -> "EndingDistribution":
        return cls((0.1,) * 10)


@dataclass(frozen=True)
class BasketSizeDistribution:
    """Finite pmf over item counts per shopping trip, sizes ascending."""

    sizes: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        probs = tuple(float(q) for q in self.probs)
        if not sizes or len(sizes) != len(probs):
            raise DataFormatError("basket distribution needs matching, non-empty sizes and probs")
        if min(sizes) < 1:
            raise DataFormatError(f"basket sizes must be >= 1, got {min(sizes)}")
        if len(set(sizes)) != len(sizes):
            raise DataFormatError("basket sizes must be unique")
        order = sorted(range(len(sizes)), key=sizes.__getitem__)
        sizes = tuple(sizes[i] for i in order)
        probs = tuple(probs[i] for i in order)
        _check_probs(probs, "basket distribution")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, pmf: dict[int, float]) -> "BasketSizeDistribution":
        return cls(tuple(pmf), tuple(pmf.values()))

    @classmethod
    def point_mass(cls, n: int) -> "BasketSizeDistribution":
        return cls((n,), (1.0,))

    def items(self):
        return zip(self.sizes, self.probs)

    @property
    def max_size(self) -> int:
        return self.sizes[-1]


def mean_basket_size(baskets: BasketSizeDistribution) -> float:
    return math.fsum(n * q for n, q in baskets.items())


@dataclass(frozen=True)
class StoreProfile:
    """Inputs for one store type.

    ``annual_transactions`` is in thousands, as in the published table.
    ``published_tax`` optionally carries an externally reported tax per
    cash transaction (NIS) so aggregation can run without recomputing it.
    """

    name: str
    endings: EndingDistribution
    baskets: BasketSizeDistribution
    revenue_share: float
    annual_transactions: float
    published_tax: float | None = None

    def __post_init__(self):
        if not self.name:
            raise DataFormatError("store name must be non-empty")
        if not 0.0 <= self.revenue_share <= 1.0:
            raise DataFormatError(f"{self.name}: revenue_share {self.revenue_share} outside [0, 1]")
        if not self.annual_transactions > 0:
            raise DataFormatError(f"{self.name}: annual_transactions must be positive")

    @property
    def avg_items_per_trip(self) -> float:
        return mean_basket_size(self.baskets)


def check_revenue_shares(profiles: Sequence[StoreProfile], tolerance: float = SHARE_TOL) -> float:
    """Raise unless revenue shares sum to 1 within ``tolerance``; return the sum."""
    total = math.fsum(p.revenue_share for p in profiles)
    gap = abs(total - 1.0)
    if gap > tolerance:
        raise DataFormatError(
            f"revenue shares sum to {total!r}; allowed deviation from 1 is {tolerance:g}"
        )
    if gap > SHARE_TOL:
        log.warning("revenue shares sum to %r (deviation %.3g accepted by tolerance %g)",
                    total, gap, tolerance)
    return total


# -- CSV ingestion ----------------------------------------------------------

def _read_rows(source: str | TextIO, name: str, required: list[str], optional: Iterable[str] = ()):
    text = source if isinstance(source, str) else source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataFormatError("empty file, expected a header row", source=name, row=1) from None
    allowed = set(required) | set(optional)
    for col in header:
        if col not in allowed:
            raise DataFormatError(f"unknown column {col!r}", source=name, row=1)
    missing = [c for c in required if c not in header]
    if missing:
        raise DataFormatError(f"missing column(s) {missing}", source=name, row=1)
    if len(set(header)) != len(header):
        raise DataFormatError("duplicate column in header", source=name, row=1)
    for rowno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataFormatError(
                f"expected {len(header)} fields, got {len(row)}", source=name, row=rowno
            )
        yield rowno, {k: v.strip() for k, v in zip(header, row)}


def _float(value: str, col: str, name: str, rowno: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise DataFormatError(f"column {col!r}: not a number: {value!r}", source=name, row=rowno) from None
    if not math.isfinite(x):
        raise DataFormatError(f"column {col!r}: non-finite value {value!r}", source=name, row=rowno)
    return x


def read_endings(source: str | TextIO, name: str = "endings.csv") -> dict[str, EndingDistribution]:
    out: dict[str, EndingDistribution] = {}
    for rowno, row in _read_rows(source, name, ENDINGS_HEADER):
        store = row["store"]
        if not store:
            raise DataFormatError("empty store name", source=name, row=rowno)
        if store in out:
            raise DataFormatError(f"duplicate store {store!r}", source=name, row=rowno)
        p = [_float(row[f"d{d}"], f"d{d}", name, rowno) for d in range(10)]
        try:
            out[store] = EndingDistribution(tuple(p))
        except DataFormatError as exc:
            raise DataFormatError(f"store {store!r}: {exc}", source=name, row=rowno) from None
    return out


def read_baskets(source: str | TextIO, name: str = "baskets.csv") -> dict[str, BasketSizeDistribution]:
    pmfs: dict[str, dict[int, float]] = {}
    last_row: dict[str, int] = {}
    for rowno, row in _read_rows(source, name, BASKETS_HEADER):
        store = row["store"]
        if not store:
            raise DataFormatError("empty store name", source=name, row=rowno)
        try:
            size = int(row["size"])
        except ValueError:
            raise DataFormatError(f"size is not an integer: {row['size']!r}", source=name, row=rowno) from None
        if size < 1:
            raise DataFormatError(f"basket size must be >= 1, got {size}", source=name, row=rowno)
        prob = _float(row["prob"], "prob", name, rowno)
        pmf = pmfs.setdefault(store, {})
        if size in pmf:
            raise DataFormatError(f"duplicate size {size} for store {store!r}", source=name, row=rowno)
        pmf[size] = prob
        last_row[store] = rowno
    out = {}
    for store, pmf in pmfs.items():
        try:
            out[store] = BasketSizeDistribution.from_mapping(pmf)
        except DataFormatError as exc:
            raise DataFormatError(f"store {store!r}: {exc}", source=name, row=last_row[store]) from None
    return out


def load_profiles(
    endings: str | TextIO,
    baskets: str | TextIO,
    profiles: str | TextIO,
    share_tolerance: float = SHARE_TOL,
    names: tuple[str, str, str] = ("endings.csv", "baskets.csv", "profiles.csv"),
) -> list[StoreProfile]:
    """Parse and validate a complete profile set from CSV text.

    Either every profile loads or a :class:`DataFormatError` is raised; no
    partial sets are returned. Profiles keep the row order of the profiles
    file.
    """
    ending_map = read_endings(endings, names[0])
    basket_map = read_baskets(baskets, names[1])
    pname = names[2]
    out: list[StoreProfile] = []
    seen: set[str] = set()
    for rowno, row in _read_rows(profiles, pname, PROFILES_HEADER, PROFILES_OPTIONAL):
        store = row["store"]
        if store in seen:
            raise DataFormatError(f"duplicate store {store!r}", source=pname, row=rowno)
        seen.add(store)
        if store not in ending_map:
            raise DataFormatError(f"store {store!r} has no row in {names[0]}", source=pname, row=rowno)
        if store not in basket_map:
            raise DataFormatError(f"store {store!r} has no rows in {names[1]}", source=pname, row=rowno)
        share = _float(row["revenue_share"], "revenue_share", pname, rowno)
        txns = _float(row["annual_transactions_thousands"], "annual_transactions_thousands", pname, rowno)
        published = row.get("published_tax_per_txn", "")
        try:
            out.append(StoreProfile(
                name=store,
                endings=ending_map[store],
                baskets=basket_map[store],
                revenue_share=share,
                annual_transactions=txns,
                published_tax=_float(published, "published_tax_per_txn", pname, rowno) if published else None,
            ))
        except DataFormatError as exc:
            raise DataFormatError(str(exc), source=pname, row=rowno) from None
    if not out:
        raise DataFormatError("no store profiles", source=pname, row=1)
    for extra in (set(ending_map) - seen) | (set(basket_map) - seen):
        raise DataFormatError(f"store {extra!r} is not listed in {pname}", source=pname)
    try:
        check_revenue_shares(out, share_tolerance)
    except DataFormatError as exc:
        raise DataFormatError(str(exc), source=pname) from None
    return out


def load_profile_dir(path: str | Path, share_tolerance: float = SHARE_TOL) -> list[StoreProfile]:
    """Load ``endings.csv``, ``baskets.csv`` and ``profiles.csv`` from a directory."""
    path = Path(path)
    texts = []
    for fname in ("endings.csv", "baskets.csv", "profiles.csv"):
        fpath = path / fname
        try:
            texts.append(fpath.read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataFormatError(f"cannot read: {exc.strerror}", source=str(fpath)) from None
    return load_profiles(*texts, share_tolerance=share_tolerance,
                         names=tuple(str(path / f) for f in ("endings.csv", "baskets.csv", "profiles.csv")))


# -- serialization ----------------------------------------------------------

def _write(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def dump_endings(profiles: Sequence[StoreProfile]) -> str:
    return _write([ENDINGS_HEADER] + [[p.name, *map(repr, p.endings.p)] for p in profiles])


def dump_baskets(profiles: Sequence[StoreProfile]) -> str:
    rows = [BASKETS_HEADER]
    for p in profiles:
        rows += [[p.name, n, repr(q)] for n, q in p.baskets.items()]
    return _write(rows)


def dump_profiles(profiles: Sequence[StoreProfile]) -> str:
    with_tax = any(p.published_tax is not None for p in profiles)
    header = PROFILES_HEADER + (PROFILES_OPTIONAL if with_tax else [])
    rows = [header]
    for p in profiles:
        row = [p.name, repr(p.revenue_share), repr(p.annual_transactions)]
        if with_tax:
            row.append("" if p.published_tax is None else repr(p.published_tax))
        rows.append(row)
    return _write(rows)


def sample_data_dir(name: str = "sample_text") -> Path:
    """Path of a dataset shipped with the package."""
    return Path(__file__).parent / "data" / name
