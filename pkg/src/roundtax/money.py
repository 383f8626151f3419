"""Integer money amounts and cash-rounding rules.

Amounts are held in minor units (agorot, 1/100 NIS) as plain Python ints.
A rounding rule is a grid size plus an explicit up/down direction for every
nonzero residue, so tie handling is never implicit.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from roundtax.errors import DataFormatError, DomainError

__all__ = [
    "MinorUnits",
    "Direction",
    "RoundingRule",
    "round_amount",
    "rounding_delta",
    "delta_by_residue",
    "parse_rule",
    "format_rule",
    "NAMED_RULES",
]

MINOR_PER_MAJOR = 100

_DECIMAL_RE = re.compile(r"^([+-]?)(\d+)(?:\.(\d{1,2}))?$")


@dataclass(frozen=True, order=True, slots=True)
class MinorUnits:
    """An exact amount of money in agorot."""

    value: int

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(f"MinorUnits needs an int, got {type(self.value).__name__}")

    @classmethod
    def parse(cls, text: str) -> "MinorUnits":
        """Parse a decimal string such as ``"19.98"`` or ``"-0.5"``.

        At most two fractional digits are accepted; anything finer cannot be
        represented in agorot and is rejected rather than rounded.
        """
        m = _DECIMAL_RE.match(text.strip())
        if m is None:
            raise DataFormatError(f"not a decimal money amount: {text!r}")
        sign, whole, frac = m.groups()
        frac = (frac or "").ljust(2, "0")
        value = int(whole) * MINOR_PER_MAJOR + int(frac)
        return cls(-value if sign == "-" else value)

    def format(self) -> str:
        whole, frac = divmod(abs(self.value), MINOR_PER_MAJOR)
        sign = "-" if self.value < 0 else ""
        return f"{sign}{whole}.{frac:02d}"

    def __str__(self) -> str:
        return self.format()

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __add__(self, other: "MinorUnits") -> "MinorUnits":
        if not isinstance(other, MinorUnits):
            return NotImplemented
        return MinorUnits(self.value + other.value)

    def __sub__(self, other: "MinorUnits") -> "MinorUnits":
        if not isinstance(other, MinorUnits):
            return NotImplemented
        return MinorUnits(self.value - other.value)

    def __neg__(self) -> "MinorUnits":
        return MinorUnits(-self.value)

    def __mul__(self, k: int) -> "MinorUnits":
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return MinorUnits(self.value * k)

    __rmul__ = __mul__


class Direction(enum.Enum):
    DOWN = "down"
    UP = "up"


@dataclass(frozen=True)
class RoundingRule:
    """Round a cash total to a multiple of ``grid`` agorot.

    ``policy[r - 1]`` is the direction applied when ``amount % grid == r``;
    residue 0 is already on the grid.
    """

    grid: int
    policy: tuple[Direction, ...]
    name: str = ""

    def __post_init__(self):
        if isinstance(self.grid, bool) or not isinstance(self.grid, int) or self.grid < 1:
            raise DomainError(f"grid must be a positive integer, got {self.grid!r}")
        policy = tuple(self.policy)
        object.__setattr__(self, "policy", policy)
        if len(policy) != self.grid - 1:
            raise DomainError(
                f"policy must cover residues 1..{self.grid - 1} exactly once, "
                f"got {len(policy)} entries"
            )
        if not all(isinstance(d, Direction) for d in policy):
            raise DomainError("policy entries must be Direction values")

    @classmethod
    def from_sets(cls, grid: int, down: Iterable[int], up: Iterable[int], name: str = "") -> "RoundingRule":
        down, up = list(down), list(up)
        table: dict[int, Direction] = {}
        for r, d in [(r, Direction.DOWN) for r in down] + [(r, Direction.UP) for r in up]:
            if not 1 <= r < grid:
                raise DomainError(f"residue {r} outside 1..{grid - 1}")
            if r in table:
                raise DomainError(f"residue {r} assigned more than once")
            table[r] = d
        missing = sorted(set(range(1, grid)) - table.keys())
        if missing:
            raise DomainError(f"residues without a direction: {missing}")
        return cls(grid, tuple(table[r] for r in range(1, grid)), name)

    @classmethod
    def israel_2008(cls) -> "RoundingRule":
        """10-agora grid; endings 1-4 round down, 5-9 round up."""
        return cls.from_sets(10, range(1, 5), range(5, 10), name="israel_2008")

    @classmethod
    def symmetric(cls, grid: int) -> "RoundingRule":
        """Nearest multiple of ``grid``; an exact midpoint rounds up."""
        if grid < 1:
            raise DomainError(f"grid must be positive, got {grid}")
        down = [r for r in range(1, grid) if 2 * r < grid]
        up = [r for r in range(1, grid) if 2 * r >= grid]
        return cls.from_sets(grid, down, up, name=f"symmetric_{grid}")

    def direction(self, residue: int) -> Direction | None:
        if residue == 0:
            return None
        return self.policy[residue - 1]

    @property
    def down_residues(self) -> tuple[int, ...]:
        return tuple(r for r, d in enumerate(self.policy, 1) if d is Direction.DOWN)

    @property
    def up_residues(self) -> tuple[int, ...]:
        return tuple(r for r, d in enumerate(self.policy, 1) if d is Direction.UP)

    def __str__(self) -> str:
        return self.name or format_rule(self)


def _as_int(amount) -> int:
    if isinstance(amount, MinorUnits):
        return amount.value
    if isinstance(amount, bool) or not isinstance(amount, int):
        raise TypeError(f"amount must be MinorUnits or int, got {type(amount).__name__}")
    return amount


def round_amount(amount: MinorUnits | int, rule: RoundingRule) -> MinorUnits:
    """Round a non-negative cash total onto the rule's grid."""
    a = _as_int(amount)
    if a < 0:
        raise DomainError(f"cannot round a negative amount ({a} agorot)")
    r = a % rule.grid
    if r == 0:
        return MinorUnits(a)
    if rule.policy[r - 1] is Direction.DOWN:
        return MinorUnits(a - r)
    return MinorUnits(a - r + rule.grid)


def rounding_delta(amount: MinorUnits | int, rule: RoundingRule) -> MinorUnits:
    """Signed rounding tax of one payment; positive means the payer loses."""
    a = _as_int(amount)
    return MinorUnits(round_amount(a, rule).value - a)


def delta_by_residue(rule: RoundingRule) -> tuple[int, ...]:
    """Delta in agorot for each residue 0..grid-1."""
    return tuple(rounding_delta(r, rule).value for r in range(rule.grid))


# -- textual form -----------------------------------------------------------

NAMED_RULES = {
    "israel_2008": RoundingRule.israel_2008,
    "symmetric_5": lambda: RoundingRule.symmetric(5),
    "symmetric_10": lambda: RoundingRule.symmetric(10),
}

_SYMMETRIC_RE = re.compile(r"^symmetric_(\d+)$")


def _parse_residues(text: str) -> list[int]:
    out: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_rule(text: str) -> RoundingRule:
    """Parse a rule name or ``grid=<n>; down=<residues>; up=<residues>``.

    Residue lists are comma separated and may use ranges (``1-4``).
    """
    text = text.strip()
    if text in NAMED_RULES:
        return NAMED_RULES[text]()
    m = _SYMMETRIC_RE.match(text)
    if m:
        return RoundingRule.symmetric(int(m.group(1)))
    fields: Mapping[str, str] = {}
    try:
        fields = dict(
            (k.strip().lower(), v.strip())
            for k, v in (item.split("=", 1) for item in text.split(";") if item.strip())
        )
    except ValueError:
        raise DataFormatError(f"unrecognised rounding rule: {text!r}") from None
    unknown = set(fields) - {"grid", "down", "up", "name"}
    if "grid" not in fields or unknown:
        raise DataFormatError(f"unrecognised rounding rule: {text!r}")
    try:
        grid = int(fields["grid"])
        down = _parse_residues(fields.get("down", ""))
        up = _parse_residues(fields.get("up", ""))
    except ValueError:
        raise DataFormatError(f"bad residue list in rounding rule: {text!r}") from None
    try:
        return RoundingRule.from_sets(grid, down, up, name=fields.get("name", ""))
    except DomainError as exc:
        raise DataFormatError(f"invalid rounding rule {text!r}: {exc}") from None


def format_rule(rule: RoundingRule) -> str:
    down = ",".join(map(str, rule.down_residues))
    up = ",".join(map(str, rule.up_residues))
    return f"grid={rule.grid}; down={down}; up={up}"
