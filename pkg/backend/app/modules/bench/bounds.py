"""Best-known bounds, instance groups, time-limit policy and relative error."""

import csv
import logging
import re
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, ConfigDict, model_validator

from app.core.errors import ContractViolation

logger = logging.getLogger(__name__)

_NAME = re.compile(r"^([A-Za-z]+)0*(\d+)$")

GROUPS: tuple[str, ...] = ("FT/ORB", "LA", "ABZ/YN", "SWV", "TA", "DMU")
_GROUP_OF_PREFIX = {
    "FT": "FT/ORB",
    "ORB": "FT/ORB",
    "LA": "LA",
    "ABZ": "ABZ/YN",
    "YN": "ABZ/YN",
    "SWV": "SWV",
    "TA": "TA",
    "DMU": "DMU",
}

HOUR = 3600.0


def normalize_name(name: str) -> str:
    """Upper-case ``name`` and pad a trailing number to two digits (``ft6`` -> ``FT06``)."""
    match = _NAME.match(name.strip())
    if match is None:
        return name.strip().upper()
    prefix, number = match.groups()
    return f"{prefix.upper()}{int(number):02d}"


def _split(name: str) -> tuple[str, int | None]:
    match = _NAME.match(normalize_name(name))
    if match is None:
        return normalize_name(name), None
    return match.group(1), int(match.group(2))


def instance_group(name: str) -> str:
    prefix, _ = _split(name)
    return _GROUP_OF_PREFIX.get(prefix, "other")


def default_time_limit(name: str) -> float:
    """Per-run budget in seconds: one hour unless the instance is a known hard one."""
    prefix, number = _split(name)
    if number is None:
        return HOUR
    if prefix == "SWV" and number in (12, 15):
        return 2 * HOUR
    if prefix == "DMU":
        if 56 <= number <= 65:
            return 2 * HOUR
        if 66 <= number <= 70:
            return 4 * HOUR
        if 71 <= number <= 80:
            return 5 * HOUR
    return HOUR


class BoundsEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    instance_name: str
    lb: int
    ub: int

    @model_validator(mode="after")
    def _ordered(self) -> "BoundsEntry":
        if self.lb > self.ub:
            raise ValueError(f"{self.instance_name}: lower bound {self.lb} above upper bound {self.ub}")
        return self

    @property
    def optimal(self) -> bool:
        return self.lb == self.ub


class BoundsCatalog:
    def __init__(self, entries: dict[str, BoundsEntry] | None = None) -> None:
        self._entries = {normalize_name(k): v for k, v in (entries or {}).items()}

    @classmethod
    def load(cls, path: str | Path) -> "BoundsCatalog":
        path = Path(path)
        with path.open(encoding="utf-8", newline="") as handle:
            lines = (line for line in handle if line.strip() and not line.lstrip().startswith("#"))
            entries = {
                normalize_name(row["instance"]): BoundsEntry(
                    instance_name=normalize_name(row["instance"]),
                    lb=int(row["lb"]),
                    ub=int(row["ub"]),
                )
                for row in csv.DictReader(lines)
            }
        logger.debug("loaded %d bounds from %s", len(entries), path)
        return cls(entries)

    def get(self, name: str) -> BoundsEntry | None:
        return self._entries.get(normalize_name(name))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and normalize_name(name) in self._entries


def compute_re(best: int, lb: int) -> Fraction:
    """Relative error in percent, exact: ``100 * (best - lb) / lb``."""
    if lb <= 0:
        raise ContractViolation(f"relative error needs a positive lower bound, got {lb}")
    return Fraction(100 * (best - lb), lb)


def format_percent(value: Fraction | float | None, places: int = 3) -> str:
    """Round half-up to ``places`` decimals; ``None`` renders as ``NA``."""
    if value is None:
        return "NA"
    if isinstance(value, Fraction):
        exact = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        exact = Decimal(str(value))
    return str(exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))
