"""
Virtual LP positions replayed over daily pool snapshots.

Each calendar day after a warm-up is an entry date.  A position entered on
day ``d`` and held for ``P`` days is summarized by its reserves per LP token
at ``d + P`` relative to those at ``d``, so every observation starts at
``(1, 1)``.  Observations are classified against the profitability frontier
of a unit position for a given fee tier.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional, Sequence, TextIO

from .events import DEFAULT_WARMUP_DAYS, DailySnapshot
from .frontier import (
    FeeModel,
    FeeVariant,
    PositionEndpoints,
    frontier_pole,
    frontier_y1,
    is_profitable,
)

TABLE_PERIODS = (30, 180, 360)
ALL_PERIODS = (30, 90, 180, 360)
DEFAULT_FEE_STEPS = tuple(range(0, 55, 5))
NA = "NA"

BACKTEST_VARIANTS = (FeeVariant.SYMMETRIC_BURN, FeeVariant.ASYMMETRIC_BURN)


class PoolType(str, enum.Enum):
    OPEN_MARKET = "OpenMarket"
    STABLE = "Stable"


@dataclass(frozen=True)
class HoldingOutcome:
    entry_date: dt.date
    exit_date: dt.date
    period_days: int
    rel_x: float
    rel_y: float

    def __post_init__(self):
        if not (self.rel_x > 0 and self.rel_y > 0):
            raise ValueError(f"relative reserves must be positive, got ({self.rel_x}, {self.rel_y})")

    def swapped(self) -> HoldingOutcome:
        return HoldingOutcome(self.entry_date, self.exit_date, self.period_days, self.rel_y, self.rel_x)


@dataclass(frozen=True)
class FeeTier:
    """Network fees for a round trip as a share of the initial holdings.

    The share is split equally between mint and burn.
    """

    label: str
    combined_fee_share: float

    def __post_init__(self):
        if not self.combined_fee_share >= 0:
            raise ValueError(f"fee share must be non-negative, got {self.combined_fee_share}")

    def fee_model(self, variant: FeeVariant, x0: float = 1.0) -> FeeModel:
        half = self.combined_fee_share * x0 / 2
        return FeeModel(half, half, _check_variant(variant))


SMALL = FeeTier("small", 0.10)
MEDIUM = FeeTier("medium", 0.05)
LARGE = FeeTier("large", 0.01)
TIERS = (SMALL, MEDIUM, LARGE)
_TIERS_BY_LABEL = {t.label: t for t in TIERS}
_TIERS_BY_LABEL["med"] = MEDIUM


def parse_tier(text: str) -> FeeTier:
    """``small``/``medium``/``large`` or a bare fee share such as ``0.02``."""
    key = text.strip().lower()
    if key in _TIERS_BY_LABEL:
        return _TIERS_BY_LABEL[key]
    try:
        share = float(key)
    except ValueError:
        raise ValueError(f"unknown fee tier {text!r}") from None
    return FeeTier(repr(share), share)


def _check_variant(variant) -> FeeVariant:
    variant = FeeVariant(variant)
    if variant not in BACKTEST_VARIANTS:
        raise ValueError(f"backtests use the symmetric or asymmetric variant, got {variant.value}")
    return variant


def variant_label(variant: FeeVariant) -> str:
    return "Symmetric" if variant is FeeVariant.SYMMETRIC_BURN else "Asymmetric"


def entry_dates(daily: Sequence[DailySnapshot], warmup_days: int = DEFAULT_WARMUP_DAYS) -> list[dt.date]:
    if not daily:
        return []
    first = daily[0].date + dt.timedelta(days=warmup_days)
    return [s.date for s in daily if s.date >= first]


def holding_outcomes(
    daily: Sequence[DailySnapshot],
    period_days: int,
    warmup_days: int = DEFAULT_WARMUP_DAYS,
) -> list[HoldingOutcome]:
    if period_days <= 0:
        raise ValueError(f"period_days must be positive, got {period_days}")
    if warmup_days < 0:
        raise ValueError(f"warmup_days must be non-negative, got {warmup_days}")
    by_date = {s.date: s for s in daily}
    horizon = dt.timedelta(days=period_days)
    out = []
    for d in entry_dates(daily, warmup_days):
        exit_snap = by_date.get(d + horizon)
        if exit_snap is None:
            continue
        entry = by_date[d]
        out.append(
            HoldingOutcome(
                d,
                exit_snap.date,
                period_days,
                exit_snap.norm_x / entry.norm_x,
                exit_snap.norm_y / entry.norm_y,
            )
        )
    return out


def orient(outcomes: Iterable[HoldingOutcome], native_side: Optional[Literal["x", "y"]]) -> list[HoldingOutcome]:
    """Put the fee-numeraire token on the y-axis."""
    if native_side == "x":
        return [o.swapped() for o in outcomes]
    return list(outcomes)


def outcome_profitable(o: HoldingOutcome, fees: FeeModel) -> bool:
    return is_profitable(PositionEndpoints(1.0, 1.0, o.rel_x, o.rel_y), fees).profitable


def classify_outcomes(
    outcomes: Sequence[HoldingOutcome], tier: FeeTier, variant: FeeVariant
) -> Optional[float]:
    """Fraction of outcomes that beat holding after fees; None when there are none."""
    if not outcomes:
        return None
    fees = tier.fee_model(variant)
    hits = sum(outcome_profitable(o, fees) for o in outcomes)
    return hits / len(outcomes)


@dataclass(frozen=True)
class OverlayPoint:
    fee_pct: float
    x1: float
    y1: float


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    if n < 2:
        return [lo]
    step = math.log(hi / lo) / (n - 1)
    return [lo * math.exp(i * step) for i in range(n)]


def frontier_overlay(
    variant: FeeVariant,
    fee_steps: Sequence[float] = DEFAULT_FEE_STEPS,
    x0: float = 1.0,
    y0: float = 1.0,
    n_points: int = 200,
    x_max: Optional[float] = None,
) -> list[OverlayPoint]:
    """Frontier curves for combined fees of ``fee_steps`` percent of the position.

    Each curve is sampled on a log-spaced grid just right of its pole up to
    ``x_max`` (default ``4 * x0``); ``x0`` itself is always included when it
    lies in the domain.
    """
    variant = _check_variant(variant)
    x_max = 4 * x0 if x_max is None else x_max
    points = []
    for pct in fee_steps:
        if pct < 0:
            raise ValueError(f"fee steps must be non-negative, got {pct}")
        fees = FeeTier(f"{pct}%", pct / 100).fee_model(variant, x0)
        pole = frontier_pole(x0, fees)
        lo = pole * (1 + 1e-3)
        if lo >= x_max:
            continue
        grid = log_grid(lo, x_max, n_points)
        if x0 > pole and x0 not in grid:
            grid = sorted(grid + [x0])
        points.extend(OverlayPoint(pct, x1, frontier_y1(x1, x0, y0, fees)) for x1 in grid)
    return points


@dataclass
class PoolInput:
    pair: str
    daily: Sequence[DailySnapshot]
    variant: FeeVariant = FeeVariant.SYMMETRIC_BURN
    pool_type: PoolType = PoolType.OPEN_MARKET
    # token that is the wrapped native asset; None keeps the pool's own orientation
    native_side: Optional[Literal["x", "y"]] = None
    warmup_days: int = DEFAULT_WARMUP_DAYS

    def outcomes(self, period_days: int) -> list[HoldingOutcome]:
        return orient(holding_outcomes(self.daily, period_days, self.warmup_days), self.native_side)


@dataclass
class TableRow:
    pair: str
    variant: FeeVariant
    pool_type: PoolType
    n: int
    cells: dict = field(default_factory=dict)  # (period, tier label) -> fraction or None


@dataclass
class OutcomeTable:
    periods: tuple
    tiers: tuple
    rows: list

    def header(self) -> list[str]:
        cols = ["pair", "fee", "type", "N"]
        cols += [f"{p}d_{t.label}" for p in self.periods for t in self.tiers]
        return cols

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.header())
        for row in self.rows:
            line = [row.pair, variant_label(row.variant), PoolType(row.pool_type).value, row.n]
            for p in self.periods:
                for t in self.tiers:
                    v = row.cells[(p, t.label)]
                    line.append(NA if v is None else repr(v))
            w.writerow(line)

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def build_table(
    pools: Sequence[PoolInput],
    periods: Sequence[int] = TABLE_PERIODS,
    tiers: Sequence[FeeTier] = TIERS,
) -> OutcomeTable:
    rows = []
    for pool in pools:
        variant = _check_variant(pool.variant)
        row = TableRow(pool.pair, variant, PoolType(pool.pool_type), len(entry_dates(pool.daily, pool.warmup_days)))
        for p in periods:
            outcomes = pool.outcomes(p)
            for t in tiers:
                row.cells[(p, t.label)] = classify_outcomes(outcomes, t, variant)
        rows.append(row)
    return OutcomeTable(tuple(periods), tuple(tiers), rows)


OUTCOME_COLUMNS = ("entry_date", "period", "rel_x", "rel_y")


def write_outcomes(fh: TextIO, outcomes: Iterable[HoldingOutcome]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(OUTCOME_COLUMNS)
    for o in outcomes:
        w.writerow([o.entry_date.isoformat(), o.period_days, repr(o.rel_x), repr(o.rel_y)])


def write_overlay(fh: TextIO, points: Iterable[OverlayPoint]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("fee_pct", "x1", "y1"))
    for pt in points:
        w.writerow([repr(pt.fee_pct), repr(pt.x1), repr(pt.y1)])
