"""
Pool event logs: parsing, replay and daily snapshots.

Event files are UTF-8 CSV with the header::

    block,index,timestamp,kind,amount_x_in,amount_x_out,amount_y_in,amount_y_out,lp_delta

Amounts are non-negative integers in token base units, ``lp_delta`` is a
signed integer (positive for mint, negative for burn, zero otherwise) and
``timestamp`` is UTC epoch seconds.  A ``sync`` row carries the reserves the
pair reported, in ``amount_x_in`` / ``amount_y_in``.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

from . import amm
from .amm import PoolState
from .errors import CPMMError, OrderError, ParseError, ReplayError

log = logging.getLogger(__name__)

EVENT_COLUMNS = (
    "block",
    "index",
    "timestamp",
    "kind",
    "amount_x_in",
    "amount_x_out",
    "amount_y_in",
    "amount_y_out",
    "lp_delta",
)
SNAPSHOT_COLUMNS = ("date", "reserve_x", "reserve_y", "lp_supply", "norm_x", "norm_y")

SNAPSHOT_HOUR_UTC = 12
DEFAULT_WARMUP_DAYS = 10

_UINT = re.compile(r"\d+")
_INT = re.compile(r"[+-]?\d+")


class EventKind(str, enum.Enum):
    MINT = "mint"
    BURN = "burn"
    SWAP = "swap"
    SYNC = "sync"


@dataclass(frozen=True)
class PoolEvent:
    block_number: int
    log_index: int
    timestamp: int
    kind: EventKind
    amount_x_in: int = 0
    amount_x_out: int = 0
    amount_y_in: int = 0
    amount_y_out: int = 0
    lp_delta: int = 0

    def to_row(self) -> list[str]:
        return [
            str(self.block_number),
            str(self.log_index),
            str(self.timestamp),
            self.kind.value,
            str(self.amount_x_in),
            str(self.amount_x_out),
            str(self.amount_y_in),
            str(self.amount_y_out),
            str(self.lp_delta),
        ]


@dataclass(frozen=True)
class PoolSnapshot:
    timestamp: int
    reserve_x: int
    reserve_y: int
    lp_supply: int

    @property
    def normalized_x(self) -> float:
        return self.reserve_x / self.lp_supply if self.lp_supply else math.nan

    @property
    def normalized_y(self) -> float:
        return self.reserve_y / self.lp_supply if self.lp_supply else math.nan


@dataclass(frozen=True)
class DailySnapshot:
    date: dt.date
    reserve_x: int
    reserve_y: int
    lp_supply: int
    norm_x: float
    norm_y: float


def _check_event(ev: PoolEvent) -> Optional[str]:
    ins = (ev.amount_x_in, ev.amount_y_in)
    outs = (ev.amount_x_out, ev.amount_y_out)
    if ev.kind is EventKind.SWAP:
        if sum(1 for a in ins if a) != 1 or sum(1 for a in outs if a) != 1:
            return "swap needs exactly one nonzero input and one nonzero output"
        if (ev.amount_x_in > 0) == (ev.amount_x_out > 0):
            return "swap input and output must be on opposite sides"
        if ev.lp_delta:
            return "swap cannot change the LP supply"
    elif ev.kind is EventKind.MINT:
        if any(outs):
            return "mint cannot have outputs"
        if ev.lp_delta < 0:
            return "mint lp_delta must be non-negative"
    elif ev.kind is EventKind.BURN:
        if any(ins):
            return "burn cannot have inputs"
        if ev.lp_delta > 0:
            return "burn lp_delta must be non-positive"
    else:
        if any(outs) or ev.lp_delta:
            return "sync carries reserves in the *_in columns only"
    return None


def parse_events(source: Union[TextIO, Iterable[str]]) -> list[PoolEvent]:
    """Parse and validate an event CSV stream into a strictly ordered list."""
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        return []
    header = [h.strip() for h in header]
    if tuple(header) != EVENT_COLUMNS:
        raise ParseError(1, f"expected header {','.join(EVENT_COLUMNS)}, got {','.join(header)}")

    events: list[PoolEvent] = []
    prev_key = None
    prev_ts = None
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(EVENT_COLUMNS):
            raise ParseError(line, f"expected {len(EVENT_COLUMNS)} fields, got {len(row)}")
        f = dict(zip(EVENT_COLUMNS, (c.strip() for c in row)))
        for col in EVENT_COLUMNS:
            if col == "kind":
                continue
            pattern = _INT if col == "lp_delta" else _UINT
            if not pattern.fullmatch(f[col]):
                raise ParseError(line, f"{col}={f[col]!r} is not a valid integer")
        try:
            kind = EventKind(f["kind"].lower())
        except ValueError:
            raise ParseError(line, f"unknown event kind {f['kind']!r}") from None
        ev = PoolEvent(
            block_number=int(f["block"]),
            log_index=int(f["index"]),
            timestamp=int(f["timestamp"]),
            kind=kind,
            amount_x_in=int(f["amount_x_in"]),
            amount_x_out=int(f["amount_x_out"]),
            amount_y_in=int(f["amount_y_in"]),
            amount_y_out=int(f["amount_y_out"]),
            lp_delta=int(f["lp_delta"]),
        )
        problem = _check_event(ev)
        if problem:
            raise ParseError(line, problem)
        key = (ev.block_number, ev.log_index)
        if prev_key is not None and key <= prev_key:
            what = "duplicate" if key == prev_key else "out-of-order"
            raise OrderError(line, f"{what} event position (block {key[0]}, index {key[1]})")
        if prev_ts is not None and ev.timestamp < prev_ts:
            raise OrderError(line, f"timestamp {ev.timestamp} precedes {prev_ts}")
        prev_key, prev_ts = key, ev.timestamp
        events.append(ev)
    return events


def read_events(path: Union[str, Path]) -> list[PoolEvent]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_events(fh)


def write_events(path: Union[str, Path], events: Iterable[PoolEvent]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_COLUMNS)
        for ev in events:
            w.writerow(ev.to_row())


def _apply(pool: PoolState, ev: PoolEvent, i: int) -> PoolState:
    if ev.kind is EventKind.SWAP:
        return amm.apply_swap(
            pool, ev.amount_x_in, ev.amount_y_in, ev.amount_x_out, ev.amount_y_out
        )

    if ev.kind is EventKind.MINT:
        delta = amm.add_liquidity(pool, ev.amount_x_in, ev.amount_y_in)
        after = delta.pool_after
        if ev.lp_delta and ev.lp_delta != delta.lp_tokens:
            # logged supply is authoritative (locked minimum liquidity, protocol fee mints)
            log.info(
                "event #%d: mint lp_delta %d differs from computed %d; using logged value",
                i, ev.lp_delta, delta.lp_tokens,
            )
            after = PoolState(
                after.reserve_x, after.reserve_y, pool.lp_supply + ev.lp_delta, pool.trading_fee
            )
        return after

    if ev.kind is EventKind.BURN:
        delta = amm.burn(pool, -ev.lp_delta)
        logged = (ev.amount_x_out, ev.amount_y_out)
        if any(logged) and logged != (delta.amount_x, delta.amount_y):
            log.info(
                "event #%d: burn outputs %s differ from computed %s; using logged values",
                i, logged, (delta.amount_x, delta.amount_y),
            )
            return PoolState(
                pool.reserve_x - ev.amount_x_out,
                pool.reserve_y - ev.amount_y_out,
                delta.pool_after.lp_supply,
                pool.trading_fee,
            )
        return delta.pool_after

    synced = (ev.amount_x_in, ev.amount_y_in)
    if synced != (pool.reserve_x, pool.reserve_y):
        log.warning(
            "event #%d: sync reserves %s override computed %s",
            i, synced, (pool.reserve_x, pool.reserve_y),
        )
    return PoolState(synced[0], synced[1], pool.lp_supply, pool.trading_fee)


def replay(events: Sequence[PoolEvent], trading_fee=amm.DEFAULT_TRADING_FEE) -> list[PoolSnapshot]:
    """Run events through the exact integer pool; one snapshot per event."""
    if not events:
        return []
    if events[0].kind is not EventKind.MINT:
        raise ReplayError(0, f"first event must be a mint, got {events[0].kind.value}")
    pool = PoolState.empty(trading_fee)
    series = []
    for i, ev in enumerate(events):
        try:
            pool = _apply(pool, ev, i)
        except CPMMError as exc:
            raise ReplayError(i, f"{ev.kind.value} at block {ev.block_number}: {exc}") from exc
        series.append(PoolSnapshot(ev.timestamp, pool.reserve_x, pool.reserve_y, pool.lp_supply))
    return series


def _utc_date(ts: int) -> dt.date:
    return dt.datetime.fromtimestamp(ts, tz=dt.timezone.utc).date()


def _noon_ts(day: dt.date) -> int:
    noon = dt.datetime(day.year, day.month, day.day, SNAPSHOT_HOUR_UTC, tzinfo=dt.timezone.utc)
    return int(noon.timestamp())


def daily_snapshots(
    series: Sequence[PoolSnapshot], end: Optional[dt.date] = None
) -> list[DailySnapshot]:
    """Latest pool state at or before 12:00:00 UTC for each calendar day.

    Runs from the day of the first event through ``end`` (default: the day of
    the last event).  Quiet days carry the previous state forward; days with
    no state yet or with an empty pool are skipped.
    """
    if not series:
        return []
    day = _utc_date(series[0].timestamp)
    last = end or _utc_date(series[-1].timestamp)
    out = []
    i = 0
    current: Optional[PoolSnapshot] = None
    while day <= last:
        cutoff = _noon_ts(day)
        while i < len(series) and series[i].timestamp <= cutoff:
            current = series[i]
            i += 1
        if current is not None and current.lp_supply > 0:
            out.append(
                DailySnapshot(
                    day,
                    current.reserve_x,
                    current.reserve_y,
                    current.lp_supply,
                    current.reserve_x / current.lp_supply,
                    current.reserve_y / current.lp_supply,
                )
            )
        day += dt.timedelta(days=1)
    return out


def write_snapshots(fh: TextIO, daily: Iterable[DailySnapshot]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SNAPSHOT_COLUMNS)
    for s in daily:
        w.writerow(
            [s.date.isoformat(), s.reserve_x, s.reserve_y, s.lp_supply, repr(s.norm_x), repr(s.norm_y)]
        )


def snapshots_to_csv(daily: Iterable[DailySnapshot]) -> str:
    buf = io.StringIO()
    write_snapshots(buf, daily)
    return buf.getvalue()


def read_snapshots(path: Union[str, Path]) -> list[DailySnapshot]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        if tuple(h.strip() for h in header) != SNAPSHOT_COLUMNS:
            raise ParseError(1, f"expected header {','.join(SNAPSHOT_COLUMNS)}")
        for row in reader:
            if not row:
                continue
            try:
                d, rx, ry, lp, nx, ny = row
                snap = DailySnapshot(
                    dt.date.fromisoformat(d), int(rx), int(ry), int(lp), float(nx), float(ny)
                )
            except ValueError as exc:
                raise ParseError(reader.line_num, str(exc)) from None
            out.append(snap)
    return out
