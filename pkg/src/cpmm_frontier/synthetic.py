"""Deterministic synthetic event logs for demos and tests.

An external market price follows a seeded random walk.  Each day a handful of
noise trades hit the pool, one arbitrage trade pulls the pool price back to
the market, and other LPs occasionally add or remove liquidity.  Every event
is produced with the exact integer pool, so the log replays cleanly.
"""

from __future__ import annotations

import datetime as dt
import math
import random
from typing import Optional

from . import amm
from .amm import PoolState
from .events import EventKind, PoolEvent

UNIT = 10**18
SECONDS_PER_BLOCK = 12
GENESIS_BLOCK = 12_000_000


class _Log:
    def __init__(self, start_ts: int):
        self.start_ts = start_ts
        self.events: list[PoolEvent] = []
        self._last = (-1, -1)

    def emit(self, ts: int, kind: EventKind, **amounts) -> None:
        block = GENESIS_BLOCK + (ts - self.start_ts) // SECONDS_PER_BLOCK
        index = self._last[1] + 1 if block == self._last[0] else 0
        if block < self._last[0]:
            block, index = self._last[0], self._last[1] + 1
        self._last = (block, index)
        self.events.append(PoolEvent(block, index, ts, kind, **amounts))


def synthetic_events(
    days: int = 400,
    seed: int = 20230101,
    trading_fee: float = amm.DEFAULT_TRADING_FEE,
    start: Optional[dt.datetime] = None,
    initial_x: int = 1_000 * UNIT,
    initial_price: float = 1.0,
    daily_volatility: float = 0.03,
    mean_reversion: float = 0.0,
    noise_trades_per_day: int = 6,
    noise_size: float = 0.01,
    lp_activity: float = 0.1,
    emit_sync: bool = False,
) -> list[PoolEvent]:
    """Build an event log spanning ``days`` calendar days.

    ``mean_reversion`` in ``(0, 1]`` pulls the log market price back towards
    its start each day; use it with a small volatility for a stable-pair pool.
    """
    rng = random.Random(seed)
    start = start or dt.datetime(2021, 1, 1, tzinfo=dt.timezone.utc)
    start_ts = int(start.timestamp())
    log = _Log(start_ts)

    def record_sync(ts, pool):
        if emit_sync:
            log.emit(ts, EventKind.SYNC, amount_x_in=pool.reserve_x, amount_y_in=pool.reserve_y)

    initial_y = int(initial_x * initial_price)
    delta = amm.bootstrap(initial_x, initial_y, trading_fee)
    pool = delta.pool_after
    log.emit(start_ts + 3600, EventKind.MINT, amount_x_in=initial_x, amount_y_in=initial_y, lp_delta=delta.lp_tokens)
    record_sync(start_ts + 3600, pool)

    log_price0 = math.log(initial_price)
    log_price = log_price0
    for day in range(days):
        day_ts = start_ts + day * 86_400
        log_price += rng.gauss(0.0, daily_volatility) - mean_reversion * (log_price - log_price0)
        times = sorted(rng.randrange(7_200, 86_400) for _ in range(noise_trades_per_day + 3))
        arb_at = rng.randrange(len(times))
        mint_at = rng.randrange(len(times)) if rng.random() < lp_activity else None
        burn_at = rng.randrange(len(times)) if rng.random() < lp_activity else None
        for slot, offset in enumerate(times):
            ts = day_ts + offset
            if slot == arb_at:
                pool = _arbitrage(pool, math.exp(log_price), ts, log)
            elif slot == mint_at:
                amount_x = int(pool.reserve_x * rng.uniform(0.005, 0.05))
                d = amm.mint(pool, amount_x)
                pool = d.pool_after
                log.emit(ts, EventKind.MINT, amount_x_in=d.amount_x, amount_y_in=d.amount_y, lp_delta=d.lp_tokens)
            elif slot == burn_at:
                lp = int(pool.lp_supply * rng.uniform(0.005, 0.05))
                d = amm.burn(pool, lp)
                pool = d.pool_after
                log.emit(ts, EventKind.BURN, amount_x_out=d.amount_x, amount_y_out=d.amount_y, lp_delta=-lp)
            else:
                side = rng.choice(("x", "y"))
                amount = int(pool.reserve(side) * rng.uniform(0.0, noise_size)) + 1
                pool = _swap(pool, side, amount, ts, log)
            record_sync(ts, pool)
    return log.events


def _swap(pool: PoolState, side: str, amount_in: int, ts: int, log: _Log) -> PoolState:
    q = amm.quote_swap_exact_in(pool, side, amount_in)
    if q.amount_out == 0:
        return pool
    if side == "x":
        log.emit(ts, EventKind.SWAP, amount_x_in=amount_in, amount_y_out=q.amount_out)
    else:
        log.emit(ts, EventKind.SWAP, amount_y_in=amount_in, amount_x_out=q.amount_out)
    return q.pool_after


def _arbitrage(pool: PoolState, market_price: float, ts: int, log: _Log) -> PoolState:
    # reserves that would put the pool price y/x at the market price
    target_x = math.sqrt(pool.k / market_price)
    gamma = pool.gamma
    if target_x > pool.reserve_x:
        amount = int((target_x - pool.reserve_x) / gamma)
        side = "x"
    else:
        target_y = math.sqrt(pool.k * market_price)
        amount = int((target_y - pool.reserve_y) / gamma)
        side = "y"
    if amount <= 0:
        return pool
    return _swap(pool, side, amount, ts, log)
