"""
Constant product pool mechanics (``x * y = k``).

Every function here is pure: it takes a :class:`PoolState` and returns a new
one inside the result, never mutating its input.

Two numeric paths share the same API.  When the pool reserves, the LP supply
and the requested amount are all Python ``int`` the *exact* path is used:
amounts are token base units and every division rounds in the pool's favour
(outputs down, inputs up), which mirrors deployed pair contracts and keeps
``k`` from ever decreasing.  Anything else goes through the real-valued path
in double precision, which evaluates the closed forms directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Union

from .errors import CPMMError, EmptyPool, ExceedsSupply, InsufficientLiquidity, NegativeAmount

Number = Union[int, float]
Side = Literal["x", "y"]

DEFAULT_TRADING_FEE = 0.003


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def fee_fraction(rho) -> Fraction:
    """Exact rational form of a trading fee given as float, str or Fraction."""
    if isinstance(rho, Fraction):
        return rho
    if _is_int(rho):
        return Fraction(rho)
    # repr round-trips the decimal the user typed (0.003 -> 3/1000)
    return Fraction(repr(float(rho)))


@dataclass(frozen=True)
class PoolState:
    reserve_x: Number
    reserve_y: Number
    lp_supply: Number
    trading_fee: float = DEFAULT_TRADING_FEE

    def __post_init__(self):
        if self.reserve_x < 0 or self.reserve_y < 0 or self.lp_supply < 0:
            raise NegativeAmount(
                f"reserves and supply must be non-negative, got "
                f"({self.reserve_x}, {self.reserve_y}, {self.lp_supply})"
            )
        live = (self.reserve_x > 0, self.reserve_y > 0, self.lp_supply > 0)
        if any(live) and not all(live):
            raise CPMMError(
                f"pool must be either empty or have both reserves and supply positive, "
                f"got ({self.reserve_x}, {self.reserve_y}, {self.lp_supply})"
            )
        if not 0 <= self.trading_fee < 1:
            raise CPMMError(f"trading fee must lie in [0, 1), got {self.trading_fee}")

    @classmethod
    def empty(cls, trading_fee: float = DEFAULT_TRADING_FEE, exact: bool = True) -> PoolState:
        zero = 0 if exact else 0.0
        return cls(zero, zero, zero, trading_fee)

    @property
    def k(self) -> Number:
        return self.reserve_x * self.reserve_y

    @property
    def gamma(self) -> float:
        return 1.0 - self.trading_fee

    @property
    def is_empty(self) -> bool:
        return self.lp_supply == 0

    @property
    def is_exact(self) -> bool:
        return _is_int(self.reserve_x) and _is_int(self.reserve_y) and _is_int(self.lp_supply)

    def reserve(self, side: Side) -> Number:
        return self.reserve_x if side == "x" else self.reserve_y


@dataclass(frozen=True)
class SwapQuote:
    input_side: Side
    amount_in: Number
    amount_out: Number
    # alpha (input x) or beta (input y): amount_in relative to the input reserve
    alpha_or_beta: float
    pool_after: PoolState


@dataclass(frozen=True)
class LiquidityDelta:
    amount_x: Number
    amount_y: Number
    lp_tokens: Number
    # growth (mint) or shrink (burn) factor of both reserves
    phi: float
    pool_after: PoolState


def _other(side: Side) -> Side:
    if side not in ("x", "y"):
        raise ValueError(f"side must be 'x' or 'y', got {side!r}")
    return "y" if side == "x" else "x"


def _with_reserves(pool: PoolState, side_a: Side, a: Number, b: Number, lp=None) -> PoolState:
    x, y = (a, b) if side_a == "x" else (b, a)
    return PoolState(x, y, pool.lp_supply if lp is None else lp, pool.trading_fee)


def _use_exact(pool: PoolState, *amounts) -> bool:
    # an int pool quoted with a float amount falls back to real arithmetic
    return pool.is_exact and all(_is_int(a) for a in amounts)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def spot_price(pool: PoolState, side: Literal["price_of_x", "price_of_y"] = "price_of_x") -> float:
    """Marginal price of one token in units of the other (``y/x`` for x)."""
    if pool.reserve_x <= 0 or pool.reserve_y <= 0:
        raise EmptyPool("spot price of an empty pool is undefined")
    if side == "price_of_x":
        return pool.reserve_y / pool.reserve_x
    if side == "price_of_y":
        return pool.reserve_x / pool.reserve_y
    raise ValueError(f"unknown price side {side!r}")


def quote_swap_exact_in(pool: PoolState, input_side: Side, amount_in: Number) -> SwapQuote:
    """Sell ``amount_in`` of ``input_side``; the trading fee stays in the pool.

    Output is ``a*g / (1 + a*g) * reserve_out`` with ``a = amount_in / reserve_in``
    and ``g = 1 - fee``.
    """
    out_side = _other(input_side)
    if pool.is_empty:
        raise EmptyPool("cannot swap against an empty pool")
    if amount_in < 0:
        raise NegativeAmount(f"amount_in must be non-negative, got {amount_in}")
    r_in, r_out = pool.reserve(input_side), pool.reserve(out_side)

    if _use_exact(pool, amount_in):
        g = 1 - fee_fraction(pool.trading_fee)
        in_eff = amount_in * g.numerator
        amount_out = (in_eff * r_out) // (r_in * g.denominator + in_eff)
    else:
        ag = (amount_in / r_in) * pool.gamma
        amount_out = ag / (1.0 + ag) * r_out

    after = _with_reserves(pool, input_side, r_in + amount_in, r_out - amount_out)
    return SwapQuote(input_side, amount_in, amount_out, amount_in / r_in, after)


def quote_swap_exact_out(pool: PoolState, output_side: Side, amount_out: Number) -> SwapQuote:
    """Smallest input that buys ``amount_out`` of ``output_side``.

    The exact path rounds the input up, so re-quoting that input with
    :func:`quote_swap_exact_in` yields at least ``amount_out``.
    """
    input_side = _other(output_side)
    if pool.is_empty:
        raise EmptyPool("cannot swap against an empty pool")
    if amount_out < 0:
        raise NegativeAmount(f"amount_out must be non-negative, got {amount_out}")
    r_in, r_out = pool.reserve(input_side), pool.reserve(output_side)
    if amount_out >= r_out:
        raise InsufficientLiquidity(
            f"requested {amount_out} but only {r_out} of token {output_side} in reserve"
        )

    if _use_exact(pool, amount_out):
        g = 1 - fee_fraction(pool.trading_fee)
        amount_in = _ceil_div(
            r_in * amount_out * g.denominator, (r_out - amount_out) * g.numerator
        )
    else:
        amount_in = r_in * amount_out / ((r_out - amount_out) * pool.gamma)

    after = _with_reserves(pool, input_side, r_in + amount_in, r_out - amount_out)
    return SwapQuote(input_side, amount_in, amount_out, amount_in / r_in, after)


def apply_swap(
    pool: PoolState,
    amount_x_in: Number,
    amount_y_in: Number,
    amount_x_out: Number,
    amount_y_out: Number,
) -> PoolState:
    """Apply swap amounts observed on chain, enforcing the fee-adjusted k check.

    Accepts any trade whose fee-discounted post-trade balances keep
    ``(x' - fee*in_x) * (y' - fee*in_y) >= x * y``; a trader may receive less
    than the maximal quote but never more.
    """
    if pool.is_empty:
        raise EmptyPool("cannot swap against an empty pool")
    amounts = (amount_x_in, amount_y_in, amount_x_out, amount_y_out)
    if any(a < 0 for a in amounts):
        raise NegativeAmount(f"swap amounts must be non-negative, got {amounts}")
    if amount_x_out >= pool.reserve_x or amount_y_out >= pool.reserve_y:
        raise InsufficientLiquidity(
            f"swap output ({amount_x_out}, {amount_y_out}) would drain reserves "
            f"({pool.reserve_x}, {pool.reserve_y})"
        )
    new_x = pool.reserve_x + amount_x_in - amount_x_out
    new_y = pool.reserve_y + amount_y_in - amount_y_out
    if _use_exact(pool, *amounts):
        rho = fee_fraction(pool.trading_fee)
        lhs = (new_x - rho * amount_x_in) * (new_y - rho * amount_y_in)
        ok = lhs >= pool.k
    else:
        rho = pool.trading_fee
        lhs = (new_x - rho * amount_x_in) * (new_y - rho * amount_y_in)
        ok = lhs >= pool.k * (1 - 1e-12)
    if not ok:
        raise InsufficientLiquidity(
            f"swap ({amount_x_in}, {amount_y_in}) -> ({amount_x_out}, {amount_y_out}) "
            f"violates the constant product constraint"
        )
    return PoolState(new_x, new_y, pool.lp_supply, pool.trading_fee)


def bootstrap(
    amount_x: Number, amount_y: Number, trading_fee: float = DEFAULT_TRADING_FEE
) -> LiquidityDelta:
    """First deposit into an empty pool; mints the geometric mean of the deposits."""
    if amount_x <= 0 or amount_y <= 0:
        raise NegativeAmount(
            f"initial deposit must be positive on both sides, got ({amount_x}, {amount_y})"
        )
    if _is_int(amount_x) and _is_int(amount_y):
        lp = math.isqrt(amount_x * amount_y)
    else:
        lp = math.sqrt(amount_x * amount_y)
    pool = PoolState(amount_x, amount_y, lp, trading_fee)
    return LiquidityDelta(amount_x, amount_y, lp, math.inf, pool)


def mint(pool: PoolState, amount_x: Number) -> LiquidityDelta:
    """Proportional deposit of ``amount_x`` plus the matching ``amount_x * y/x``.

    Both reserves grow by ``phi = amount_x / x``, so ``k' = (1 + phi)**2 * k``
    and the price ratio is left untouched.
    """
    if pool.is_empty:
        raise EmptyPool("use bootstrap() for the first deposit")
    if amount_x < 0:
        raise NegativeAmount(f"amount_x must be non-negative, got {amount_x}")
    x, y, lp = pool.reserve_x, pool.reserve_y, pool.lp_supply
    if _use_exact(pool, amount_x):
        amount_y = _ceil_div(amount_x * y, x)
        minted = amount_x * lp // x
    else:
        phi = amount_x / x
        amount_y = amount_x * y / x
        minted = phi * lp
    after = PoolState(x + amount_x, y + amount_y, lp + minted, pool.trading_fee)
    return LiquidityDelta(amount_x, amount_y, minted, amount_x / x, after)


def add_liquidity(pool: PoolState, amount_x: Number, amount_y: Number) -> LiquidityDelta:
    """Two-sided deposit with arbitrary amounts, as observed in mint events.

    Liquidity minted is the smaller of the two proportional claims; any excess
    on the other side is donated to existing LPs.  Bootstraps an empty pool.
    """
    if pool.is_empty:
        return bootstrap(amount_x, amount_y, pool.trading_fee)
    if amount_x < 0 or amount_y < 0:
        raise NegativeAmount(f"deposit must be non-negative, got ({amount_x}, {amount_y})")
    x, y, lp = pool.reserve_x, pool.reserve_y, pool.lp_supply
    if _use_exact(pool, amount_x, amount_y):
        minted = min(amount_x * lp // x, amount_y * lp // y)
    else:
        minted = min(amount_x * lp / x, amount_y * lp / y)
    after = PoolState(x + amount_x, y + amount_y, lp + minted, pool.trading_fee)
    return LiquidityDelta(amount_x, amount_y, minted, minted / lp, after)


def burn(pool: PoolState, lp_tokens: Number) -> LiquidityDelta:
    """Redeem ``lp_tokens`` for the proportional share of both reserves."""
    if lp_tokens < 0:
        raise NegativeAmount(f"lp_tokens must be non-negative, got {lp_tokens}")
    if lp_tokens > pool.lp_supply:
        raise ExceedsSupply(f"cannot burn {lp_tokens} of {pool.lp_supply} outstanding")
    if lp_tokens == 0:
        return LiquidityDelta(0 * pool.reserve_x, 0 * pool.reserve_y, lp_tokens, 0.0, pool)
    x, y, lp = pool.reserve_x, pool.reserve_y, pool.lp_supply
    if lp_tokens == lp:
        out_x, out_y = x, y
    elif _use_exact(pool, lp_tokens):
        out_x, out_y = lp_tokens * x // lp, lp_tokens * y // lp
    else:
        share = lp_tokens / lp
        out_x, out_y = share * x, share * y
    after = PoolState(x - out_x, y - out_y, lp - lp_tokens, pool.trading_fee)
    return LiquidityDelta(out_x, out_y, lp_tokens, lp_tokens / lp, after)
