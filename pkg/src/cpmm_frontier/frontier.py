"""
Closed-form LP profitability analytics.

A position enters a pool at ``(x0, y0)`` and leaves with ``(x1, y1)`` per
liquidity share.  Holding would have been worth ``x0 + y0 * x1/y1`` in x-terms
at exit prices, the LP position is worth ``2 * x1``.  The *profitability
frontier* is the set of exits where the two are equal once network fees for
the mint (``mint_fee``) and burn (``burn_fee``) transactions are charged.
Fees are always expressed in x-token units at entry prices.

Four fee variants are supported:

``NO_FEES``          no network fees.
``MINT_ONLY``        only the mint transaction is charged.
``SYMMETRIC_BURN``   mint and burn charged in a numeraire outside the pool
                     whose value is assumed constant relative to the pool.
``ASYMMETRIC_BURN``  the burn fee is paid in the y-token (e.g. a wrapped
                     native asset), so its x-value moves with the exit price.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import DomainError, FrontierUndefined, InvariantShrunk

EPS_CASE = 1e-9


class FeeVariant(str, enum.Enum):
    NO_FEES = "none"
    MINT_ONLY = "mint"
    SYMMETRIC_BURN = "symmetric"
    ASYMMETRIC_BURN = "asymmetric"


class Case(enum.Enum):
    CASE1 = 1  # k unchanged, ratio unchanged
    CASE2 = 2  # k unchanged, ratio moved: pure divergence loss
    CASE3 = 3  # k grew, ratio unchanged
    CASE4 = 4  # k grew, ratio moved


@dataclass(frozen=True)
class PositionEndpoints:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        for name in ("x0", "y0", "x1", "y1"):
            v = getattr(self, name)
            if not v > 0 or not math.isfinite(v):
                raise DomainError(f"{name} must be strictly positive and finite, got {v}")

    @property
    def k0(self) -> float:
        return self.x0 * self.y0

    @property
    def k1(self) -> float:
        return self.x1 * self.y1

    @property
    def price_ratio_change(self) -> float:
        return (self.x1 * self.y0) / (self.y1 * self.x0)


@dataclass(frozen=True)
class FeeModel:
    mint_fee: float = 0.0
    burn_fee: float = 0.0
    variant: FeeVariant = FeeVariant.NO_FEES

    def __post_init__(self):
        object.__setattr__(self, "variant", FeeVariant(self.variant))
        if self.mint_fee < 0 or self.burn_fee < 0:
            raise DomainError(
                f"fees must be non-negative, got mint={self.mint_fee} burn={self.burn_fee}"
            )
        if self.variant is FeeVariant.NO_FEES and (self.mint_fee or self.burn_fee):
            raise DomainError("the no-fee variant cannot carry mint or burn fees")
        if self.variant is FeeVariant.MINT_ONLY and self.burn_fee:
            raise DomainError("the mint-only variant cannot carry a burn fee")

    @classmethod
    def none(cls) -> FeeModel:
        return cls()

    @classmethod
    def mint_only(cls, mint_fee: float) -> FeeModel:
        return cls(mint_fee, 0.0, FeeVariant.MINT_ONLY)

    @classmethod
    def symmetric(cls, mint_fee: float, burn_fee: float) -> FeeModel:
        return cls(mint_fee, burn_fee, FeeVariant.SYMMETRIC_BURN)

    @classmethod
    def asymmetric(cls, mint_fee: float, burn_fee: float) -> FeeModel:
        return cls(mint_fee, burn_fee, FeeVariant.ASYMMETRIC_BURN)


class Profitability(NamedTuple):
    profitable: bool
    margin: float


@dataclass(frozen=True)
class Endpoint:
    x1: float
    y1: float

    @property
    def price_ratio(self) -> float:
        # price of x in y-terms at this allocation
        return self.y1 / self.x1


@dataclass(frozen=True)
class PriceLimits:
    upper: Endpoint
    lower: Endpoint


def hold_value(p: PositionEndpoints) -> float:
    return p.x0 + p.y0 * (p.x1 / p.y1)


def lp_value(p: PositionEndpoints) -> float:
    return 2.0 * p.x1


def divergence_loss(r: float) -> float:
    """Relative LP underperformance against holding for a price-ratio change ``r``."""
    if not r > 0:
        raise DomainError(f"price ratio change must be positive, got {r}")
    if math.isinf(r):
        return -1.0
    return 2.0 * math.sqrt(r) / (1.0 + r) - 1.0


def classify_case(p: PositionEndpoints, eps: float = EPS_CASE) -> Case:
    k_ratio = p.k1 / p.k0
    if k_ratio < 1.0 - eps:
        raise InvariantShrunk(
            f"k1/k0 = {k_ratio!r} < 1; pool invariant cannot shrink under fee mechanics"
        )
    same_k = abs(k_ratio - 1.0) <= eps
    same_ratio = abs(p.price_ratio_change - 1.0) <= eps
    if same_k:
        return Case.CASE1 if same_ratio else Case.CASE2
    return Case.CASE3 if same_ratio else Case.CASE4


def frontier_pole(x0: float, fees: FeeModel) -> float:
    """Smallest exit ``x1`` (exclusive) on which the frontier is defined."""
    s0, s1 = fees.mint_fee, fees.burn_fee
    v = fees.variant
    if v is FeeVariant.NO_FEES:
        return x0 / 2
    if v is FeeVariant.MINT_ONLY:
        return x0 / 2 + s0 / 4
    if v is FeeVariant.SYMMETRIC_BURN:
        return x0 / 2 + (s0 + s1) / 4
    return x0 / 2 + s0 / 4


def frontier_y1(x1: float, x0: float, y0: float, fees: FeeModel) -> float:
    """Exit ``y1`` at which LP and hold (plus fees) break even for a given ``x1``."""
    s0, s1 = fees.mint_fee, fees.burn_fee
    v = fees.variant
    if not x1 > frontier_pole(x0, fees):
        raise FrontierUndefined(
            f"x1={x1!r} is not right of the frontier pole {frontier_pole(x0, fees)!r}"
        )
    if v is FeeVariant.NO_FEES:
        return y0 * x1 / (2 * x1 - x0)
    if v is FeeVariant.MINT_ONLY:
        return y0 * x1 * (1 + s0 / (2 * x0)) / (2 * x1 - x0 - s0 / 2)
    if v is FeeVariant.SYMMETRIC_BURN:
        return y0 * x1 * (1 + (s0 + s1) / (2 * x0)) / (2 * x1 - x0 - (s0 + s1) / 2)
    return y0 * x1 * (1 + (s0 / 2 + s1) / x0) / (2 * x1 - x0 - s0 / 2)


def frontier_limits(x0: float, y0: float, fees: FeeModel) -> tuple[float, float]:
    """Horizontal and vertical asymptotes ``(y_asymptote, x_asymptote)``."""
    s0, s1 = fees.mint_fee, fees.burn_fee
    v = fees.variant
    if v is FeeVariant.NO_FEES:
        return y0 / 2, x0 / 2
    if v is FeeVariant.MINT_ONLY:
        return y0 * (1 + s0 / (2 * x0)) / 2, (x0 + s0 / 2) / 2
    if v is FeeVariant.SYMMETRIC_BURN:
        return y0 * (1 + (s0 + s1) / (2 * x0)) / 2, (x0 + (s0 + s1) / 2) / 2
    return y0 * (1 + (s0 / 2 + s1) / x0) / 2, (x0 + s0 / 2) / 2


def is_profitable(p: PositionEndpoints, fees: FeeModel) -> Profitability:
    """LP value minus fee-loaded hold value; profitable only when strictly positive."""
    s0, s1 = fees.mint_fee, fees.burn_fee
    v = fees.variant
    hold = hold_value(p)
    lp = lp_value(p)
    if v is FeeVariant.NO_FEES:
        margin = lp - hold
    elif v is FeeVariant.MINT_ONLY:
        margin = lp - hold * (1 + s0 / (2 * p.x0))
    elif v is FeeVariant.SYMMETRIC_BURN:
        margin = lp - hold * (1 + (s0 + s1) / (2 * p.x0))
    else:
        burn_in_x = s1 * (p.x1 * p.y0) / (p.x0 * p.y1)
        margin = lp - burn_in_x - hold * (1 + s0 / (2 * p.x0))
    return Profitability(margin > 0, margin)


def _frontier_coefficients(x0: float, y0: float, fees: FeeModel) -> tuple[float, float]:
    # frontier written as y1 = a * x1 / (2 * x1 - b)
    y_asym, x_asym = frontier_limits(x0, y0, fees)
    return 2 * y_asym, 2 * x_asym


def price_limits(x0: float, y0: float, k1: float, fees: FeeModel) -> Optional[PriceLimits]:
    """Where the frontier crosses the ``x * y = k1`` curve, or None if it never does.

    Substituting ``y1 = k1/x1`` into ``y1 = a*x1/(2*x1 - b)`` gives
    ``a*x1**2 - 2*k1*x1 + k1*b = 0``.  Profitable exits on the k1 curve lie
    between the two roots.
    """
    if not k1 > 0:
        raise DomainError(f"k1 must be positive, got {k1}")
    a, b = _frontier_coefficients(x0, y0, fees)
    disc = k1 * k1 - a * k1 * b
    if disc < 0:
        # rounding noise at exact tangency
        if disc >= -1e-12 * k1 * k1:
            disc = 0.0
        else:
            return None
    sq = math.sqrt(disc)
    hi = (k1 + sq) / a
    # product of roots is k1*b/a; avoids cancellation in the smaller root
    lo = (k1 * b / a) / hi
    # smaller x1 means more y per x: the upper price limit
    return PriceLimits(upper=Endpoint(lo, k1 / lo), lower=Endpoint(hi, k1 / hi))
