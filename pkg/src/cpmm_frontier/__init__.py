"""Constant product market maker mechanics and LP profitability frontiers."""

__version__ = "0.1.0"

from .amm import PoolState, quote_swap_exact_in, quote_swap_exact_out, mint, burn, spot_price
from .frontier import (
    FeeModel,
    FeeVariant,
    PositionEndpoints,
    divergence_loss,
    frontier_limits,
    frontier_y1,
    hold_value,
    is_profitable,
    lp_value,
    price_limits,
)
