"""Command-line entry point: ``cpmm-frontier {replay,frontier,backtest,classify}``.

Exit codes: 0 success, 1 invalid analysis request, 2 usage error or missing
input, 3 malformed event file, 4 replay failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, backtest, events, frontier
from .errors import CPMMError, OrderError, ParseError, ReplayError
from .frontier import FeeModel, FeeVariant, PositionEndpoints

log = logging.getLogger("cpmm_frontier")

EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_REPLAY = 4


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _tiers(text: str) -> list[backtest.FeeTier]:
    try:
        return [backtest.parse_tier(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fee_model(args) -> FeeModel:
    variant = args.variant
    if variant is None:
        if args.burn_fee:
            variant = "symmetric"
        elif args.mint_fee:
            variant = "mint"
        else:
            variant = "none"
    try:
        return FeeModel(args.mint_fee, args.burn_fee, FeeVariant(variant))
    except CPMMError as exc:
        raise CLIError(EXIT_INVALID, str(exc)) from None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CLIError(EXIT_USAGE, f"input file not found: {path}")
    return p


def _write_manifest(out: Path, command: str, params: dict, inputs: Sequence[Path] = ()) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "params": params,
        "inputs": {str(p): _sha256(p) for p in inputs},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _open_out(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_events(path: Path) -> list[events.PoolEvent]:
    try:
        return events.read_events(path)
    except (ParseError, OrderError) as exc:
        raise CLIError(EXIT_PARSE, f"{path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: not UTF-8 ({exc})") from None


def _replay_daily(path: Path, rho: float, end=None) -> list[events.DailySnapshot]:
    evs = _load_events(path)
    try:
        series = events.replay(evs, rho)
    except ReplayError as exc:
        raise CLIError(EXIT_REPLAY, f"{path}: {exc}") from None
    return events.daily_snapshots(series, end)


def cmd_replay(args) -> int:
    path = _require_file(args.events)
    daily = _replay_daily(path, args.rho)
    out = _open_out(args.out)
    with open(out / "snapshots.csv", "w", newline="", encoding="utf-8") as fh:
        events.write_snapshots(fh, daily)
    _write_manifest(out, "replay", {"events": args.events, "rho": args.rho}, [path])
    print(f"wrote {len(daily)} daily snapshots to {out / 'snapshots.csv'}")
    return 0


def cmd_frontier(args) -> int:
    fees = _fee_model(args)
    if not (args.x0 > 0 and args.y0 > 0):
        raise CLIError(EXIT_INVALID, "x0 and y0 must be positive")
    pole = frontier.frontier_pole(args.x0, fees)
    if args.x1:
        grid = list(args.x1)
        bad = [x for x in grid if not x > pole]
        if bad:
            raise CLIError(
                EXIT_INVALID, f"x1 values {bad} are at or left of the frontier pole {pole!r}"
            )
    else:
        x_max = args.x_max if args.x_max is not None else 4 * args.x0
        if not pole * (1 + 1e-3) < x_max:
            raise CLIError(
                EXIT_INVALID, f"frontier pole {pole!r} leaves no domain below x_max={x_max!r}"
            )
        grid = backtest.log_grid(pole * (1 + 1e-3), x_max, args.points)
        if args.x0 > pole and args.x0 not in grid:
            grid = sorted(grid + [args.x0])
    y_asym, x_asym = frontier.frontier_limits(args.x0, args.y0, fees)

    out = _open_out(args.out)
    with open(out / "frontier.csv", "w", encoding="utf-8") as fh:
        fh.write("x1,y1\n")
        for x1 in grid:
            fh.write(f"{x1!r},{frontier.frontier_y1(x1, args.x0, args.y0, fees)!r}\n")
    report = [f"limits y_asymptote={y_asym!r} x_asymptote={x_asym!r}"]
    if args.k1 is not None:
        if not args.k1 > 0:
            raise CLIError(EXIT_INVALID, "k1 must be positive")
        pl = frontier.price_limits(args.x0, args.y0, args.k1, fees)
        if pl is None:
            report.append(f"price_limits k1={args.k1!r} empty")
        else:
            report.append(
                f"price_limits k1={args.k1!r} upper=({pl.upper.x1!r},{pl.upper.y1!r}) "
                f"lower=({pl.lower.x1!r},{pl.lower.y1!r})"
            )
    (out / "limits.txt").write_text("\n".join(report) + "\n")
    _write_manifest(
        out,
        "frontier",
        {
            "x0": args.x0,
            "y0": args.y0,
            "mint_fee": fees.mint_fee,
            "burn_fee": fees.burn_fee,
            "variant": fees.variant.value,
            "x1": args.x1,
            "points": args.points,
            "x_max": args.x_max,
            "k1": args.k1,
        },
    )
    print("\n".join(report))
    return 0


def cmd_backtest(args) -> int:
    if (args.events is None) == (args.snapshots is None):
        raise CLIError(EXIT_USAGE, "give exactly one of --events or --snapshots")
    if any(p <= 0 for p in args.periods):
        raise CLIError(EXIT_USAGE, "holding periods must be positive")
    if args.warmup_days < 0:
        raise CLIError(EXIT_USAGE, "warmup days must be non-negative")
    if any(s < 0 for s in args.fee_steps):
        raise CLIError(EXIT_USAGE, "fee steps must be non-negative")

    if args.events is not None:
        path = _require_file(args.events)
        daily = _replay_daily(path, args.rho)
    else:
        path = _require_file(args.snapshots)
        try:
            daily = events.read_snapshots(path)
        except ParseError as exc:
            raise CLIError(EXIT_PARSE, f"{path}: {exc}") from None

    variant = FeeVariant(args.variant)
    pool = backtest.PoolInput(
        pair=args.pair or path.stem,
        daily=daily,
        variant=variant,
        pool_type=backtest.PoolType(args.pool_type),
        native_side=args.native_side,
        warmup_days=args.warmup_days,
    )
    table = backtest.build_table([pool], args.periods, args.tiers)
    overlay = backtest.frontier_overlay(variant, args.fee_steps)

    out = _open_out(args.out)
    with open(out / "outcomes.csv", "w", newline="", encoding="utf-8") as fh:
        backtest.write_outcomes(fh, (o for p in args.periods for o in pool.outcomes(p)))
    with open(out / "table.csv", "w", newline="", encoding="utf-8") as fh:
        table.write_csv(fh)
    with open(out / "frontier_overlay.csv", "w", newline="", encoding="utf-8") as fh:
        backtest.write_overlay(fh, overlay)
    _write_manifest(
        out,
        "backtest",
        {
            "events": args.events,
            "snapshots": args.snapshots,
            "rho": args.rho,
            "pair": pool.pair,
            "variant": variant.value,
            "pool_type": pool.pool_type.value,
            "native_side": args.native_side,
            "periods": list(args.periods),
            "tiers": [[t.label, t.combined_fee_share] for t in args.tiers],
            "fee_steps": list(args.fee_steps),
            "warmup_days": args.warmup_days,
        },
        [path],
    )
    empty = [key for key, v in table.rows[0].cells.items() if v is None]
    if empty:
        periods = sorted({p for p, _ in empty})
        print(
            f"warning: insufficient history for holding periods {periods}; cells marked {backtest.NA}",
            file=sys.stderr,
        )
    print(f"wrote outcomes.csv, table.csv, frontier_overlay.csv to {out}")
    return 0


def cmd_classify(args) -> int:
    fees = _fee_model(args)
    try:
        p = PositionEndpoints(args.x0, args.y0, args.x1, args.y1)
    except CPMMError as exc:
        raise CLIError(EXIT_INVALID, str(exc)) from None
    try:
        case = frontier.classify_case(p).name.capitalize()
    except CPMMError:
        case = "invalid(k shrank)"
    result = frontier.is_profitable(p, fees)
    print(f"case={case}")
    print(f"variant={fees.variant.value}")
    print(f"hold_value={frontier.hold_value(p)!r}")
    print(f"lp_value={frontier.lp_value(p)!r}")
    print(f"margin={result.margin!r}")
    print(f"profitable={str(result.profitable).lower()}")
    return 0


def _add_fee_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--mint-fee", type=float, default=0.0, help="in x-token units at entry prices")
    p.add_argument("--burn-fee", type=float, default=0.0, help="in x-token units at entry prices")
    p.add_argument(
        "--variant",
        choices=[v.value for v in FeeVariant],
        default=None,
        help="fee variant (inferred from the fees given when omitted)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpmm-frontier",
        description="Constant product market maker LP profitability analytics.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="replay an event log into daily noon-UTC snapshots")
    p.add_argument("--events", required=True, metavar="PATH")
    p.add_argument("--rho", type=float, default=0.003, help="pool trading fee")
    p.add_argument("--out", default=".", metavar="DIR")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("frontier", help="sample a profitability frontier and its limits")
    _add_fee_args(p)
    p.add_argument("--x1", type=_floats, default=None, metavar="LIST", help="evaluate at these x1")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--k1", type=float, default=None, help="also report price limits on this k-curve")
    p.add_argument("--out", default=".", metavar="DIR")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("backtest", help="classify historical virtual LP positions")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--events", metavar="PATH")
    src.add_argument("--snapshots", metavar="PATH", help="daily snapshot CSV from `replay`")
    p.add_argument("--rho", type=float, default=0.003)
    p.add_argument("--pair", default=None, help="row label (default: input file stem)")
    p.add_argument("--variant", choices=["symmetric", "asymmetric"], default="symmetric")
    p.add_argument("--pool-type", choices=[t.value for t in backtest.PoolType], default="OpenMarket")
    p.add_argument("--native-side", choices=["x", "y"], default=None)
    p.add_argument("--periods", type=_ints, default=list(backtest.TABLE_PERIODS), metavar="LIST")
    p.add_argument("--tiers", type=_tiers, default=list(backtest.TIERS), metavar="LIST")
    p.add_argument("--fee-steps", type=_floats, default=list(backtest.DEFAULT_FEE_STEPS), metavar="LIST")
    p.add_argument("--warmup-days", type=int, default=events.DEFAULT_WARMUP_DAYS, metavar="N")
    p.add_argument("--out", default=".", metavar="DIR")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("classify", help="profitability of a single exit point")
    _add_fee_args(p)
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--y1", type=float, required=True)
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if hasattr(args, "rho") and not 0 <= args.rho < 1:
        parser.error(f"--rho must lie in [0, 1), got {args.rho}")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
