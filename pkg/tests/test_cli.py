import csv
import datetime as dt
import hashlib
import json
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from cpmm_frontier import cli, events, frontier, synthetic
from cpmm_frontier.events import DailySnapshot
from cpmm_frontier.frontier import FeeModel

from conftest import DATA

U = 10**18


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_daily(path, factors):
    """Snapshot file whose normalized reserves follow ``factors`` day by day."""
    start = dt.date(2021, 1, 1)
    daily = []
    for i, (fx, fy) in enumerate(factors):
        x, y = int(fx * U), int(fy * U)
        daily.append(DailySnapshot(start + dt.timedelta(days=i), x, y, U, x / U, y / U))
    with open(path, "w", newline="") as fh:
        events.write_snapshots(fh, daily)
    return path


# replay

def test_replay_golden_file(tmp_path, three_events_path):
    assert run("replay", "--events", three_events_path, "--rho", "0.003", "--out", tmp_path) == 0
    produced = (tmp_path / "snapshots.csv").read_bytes()
    assert produced == (DATA / "three_events_snapshots.csv").read_bytes()
    row = read_csv(tmp_path / "snapshots.csv")[0]
    exact_y = Fraction(100 * U) / (1 + Fraction(997, 10_000))
    assert abs(int(row["reserve_y"]) - exact_y) <= 1
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "replay"
    assert manifest["params"]["rho"] == 0.003


def test_replay_is_byte_identical_across_runs(tmp_path, three_events_path):
    run("replay", "--events", three_events_path, "--out", tmp_path / "a")
    run("replay", "--events", three_events_path, "--out", tmp_path / "b")
    for name in ("snapshots.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_missing_input_file(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert run("replay", "--events", missing, "--out", tmp_path) == cli.EXIT_USAGE
    assert str(missing) in capsys.readouterr().err


def test_malformed_row_reports_line(tmp_path, three_events_path, capsys):
    bad = tmp_path / "bad.csv"
    lines = three_events_path.read_text().splitlines()
    lines[2] = lines[2].replace(",swap,", ",swap,1").replace(",0,0,9066", ",1,0,9066")
    bad.write_text("\n".join(lines) + "\n")
    assert run("replay", "--events", bad, "--out", tmp_path) == cli.EXIT_PARSE
    assert "line 3" in capsys.readouterr().err


def test_replay_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    lines = (DATA / "three_events.csv").read_text().splitlines()
    bad.write_text("\n".join([lines[0], lines[2]]) + "\n")
    assert run("replay", "--events", bad, "--out", tmp_path) == cli.EXIT_REPLAY
    assert "event #0: first event must be a mint" in capsys.readouterr().err


def test_bad_rho_is_usage_error(tmp_path, three_events_path):
    with pytest.raises(SystemExit) as exc:
        run("replay", "--events", three_events_path, "--rho", "1.5", "--out", tmp_path)
    assert exc.value.code == 2


# frontier

def test_frontier_defaults(tmp_path, capsys):
    assert run("frontier", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "limits y_asymptote=0.5 x_asymptote=0.5" in out
    rows = {float(r["x1"]): float(r["y1"]) for r in read_csv(tmp_path / "frontier.csv")}
    assert rows[1.0] == 1.0
    assert min(rows) > 0.5


def test_frontier_at_points(tmp_path, capsys):
    assert run(
        "frontier", "--x0", 2, "--y0", 2, "--mint-fee", 0.5, "--burn-fee", 0.5,
        "--variant", "asymmetric", "--x1", "3", "--out", tmp_path,
    ) == 0
    rows = read_csv(tmp_path / "frontier.csv")
    assert float(rows[0]["y1"]) == pytest.approx(2.2, abs=1e-9)
    fees = FeeModel.asymmetric(0.5, 0.5)
    y_asym, x_asym = frontier.frontier_limits(2, 2, fees)
    assert f"limits y_asymptote={y_asym!r} x_asymptote={x_asym!r}" in capsys.readouterr().out


def test_frontier_infers_mint_variant(tmp_path):
    run("frontier", "--x0", 2, "--y0", 2, "--mint-fee", 0.5, "--x1", "3", "--out", tmp_path)
    assert float(read_csv(tmp_path / "frontier.csv")[0]["y1"]) == pytest.approx(1.8, abs=1e-12)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["params"]["variant"] == "mint"


def test_frontier_price_limits(tmp_path, capsys):
    run("frontier", "--x0", 2, "--y0", 2, "--k1", 5.3, "--x1", "3", "--out", tmp_path)
    out = capsys.readouterr().out
    assert "price_limits k1=5.3 upper=(1.3375" in out
    run("frontier", "--x0", 2, "--y0", 2, "--k1", 3.9, "--x1", "3", "--out", tmp_path)
    assert "price_limits k1=3.9 empty" in capsys.readouterr().out


def test_frontier_rejects_points_left_of_pole(tmp_path, capsys):
    assert run("frontier", "--x1", "0.4", "--out", tmp_path) == cli.EXIT_INVALID
    assert "pole" in capsys.readouterr().err


def test_frontier_rejects_inconsistent_fees(tmp_path):
    assert run("frontier", "--burn-fee", 0.1, "--variant", "mint", "--out", tmp_path) == cli.EXIT_INVALID


# backtest

def test_constant_pool_all_zero(tmp_path):
    snaps = write_daily(tmp_path / "flat.csv", [(1, 1)] * 400)
    assert run("backtest", "--snapshots", snaps, "--out", tmp_path / "o") == 0
    row = read_csv(tmp_path / "o" / "table.csv")[0]
    cells = [v for k, v in row.items() if k.endswith(("_small", "_medium", "_large"))]
    assert len(cells) == 9 and all(v == "0.0" for v in cells)
    assert row["N"] == "390"


def test_fee_growth_all_profitable(tmp_path):
    g = 1.2 ** (1 / 30)
    snaps = write_daily(tmp_path / "grow.csv", [(g**i, g**i) for i in range(400)])
    assert run("backtest", "--snapshots", snaps, "--tiers", "large", "--out", tmp_path / "o") == 0
    row = read_csv(tmp_path / "o" / "table.csv")[0]
    assert [row[f"{p}d_large"] for p in (30, 180, 360)] == ["1.0"] * 3


def test_zero_tier_matches_oracle(tmp_path):
    log = tmp_path / "syn.csv"
    events.write_events(log, synthetic.synthetic_events(days=200, seed=5))
    assert run("backtest", "--events", log, "--periods", "30", "--tiers", "0", "--out", tmp_path / "o") == 0
    outcomes = read_csv(tmp_path / "o" / "outcomes.csv")
    # with no fees the position wins exactly when 2 x1 > 1 + x1 / y1
    hits = sum(
        2 * Fraction(o["rel_x"]) > 1 + Fraction(o["rel_x"]) / Fraction(o["rel_y"]) for o in outcomes
    )
    row = read_csv(tmp_path / "o" / "table.csv")[0]
    assert float(row["30d_0.0"]) == hits / len(outcomes)


def test_backtest_outputs_and_manifest(tmp_path, three_events_path):
    log = tmp_path / "syn.csv"
    events.write_events(log, synthetic.synthetic_events(days=100, seed=9))
    assert run(
        "backtest", "--events", log, "--variant", "asymmetric", "--pool-type", "Stable",
        "--pair", "TKN/WETH", "--periods", "30,90", "--fee-steps", "0,50", "--out", tmp_path / "o",
    ) == 0
    out = tmp_path / "o"
    table = read_csv(out / "table.csv")
    assert list(table[0])[:4] == ["pair", "fee", "type", "N"]
    assert (table[0]["pair"], table[0]["fee"], table[0]["type"]) == ("TKN/WETH", "Asymmetric", "Stable")
    overlay = read_csv(out / "frontier_overlay.csv")
    assert {r["fee_pct"] for r in overlay} == {"0.0", "50.0"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["params"]["periods"] == [30, 90]
    assert list(manifest["inputs"].values()) == [hashlib.sha256(log.read_bytes()).hexdigest()]


def test_backtest_warns_on_short_history(tmp_path, capsys):
    snaps = write_daily(tmp_path / "short.csv", [(1, 1)] * 60)
    assert run("backtest", "--snapshots", snaps, "--out", tmp_path / "o") == 0
    assert "insufficient history" in capsys.readouterr().err
    row = read_csv(tmp_path / "o" / "table.csv")[0]
    assert row["180d_small"] == "NA" and row["30d_small"] == "0.0"


def test_backtest_requires_one_input(tmp_path):
    assert run("backtest", "--out", tmp_path) == cli.EXIT_USAGE


def test_backtest_from_replayed_snapshots_matches_events(tmp_path):
    log = tmp_path / "syn.csv"
    events.write_events(log, synthetic.synthetic_events(days=120, seed=2))
    run("replay", "--events", log, "--out", tmp_path / "r")
    run("backtest", "--events", log, "--periods", "30,90", "--out", tmp_path / "a")
    run("backtest", "--snapshots", tmp_path / "r" / "snapshots.csv", "--pair", "syn",
        "--periods", "30,90", "--out", tmp_path / "b")
    for name in ("table.csv", "outcomes.csv", "frontier_overlay.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


# classify

def test_classify_prints_margin(capsys):
    assert run("classify", "--x1", 1.1, "--y1", 0.95) == 0
    out = capsys.readouterr().out.splitlines()
    assert "variant=none" in out
    margin = float(next(line for line in out if line.startswith("margin=")).split("=")[1])
    assert margin == pytest.approx(2.2 - (1 + 1.1 / 0.95), abs=1e-12)
    assert "profitable=true" in out


def test_classify_boundary_not_profitable(capsys):
    run("classify", "--x1", 1, "--y1", 1)
    out = capsys.readouterr().out
    assert "case=Case1" in out and "profitable=false" in out


def test_classify_invalid_point(capsys):
    assert run("classify", "--x1", -1, "--y1", 1) == cli.EXIT_INVALID


@pytest.mark.skipif(shutil.which("cpmm-frontier") is None, reason="console script not installed")
def test_console_script_version():
    res = subprocess.run(["cpmm-frontier", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "cpmm_frontier", "frontier", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert res.stdout.startswith("limits")
