import csv
import math

import pytest
import yaml

from onsim.cli import main
from onsim.config import bundled, from_dict
from onsim.runner import (SUMMARY_COLUMNS, classify_acceptable, emit_plotdata, power_table,
                          run_scenario, sweep)

from conftest import small_raw


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("delays, ok", [([0.02, 0.03], True), ([0.2], False), ([0.150], True),
                                        ({"a": 0.1, "b": 0.3}, False), ([0.1, math.inf], False)])
def test_classify_acceptable(delays, ok):
    assert classify_acceptable(delays, 0.150) is ok


def test_classify_needs_delays():
    with pytest.raises(ValueError):
        classify_acceptable([], 0.150)


def test_power_table_for_scenario1():
    rows = power_table(bundled("scenario1_95m"))
    assert [r["total_power_mw"] for r in rows] == pytest.approx([270.0, 264.0, 258.0, 162.0])
    assert rows[-1]["reduction_pct_vs_phase1"] == pytest.approx(40.0, abs=1e-9)


def test_scenario2_report_and_files(tmp_path):
    rep = run_scenario(bundled("scenario2"), out_dir=tmp_path)
    comp = {r["mode"]: r for r in rep.comparison}
    assert comp["direct"]["mean_latency_s"] == pytest.approx(13.0, abs=0.05)
    assert comp["on"]["mean_latency_s"] <= 4.5
    assert comp["on"]["total_power_mw"] < comp["direct"]["total_power_mw"]
    for name in ("summary.csv", "packets.csv", "on_log.csv", "power.csv", "knowledge.csv",
                 "comparison.csv", "plot_power_by_phase.csv", "plot_latency.csv",
                 "plot_power_comparison.csv"):
        assert (tmp_path / name).exists(), name
    with open(tmp_path / "summary.csv", encoding="utf-8") as fh:
        assert fh.readline().strip().split(",") == SUMMARY_COLUMNS
    assert len(_rows(tmp_path / "plot_latency.csv")) == 2
    assert len(_rows(tmp_path / "plot_power_by_phase.csv")) == 4
    assert not (tmp_path / "positions.csv").exists()


def test_positions_only_when_verbose(tmp_path):
    cfg = from_dict(small_raw(horizon_s=2.0))
    run_scenario(cfg, out_dir=tmp_path, verbose=True)
    rows = _rows(tmp_path / "positions.csv")
    assert rows and set(rows[0]) == {"t", "node", "x", "y"}


def test_summary_is_byte_identical_on_rerun(tmp_path):
    cfg = from_dict(small_raw(horizon_s=3.0, report_phases=[1, 3]))
    run_scenario(cfg, seed=5, out_dir=tmp_path / "a")
    run_scenario(cfg, seed=5, out_dir=tmp_path / "b")
    a = (tmp_path / "a" / "summary.csv").read_bytes()
    assert a == (tmp_path / "b" / "summary.csv").read_bytes()
    rows = _rows(tmp_path / "a" / "summary.csv")
    assert [r["phase"] for r in rows] == ["1", "3"]


def test_sweep_shape_and_seeds(tmp_path):
    cfg = from_dict(small_raw(horizon_s=0.5, replications=2))
    res = sweep(cfg, reps=2, out_dir=tmp_path)
    assert len(res.rows) == 4 * 7 * 2
    assert len(res.cells) == 28
    assert [c.key for c in res.cells] == sorted(c.key for c in res.cells)
    assert {r.seed for r in res.rows} == {cfg.seed, cfg.seed + 1}
    assert len(_rows(tmp_path / "plot_delay_by_mobility.csv")) == 28
    assert len(_rows(tmp_path / "plot_power_by_phase.csv")) == 4
    assert res.cell(2, 0.0).acceptable(0.150) is True
    # a cell re-run in isolation reproduces its summary row
    one = sweep(cfg, phases=[3], levels=[1.5], reps=2)
    assert [r.csv_row() for r in one.rows] == [r.csv_row() for r in res.cell(3, 1.5).runs]


def test_sweep_runs_in_parallel_the_same(tmp_path):
    cfg = from_dict(small_raw(horizon_s=0.5))
    a = sweep(cfg, phases=[3], levels=[0.0, 15.0], reps=2, jobs=1)
    b = sweep(cfg, phases=[3], levels=[0.0, 15.0], reps=2, jobs=2)
    assert [r.csv_row() for r in a.rows] == [r.csv_row() for r in b.rows]


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.yaml"
    good.write_text(yaml.safe_dump(small_raw(horizon_s=1.0)))
    bad = tmp_path / "bad.yaml"
    raw = small_raw()
    raw["bogus"] = 1
    bad.write_text(yaml.safe_dump(raw))
    assert main(["validate", str(good)]) == 0
    assert main(["validate", str(bad)]) == 2
    assert "bogus" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 2
    assert main(["run", str(good), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "summary.csv").exists()
    assert main(["sweep", str(good), "--levels", "2.0", "--reps", "1",
                 "--out", str(tmp_path / "s")]) == 3
    assert main(["sweep", str(good), "--phases", "3", "--levels", "0,15", "--protocols",
                 "aodv,olsr", "--reps", "1", "--jobs", "1", "--out", str(tmp_path / "s")]) == 0
    assert len(_rows(tmp_path / "s" / "summary.csv")) == 4


def test_cli_accepts_bundled_names(tmp_path):
    assert main(["validate", "scenario2"]) == 0
