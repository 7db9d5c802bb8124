import json

import pytest
from click.testing import CliRunner

from crashlens.cli import main
from crashlens.marketdata import dump_wide_csv
from crashlens.synthetic import synthetic_crash_prices


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    prices = root / "prices.csv"
    prices.write_text(
        dump_wide_csv(
            synthetic_crash_prices(
                n_symbols=6, n_days=120, seed=21, crash_start=50, crash_len=10
            )
        ),
        encoding="utf-8",
    )
    cfg = root / "run.toml"
    cfg.write_text(
        'input = "prices.csv"\n'
        'output_dir = "out"\n'
        'selector = "raw"\n'
        'graph = "MST"\n'
        "baseline = 20\n",
        encoding="utf-8",
    )
    return root


@pytest.fixture(scope="module")
def finished_run(workspace):
    result = CliRunner().invoke(main, ["run", "--config", str(workspace / "run.toml")])
    assert result.exit_code == 0, result.output
    return workspace / "out" / "report.json"


def test_run_summary_output(workspace, finished_run):
    result = CliRunner().invoke(main, ["run", "--config", str(workspace / "run.toml")])
    assert result.exit_code == 0
    assert "windows: 100" in result.output
    assert "event: window" in result.output
    assert finished_run.is_file()


def test_run_stdout_mode(workspace, tmp_path):
    cfg = tmp_path / "stdout.toml"
    cfg.write_text(
        f'input = "{workspace / "prices.csv"}"\n'
        'selector = "raw"\ngraph = "MST"\nbaseline = 20\n',
        encoding="utf-8",
    )
    result = CliRunner().invoke(main, ["run", "--config", str(cfg)])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["n_windows"] == 100


def test_run_missing_config_exits_2(tmp_path):
    result = CliRunner().invoke(main, ["run", "--config", str(tmp_path / "no.toml")])
    assert result.exit_code == 2
    assert "usage error" in result.output


def test_run_missing_input_exits_3(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('input = "absent.csv"\nselector = "raw"\n', encoding="utf-8")
    result = CliRunner().invoke(main, ["run", "--config", str(cfg)])
    assert result.exit_code == 3
    assert "data error" in result.output


def test_plot_data_stdout(finished_run):
    result = CliRunner().invoke(
        main, ["plot-data", "--report", str(finished_run), "--series", "avg_corr"]
    )
    assert result.exit_code == 0
    assert result.output.startswith("date,avg_corr\n")
    assert len(result.output.strip().split("\n")) == 101


def test_plot_data_to_file(finished_run, tmp_path):
    out = tmp_path / "series.csv"
    result = CliRunner().invoke(
        main,
        [
            "plot-data",
            "--report",
            str(finished_run),
            "--series",
            "closeness_mean",
            "--output",
            str(out),
        ],
    )
    assert result.exit_code == 0
    assert out.read_text(encoding="utf-8").startswith("date,closeness_mean\n")


def test_plot_data_unknown_series_exits_2(finished_run):
    result = CliRunner().invoke(
        main, ["plot-data", "--report", str(finished_run), "--series", "volume"]
    )
    assert result.exit_code == 2


def test_snapshot_dot_and_json(finished_run):
    report = json.loads(finished_run.read_text(encoding="utf-8"))
    idx = sorted(int(k) for k in report["snapshots"])[0]
    result = CliRunner().invoke(
        main, ["snapshot", "--report", str(finished_run), "--window", str(idx)]
    )
    assert result.exit_code == 0
    assert result.output.startswith("graph market {")
    result = CliRunner().invoke(
        main,
        [
            "snapshot",
            "--report",
            str(finished_run),
            "--window",
            str(idx),
            "--format",
            "json",
        ],
    )
    assert result.exit_code == 0
    assert json.loads(result.output)["kind"] == "MST"


def test_snapshot_unretained_window_exits_2(finished_run):
    result = CliRunner().invoke(
        main,
        ["snapshot", "--report", str(finished_run), "--window", "87654"],
    )
    assert result.exit_code == 2
    assert "snapshots exist for" in result.output


def test_snapshot_bad_format_rejected(finished_run):
    result = CliRunner().invoke(
        main,
        [
            "snapshot",
            "--report",
            str(finished_run),
            "--window",
            "0",
            "--format",
            "png",
        ],
    )
    assert result.exit_code == 2  # click choice validation


def test_corrupt_report_exits_3(tmp_path):
    bad = tmp_path / "report.json"
    bad.write_text("{broken", encoding="utf-8")
    result = CliRunner().invoke(
        main, ["plot-data", "--report", str(bad), "--series", "avg_corr"]
    )
    assert result.exit_code == 3


def test_synth_command(tmp_path):
    out = tmp_path / "syn.csv"
    result = CliRunner().invoke(
        main,
        [
            "synth",
            "--out",
            str(out),
            "--symbols",
            "5",
            "--days",
            "60",
            "--crash-start",
            "20",
            "--crash-len",
            "5",
        ],
    )
    assert result.exit_code == 0, result.output
    header = out.read_text(encoding="utf-8").split("\n", 1)[0]
    assert header == "date,S01,S02,S03,S04,S05"


def test_synth_bad_params_exit_2(tmp_path):
    result = CliRunner().invoke(
        main,
        ["synth", "--out", str(tmp_path / "x.csv"), "--symbols", "1"],
    )
    assert result.exit_code == 2


def test_missing_required_option_exits_2():
    result = CliRunner().invoke(main, ["run"])
    assert result.exit_code == 2
