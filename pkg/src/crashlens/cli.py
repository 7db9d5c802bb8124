"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 internal error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import DataError, UsageError
from .marketdata import dump_wide_csv
from .pipeline import (
    AnalysisReport,
    emit_plot_data,
    load_config,
    run_pipeline,
    snapshot_graph,
)
from .synthetic import synthetic_crash_prices

__all__ = ["main"]


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except UsageError as exc:
        click.echo(f"usage error: {exc}", err=True)
        sys.exit(2)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(3)
    except click.ClickException:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(4)


def _load_report(path: str) -> AnalysisReport:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"report file not found: {p}")
    return AnalysisReport.from_json_bytes(p.read_bytes())


def _write_blob(blob: bytes, output: str) -> None:
    if output == "-":
        sys.stdout.buffer.write(blob)
        sys.stdout.buffer.flush()
    else:
        Path(output).write_bytes(blob)


@click.group()
@click.version_option(package_name="crashlens")
def main() -> None:
    """Market-crash detection from correlation networks of decomposed returns."""


@main.command()
@click.option("--config", "config_path", required=True, help="TOML or JSON config file.")
def run(config_path: str) -> None:
    """Run the full analysis described by a config file."""

    def body():
        cfg = load_config(config_path)
        report = run_pipeline(cfg)
        if cfg.output_dir is None:
            sys.stdout.buffer.write(report.to_json_bytes())
            sys.stdout.buffer.flush()
            return
        click.echo(f"report: {Path(cfg.output_dir) / 'report.json'}")
        click.echo(f"windows: {report.payload['n_windows']}")
        for ev in report.events:
            click.echo(
                f"event: window {ev['window_index']} ({ev['date']}) "
                f"peak={ev['peak']:.6g} z={ev['z']} width={ev['width']}"
            )
        if not report.events:
            click.echo("event: none")

    _guard(body)


@main.command("plot-data")
@click.option("--report", "report_path", required=True, help="Path to report.json.")
@click.option("--series", required=True, help="avg_corr, det, or the closeness series.")
@click.option("--output", default="-", help="File path, or - for stdout.")
def plot_data(report_path: str, series: str, output: str) -> None:
    """Emit a two-column CSV (date, value) for one report series."""

    def body():
        _write_blob(emit_plot_data(_load_report(report_path), series), output)

    _guard(body)


@main.command()
@click.option("--report", "report_path", required=True, help="Path to report.json.")
@click.option("--window", type=int, required=True, help="Window start index.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["dot", "graphml", "json"]),
    default="dot",
    show_default=True,
)
@click.option("--output", default="-", help="File path, or - for stdout.")
def snapshot(report_path: str, window: int, fmt: str, output: str) -> None:
    """Export a retained graph snapshot from a report."""

    def body():
        _write_blob(snapshot_graph(_load_report(report_path), window, fmt), output)

    _guard(body)


@main.command()
@click.option("--out", required=True, help="Destination CSV path.")
@click.option("--symbols", default=42, show_default=True)
@click.option("--days", default=2001, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--crash-start", default=272, show_default=True)
@click.option("--crash-len", default=15, show_default=True)
def synth(
    out: str, symbols: int, days: int, seed: int, crash_start: int, crash_len: int
) -> None:
    """Write a synthetic crash dataset as wide CSV."""

    def body():
        table = synthetic_crash_prices(
            n_symbols=symbols,
            n_days=days,
            seed=seed,
            crash_start=crash_start,
            crash_len=crash_len,
        )
        Path(out).write_text(dump_wide_csv(table), encoding="utf-8")
        click.echo(f"wrote {days} days x {symbols} symbols to {out}")

    _guard(body)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""

    def body():
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=host, port=port)

    _guard(body)


if __name__ == "__main__":
    main()
