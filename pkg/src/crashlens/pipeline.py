"""End-to-end orchestration: load prices, decompose, roll windows, build
graphs, summarize centrality, detect crashes, persist a deterministic report.

The report is a plain JSON document with sorted keys and no timestamps, so
identical inputs and config produce byte-identical bytes.  Graph snapshots
for selected windows are embedded in the report and can be re-exported in
any supported format later without rerunning the analysis.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

from .corrnet import (
    average_correlation,
    correlation_distance,
    correlation_matrix,
    equilibrium_indicator,
    hyperbolic_distance,
    hyperbolic_map,
    partial_correlation_matrix,
    tensor_average_correlation,
)
from .decompose import SiftConfig, emd, itd, itd_imf_chain
from .detect import detect_crashes, summarize_centrality
from .errors import CrashlensError, DataError, UsageError
from .marketdata import (
    ReturnTable,
    TableSchema,
    compute_log_returns,
    load_price_table,
    window_slices,
)
from .netgraph import (
    MarketGraph,
    build_pmfg,
    closeness_centrality,
    export_graph,
    mst,
)

__all__ = [
    "PipelineConfig",
    "AnalysisReport",
    "load_config",
    "run_pipeline",
    "emit_plot_data",
    "snapshot_graph",
]

_GRAPH_KINDS = ("MST", "PMFG")
_FLAVOR_KINDS = ("plain", "partial", "tensor-self", "hyperbolic")


def _parse_selector(text: str) -> tuple[str, int]:
    s = text.strip().lower()
    if s == "raw":
        return "raw", 0
    if s.startswith("chain(1,") and s.endswith(")"):  # chain(1,n) alias
        s = "chain:" + s[len("chain(1,") : -1]
    for kind in ("imf", "itd", "chain"):
        if s.startswith(kind + ":"):
            try:
                k = int(s[len(kind) + 1 :])
            except ValueError:
                raise UsageError(f"bad selector {text!r}") from None
            if k < 1:
                raise UsageError(f"selector level must be >= 1, got {k}")
            return kind, k
    raise UsageError(
        f"unknown selector {text!r}: expected raw, imf:k, itd:k, or chain:n"
    )


def _parse_flavor(text: str) -> tuple[str, str]:
    s = text.strip()
    if s.lower() in ("plain", "tensor-self", "hyperbolic"):
        return s.lower(), ""
    if s.lower().startswith("partial:"):
        k = s[len("partial:") :].strip()
        if not k:
            raise UsageError("partial flavor needs a conditioning symbol or index")
        return "partial", k
    raise UsageError(
        f"unknown flavor {text!r}: expected plain, partial:k, tensor-self, "
        f"or hyperbolic"
    )


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    layout: str = "wide"
    date_column: str = "date"
    symbol_column: str = "symbol"
    close_column: str = "close"
    window: int = 20
    stride: int = 1
    selector: str = "chain:3"
    graph: str = "PMFG"
    flavor: str = "plain"
    reducer: str = "mean"
    baseline: int = 60
    z_threshold: float = 4.0
    coverage_threshold: float = 0.9
    output_dir: str | None = None
    snapshots: str | tuple[int, ...] = "auto"
    sift: SiftConfig = field(default_factory=SiftConfig)
    input_text: str | None = None  # inline CSV, used by the service

    def __post_init__(self) -> None:
        if self.window < 2:
            raise UsageError(f"window {self.window} < 2")
        if self.stride < 1:
            raise UsageError(f"stride {self.stride} < 1")
        _parse_selector(self.selector)
        _parse_flavor(self.flavor)
        if self.graph.upper() not in _GRAPH_KINDS:
            raise UsageError(f"graph kind {self.graph!r} not in {_GRAPH_KINDS}")
        r = self.reducer
        if r not in ("mean", "max") and not r.startswith("vertex:"):
            raise UsageError(f"unknown reducer {r!r}")
        if self.baseline < 5:
            raise UsageError(f"baseline {self.baseline} < 5")
        if self.z_threshold <= 0:
            raise UsageError("z threshold must be positive")
        if not 0.0 < self.coverage_threshold <= 1.0:
            raise UsageError("coverage threshold must be in (0, 1]")
        if self.snapshots != "auto":
            snaps = tuple(int(i) for i in self.snapshots)
            if any(i < 0 for i in snaps):
                raise UsageError("snapshot indices must be >= 0")
            object.__setattr__(self, "snapshots", snaps)
        if self.layout not in ("wide", "long"):
            raise UsageError(f"layout must be wide or long, got {self.layout!r}")

    def schema(self) -> TableSchema:
        return TableSchema(
            layout=self.layout,
            date_column=self.date_column,
            symbol_column=self.symbol_column,
            close_column=self.close_column,
        )

    def echo(self) -> dict:
        return {
            "input": "<inline>" if self.input_text is not None else self.input_path,
            "layout": self.layout,
            "window": self.window,
            "stride": self.stride,
            "selector": self.selector,
            "graph": self.graph.upper(),
            "flavor": self.flavor,
            "reducer": self.reducer,
            "baseline": self.baseline,
            "z_threshold": self.z_threshold,
            "coverage_threshold": self.coverage_threshold,
            "snapshots": (
                self.snapshots
                if self.snapshots == "auto"
                else list(self.snapshots)
            ),
            "sift": {
                "max_modes": self.sift.max_modes,
                "max_sifts": self.sift.max_sifts,
                "sd_threshold": self.sift.sd_threshold,
                "mirror_depth": self.sift.mirror_depth,
            },
        }


_CONFIG_KEYS = {
    "input": "input_path",
    "layout": "layout",
    "date_column": "date_column",
    "symbol_column": "symbol_column",
    "close_column": "close_column",
    "window": "window",
    "stride": "stride",
    "selector": "selector",
    "graph": "graph",
    "flavor": "flavor",
    "reducer": "reducer",
    "baseline": "baseline",
    "z_threshold": "z_threshold",
    "coverage_threshold": "coverage_threshold",
    "output_dir": "output_dir",
    "snapshots": "snapshots",
}


def config_from_dict(raw: dict, base_dir: Path | None = None) -> PipelineConfig:
    """Build a PipelineConfig from a parsed TOML/JSON document.

    Relative paths resolve against ``base_dir`` (the config file's folder).
    """
    kwargs: dict = {}
    for key, value in raw.items():
        if key == "sift":
            if not isinstance(value, dict):
                raise UsageError("sift section must be a table")
            try:
                kwargs["sift"] = SiftConfig(**value)
            except TypeError as exc:
                raise UsageError(f"bad sift option: {exc}") from None
        elif key == "input_text":
            kwargs["input_text"] = str(value)
        elif key in _CONFIG_KEYS:
            if key == "snapshots" and isinstance(value, list):
                value = tuple(value)
            kwargs[_CONFIG_KEYS[key]] = value
        else:
            raise UsageError(f"unknown config key {key!r}")
    if "input_path" not in kwargs and "input_text" not in kwargs:
        raise UsageError("config must set 'input'")
    kwargs.setdefault("input_path", "<inline>")
    try:
        cfg = PipelineConfig(**kwargs)
    except TypeError as exc:
        raise UsageError(f"bad config value: {exc}") from None
    if base_dir is not None and cfg.input_text is None:
        resolved = Path(cfg.input_path)
        if not resolved.is_absolute():
            cfg = replace(cfg, input_path=str(base_dir / resolved))
    if base_dir is not None and cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        if not out.is_absolute():
            cfg = replace(cfg, output_dir=str(base_dir / out))
    return cfg


def load_config(path) -> PipelineConfig:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {p}")
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON config: {exc}") from None
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"invalid TOML config: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config root must be a table/object")
    return config_from_dict(raw, base_dir=p.parent)


@dataclass(frozen=True)
class AnalysisReport:
    payload: dict

    def __post_init__(self) -> None:
        records = self.payload.get("records", [])
        if len(records) != self.payload.get("n_windows"):
            raise DataError(
                f"{len(records)} records for {self.payload.get('n_windows')} windows"
            )

    @property
    def records(self) -> list[dict]:
        return self.payload["records"]

    @property
    def events(self) -> list[dict]:
        return self.payload["events"]

    @property
    def notes(self) -> list[str]:
        return self.payload["notes"]

    def to_json_bytes(self) -> bytes:
        text = json.dumps(self.payload, sort_keys=True, separators=(",", ":"))
        return (text + "\n").encode("utf-8")

    @classmethod
    def from_json_bytes(cls, data: bytes) -> "AnalysisReport":
        try:
            payload = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DataError(f"invalid report JSON: {exc}") from None
        if not isinstance(payload, dict):
            raise DataError("report root must be an object")
        return cls(payload)

    @property
    def run_id(self) -> str:
        return hashlib.sha256(self.to_json_bytes()).hexdigest()[:16]


def _stage(name: str):
    """Decorator-free stage context: wrap CrashlensErrors with the stage name."""

    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, CrashlensError):
                raise type(exc)(f"{name}: {exc}") from exc
            return False

    return _Ctx()


def _closeness_key(reducer: str) -> str:
    if reducer in ("mean", "max"):
        return f"closeness_{reducer}"
    return "closeness_vertex_" + reducer[len("vertex:") :]


def worker_count() -> int:
    env = os.environ.get("CRASHLENS_THREADS", "").strip()
    if env:
        try:
            k = int(env)
        except ValueError:
            raise UsageError(f"CRASHLENS_THREADS must be an integer, got {env!r}")
        if k < 1:
            raise UsageError("CRASHLENS_THREADS must be >= 1")
        return k
    return min(8, os.cpu_count() or 1)


def _apply_selector(returns: np.ndarray, symbols, selector: str, sift: SiftConfig, notes: list[str]) -> np.ndarray:
    kind, k = _parse_selector(selector)
    if kind == "raw":
        return returns
    out = np.empty_like(returns)
    for j, sym in enumerate(symbols):
        x = returns[:, j]
        if kind == "chain":
            out[:, j] = itd_imf_chain(x, k, sift)
            continue
        d = emd(x, sift) if kind == "imf" else itd(x)
        if not d.modes:
            out[:, j] = 0.0
            notes.append(f"{sym}: {selector} unavailable (no modes); zero series")
        elif k > len(d.modes):
            out[:, j] = d.modes[-1]
            notes.append(
                f"{sym}: {selector} unavailable ({len(d.modes)} modes); "
                f"substituted {kind}:{len(d.modes)}"
            )
        else:
            out[:, j] = d.modes[k - 1]
    return out


def _resolve_partial_index(k: str, labels: tuple[str, ...]) -> int:
    if k in labels:
        return labels.index(k)
    try:
        idx = int(k)
    except ValueError:
        raise UsageError(
            f"partial flavor: {k!r} is neither a symbol nor an index"
        ) from None
    if not 0 <= idx < len(labels):
        raise UsageError(f"partial flavor index {idx} out of range [0, {len(labels)})")
    return idx


def _process_window(view, symbols, flavor_kind, flavor_arg, graph_kind):
    corr = correlation_matrix(view, labels=symbols)
    degenerate = tuple(symbols[i] for i in corr.degenerate)

    if flavor_kind == "partial":
        work = partial_correlation_matrix(corr, _resolve_partial_index(flavor_arg, symbols))
        avg = average_correlation(work)
        dist = correlation_distance(work)
        sim = work.values
    elif flavor_kind == "tensor-self":
        work = corr
        avg = tensor_average_correlation(corr, corr)
        dist = correlation_distance(corr)
        sim = corr.values
    elif flavor_kind == "hyperbolic":
        work = corr
        avg = average_correlation(corr)
        dist = hyperbolic_distance(hyperbolic_map(corr), corr.labels)
        sim = corr.values
    else:
        work = corr
        avg = average_correlation(corr)
        dist = correlation_distance(corr)
        sim = corr.values

    det = equilibrium_indicator(work)
    graph = mst(dist) if graph_kind == "MST" else build_pmfg(sim, dist.values, work.labels)
    closeness = closeness_centrality(graph)
    return view.start, avg, det, graph, closeness, degenerate


def _graph_payload(g: MarketGraph) -> dict:
    return {
        "kind": g.kind,
        "labels": list(g.labels),
        "edges": [[u, v, w] for u, v, w in g.edges],
    }


def _graph_from_payload(p: dict) -> MarketGraph:
    return MarketGraph(
        tuple(p["labels"]),
        tuple((int(u), int(v), float(w)) for u, v, w in p["edges"]),
        p["kind"],
    )


def run_pipeline(cfg: PipelineConfig) -> AnalysisReport:
    """Execute the full analysis and return (and optionally persist) the report."""
    notes: list[str] = []
    excluded: list[dict] = []

    with _stage("load"):
        if cfg.input_text is not None:
            source = cfg.input_text.splitlines()
        else:
            source = cfg.input_path
        prices = load_price_table(
            source,
            cfg.schema(),
            coverage_threshold=cfg.coverage_threshold,
            exclusions=excluded,
        )

    with _stage("returns"):
        table = compute_log_returns(prices)

    with _stage("decompose"):
        transformed = _apply_selector(
            table.returns, table.symbols, cfg.selector, cfg.sift, notes
        )

    with _stage("window"):
        windows = window_slices(
            ReturnTable(table.symbols, table.dates, transformed),
            cfg.window,
            cfg.stride,
        )

    flavor_kind, flavor_arg = _parse_flavor(cfg.flavor)
    graph_kind = cfg.graph.upper()

    def job(view):
        try:
            return _process_window(
                view, table.symbols, flavor_kind, flavor_arg, graph_kind
            )
        except CrashlensError as exc:
            raise type(exc)(f"window {view.start}: {exc}") from exc

    workers = worker_count()
    if workers == 1 or len(windows) < 2:
        results = [job(v) for v in windows]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, windows))

    starts = [r[0] for r in results]
    dates = [table.dates[s] for s in starts]
    closeness_maps = [r[4] for r in results]
    for start, *_rest, degenerate in results:
        if degenerate:
            notes.append(
                f"window {start}: constant series for {','.join(degenerate)}"
            )

    key = _closeness_key(cfg.reducer)
    with _stage("summarize"):
        series = summarize_centrality(
            closeness_maps,
            cfg.reducer,
            indices=starts,
            dates=dates,
            source=f"{graph_kind}/{cfg.selector}/{cfg.flavor}/{cfg.reducer}",
        )

    with _stage("detect"):
        if len(series) >= cfg.baseline + 1:
            events = detect_crashes(
                series, baseline=cfg.baseline, z_threshold=cfg.z_threshold,
                notes=notes,
            )
        else:
            events = []
            notes.append(
                f"detector skipped: {len(series)} windows < baseline + 1 "
                f"({cfg.baseline + 1})"
            )

    records = []
    for (start, avg, det, _graph, _cl, _deg), date, value in zip(
        results, dates, series.values
    ):
        records.append(
            {
                "window": start,
                "date": date,
                "avg_corr": avg,
                "det": det,
                key: float(value),
            }
        )

    if cfg.snapshots == "auto":
        wanted = {starts[0], starts[-1]} | {e.window_index for e in events}
    else:
        wanted = set(cfg.snapshots)
        missing = wanted - set(starts)
        if missing:
            raise UsageError(
                f"snapshot windows {sorted(missing)} not among computed starts"
            )
    snapshots = {
        str(start): _graph_payload(graph)
        for start, _avg, _det, graph, _cl, _deg in results
        if start in wanted
    }

    payload = {
        "config": cfg.echo(),
        "excluded": excluded,
        "n_windows": len(windows),
        "records": records,
        "events": [e.to_dict() for e in events],
        "notes": notes,
        "series": {"closeness_key": key, "source": series.source},
        "snapshots": snapshots,
    }
    report = AnalysisReport(payload)

    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_bytes(report.to_json_bytes())
        for idx in sorted(int(k) for k in snapshots):
            g = _graph_from_payload(snapshots[str(idx)])
            (out / f"snapshot_w{idx}.dot").write_bytes(export_graph(g, "dot"))
    return report


def emit_plot_data(report: AnalysisReport, selector: str) -> bytes:
    """Two-column CSV (date, value) for one of the per-window series."""
    key = report.payload.get("series", {}).get("closeness_key", "closeness_mean")
    available = ("avg_corr", "det", key)
    if selector not in available:
        raise UsageError(f"unknown series {selector!r}: available {available}")
    lines = [f"date,{selector}"]
    for rec in report.records:
        lines.append(f"{rec['date']},{rec[selector]!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def snapshot_graph(report: AnalysisReport, window_index: int, fmt: str) -> bytes:
    """Re-export a retained graph snapshot in the requested format."""
    snaps = report.payload.get("snapshots", {})
    payload = snaps.get(str(window_index))
    if payload is None:
        retained = sorted(int(k) for k in snaps)
        raise UsageError(
            f"window {window_index} not retained; snapshots exist for {retained}"
        )
    return export_graph(_graph_from_payload(payload), fmt)
