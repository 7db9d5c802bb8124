"""HTTP service exposing the analysis pipeline.

POST /runs executes synchronously and stores the report in memory under a
deterministic id (hash of the report bytes), so resubmitting identical input
lands on the same id.  The raw report bytes are served back verbatim.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import DataError, UsageError
from .pipeline import (
    AnalysisReport,
    config_from_dict,
    emit_plot_data,
    run_pipeline,
    snapshot_graph,
)

__all__ = ["create_app", "RunRequest", "RunSummary", "EventModel"]

_MEDIA = {
    "dot": "text/vnd.graphviz",
    "graphml": "application/xml",
    "json": "application/json",
}


class RunRequest(BaseModel):
    """Pipeline config as in the config file, plus optional inline CSV.

    When ``csv`` is set it overrides the config's input path.
    """

    config: dict = Field(default_factory=dict)
    csv: str | None = None


class EventModel(BaseModel):
    window_index: int
    date: str
    peak: float
    z: float | str
    width: int


class RunSummary(BaseModel):
    run_id: str
    n_windows: int
    events: list[EventModel]
    notes: list[str]


def create_app() -> FastAPI:
    app = FastAPI(title="crashlens", version="0.1.0")
    runs: dict[str, AnalysisReport] = {}

    @app.exception_handler(UsageError)
    async def usage_handler(_req, exc: UsageError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(DataError)
    async def data_handler(_req, exc: DataError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/runs", response_model=RunSummary)
    def create_run(request: RunRequest) -> RunSummary:
        raw = dict(request.config)
        if request.csv is not None:
            raw["input_text"] = request.csv
        cfg = config_from_dict(raw)
        report = run_pipeline(cfg)
        rid = report.run_id
        runs[rid] = report
        return RunSummary(
            run_id=rid,
            n_windows=report.payload["n_windows"],
            events=[EventModel(**e) for e in report.events],
            notes=report.notes,
        )

    def _report(run_id: str) -> AnalysisReport:
        report = runs.get(run_id)
        if report is None:
            raise HTTPException(status_code=404, detail=f"unknown run id {run_id!r}")
        return report

    @app.get("/runs/{run_id}/report")
    def get_report(run_id: str) -> Response:
        return Response(
            content=_report(run_id).to_json_bytes(), media_type="application/json"
        )

    @app.get("/runs/{run_id}/plot-data")
    def get_plot_data(run_id: str, series: str) -> Response:
        return Response(
            content=emit_plot_data(_report(run_id), series), media_type="text/csv"
        )

    @app.get("/runs/{run_id}/snapshot")
    def get_snapshot(run_id: str, window: int, format: str = "dot") -> Response:
        blob = snapshot_graph(_report(run_id), window, format)
        return Response(content=blob, media_type=_MEDIA.get(format, "text/plain"))

    return app
