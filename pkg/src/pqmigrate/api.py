"""Read-only JSON API over a trained model (and optionally a dataset).

The app never mutates the model, so concurrent requests are safe. Errors
come back as {"error": ..., "field": ...} with status 400; the field key
is present when a specific record field is to blame.
"""
from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .advisor import FORMAT_VERSION, TrainedModel, recommend
from .domain import CSV_COLUMNS, Dataset, SystemRecord
from .errors import InputError
from .evaluation import method_strategy_heatmap, system_vulnerability_scores

_VARIABLE_FIELDS = CSV_COLUMNS[:-1]


def _error(status: int, message: str, field: Optional[str] = None) -> JSONResponse:
    payload = {"error": message}
    if field:
        payload["field"] = field
    return JSONResponse(status_code=status, content=payload)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise InputError("request body is not valid JSON")
    if not isinstance(body, dict):
        raise InputError("request body must be a JSON object")
    return body


def create_app(
    model: TrainedModel,
    dataset: Optional[Dataset] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="pqmigrate", version=str(FORMAT_VERSION), docs_url=None, redoc_url=None)

    summary = None
    if dataset is not None:
        summary = {
            "class_counts": dataset.class_counts(),
            "method_strategy_heatmap": method_strategy_heatmap(dataset).to_dict(),
            "system_vulnerability_scores": system_vulnerability_scores(dataset).to_dict(),
        }

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "model_version": FORMAT_VERSION,
            "created_at": model.metadata.get("created_at"),
        }

    @app.post("/predict")
    async def predict(request: Request):
        try:
            body = await _json_body(request)
            record = SystemRecord.from_dict(body)
            return recommend(model, record).to_dict()
        except InputError as exc:
            return _error(400, str(exc), exc.field)

    @app.post("/whatif")
    async def whatif(request: Request):
        try:
            body = await _json_body(request)
            base = body.get("base")
            vary = body.get("vary")
            values = body.get("values")
            if base is None or vary is None or values is None:
                raise InputError("body must contain 'base', 'vary', and 'values'")
            if vary not in _VARIABLE_FIELDS:
                raise InputError(f"cannot vary unknown field {vary!r}", field=str(vary))
            if not isinstance(values, list) or not values:
                raise InputError("'values' must be a nonempty list", field=str(vary))
            SystemRecord.from_dict(dict(base))  # reject malformed bases up front
            results = []
            for value in values:
                variant = dict(base)
                variant[vary] = value
                record = SystemRecord.from_dict(variant)
                results.append({"value": value, "recommendation": recommend(model, record).to_dict()})
            return results
        except InputError as exc:
            return _error(400, str(exc), exc.field)

    @app.get("/model/importances")
    def importances():
        return model.forest.importances

    @app.get("/dataset/summary")
    def dataset_summary():
        if summary is None:
            return _error(404, "server was started without a dataset")
        return summary

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
