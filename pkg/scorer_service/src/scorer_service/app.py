"""HTTP surface: POST /score and GET /health.

Request: {"model": name, "pairs": [{"query": ..., "text": ...}, ...]}
Response: {"scores": [...]} with one finite float per pair, in request
order. Unknown models are 404, malformed bodies 422, inference failures
500; pairs with empty text score 0 without touching the model.
"""
from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .store import ModelStore


class PairIn(BaseModel):
    query: str
    text: str


class ScoreRequest(BaseModel):
    model: str
    pairs: list[PairIn]


class ScoreResponse(BaseModel):
    scores: list[float]


class HealthResponse(BaseModel):
    status: str
    shared_weights: bool
    models: dict


def create_app(store: ModelStore) -> FastAPI:
    app = FastAPI(title="scorer-service")
    app.state.store = store

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest) -> ScoreResponse:
        try:
            head = store.head(request.model)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown model {request.model!r}")
        scores: list[float] = []
        try:
            for pair in request.pairs:
                if not pair.text.strip():
                    scores.append(0.0)
                else:
                    scores.append(head.score(pair.query, pair.text))
        except Exception as exc:  # inference failure -> 5xx, never a crash
            raise HTTPException(status_code=500, detail=f"inference failed: {exc}")
        if len(scores) != len(request.pairs) or not all(math.isfinite(s) for s in scores):
            raise HTTPException(status_code=500, detail="inference produced invalid scores")
        return ScoreResponse(scores=scores)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok",
            shared_weights=store.shared_weights,
            models=store.inventory(),
        )

    return app
