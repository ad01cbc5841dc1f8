"""HTTP API for interactive sort sessions, with file-backed persistence.

Each session lives in one JSON document under the data directory,
rewritten atomically (write-temp-then-rename) after every accepted
outcome.  On load the engine state is rebuilt by replaying the recorded
history and checked against the stored rating snapshot, so a restart
reconstructs exactly the state the last accepted outcome produced.

Endpoints (JSON bodies; every response carries ``schema_version``):

    POST /sessions                    create a session from item labels
    GET  /sessions/{id}/next-pair     the pair to ask about next (idempotent)
    POST /sessions/{id}/outcome       apply one answer (at-most-once token)
    GET  /sessions/{id}/ranking       current ranking, best first
    GET  /sessions/{id}               full session state
    GET  /healthz                     liveness probe
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import Algorithm, ComparisonOutcome, PairChoice, SortSession, new_session
from .rating import EloParams, TrueSkillParams

__all__ = ["SCHEMA_VERSION", "SessionStore", "create_app"]

SCHEMA_VERSION = 1
DEFAULT_ALGORITHM = Algorithm.TSSORT_PARTNER_WOVER

_WINNER_TO_OUTCOME = {
    "first": ComparisonOutcome.FIRST_WINS,
    "second": ComparisonOutcome.SECOND_WINS,
    "draw": ComparisonOutcome.DRAW,
}
_OUTCOME_TO_WINNER = {v: k for k, v in _WINNER_TO_OUTCOME.items()}


class CreateSessionRequest(BaseModel):
    items: list[str]
    algorithm: str | None = None
    params: dict[str, float] | None = None


class OutcomeRequest(BaseModel):
    pair_token: str
    winner: str


@dataclass
class _LiveSession:
    session_id: str
    item_labels: list[str]
    session: SortSession
    created_at: str
    updated_at: str
    lock: threading.RLock = field(default_factory=threading.RLock)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _build_params(algorithm: Algorithm, raw: dict[str, float] | None):
    if raw is None:
        return None
    try:
        if algorithm is Algorithm.ELOSORT_PARTNER:
            return EloParams(**raw)
        return TrueSkillParams(**raw)
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"invalid params: {exc}") from None


def _params_dict(session: SortSession) -> dict[str, float]:
    p = session.params
    if isinstance(p, EloParams):
        return {"k_factor": p.k_factor, "beta": p.beta, "initial_score": p.initial_score}
    return {"beta": p.beta, "mu0": p.mu0, "sigma0": p.sigma0, "epsilon": p.epsilon}


def _pair_token(session: SortSession, pair: PairChoice) -> str:
    return f"{session.comparisons_done}:{pair.first_index}:{pair.second_index}"


def _ranking_rows(live: _LiveSession) -> list[dict[str, Any]]:
    session = live.session
    ratings = session.ratings
    rows = []
    for rank, idx in enumerate(session.current_order(), start=1):
        r = ratings[idx]
        if hasattr(r, "mu"):
            mu, sigma, cons = r.mu, r.sigma, r.mu - 3.0 * r.sigma
        else:
            mu, sigma, cons = r.score, 0.0, r.score
        rows.append(
            {
                "rank": rank,
                "label": live.item_labels[idx],
                "mu": mu,
                "sigma": sigma,
                "conservative_score": cons,
            }
        )
    return rows


class SessionStore:
    """Loads, caches, and atomically persists sessions in a directory."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, _LiveSession] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def create(
        self,
        item_labels: list[str],
        algorithm: Algorithm,
        params=None,
    ) -> _LiveSession:
        session = new_session(len(item_labels), algorithm, params=params)
        now = _now()
        live = _LiveSession(
            session_id=uuid.uuid4().hex,
            item_labels=list(item_labels),
            session=session,
            created_at=now,
            updated_at=now,
        )
        with self._registry_lock:
            self._sessions[live.session_id] = live
        self.persist(live)
        return live

    def get(self, session_id: str) -> _LiveSession:
        with self._registry_lock:
            live = self._sessions.get(session_id)
        if live is not None:
            return live
        live = self._load(session_id)
        with self._registry_lock:
            return self._sessions.setdefault(session_id, live)

    def persist(self, live: _LiveSession) -> None:
        session = live.session
        if session._scores is not None:
            ratings = [{"score": float(s)} for s in session._scores]
        else:
            ratings = [
                {"mu": float(m), "sigma": float(s)}
                for m, s in zip(session._mu, session._sigma)
            ]
        doc = {
            "schema_version": SCHEMA_VERSION,
            "session_id": live.session_id,
            "item_labels": live.item_labels,
            "algorithm": session.algorithm.name,
            "params": _params_dict(session),
            "budget": session.budget,
            "comparisons_done": session.comparisons_done,
            "history": [
                [p.first_index, p.second_index, _OUTCOME_TO_WINNER[o]]
                for p, o in session.history
            ],
            "ratings": ratings,
            "created_at": live.created_at,
            "updated_at": live.updated_at,
        }
        path = self._path(live.session_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=1), encoding="utf-8")
        os.replace(tmp, path)

    def _load(self, session_id: str) -> _LiveSession:
        path = self._path(session_id)
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        algorithm = Algorithm[doc["algorithm"]]
        params = _build_params(algorithm, doc["params"])
        session = new_session(len(doc["item_labels"]), algorithm, params=params)
        for first, second, winner in doc["history"]:
            session.apply_outcome(PairChoice(first, second), _WINNER_TO_OUTCOME[winner])
        if session.comparisons_done != doc["comparisons_done"]:
            raise HTTPException(status_code=500, detail="session file is inconsistent")
        stored = doc["ratings"]
        if session._scores is not None:
            rebuilt = [{"score": float(s)} for s in session._scores]
        else:
            rebuilt = [
                {"mu": float(m), "sigma": float(s)}
                for m, s in zip(session._mu, session._sigma)
            ]
        if rebuilt != stored:
            raise HTTPException(
                status_code=500,
                detail="session file is corrupt: replayed state does not match snapshot",
            )
        return _LiveSession(
            session_id=doc["session_id"],
            item_labels=list(doc["item_labels"]),
            session=session,
            created_at=doc["created_at"],
            updated_at=doc["updated_at"],
        )


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="probsort session service")
    store = SessionStore(Path(data_dir))
    app.state.store = store

    @app.exception_handler(HTTPException)
    def _http_error(request, exc: HTTPException):
        # every response carries the schema version, errors included
        return JSONResponse(
            status_code=exc.status_code,
            content={"schema_version": SCHEMA_VERSION, "detail": exc.detail},
        )

    @app.exception_handler(RequestValidationError)
    def _validation_error(request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"schema_version": SCHEMA_VERSION, "detail": exc.errors()},
        )

    @app.get("/healthz")
    def healthz():
        return {"schema_version": SCHEMA_VERSION, "status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        labels = [s.strip() for s in req.items]
        if any(not s for s in labels):
            raise HTTPException(status_code=400, detail="item labels must be non-empty")
        if len(labels) < 2:
            raise HTTPException(status_code=400, detail="need at least 2 items to sort")
        if len(set(labels)) != len(labels):
            raise HTTPException(status_code=400, detail="item labels must be distinct")
        try:
            algorithm = (
                Algorithm.from_name(req.algorithm) if req.algorithm else DEFAULT_ALGORITHM
            )
            if not algorithm.is_probabilistic:
                raise ValueError(f"{algorithm.name} cannot drive an interactive session")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        params = _build_params(algorithm, req.params)
        try:
            live = store.create(labels, algorithm, params)
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"storage failure: {exc}") from None
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": live.session_id,
            "algorithm": algorithm.name,
            "item_count": len(labels),
            "budget": live.session.budget,
        }

    def _finished_response(live: _LiveSession) -> JSONResponse:
        return JSONResponse(
            status_code=409,
            content={
                "schema_version": SCHEMA_VERSION,
                "done": True,
                "detail": "session is finished",
                "ranking": f"/sessions/{live.session_id}/ranking",
            },
        )

    @app.get("/sessions/{session_id}/next-pair")
    def next_pair(session_id: str):
        live = store.get(session_id)
        with live.lock:
            if live.session.is_finished():
                return _finished_response(live)
            pair = live.session.next_pair()
            return {
                "schema_version": SCHEMA_VERSION,
                "pair_token": _pair_token(live.session, pair),
                "first_index": pair.first_index,
                "second_index": pair.second_index,
                "first_label": live.item_labels[pair.first_index],
                "second_label": live.item_labels[pair.second_index],
                "comparisons_done": live.session.comparisons_done,
                "budget": live.session.budget,
                "done": False,
            }

    @app.post("/sessions/{session_id}/outcome")
    def post_outcome(session_id: str, req: OutcomeRequest):
        outcome = _WINNER_TO_OUTCOME.get(req.winner)
        if outcome is None:
            raise HTTPException(
                status_code=400,
                detail=f"winner must be one of first/second/draw, got {req.winner!r}",
            )
        live = store.get(session_id)
        with live.lock:
            session = live.session
            if session.is_finished():
                return _finished_response(live)
            pair = session.next_pair()
            expected = _pair_token(session, pair)
            if req.pair_token != expected:
                raise HTTPException(
                    status_code=409,
                    detail="stale pair_token: another outcome was already applied",
                )
            session.apply_outcome(pair, outcome)
            live.updated_at = _now()
            try:
                store.persist(live)
            except OSError as exc:
                raise HTTPException(status_code=500, detail=f"storage failure: {exc}") from None
            return {
                "schema_version": SCHEMA_VERSION,
                "comparisons_done": session.comparisons_done,
                "budget": session.budget,
                "done": session.is_finished(),
            }

    @app.get("/sessions/{session_id}/ranking")
    def ranking(session_id: str):
        live = store.get(session_id)
        with live.lock:
            return {
                "schema_version": SCHEMA_VERSION,
                "done": live.session.is_finished(),
                "comparisons_done": live.session.comparisons_done,
                "budget": live.session.budget,
                "ranking": _ranking_rows(live),
            }

    @app.get("/sessions/{session_id}")
    def full_state(session_id: str):
        live = store.get(session_id)
        with live.lock:
            session = live.session
            if session._scores is not None:
                ratings = [{"score": float(s)} for s in session._scores]
            else:
                ratings = [
                    {"mu": float(m), "sigma": float(s)}
                    for m, s in zip(session._mu, session._sigma)
                ]
            return {
                "schema_version": SCHEMA_VERSION,
                "session_id": live.session_id,
                "item_labels": live.item_labels,
                "algorithm": session.algorithm.name,
                "params": _params_dict(session),
                "budget": session.budget,
                "comparisons_done": session.comparisons_done,
                "done": session.is_finished(),
                "history": [
                    {
                        "first_index": p.first_index,
                        "second_index": p.second_index,
                        "winner": _OUTCOME_TO_WINNER[o],
                    }
                    for p, o in session.history
                ],
                "ratings": ratings,
                "created_at": live.created_at,
                "updated_at": live.updated_at,
            }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
