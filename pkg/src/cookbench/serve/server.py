"""FastAPI play server: session endpoints plus the per-session WebSocket loop."""

from __future__ import annotations

import asyncio
import json
import secrets

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from cookbench.harness.store import ArtifactStore

from .protocol import PROTOCOL_VERSION, episode_end_message, error_message, frame_message, phase_message
from .session import SessionConfig, SessionError, StudySession

TUTORIAL_PAGES = [
    {"title": "Welcome", "body": "You will cook and deliver tomato soup with a partner."},
    {"title": "Controls", "body": "Arrow keys move your chef; space interacts with the cell you face."},
    {"title": "Goal", "body": "Deliver as many soups as possible. Each one raises the team score."},
    {"title": "Cooking", "body": "Put three tomatoes in a pot; it cooks by itself, then turns ready."},
    {"title": "Serving", "body": "Collect the soup with a dish and bring it to the delivery window."},
    {"title": "Partners", "body": "You will play with several partners, named only by color."},
]


class PlayService:
    """Owns sessions, their tick tasks, and the artifact store."""

    def __init__(self, config: SessionConfig, store: ArtifactStore | None = None, master_seed: int = 0):
        self.config = config
        self.store = store or ArtifactStore()
        self.master_seed = master_seed
        self.sessions: dict[str, StudySession] = {}
        self.tick_tasks: dict[str, asyncio.Task] = {}
        self.sockets: dict[str, WebSocket] = {}
        self._created = 0

    def create_session(self, participant_token: str, seed: int | None = None) -> StudySession:
        session_id = secrets.token_hex(8)
        if seed is None:
            seed = self.master_seed + self._created
        self._created += 1
        session = StudySession(session_id, participant_token, self.config, seed)
        self.sessions[session_id] = session
        return session

    def get(self, session_id: str) -> StudySession:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session


class CreateSessionRequest(BaseModel):
    participant_token: str
    seed: int | None = None


def build_app(service: PlayService) -> FastAPI:
    app = FastAPI(title="cookbench play service")
    app.state.service = service

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        session = service.create_session(req.participant_token, req.seed)
        return {
            "session_id": session.id,
            "phase": session.phase,
            "protocol": PROTOCOL_VERSION,
            "total_episodes": session.config.total_episodes,
            "tick_period": session.config.tick_period,
        }

    @app.get("/sessions/{session_id}")
    def resume_session(session_id: str):
        try:
            session = service.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        return {
            "session_id": session.id,
            "phase": session.phase,
            "episode_index": session.episode_index,
            "protocol": PROTOCOL_VERSION,
            "preferences": len(session.preferences),
        }

    @app.post("/sessions/{session_id}/export")
    def export_session(session_id: str):
        try:
            session = service.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        if not any(log is not None for log in session.episode_logs):
            raise HTTPException(status_code=409, detail="no completed episodes to export")
        payload = session.export()
        log_ids = [service.store.put_text(jsonl) for jsonl in payload["episode_logs"]]
        meta = dict(payload)
        meta["episode_logs"] = log_ids
        meta_id = service.store.put_json(meta)
        return {"export_id": meta_id, "episode_log_ids": log_ids, "n_preferences": len(payload["preferences"])}

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(ws: WebSocket, session_id: str):
        try:
            session = service.get(session_id)
        except KeyError:
            await ws.close(code=4404)
            return
        await ws.accept()
        service.sockets[session_id] = ws
        session.resume()
        await ws.send_json(phase_message(session.phase, _phase_payload(session)))
        ticker: asyncio.Task | None = None
        if session.phase in ("practice", "playing"):
            ticker = asyncio.create_task(_tick_loop(service, session, ws))
            service.tick_tasks[session_id] = ticker
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_json(error_message("malformed JSON"))
                    continue
                mtype = msg.get("type")
                try:
                    if mtype == "input":
                        session.buffer_input(int(msg.get("action", 0)))
                    elif mtype == "preference":
                        session.submit_preference(int(msg.get("rating")))
                        await ws.send_json(phase_message(session.phase, _phase_payload(session)))
                        if session.phase == "playing" and (ticker is None or ticker.done()):
                            ticker = asyncio.create_task(_tick_loop(service, session, ws))
                            service.tick_tasks[session_id] = ticker
                    elif mtype == "advance":
                        session.advance()
                        await ws.send_json(phase_message(session.phase, _phase_payload(session)))
                        if session.phase in ("practice", "playing") and (ticker is None or ticker.done()):
                            ticker = asyncio.create_task(_tick_loop(service, session, ws))
                            service.tick_tasks[session_id] = ticker
                    else:
                        await ws.send_json(error_message(f"unknown message type {mtype!r}"))
                except SessionError as exc:
                    await ws.send_json(error_message(str(exc)))
        except WebSocketDisconnect:
            session.abandon_episode()
        finally:
            if ticker is not None:
                ticker.cancel()
            service.tick_tasks.pop(session_id, None)
            if service.sockets.get(session_id) is ws:
                service.sockets.pop(session_id, None)

    return app


def _phase_payload(session: StudySession) -> dict:
    if session.phase == "tutorial":
        return {"pages": TUTORIAL_PAGES}
    if session.phase == "practice":
        return {"layout": session.config.tutorial_layout, "your_seat": 0, "goal": "complete one full soup delivery"}
    if session.phase == "playing":
        idx = session.episode_index
        return {
            "episode": idx,
            "total_episodes": session.config.total_episodes,
            "layout": session.layout_sequence[idx] if idx < len(session.layout_sequence) else None,
            "partner_color": session.partner_color(idx),
            "your_seat": session.human_seat,
        }
    if session.phase == "preference":
        pair = (session.episode_index - 2, session.episode_index - 1)
        return {
            "episode_pair": list(pair),
            "partner_a_color": session.partner_color(pair[0]),
            "partner_b_color": session.partner_color(pair[1]),
            "scale": [-2, -1, 0, 1, 2],
        }
    if session.phase == "preference":
        return {}
    return {}


async def _tick_loop(service: PlayService, session: StudySession, ws: WebSocket):
    """Anchored 5 FPS stepping: tick k fires at start + k*period regardless of
    per-tick jitter, so a 300-tick episode takes 300 * period wall-clock."""
    loop = asyncio.get_event_loop()
    period = session.config.tick_period
    start = loop.time()
    k = 0
    try:
        while session.phase in ("practice", "playing"):
            k += 1
            target = start + k * period
            delay = target - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            if session.phase not in ("practice", "playing"):
                break
            result = session.tick()
            await ws.send_json(frame_message(result["tick"], result["frame"], result["score"]))
            if result["practice_done"]:
                await ws.send_json(phase_message(session.phase, _phase_payload(session)))
                start = loop.time()
                k = 0
            elif result["episode_done"]:
                finished = session.episode_index - 1
                await ws.send_json(episode_end_message(finished, session.episode_deliveries[finished]))
                await ws.send_json(phase_message(session.phase, _phase_payload(session)))
                if session.phase != "playing":
                    break
                start = loop.time()
                k = 0
    except asyncio.CancelledError:
        pass
