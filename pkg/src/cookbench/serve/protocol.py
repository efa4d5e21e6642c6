"""Wire protocol for the live play service. All messages carry a version tag."""

from __future__ import annotations

PROTOCOL_VERSION = 1

PHASES = ("tutorial", "practice", "playing", "preference", "debrief", "done")
RATINGS = (-2, -1, 0, 1, 2)

CLIENT_TYPES = ("input", "preference", "advance")
SERVER_TYPES = ("frame", "phase", "episode_end", "error")


def frame_message(tick: int, frame: dict, score: int) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": "frame",
        "tick": tick,
        "grid": frame["grid"],
        "players": frame["players"],
        "pots": frame["pots"],
        "counter_items": frame["counter_items"],
        "score": score,
    }


def phase_message(phase: str, payload: dict | None = None) -> dict:
    return {"v": PROTOCOL_VERSION, "type": "phase", "phase": phase, "payload": payload or {}}


def episode_end_message(episode: int, deliveries: int) -> dict:
    return {"v": PROTOCOL_VERSION, "type": "episode_end", "episode": episode, "deliveries": deliveries}


def error_message(detail: str) -> dict:
    return {"v": PROTOCOL_VERSION, "type": "error", "detail": detail}
