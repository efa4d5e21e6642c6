"""Behavioral metrics recovered from episode logs."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from cookbench.env.episode import EpisodeLog, resimulate
from cookbench.env.layout import Layout, get_layout


@dataclass
class BehaviorStats:
    layout: str
    movement_fraction: tuple[float, float]
    pot_preference_diff: tuple[float | None, float | None]
    deliveries: int

    @property
    def pot_metric_applicable(self) -> bool:
        return any(v is not None for v in self.pot_preference_diff)


def behavior_stats(log: EpisodeLog, layout: Layout | None = None) -> BehaviorStats:
    """Movement fraction, pot-preference imbalance, and deliveries for one log.

    Movement counts only realized position changes (a blocked move is not
    moving). Pot preference is |uses_A - uses_B| / (uses_A + uses_B) over a
    player's deposit and collect interactions, defined only on 2-pot layouts
    for players that used a pot at all.
    """
    if layout is None:
        layout = get_layout(log.layout)
    moved = [0, 0]
    pot_uses = np.zeros((2, max(len(layout.pot_positions), 1)), dtype=np.int64)
    deliveries = 0
    prev_positions = None
    for i, outcome, state in resimulate(log, layout):
        if prev_positions is None:
            prev = [layout.spawns[0], layout.spawns[1]]
        else:
            prev = prev_positions
        for p in (0, 1):
            if state.players[p].position != prev[p]:
                moved[p] += 1
        prev_positions = [state.players[0].position, state.players[1].position]
        for e in outcome.events:
            if e["type"] == "delivered":
                deliveries += 1
            elif e["type"] in ("tomato_deposited", "soup_collected"):
                pot_idx = layout.pot_positions.index(tuple(e["pot"]))
                pot_uses[e["player"], pot_idx] += 1

    T = len(log.steps)
    movement_fraction = (moved[0] / T, moved[1] / T) if T else (0.0, 0.0)

    prefs: list[float | None] = [None, None]
    if len(layout.pot_positions) == 2:
        for p in (0, 1):
            total = int(pot_uses[p].sum())
            if total > 0:
                prefs[p] = float(abs(int(pot_uses[p, 0]) - int(pot_uses[p, 1])) / total)
    return BehaviorStats(
        layout=log.layout,
        movement_fraction=movement_fraction,
        pot_preference_diff=(prefs[0], prefs[1]),
        deliveries=deliveries,
    )


def aggregate_behavior(stats_by_method: dict[str, list[BehaviorStats]]) -> list[dict]:
    """Rows of (method, layout) aggregates for CSV/figure export."""
    rows = []
    for method in sorted(stats_by_method):
        stats = stats_by_method[method]
        layouts = sorted({s.layout for s in stats})
        for lay in layouts:
            sub = [s for s in stats if s.layout == lay]
            move_vals = [v for s in sub for v in s.movement_fraction]
            pot_vals = [v for s in sub for v in s.pot_preference_diff if v is not None]
            rows.append(
                {
                    "method": method,
                    "layout": lay,
                    "episodes": len(sub),
                    "movement_fraction": float(np.mean(move_vals)) if move_vals else 0.0,
                    "pot_preference_diff": float(np.mean(pot_vals)) if pot_vals else None,
                    "mean_deliveries": float(np.mean([s.deliveries for s in sub])),
                }
            )
    return rows


def write_behavior_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["method", "layout", "episodes", "movement_fraction", "pot_preference_diff", "mean_deliveries"])
        for r in rows:
            pot = "" if r["pot_preference_diff"] is None else f"{r['pot_preference_diff']:.4f}"
            w.writerow([r["method"], r["layout"], r["episodes"], f"{r['movement_fraction']:.4f}", pot, f"{r['mean_deliveries']:.4f}"])
