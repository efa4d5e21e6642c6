"""Pairwise preference aggregation from elicited comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class PreferenceMatrix:
    methods: list[str]
    totals: dict = field(default_factory=dict)  # (row, col) -> list of signed ratings

    def add(self, a: str, b: str, rating: float) -> None:
        self.totals.setdefault((a, b), []).append(float(rating))
        self.totals.setdefault((b, a), []).append(-float(rating))

    def mean(self, a: str, b: str) -> float:
        vals = self.totals.get((a, b), [])
        return sum(vals) / len(vals) if vals else 0.0

    def count(self, a: str, b: str) -> int:
        return len(self.totals.get((a, b), []))

    def ci95(self, a: str, b: str) -> float:
        vals = self.totals.get((a, b), [])
        if len(vals) < 2:
            return float("inf") if vals else 0.0
        m = sum(vals) / len(vals)
        var = sum((v - m) ** 2 for v in vals) / (len(vals) - 1)
        return 1.96 * math.sqrt(var) / math.sqrt(len(vals))

    def to_json_dict(self) -> dict:
        return {
            "methods": self.methods,
            "mean": [[self.mean(a, b) for b in self.methods] for a in self.methods],
            "ci95": [[self.ci95(a, b) for b in self.methods] for a in self.methods],
            "n": [[self.count(a, b) for b in self.methods] for a in self.methods],
        }


def preference_aggregate(records: list[dict], method_of: dict[str, str]) -> PreferenceMatrix:
    """Aggregate preference records into an antisymmetric method-pair matrix.

    Each record ``{agent_a, agent_b, rating}`` (rating signed toward agent_a,
    five-point scale) contributes (A, B, +r) and (B, A, -r), so
    M[a][b] == -M[b][a] exactly by construction.
    """
    methods = sorted(set(method_of.values()))
    matrix = PreferenceMatrix(methods=methods)
    for rec in records:
        a = method_of[rec["agent_a"]]
        b = method_of[rec["agent_b"]]
        rating = float(rec["rating"])
        if rating not in (-2.0, -1.0, 0.0, 1.0, 2.0):
            raise ValueError(f"rating {rec['rating']!r} is outside the five-point scale")
        matrix.add(a, b, rating)
    return matrix
