"""AgentSpec: a named, loadable policy with training provenance."""

from __future__ import annotations

from dataclasses import dataclass, field

from .policy import PolicyParams

METHODS = ("SP", "PP", "BCP", "FCP", "FCP-T", "FCP+A", "FCP-T+A", "BC", "Random", "Scripted")


@dataclass
class AgentSpec:
    id: str
    method: str
    params: PolicyParams | None = None
    script: dict | None = None  # {"style", "epsilon", "seed"} for Scripted agents
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "Scripted":
            if self.script is None:
                raise ValueError("Scripted agents need a script description")
        elif self.params is None:
            raise ValueError(f"{self.method} agents need policy parameters")
        if self.method == "Random" and self.params.step_trained != 0:
            raise ValueError("Random agents are checkpoint-0 policies (step_trained must be 0)")

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "id": self.id,
            "method": self.method,
            "params": None if self.params is None else self.params.to_dict(),
            "script": self.script,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AgentSpec":
        if d.get("format") != 1:
            raise ValueError(f"unsupported agent container format {d.get('format')!r}")
        params = None if d.get("params") is None else PolicyParams.from_dict(d["params"])
        return cls(
            id=d["id"],
            method=d["method"],
            params=params,
            script=d.get("script"),
            provenance=d.get("provenance", {}),
        )
