"""Session sidecar: everything needed to regenerate the four units and
interpret a recording, as diff-able JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass

from . import __version__
from .design import DesignParams, UnitCapricep, derive_seed, generate_unit
from .errors import SignalError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SessionMetadata:
    designs: list[DesignParams]  # one per unit, seeds already derived
    t_erd_s: float
    n_o: int
    n_repeats: int
    scale: float
    fs: float

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "fs": self.fs,
            "t_erd_s": self.t_erd_s,
            "n_o": self.n_o,
            "n_repeats": self.n_repeats,
            "scale": self.scale,
            "designs": [d.to_dict() for d in self.designs],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SessionMetadata":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SignalError(
                f"unsupported sidecar schema version {doc.get('schema_version')}")
        return cls(
            designs=[DesignParams.from_dict(d) for d in doc["designs"]],
            t_erd_s=float(doc["t_erd_s"]),
            n_o=int(doc["n_o"]),
            n_repeats=int(doc["n_repeats"]),
            scale=float(doc["scale"]),
            fs=float(doc["fs"]),
        )

    def regenerate_units(self) -> list[UnitCapricep]:
        return [generate_unit(d, self.t_erd_s) for d in self.designs]


def derive_unit_designs(base: DesignParams, count: int = 4) -> list[DesignParams]:
    """Per-unit designs with seeds derived from the session's base seed."""
    from dataclasses import replace

    out = []
    for i in range(count):
        child = derive_seed(base.seed, i)
        out.append(replace(base, seed=int(child.generate_state(1)[0])))
    return out
