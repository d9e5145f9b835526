"""Seeded, replayable transcripts of security-game executions.

Events carry a payload digest rather than the payload itself, so transcript
equality is byte-exact comparison of (role, kind, digest, seed) tuples.
Identical seed vectors must reproduce identical event lists; the test suite
enforces this by replaying.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _canonical(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return {
            "__ndarray__": obj.shape,
            "data": hashlib.sha256(np.ascontiguousarray(obj).tobytes()).hexdigest(),
        }
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _canonical(obj.to_json())
    if hasattr(obj, "__dataclass_fields__"):
        return _canonical({k: getattr(obj, k) for k in obj.__dataclass_fields__})
    return obj


def payload_digest(obj: Any) -> str:
    blob = json.dumps(_canonical(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class TranscriptEvent:
    role: str
    kind: str
    payload: str
    seed: int


@dataclass
class Transcript:
    events: list[TranscriptEvent] = field(default_factory=list)
    outcome: int | None = None
    meta: dict = field(default_factory=dict)

    def record(self, role: str, kind: str, payload: Any, seed: int = 0) -> None:
        self.events.append(TranscriptEvent(role, kind, payload_digest(payload), seed))

    def events_equal(self, other: "Transcript") -> bool:
        return self.events == other.events

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {"role": e.role, "kind": e.kind, "payload": e.payload, "seed": e.seed},
                sort_keys=True,
            )
            for e in self.events
        ]
        lines.append(json.dumps({"outcome": self.outcome}, sort_keys=True))
        return "\n".join(lines) + "\n"
