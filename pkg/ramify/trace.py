from __future__ import annotations

import json
from collections.abc import Iterable
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1"


def dump_record(payload: dict[str, Any]) -> str:
    """Stable single-line JSON with a schema version."""
    return json.dumps(
        {"schema_version": SCHEMA_VERSION, **payload},
        ensure_ascii=True,
        sort_keys=True,
        separators=(",", ":"),
    )


class TraceEvent(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal[
        "stage_start",
        "introduce",
        "adjustment",
        "ordinary",
        "level",
        "stage_output",
        "truncated",
    ]
    stage: int
    level: Optional[int] = None
    prime: Optional[str] = None
    alpha: Optional[int] = None
    source: Optional[str] = None
    l: Optional[int] = None
    u: Optional[int] = None
    sigma: Optional[list[int]] = None
    tau: Optional[list[int]] = None
    deviation: Optional[list[int]] = None
    message: Optional[str] = None


class TracePrime(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    stage: int
    l: int


class TraceHeader(BaseModel):
    """Model metadata needed to audit a trace without the model file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: int
    N: int
    variant: Literal["uncond", "grh"]
    seed: int
    k_max: int
    k_effective: int
    primes: list[TracePrime] = Field(default_factory=list)
    repair_order: list[str] = Field(default_factory=list)
    repair_classes: dict[str, str] = Field(default_factory=dict)
    repair_restrictions: dict[str, dict[str, tuple[int, int]]] = Field(
        default_factory=dict
    )
    two_prime_stages: list[int] = Field(default_factory=list)
    w_basis: list[list[int]] = Field(default_factory=list)


class LiftTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: str = SCHEMA_VERSION
    header: TraceHeader
    events: list[TraceEvent] = Field(default_factory=list)

    def append(self, event: TraceEvent) -> "LiftTrace":
        return LiftTrace(
            version=self.version, header=self.header, events=[*self.events, event]
        )

    def extend(self, events: Iterable[TraceEvent]) -> "LiftTrace":
        return LiftTrace(
            version=self.version,
            header=self.header,
            events=[*self.events, *events],
        )

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [event for event in self.events if event.kind == kind]

    def to_records(self) -> list[str]:
        lines = [dump_record({"record": "header", **self.header.model_dump()})]
        for event in self.events:
            lines.append(
                dump_record({"record": "event", **event.model_dump(exclude_none=True)})
            )
        return lines

    @classmethod
    def from_records(cls, lines: Iterable[str]) -> "LiftTrace":
        header: TraceHeader | None = None
        events: list[TraceEvent] = []
        for line in lines:
            if not line.strip():
                continue
            payload = json.loads(line)
            if payload.pop("schema_version", None) != SCHEMA_VERSION:
                raise ValueError("trace record has an unsupported schema version.")
            record = payload.pop("record", None)
            if record == "header":
                header = TraceHeader.model_validate(payload)
            elif record == "event":
                events.append(TraceEvent.model_validate(payload))
            else:
                raise ValueError(f"unknown trace record type {record!r}.")
        if header is None:
            raise ValueError("trace records have no header.")
        return cls(header=header, events=events)
