"""Ordered event log of a run and its line-delimited JSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum


class RecordKind(str, Enum):
    SENT_DATA = "SENT_DATA"
    RECEIVED_DATA = "RECEIVED_DATA"
    DROPPED = "DROPPED"
    SENT_CTRL = "SENT_CTRL"
    RECEIVED_CTRL = "RECEIVED_CTRL"
    ROUTE_REQUESTED = "ROUTE_REQUESTED"
    ROUTE_ESTABLISHED = "ROUTE_ESTABLISHED"
    NODE_EVICTED = "NODE_EVICTED"
    BLOCK_SEALED = "BLOCK_SEALED"
    AUTH_FAIL = "AUTH_FAIL"


@dataclass(slots=True)
class TraceRecord:
    time: float
    node: int
    kind: RecordKind
    packet_id: int | None
    detail: dict


class SimTrace:
    """Append-only record list; timestamps never decrease."""

    def __init__(self):
        self.records: list[TraceRecord] = []

    def add(self, time: float, node: int, kind: RecordKind,
            packet_id: int | None = None, detail: dict | None = None) -> None:
        self.records.append(TraceRecord(time, node, kind, packet_id,
                                        detail if detail is not None else {}))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def export_jsonl(self) -> str:
        """One JSON object per record; times carry 9 decimal places."""
        lines = []
        for r in self.records:
            pid = "null" if r.packet_id is None else str(r.packet_id)
            detail = json.dumps(r.detail, sort_keys=True, separators=(",", ":"))
            lines.append(f'{{"time":{r.time:.9f},"node":{r.node},'
                         f'"kind":"{r.kind.value}","packet_id":{pid},'
                         f'"detail":{detail}}}')
        return "\n".join(lines) + "\n"
