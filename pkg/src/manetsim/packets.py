"""Typed frames exchanged between nodes, with canonical bytes for tagging."""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from enum import IntEnum

BROADCAST = 0xFFFFFFFF


class PacketKind(IntEnum):
    DATA = 0
    RREQ = 1
    RREP = 2
    RERR = 3
    HELLO = 4
    LEDGER_TX = 5


@dataclass(slots=True)
class Packet:
    packet_id: int
    kind: PacketKind
    src: int
    dst: int
    origin_time: float
    hop_count: int
    payload_bits: float
    sender: int = 0                      # link-layer transmitter of this hop
    rreq_id: int | None = None           # RREQ only
    rand_gate: float | None = None       # RREQ only, queue-vacancy gate
    dest_seq_no: int | None = None       # RREQ/RREP freshness
    route_dest: int | None = None        # RREP/RERR: destination described
    auth_tag: bytes | None = None

    def forward_copy(self, sender: int) -> "Packet":
        """Next-hop copy: hop count advances, tag is re-issued by the sender."""
        return replace(self, hop_count=self.hop_count + 1, sender=sender,
                       auth_tag=None)


def _opt_q(value: int | None) -> bytes:
    return b"\x00" if value is None else b"\x01" + struct.pack(">Q", value)


def _opt_d(value: float | None) -> bytes:
    return b"\x00" if value is None else b"\x01" + struct.pack(">d", value)


def canonical_packet_bytes(p: Packet) -> bytes:
    """Bit-exact serialization of every field except the tag itself."""
    return (struct.pack(">QBIII", p.packet_id, int(p.kind), p.src, p.dst, p.sender)
            + struct.pack(">qIQ", int(round(p.origin_time * 1e6)), p.hop_count,
                          int(p.payload_bits))
            + _opt_q(p.rreq_id)
            + _opt_d(p.rand_gate)
            + _opt_q(p.dest_seq_no)
            + _opt_q(p.route_dest))
