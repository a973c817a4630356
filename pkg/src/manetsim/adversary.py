"""Malicious-node behaviors applied as packet-handling overrides.

Each attacker participates in the protocol normally except where its
configured behavior says otherwise; apply_attack returns the deviation
for one packet, and the engine interprets it. Rate-driven behaviors
(hello flooding, traffic flooding, fabricated identities) are scheduled
by the engine from the parameters carried here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .packets import Packet, PacketKind


class AttackType(str, Enum):
    BLACKHOLE = "BLACKHOLE"
    GREYHOLE = "GREYHOLE"
    WORMHOLE = "WORMHOLE"
    SYBIL = "SYBIL"
    SINKHOLE = "SINKHOLE"
    HELLO_FLOOD = "HELLO_FLOOD"
    SPOOFED_ROUTING = "SPOOFED_ROUTING"
    DOS_FLOOD = "DOS_FLOOD"


class AttackConfigError(Exception):
    pass


@dataclass(frozen=True)
class AttackKind:
    """One attacker's behavior plus its parameters."""
    type: AttackType
    drop_prob: float = 0.0          # GREYHOLE
    peer_id: int | None = None      # WORMHOLE
    identity_count: int = 0         # SYBIL
    rate_multiplier: float = 0.0    # HELLO_FLOOD
    rate_pkt_per_s: float = 0.0     # DOS_FLOOD
    victim: int | None = None       # DOS_FLOOD

    def validate(self) -> None:
        t = self.type
        if t is AttackType.GREYHOLE and not (0.0 < self.drop_prob < 1.0):
            raise AttackConfigError(f"GREYHOLE drop_prob must be in (0,1), got {self.drop_prob}")
        if t is AttackType.WORMHOLE and self.peer_id is None:
            raise AttackConfigError("WORMHOLE needs a peer_id")
        if t is AttackType.SYBIL and self.identity_count < 2:
            raise AttackConfigError(f"SYBIL identity_count must be >= 2, got {self.identity_count}")
        if t is AttackType.HELLO_FLOOD and self.rate_multiplier <= 0:
            raise AttackConfigError(f"HELLO_FLOOD rate_multiplier must be > 0, got {self.rate_multiplier}")
        if t is AttackType.DOS_FLOOD and self.rate_pkt_per_s <= 0:
            raise AttackConfigError(f"DOS_FLOOD rate_pkt_per_s must be > 0, got {self.rate_pkt_per_s}")


_PARAM_KEYS = {
    AttackType.BLACKHOLE: set(),
    AttackType.GREYHOLE: {"drop_prob"},
    AttackType.WORMHOLE: {"peer_id"},
    AttackType.SYBIL: {"identity_count"},
    AttackType.SINKHOLE: set(),
    AttackType.HELLO_FLOOD: {"rate_multiplier"},
    AttackType.SPOOFED_ROUTING: set(),
    AttackType.DOS_FLOOD: {"rate_pkt_per_s", "victim"},
}


def parse_attack(kind_name: str, params: dict) -> AttackKind:
    try:
        atype = AttackType(kind_name)
    except ValueError:
        raise AttackConfigError(f"unknown attack kind {kind_name!r}") from None
    unknown = set(params) - _PARAM_KEYS[atype]
    if unknown:
        raise AttackConfigError(
            f"{atype.value} does not take params {sorted(unknown)}")
    kind = AttackKind(atype, **{k: params[k] for k in params})
    kind.validate()
    return kind


@dataclass
class ActionSet:
    """What an attacker does with one packet instead of normal handling."""
    drop: bool = False
    drop_reason: str = ""
    tunnel_to: int | None = None          # zero-latency out-of-band delivery
    forge_reply: bool = False             # answer RREQ with a forged RREP
    forged_seq_no: int = 0
    invalid_tag: bool = False             # forged packets carry a bogus tag
    suppress_normal: bool = False


NORMAL = ActionSet()

FORGED_HOP_COUNT = 1  # forged RREPs always advertise a one-hop route
MAX_FORGED_SEQ = 2**31 - 1


def apply_attack(kind: AttackKind, packet: Packet, rng: random.Random,
                 now: float) -> ActionSet:
    """Deviation for one packet transiting the attacker, NORMAL if none."""
    t = kind.type
    if packet.kind is PacketKind.DATA:
        if t is AttackType.BLACKHOLE:
            return ActionSet(drop=True, drop_reason="blackhole")
        if t is AttackType.GREYHOLE:
            if rng.random() < kind.drop_prob:
                return ActionSet(drop=True, drop_reason="greyhole")
            return NORMAL
        if t is AttackType.SINKHOLE:
            # attracted traffic is swallowed without announcement
            return ActionSet(drop=True, drop_reason="sinkhole")
        if t is AttackType.WORMHOLE:
            return ActionSet(tunnel_to=kind.peer_id, suppress_normal=True)
        return NORMAL
    if packet.kind is PacketKind.RREQ:
        if t is AttackType.SINKHOLE:
            return ActionSet(forge_reply=True, forged_seq_no=MAX_FORGED_SEQ,
                             suppress_normal=True)
        if t is AttackType.SPOOFED_ROUTING:
            return ActionSet(forge_reply=True, forged_seq_no=MAX_FORGED_SEQ,
                             invalid_tag=True, suppress_normal=True)
        if t is AttackType.WORMHOLE:
            return ActionSet(tunnel_to=kind.peer_id)
    return NORMAL


def sybil_identities(node_count: int, attackers: list) -> dict[int, list[int]]:
    """Fabricated identity ids per SYBIL attacker, derived from the config.

    Ids start right above the real node range, allocated in attacker list
    order, so they are reproducible without running the simulation.
    """
    out = {}
    next_id = node_count
    for node_id, kind in attackers:
        if kind.type is AttackType.SYBIL:
            out[node_id] = list(range(next_id, next_id + kind.identity_count))
            next_id += kind.identity_count
    return out


def ground_truth(config) -> set[int]:
    """Malicious ids in a scenario: attacker nodes plus fabricated identities."""
    truth = {node_id for node_id, _ in config.attackers}
    for fakes in sybil_identities(config.node_count, config.attackers).values():
        truth.update(fakes)
    return truth
