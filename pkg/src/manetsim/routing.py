"""AODV route discovery and maintenance, with the optional queue-vacancy
RREQ gate used by Q-AODV, plus an independent shortest-path oracle.

State-machine operations are pure per-node transitions; transmission,
tracing, and timers belong to the engine that drives them.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .packets import Packet, PacketKind

ROUTE_LIFETIME_S = 10.0
REVERSE_PATH_LIFETIME_S = 3.0
RREQ_RETRIES = 2
MAX_SEQ_NO = 2**31 - 1


class RoutingError(Exception):
    pass


class ForwardDecision(Enum):
    REBROADCAST = "REBROADCAST"
    REPLY = "REPLY"
    DROP_DUPLICATE = "DROP_DUPLICATE"
    DROP_GATED = "DROP_GATED"


@dataclass
class RoutingTableEntry:
    dest: int
    next_hop: int
    hop_count: int
    dest_seq_no: int
    lifetime_expiry: float
    valid: bool = True
    installed_at: float = 0.0


@dataclass
class RouteUpdate:
    installed: bool
    at_requester: bool
    forward_to: int | None
    entry: RoutingTableEntry | None


@dataclass
class RoutingState:
    """Per-node AODV state: candidate routes, reverse paths, rreq history."""
    routes: dict[int, dict[int, RoutingTableEntry]] = field(default_factory=dict)
    reverse: dict[int, tuple[int, float]] = field(default_factory=dict)
    seen_rreqs: set = field(default_factory=set)
    next_rreq_id: int = 0
    own_seq: int = 0
    route_lifetime_s: float = ROUTE_LIFETIME_S
    reverse_lifetime_s: float = REVERSE_PATH_LIFETIME_S


def _entry_rank(e: RoutingTableEntry) -> tuple:
    # freshest sequence number first, then fewer hops, then earlier install
    return (-e.dest_seq_no, e.hop_count, e.installed_at)


def valid_candidates(state: RoutingState, dest: int, now: float) -> list[RoutingTableEntry]:
    out = [e for e in state.routes.get(dest, {}).values()
           if e.valid and e.lifetime_expiry > now]
    out.sort(key=lambda e: (e.next_hop,))
    return out


def best_route(state: RoutingState, dest: int, now: float) -> RoutingTableEntry | None:
    candidates = valid_candidates(state, dest, now)
    if not candidates:
        return None
    return min(candidates, key=_entry_rank)


def last_known_seq(state: RoutingState, dest: int) -> int:
    entries = state.routes.get(dest, {}).values()
    return max((e.dest_seq_no for e in entries), default=0)


def originate_rreq(state: RoutingState, node_id: int, dest: int, now: float,
                   use_gate: bool, rng: random.Random,
                   packet_id: int) -> Packet:
    """Start a discovery: fresh rreq id, hop count zero, optional gate draw."""
    if best_route(state, dest, now) is not None:
        raise RoutingError(f"route to {dest} already valid")
    rreq_id = state.next_rreq_id
    state.next_rreq_id += 1
    state.own_seq += 1
    gate = rng.random() if use_gate else None
    return Packet(packet_id, PacketKind.RREQ, node_id, dest, now, 0, 0.0,
                  sender=node_id, rreq_id=rreq_id, rand_gate=gate,
                  dest_seq_no=last_known_seq(state, dest))


def process_rreq(state: RoutingState, node_id: int, rreq: Packet, now: float,
                 use_gate: bool, queue_len: int,
                 queue_capacity: int) -> ForwardDecision:
    """Classify an incoming RREQ and install the reverse path toward its source.

    Duplicates are suppressed by (src, rreq_id). The destination, or any
    node holding a fresh-enough route, replies; otherwise the request is
    rebroadcast, except that the queue-vacancy gate may drop it.
    """
    if rreq.kind is not PacketKind.RREQ:
        raise RoutingError(f"process_rreq got {rreq.kind.name}")
    key = (rreq.src, rreq.rreq_id)
    if key in state.seen_rreqs:
        return ForwardDecision.DROP_DUPLICATE
    state.seen_rreqs.add(key)
    state.reverse[rreq.src] = (rreq.sender, now + state.reverse_lifetime_s)
    if node_id == rreq.dst:
        return ForwardDecision.REPLY
    entry = best_route(state, rreq.dst, now)
    if entry is not None and entry.dest_seq_no >= (rreq.dest_seq_no or 0):
        return ForwardDecision.REPLY
    if use_gate:
        vacancy = 1.0 - queue_len / queue_capacity
        if not (rreq.rand_gate < vacancy):
            return ForwardDecision.DROP_GATED
    return ForwardDecision.REBROADCAST


def build_rrep(state: RoutingState, node_id: int, rreq: Packet, now: float,
               packet_id: int) -> Packet:
    """Reply to a RREQ, either as its destination or from a stored route."""
    if node_id == rreq.dst:
        state.own_seq += 1
        hops = 0
        seq = state.own_seq
    else:
        entry = best_route(state, rreq.dst, now)
        if entry is None:
            raise RoutingError(f"no route to {rreq.dst} to reply from")
        hops = entry.hop_count
        seq = entry.dest_seq_no
    return Packet(packet_id, PacketKind.RREP, node_id, rreq.src, now, hops, 0.0,
                  sender=node_id, dest_seq_no=seq, route_dest=rreq.dst)


def install_route(state: RoutingState, dest: int, next_hop: int, hop_count: int,
                  seq: int, now: float) -> RoutingTableEntry:
    entry = RoutingTableEntry(dest, next_hop, hop_count, seq,
                              now + state.route_lifetime_s, True, now)
    state.routes.setdefault(dest, {})[next_hop] = entry
    return entry


def process_rrep(state: RoutingState, node_id: int, rrep: Packet,
                 now: float) -> RouteUpdate:
    """Install the advertised forward route and relay toward the requester."""
    if rrep.kind is not PacketKind.RREP:
        raise RoutingError(f"process_rrep got {rrep.kind.name}")
    dest = rrep.route_dest
    existing = state.routes.get(dest, {}).get(rrep.sender)
    candidate = RoutingTableEntry(dest, rrep.sender, rrep.hop_count + 1,
                                  rrep.dest_seq_no or 0,
                                  now + state.route_lifetime_s, True, now)
    installed = (existing is None or not existing.valid
                 or existing.lifetime_expiry <= now
                 or _entry_rank(candidate) < _entry_rank(existing))
    if installed:
        state.routes.setdefault(dest, {})[rrep.sender] = candidate
    if node_id == rrep.dst:
        return RouteUpdate(installed, True, None, candidate if installed else existing)
    hop = state.reverse.get(rrep.dst)
    if hop is None or hop[1] <= now:
        return RouteUpdate(installed, False, None, None)
    return RouteUpdate(installed, False, hop[0], candidate if installed else existing)


def handle_link_break(state: RoutingState, lost_neighbor: int,
                      now: float) -> list[int]:
    """Invalidate routes through a lost next hop; report affected destinations."""
    affected = []
    for dest, cands in state.routes.items():
        entry = cands.get(lost_neighbor)
        if entry is not None and entry.valid:
            had_valid = entry.lifetime_expiry > now
            entry.valid = False
            if had_valid:
                affected.append(dest)
    affected.sort()
    return affected


def process_rerr(state: RoutingState, rerr: Packet, now: float) -> bool:
    """Invalidate a route learned from the RERR's sender; True if anything changed."""
    entry = state.routes.get(rerr.route_dest, {}).get(rerr.sender)
    if entry is not None and entry.valid:
        entry.valid = False
        return True
    return False


def shortest_path_oracle(adjacency: dict[int, list[int]], src: int,
                         dst: int) -> list[int] | None:
    """Minimum-hop path by breadth-first search, smallest node sequence on ties.

    Independent of the protocol machinery; used to cross-check discovered
    routes. Returns None when src and dst are disconnected.
    """
    if src not in adjacency:
        raise KeyError(f"unknown node id {src}")
    if dst not in adjacency:
        raise KeyError(f"unknown node id {dst}")
    if src == dst:
        return [src]
    dist = {dst: 0}
    frontier = deque([dst])
    while frontier:
        cur = frontier.popleft()
        for nbr in adjacency[cur]:
            if nbr not in dist:
                dist[nbr] = dist[cur] + 1
                frontier.append(nbr)
    if src not in dist:
        return None
    path = [src]
    cur = src
    while cur != dst:
        cur = min(n for n in adjacency[cur] if dist.get(n) == dist[cur] - 1)
        path.append(cur)
    return path
