"""Independent re-implementations used to cross-check the package.

Everything here is deliberately written as a single flat pass or a plain
graph walk, sharing no code with the implementations under test.
"""

from __future__ import annotations

import math
import random
from collections import deque

OVERHEAD = ("RREQ", "RREP", "RERR", "HELLO")


def recount_metrics(trace) -> dict:
    """One-pass recount of every trace-derived metric."""
    sent_origin = 0
    sent_total = 0
    recv_final = 0
    recv_bits = 0.0
    delay_sum = 0.0
    ctrl = 0
    req: dict = {}
    est: dict = {}
    evicted = set()
    for r in trace:
        kind = r.kind.name
        if kind == "SENT_DATA":
            sent_total += 1
            if r.detail["origin"]:
                sent_origin += 1
        elif kind == "RECEIVED_DATA":
            if r.detail["final"]:
                recv_final += 1
                recv_bits += r.detail["payload_bits"]
                delay_sum += r.time - r.detail["origin_time"]
        elif kind == "SENT_CTRL":
            if r.detail["kind"] in OVERHEAD:
                ctrl += 1
        elif kind == "ROUTE_REQUESTED":
            key = (r.detail["src"], r.detail["dst"])
            if key not in req:
                req[key] = r.time
        elif kind == "ROUTE_ESTABLISHED":
            key = (r.detail["src"], r.detail["dst"])
            if key not in est:
                est[key] = r.time
        elif kind == "NODE_EVICTED":
            evicted.add(r.detail["evicted"])
    acq = [est[k] - req[k] for k in req if k in est]
    return {
        "sent_origin": sent_origin,
        "sent_total": sent_total,
        "recv_final": recv_final,
        "pdr_pct": 100.0 * recv_final / sent_origin if sent_origin else None,
        "throughput_pkt": recv_final,
        "throughput_bits": recv_bits,
        "mean_delay": delay_sum / recv_final if recv_final else None,
        "overhead": ctrl / sent_total if sent_total else None,
        "acq_mean": sum(acq) / len(acq) if acq else None,
        "dropped": sent_origin - recv_final,
        "evicted": evicted,
    }


def recount_security(trace, truth) -> float:
    total = 0
    bad = 0
    for r in trace:
        kind = r.kind.name
        if kind == "RECEIVED_DATA":
            sender = r.detail["prev_hop"]
        elif kind == "RECEIVED_CTRL":
            sender = r.detail["from"]
        else:
            continue
        if sender in truth:
            total += 1
            if r.detail.get("auth") is not True:
                bad += 1
    return 100.0 if total == 0 else 100.0 * (total - bad) / total


def all_pairs_in_range(positions: dict, radio_range: float) -> dict:
    """Brute-force unit-disk adjacency over every pair."""
    adj = {i: [] for i in positions}
    ids = sorted(positions)
    for i in ids:
        for j in ids:
            if i == j:
                continue
            dx = positions[i][0] - positions[j][0]
            dy = positions[i][1] - positions[j][1]
            if math.sqrt(dx * dx + dy * dy) <= radio_range:
                adj[i].append(j)
    return adj


def bfs_hops(adjacency: dict, src: int, dst: int) -> int | None:
    """Plain queue-based breadth-first distance, no tie-breaking."""
    if src == dst:
        return 0
    seen = {src}
    frontier = deque([(src, 0)])
    while frontier:
        cur, d = frontier.popleft()
        for nbr in adjacency[cur]:
            if nbr == dst:
                return d + 1
            if nbr not in seen:
                seen.add(nbr)
                frontier.append((nbr, d + 1))
    return None


def flood_rreq_transmissions(adjacency: dict, src: int, dst: int) -> int:
    """Transmissions of one suppressed flood: every reached node except the
    destination broadcasts exactly once."""
    reached = {src}
    frontier = deque([src])
    while frontier:
        cur = frontier.popleft()
        if cur == dst:
            continue  # the destination answers instead of rebroadcasting
        for nbr in adjacency[cur]:
            if nbr not in reached:
                reached.add(nbr)
                frontier.append(nbr)
    return len(reached) - (1 if dst in reached else 0)


def random_connected_positions(n: int, area: float, radio_range: float,
                               rng: random.Random) -> list:
    """Rejection-sample node placements until the unit-disk graph connects."""
    while True:
        pts = {i: (rng.uniform(0, area), rng.uniform(0, area)) for i in range(n)}
        adj = all_pairs_in_range(pts, radio_range)
        if all(bfs_hops(adj, 0, i) is not None for i in range(1, n)):
            return [list(pts[i]) for i in range(n)]
