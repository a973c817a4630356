"""QoS and ledger metrics derived from a run's trace and chain.

Conventions: a data packet counts as sent when its origin transmits it
(detail origin=true) and as delivered when its final destination accepts
it (detail final=true); packets that never left their origin's discovery
buffer appear only as DROPPED records. Routing overhead counts every
RREQ/RREP/RERR/HELLO transmission, rebroadcasts included, against every
data transmission.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ledger
from .ledger import LedgerChain
from .trace import RecordKind, SimTrace

OVERHEAD_KINDS = frozenset({"RREQ", "RREP", "RERR", "HELLO"})


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class MetricsReport:
    pdr_pct: float
    throughput_pkt_per_s: float
    throughput_bps: float
    mean_e2e_delay_s: float
    routing_overhead_ratio: float
    route_acq_latency_s: float
    dropped_count: int
    block_height: int
    mean_block_gen_latency_s: float
    node_count: int
    sim_time_s: float
    detection_rate_pct: float
    security_level_pct: float


def _sent_origin(trace: SimTrace) -> int:
    return sum(1 for r in trace
               if r.kind is RecordKind.SENT_DATA and r.detail["origin"])


def _received_final(trace: SimTrace) -> list:
    return [r for r in trace
            if r.kind is RecordKind.RECEIVED_DATA and r.detail["final"]]


def packet_delivery_ratio(trace: SimTrace) -> float:
    """Delivered data packets over originated data packets, as a percent."""
    sent = _sent_origin(trace)
    if sent == 0:
        raise MetricsError("no data packets were sent")
    return 100.0 * len(_received_final(trace)) / sent


def throughput(trace: SimTrace, sim_time_s: float) -> tuple[float, float]:
    """Delivered packets per second and delivered payload bits per second."""
    if sim_time_s <= 0:
        raise MetricsError(f"sim_time_s must be positive, got {sim_time_s}")
    delivered = _received_final(trace)
    bits = sum(r.detail["payload_bits"] for r in delivered)
    return len(delivered) / sim_time_s, bits / sim_time_s


def end_to_end_delay(trace: SimTrace) -> float:
    """Mean origin-to-destination latency over delivered data packets."""
    delivered = _received_final(trace)
    if not delivered:
        raise MetricsError("no delivered data packets")
    return sum(r.time - r.detail["origin_time"] for r in delivered) / len(delivered)


def analytic_delay(n_hops: int, payload_bits: float, link_rate_bps: float) -> float:
    """Closed-form delay of an uncongested path: hops times bits over rate."""
    if n_hops < 1:
        raise MetricsError(f"n_hops must be at least 1, got {n_hops}")
    if payload_bits <= 0 or link_rate_bps <= 0:
        raise MetricsError("payload_bits and link_rate_bps must be positive")
    return n_hops * payload_bits / link_rate_bps


def routing_overhead(trace: SimTrace) -> float:
    """Control transmissions per data transmission."""
    data = sum(1 for r in trace if r.kind is RecordKind.SENT_DATA)
    if data == 0:
        raise MetricsError("no data packets were sent")
    ctrl = sum(1 for r in trace if r.kind is RecordKind.SENT_CTRL
               and r.detail["kind"] in OVERHEAD_KINDS)
    return ctrl / data


def route_acquisition_latency(trace: SimTrace) -> float:
    """Mean first-request to first-establishment gap per flow.

    Retried discoveries stay anchored to the first request time.
    """
    first_req: dict[tuple[int, int], float] = {}
    first_est: dict[tuple[int, int], float] = {}
    for r in trace:
        if r.kind is RecordKind.ROUTE_REQUESTED:
            key = (r.detail["src"], r.detail["dst"])
            first_req.setdefault(key, r.time)
        elif r.kind is RecordKind.ROUTE_ESTABLISHED:
            key = (r.detail["src"], r.detail["dst"])
            first_est.setdefault(key, r.time)
    gaps = [first_est[k] - first_req[k] for k in first_req if k in first_est]
    if not gaps:
        raise MetricsError("no completed route discoveries")
    return sum(gaps) / len(gaps)


def block_metrics(chain: LedgerChain) -> tuple[int, float, bool]:
    """Chain height and mean seal latency; the flag is False when no
    non-genesis block exists to measure."""
    height = ledger.block_height(chain)
    if not chain.seal_times:
        return height, 0.0, False
    latencies = [lat for _, lat in chain.seal_times]
    return height, sum(latencies) / len(latencies), True


def detection_rate(trace: SimTrace, truth: set[int]) -> float:
    """Share of ground-truth malicious ids evicted somewhere in the run."""
    if not truth:
        raise MetricsError("ground truth is empty")
    evicted = {r.detail["evicted"] for r in trace
               if r.kind is RecordKind.NODE_EVICTED}
    return 100.0 * len(evicted & truth) / len(truth)


def security_level(trace: SimTrace, truth: set[int]) -> float:
    """Share of accepted malicious transmissions that were authenticated.

    Run-defined proxy: an acceptance (data or control) whose transmitter
    is malicious counts against security when it happened without a
    successful ledger authentication. 100 when nothing malicious was
    accepted at all.
    """
    total = 0
    unauthenticated = 0
    for r in trace:
        if r.kind is RecordKind.RECEIVED_DATA:
            sender = r.detail["prev_hop"]
        elif r.kind is RecordKind.RECEIVED_CTRL:
            sender = r.detail["from"]
        else:
            continue
        if sender in truth:
            total += 1
            if not r.detail.get("auth", False):
                unauthenticated += 1
    if total == 0:
        return 100.0
    return 100.0 * (1.0 - unauthenticated / total)


def dropped_count(trace: SimTrace) -> int:
    """Originated minus delivered data packets."""
    return _sent_origin(trace) - len(_received_final(trace))


def compute_report(trace: SimTrace, chain: LedgerChain, node_count: int,
                   sim_time_s: float, truth: set[int]) -> MetricsReport:
    """Full per-run report; metrics that are undefined for the run (no
    traffic, no discoveries, no attackers) report as zero."""
    try:
        pdr = packet_delivery_ratio(trace)
        dropped = dropped_count(trace)
        overhead = routing_overhead(trace)
    except MetricsError:
        pdr, dropped, overhead = 0.0, 0, 0.0
    pkt_s, bps = throughput(trace, sim_time_s)
    try:
        delay = end_to_end_delay(trace)
    except MetricsError:
        delay = 0.0
    try:
        acq = route_acquisition_latency(trace)
    except MetricsError:
        acq = 0.0
    height, block_latency, _ = block_metrics(chain)
    try:
        detect = detection_rate(trace, truth)
    except MetricsError:
        detect = 0.0
    return MetricsReport(
        pdr_pct=pdr,
        throughput_pkt_per_s=pkt_s,
        throughput_bps=bps,
        mean_e2e_delay_s=delay,
        routing_overhead_ratio=overhead,
        route_acq_latency_s=acq,
        dropped_count=dropped,
        block_height=height,
        mean_block_gen_latency_s=block_latency,
        node_count=node_count,
        sim_time_s=sim_time_s,
        detection_rate_pct=detect,
        security_level_pct=security_level(trace, truth),
    )


COMPARISON_COLUMNS = ("label", "pdr_pct", "throughput_pkt_s", "dropped",
                      "mean_e2e_delay_s", "routing_overhead")


def build_comparison(reports: list[tuple[str, MetricsReport]]) -> list[tuple]:
    """Per-protocol comparison rows in the fixed column order."""
    if not reports:
        raise MetricsError("need at least one report to compare")
    return [(label, r.pdr_pct, r.throughput_pkt_per_s, r.dropped_count,
             r.mean_e2e_delay_s, r.routing_overhead_ratio)
            for label, r in reports]


def render_comparison(rows: list[tuple]) -> str:
    """Aligned plain-text table of comparison rows."""
    def fmt(v):
        return f"{v:.4g}" if isinstance(v, float) else str(v)

    table = [COMPARISON_COLUMNS] + [tuple(fmt(v) for v in row) for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    lines = []
    for i, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
