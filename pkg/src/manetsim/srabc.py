"""Secure-routing layer: delay monitoring, fuzzy next-hop grading,
ledger-backed packet authorization, and eviction of misbehaving neighbors.

Runs on top of the route candidates that AODV discovery produces. Each
node grades its neighbors' measured forwarding delay as LOW/MEDIUM/HIGH,
prefers the lowest grade as next hop, and removes neighbors that stay
HIGH, fail authentication, or drop too much transit traffic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum

from . import ledger
from .ledger import LedgerChain, LedgerTransaction, TxKind

EWMA_ALPHA = 0.3            # weight of the newest delay sample
HIGH_STREAK_EVICT = 3       # consecutive HIGH grades before eviction
DROP_WINDOW = 20            # forwarding observations per neighbor
DROP_RATIO = 0.5            # eviction when window drop ratio exceeds this
SAMPLE_AUDIT_WINDOW = 128   # raw samples retained per node for auditing


class FuzzyLabel(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2


class EvictReason(IntEnum):
    HIGH_DELAY = 0
    AUTH_FAIL = 1
    DROP_ANOMALY = 2


class SrabcError(Exception):
    pass


@dataclass(frozen=True)
class DelaySample:
    neighbor: int
    sample_s: float
    at: float


@dataclass(frozen=True)
class FuzzyAssessment:
    label: FuzzyLabel
    memberships: tuple[float, float, float]  # (low, medium, high), sums to 1
    crisp_s: float


@dataclass(frozen=True)
class BlacklistEntry:
    node_id: int
    reason: EvictReason
    since: float
    expires: float


@dataclass
class SrabcState:
    """Per-node security state, mutated only from the event loop."""
    secret_key: bytes = b""
    estimates: dict[int, float] = field(default_factory=dict)
    samples: deque = field(default_factory=lambda: deque(maxlen=SAMPLE_AUDIT_WINDOW))
    high_streak: dict[int, int] = field(default_factory=dict)
    drop_window: dict[int, deque] = field(default_factory=dict)
    blacklist: dict[int, BlacklistEntry] = field(default_factory=dict)


def fuzzify_delay(crisp_s: float, bounds: tuple[float, float]) -> FuzzyAssessment:
    """Grade a crisp delay against a LOW/MEDIUM/HIGH membership partition.

    LOW membership is 1 up to low_max and falls linearly to 0 at the
    midpoint of the bounds; HIGH rises linearly from 0 at the midpoint to
    1 at high_min; MEDIUM takes the remainder so the three always sum to 1.
    """
    low_max, high_min = bounds
    if low_max >= high_min:
        raise SrabcError(f"invalid fuzzy bounds {bounds}: low_max must be below high_min")
    if crisp_s < 0:
        raise SrabcError(f"negative delay {crisp_s}")
    mid = (low_max + high_min) / 2.0
    if crisp_s <= low_max:
        mu_low = 1.0
    elif crisp_s < mid:
        mu_low = (mid - crisp_s) / (mid - low_max)
    else:
        mu_low = 0.0
    if crisp_s <= mid:
        mu_high = 0.0
    elif crisp_s < high_min:
        mu_high = (crisp_s - mid) / (high_min - mid)
    else:
        mu_high = 1.0
    mu_med = 1.0 - mu_low - mu_high
    memberships = (mu_low, mu_med, mu_high)
    best = max(memberships)
    label = FuzzyLabel([i for i, m in enumerate(memberships) if m == best][0])
    return FuzzyAssessment(label, memberships, crisp_s)


def record_delay_sample(state: SrabcState, neighbor: int, sample_s: float,
                        now: float) -> float:
    """Fold a forwarding-delay sample into the neighbor's running estimate."""
    if sample_s < 0:
        raise SrabcError(f"negative delay sample {sample_s}")
    old = state.estimates.get(neighbor)
    new = sample_s if old is None else EWMA_ALPHA * sample_s + (1.0 - EWMA_ALPHA) * old
    state.estimates[neighbor] = new
    state.samples.append(DelaySample(neighbor, sample_s, now))
    return new


def is_blacklisted(state: SrabcState, node_id: int, now: float) -> bool:
    entry = state.blacklist.get(node_id)
    if entry is None:
        return False
    if now >= entry.expires:
        del state.blacklist[node_id]  # timer elapsed, node readmitted
        return False
    return True


def select_next_hop(candidates: list[tuple[int, FuzzyAssessment]],
                    state: SrabcState, now: float) -> int | None:
    """Pick the best non-blacklisted candidate.

    Order: lowest label first, then lowest crisp delay, then lowest id.
    """
    survivors = [(a.label, a.crisp_s, n) for n, a in candidates
                 if not is_blacklisted(state, n, now)]
    if not survivors:
        return None
    return min(survivors)[2]


def note_assessment(state: SrabcState, neighbor: int,
                    label: FuzzyLabel) -> bool:
    """Track consecutive HIGH grades; True when the eviction streak is hit."""
    if label is FuzzyLabel.HIGH:
        streak = state.high_streak.get(neighbor, 0) + 1
        state.high_streak[neighbor] = streak
        return streak >= HIGH_STREAK_EVICT
    state.high_streak[neighbor] = 0
    return False


def observe_forwarding(state: SrabcState, neighbor: int, dropped: bool) -> bool:
    """Record a watchdog outcome; True when the drop-anomaly trigger fires.

    Fires once more than half the window is known dropped: any completion
    of the 20-observation window would then exceed the ratio threshold.
    """
    window = state.drop_window.get(neighbor)
    if window is None:
        window = deque(maxlen=DROP_WINDOW)
        state.drop_window[neighbor] = window
    window.append(1 if dropped else 0)
    return sum(window) > DROP_WINDOW * DROP_RATIO


def evict_node(state: SrabcState, owner_id: int, target: int,
               reason: EvictReason, chain: LedgerChain, now: float,
               blacklist_timer_s: float) -> tuple[BlacklistEntry, LedgerTransaction]:
    """Blacklist a neighbor and append the eviction to the ledger."""
    if is_blacklisted(state, target, now):
        raise SrabcError(f"node {target} already blacklisted")
    entry = BlacklistEntry(target, reason, now, now + blacklist_timer_s)
    state.blacklist[target] = entry
    state.high_streak.pop(target, None)
    state.drop_window.pop(target, None)
    tx = ledger.make_transaction(TxKind.EVICT, owner_id, now,
                                 ledger.EvictBody(target, int(reason)))
    chain.pending.append(tx)
    return entry, tx


def adopt_blacklist_entry(state: SrabcState, entry: BlacklistEntry) -> None:
    """Install an eviction learned from a sealed block, if still current."""
    existing = state.blacklist.get(entry.node_id)
    if existing is None or existing.expires < entry.expires:
        state.blacklist[entry.node_id] = entry
        state.high_streak.pop(entry.node_id, None)
        state.drop_window.pop(entry.node_id, None)


def authorize_forward(state: SrabcState, chain: LedgerChain, sender: int,
                      message_bytes: bytes, tag: bytes | None, now: float,
                      packet_id: int, hop_delay_s: float) -> bool:
    """Admit a packet from the previous hop, logging the forward on success.

    The sender must be registered, outside the blacklist, and the tag must
    verify against its registered key. Accepted forwards append a ledger
    transaction carrying the measured per-hop delay.
    """
    if tag is None or is_blacklisted(state, sender, now):
        return False
    if not ledger.authenticate_message(chain, sender, message_bytes, tag):
        return False
    chain.pending.append(ledger.make_transaction(
        TxKind.FORWARD_EVENT, sender, now,
        ledger.ForwardBody(packet_id, hop_delay_s)))
    return True
