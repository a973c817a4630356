"""Scenario description: parsing, defaults, and invariant validation.

Scenarios are single JSON documents whose keys match ScenarioConfig
field names exactly; unknown keys are rejected. Every error names the
offending field.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from enum import Enum

from .adversary import AttackConfigError, AttackKind, parse_attack


class Protocol(str, Enum):
    AODV = "AODV"
    QAODV = "QAODV"
    SRABC = "SRABC"


class ScenarioError(Exception):
    """Base for scenario problems; carries the offending field name."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


class ScenarioParseError(ScenarioError):
    pass


class ScenarioValidationError(ScenarioError):
    pass


@dataclass(frozen=True)
class TrafficFlow:
    src: int
    dst: int
    rate_pkt_per_s: float
    payload_bits: float


@dataclass(frozen=True)
class ScenarioConfig:
    node_count: int
    seed: int
    area: tuple[float, float] = (1000.0, 1000.0)
    radio_range_m: float = 250.0
    speed_range: tuple[float, float] = (0.0, 10.0)
    pause_time_s: float = 2.0
    sim_duration_s: float = 100.0
    traffic_flows: tuple[TrafficFlow, ...] = ()
    protocol: Protocol = Protocol.AODV
    attackers: tuple[tuple[int, AttackKind], ...] = ()
    link_rate_bps: float = 1_000_000.0
    per_hop_processing_s: float = 0.0005
    fuzzy_bounds: tuple[float, float] = (0.02, 0.10)
    blacklist_timer_s: float = 60.0
    block_size_txs: int = 8
    difficulty: float = 1.0
    # tunable protocol constants, defaulted to the conventional values
    hello_interval_s: float = 1.0        # 0 disables beacons
    queue_capacity: int = 50
    route_lifetime_s: float = 10.0
    reverse_path_lifetime_s: float = 3.0
    rreq_retries: int = 2
    rreq_retry_timeout_s: float = 1.0
    watchdog_timeout_s: float = 0.5
    control_packet_bits: float = 512.0
    seal_timeout_s: float = 5.0
    mobility_tick_s: float = 0.1
    traffic_start_s: float = 1.0
    positions: tuple[tuple[float, float], ...] | None = None


_REQUIRED = ("node_count", "seed")


def _expect(value, types, name):
    if isinstance(value, bool) or not isinstance(value, types):
        raise ScenarioParseError(name, f"expected {types}, got {value!r}")
    return value


def _pair(value, name) -> tuple[float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise ScenarioParseError(name, f"expected a pair of numbers, got {value!r}")
    return (float(value[0]), float(value[1]))


def _parse_flows(raw, name) -> tuple[TrafficFlow, ...]:
    flows = []
    if not isinstance(raw, list):
        raise ScenarioParseError(name, f"expected a list, got {raw!r}")
    for i, item in enumerate(raw):
        if not isinstance(item, (list, tuple)) or len(item) != 4:
            raise ScenarioParseError(name, f"flow {i} must be [src, dst, rate, payload_bits]")
        src, dst, rate, payload = item
        flows.append(TrafficFlow(_expect(src, int, name), _expect(dst, int, name),
                                 float(_expect(rate, (int, float), name)),
                                 float(_expect(payload, (int, float), name))))
    return tuple(flows)


def _parse_attackers(raw, name) -> tuple[tuple[int, AttackKind], ...]:
    if not isinstance(raw, list):
        raise ScenarioParseError(name, f"expected a list, got {raw!r}")
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or not {"node", "kind"} <= set(item):
            raise ScenarioParseError(name, f"attacker {i} must be {{node, kind, params}}")
        extra = set(item) - {"node", "kind", "params"}
        if extra:
            raise ScenarioParseError(name, f"attacker {i} has unknown keys {sorted(extra)}")
        node = _expect(item["node"], int, name)
        try:
            kind = parse_attack(item["kind"], item.get("params", {}))
        except AttackConfigError as exc:
            raise ScenarioValidationError(name, str(exc)) from None
        out.append((node, kind))
    return tuple(out)


def _parse_positions(raw, name):
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise ScenarioParseError(name, f"expected a list of [x, y], got {raw!r}")
    return tuple(_pair(p, name) for p in raw)


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    for key in doc:
        if key not in known:
            raise ScenarioParseError(key, "unknown scenario field")
    for key in _REQUIRED:
        if key not in doc:
            raise ScenarioParseError(key, "required field missing")

    kwargs: dict = {}
    for key, value in doc.items():
        if key in ("node_count", "block_size_txs", "seed", "queue_capacity",
                   "rreq_retries"):
            kwargs[key] = _expect(value, int, key)
        elif key in ("area", "speed_range", "fuzzy_bounds"):
            kwargs[key] = _pair(value, key)
        elif key == "traffic_flows":
            kwargs[key] = _parse_flows(value, key)
        elif key == "attackers":
            kwargs[key] = _parse_attackers(value, key)
        elif key == "protocol":
            try:
                kwargs[key] = Protocol(_expect(value, str, key))
            except ValueError:
                raise ScenarioValidationError(key, f"unknown protocol {value!r}") from None
        elif key == "positions":
            kwargs[key] = _parse_positions(value, key)
        else:
            kwargs[key] = float(_expect(value, (int, float), key))

    config = ScenarioConfig(**kwargs)
    validate_config(config)
    return config


def load_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError("document", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioParseError("document", "top level must be a JSON object")
    return scenario_from_dict(doc)


def validate_config(c: ScenarioConfig) -> None:
    def bad(name, message):
        raise ScenarioValidationError(name, message)

    if c.node_count < 2:
        bad("node_count", f"need at least 2 nodes, got {c.node_count}")
    if not (0 <= c.seed < 2**64):
        bad("seed", "must be an unsigned 64-bit integer")
    if c.radio_range_m <= 0:
        bad("radio_range_m", "must be positive")
    if c.sim_duration_s <= 0:
        bad("sim_duration_s", "must be positive")
    if c.area[0] <= 0 or c.area[1] <= 0:
        bad("area", "both dimensions must be positive")
    if c.speed_range[0] < 0 or c.speed_range[0] > c.speed_range[1]:
        bad("speed_range", f"need 0 <= min <= max, got {c.speed_range}")
    if c.pause_time_s < 0:
        bad("pause_time_s", "must be nonnegative")
    for i, f in enumerate(c.traffic_flows):
        if f.src == f.dst:
            bad("traffic_flows", f"flow {i}: src and dst must differ")
        if not (0 <= f.src < c.node_count and 0 <= f.dst < c.node_count):
            bad("traffic_flows", f"flow {i}: endpoints must be below node_count")
        if f.rate_pkt_per_s <= 0 or f.payload_bits <= 0:
            bad("traffic_flows", f"flow {i}: rate and payload must be positive")
    if not c.fuzzy_bounds[0] < c.fuzzy_bounds[1]:
        bad("fuzzy_bounds", f"low_max must be below high_min, got {c.fuzzy_bounds}")
    if c.link_rate_bps <= 0:
        bad("link_rate_bps", "must be positive")
    if c.per_hop_processing_s < 0:
        bad("per_hop_processing_s", "must be nonnegative")
    if c.blacklist_timer_s <= 0:
        bad("blacklist_timer_s", "must be positive")
    if c.block_size_txs < 1:
        bad("block_size_txs", "must be at least 1")
    if c.difficulty <= 0:
        bad("difficulty", "must be positive")
    if c.queue_capacity < 1:
        bad("queue_capacity", "must be at least 1")
    if c.hello_interval_s < 0:
        bad("hello_interval_s", "must be nonnegative (0 disables)")
    if c.mobility_tick_s <= 0:
        bad("mobility_tick_s", "must be positive")
    seen = set()
    for node_id, kind in c.attackers:
        if not (0 <= node_id < c.node_count):
            bad("attackers", f"attacker id {node_id} must be below node_count")
        if node_id in seen:
            bad("attackers", f"attacker id {node_id} listed twice")
        seen.add(node_id)
        if kind.type.value == "WORMHOLE" and not (0 <= kind.peer_id < c.node_count):
            bad("attackers", f"wormhole peer {kind.peer_id} must be below node_count")
        if kind.victim is not None and not (0 <= kind.victim < c.node_count):
            bad("attackers", f"flood victim {kind.victim} must be below node_count")
    if c.positions is not None:
        if len(c.positions) != c.node_count:
            bad("positions", f"need one [x, y] per node, got {len(c.positions)}")
        for i, (x, y) in enumerate(c.positions):
            if not (0 <= x <= c.area[0] and 0 <= y <= c.area[1]):
                bad("positions", f"node {i} position outside the area")
