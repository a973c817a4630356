"""Deterministic event-driven simulation core.

One seeded run is a pure function of its ScenarioConfig: events dequeue
in (time, insertion sequence) order, per-node randomness comes from
documented derived streams, and every behavioral step goes through the
routing, security, adversary, and ledger operations. The result is the
ordered trace plus the ledger chain.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field, replace
from enum import IntEnum

from . import adversary, ledger, mobility, routing, rng, srabc
from .adversary import ActionSet, AttackKind, AttackType
from .config import Protocol, ScenarioConfig
from .ledger import LedgerChain, TxKind
from .mobility import Position, distance
from .packets import BROADCAST, Packet, PacketKind, canonical_packet_bytes
from .srabc import EvictReason, SrabcState
from .trace import RecordKind, SimTrace

BUFFER_CAPACITY = 64  # data packets parked per destination during discovery
NET_DIAMETER = 35     # hop budget before a data packet is declared looping
REROUTE_DROPS = 8     # observed drops before a watcher stops using a hop
SYSTEM_NODE = -1      # trace attribution for whole-network events


class EventKind(IntEnum):
    PACKET_ARRIVAL = 0
    MOBILITY_TICK = 1
    TIMER_EXPIRY = 2
    TRAFFIC_GEN = 3
    BLOCK_SEAL = 4


@dataclass(order=True)
class Event:
    time: float
    sequence: int
    kind: EventKind = field(compare=False)
    payload: tuple = field(compare=False)


class _Node:
    __slots__ = ("node_id", "pos", "rng_mob", "rng_proto", "key", "queue",
                 "transmitting", "routing", "sec", "last_heard", "buffers",
                 "discovery", "attack", "sybil_ids", "sybil_counter",
                 "spoof_replay")

    def __init__(self, node_id: int, pos: Position, seed: int,
                 route_lifetime: float, reverse_lifetime: float):
        self.node_id = node_id
        self.pos = pos
        self.rng_mob = rng.node_stream(seed, node_id, rng.MOBILITY_DOMAIN)
        self.rng_proto = rng.node_stream(seed, node_id, rng.PROTOCOL_DOMAIN)
        self.key = rng.derive_secret_key(seed, node_id)
        self.queue: deque = deque()
        self.transmitting = False
        self.routing = routing.RoutingState(route_lifetime_s=route_lifetime,
                                            reverse_lifetime_s=reverse_lifetime)
        self.sec: SrabcState | None = None
        self.last_heard: dict[int, float] = {}
        self.buffers: dict[int, list[Packet]] = {}
        self.discovery: dict[int, dict] = {}
        self.attack: AttackKind | None = None
        self.sybil_ids: list[int] = []
        self.sybil_counter = 0
        self.spoof_replay: Packet | None = None


class Simulation:
    def __init__(self, config: ScenarioConfig):
        self.c = config
        self.now = 0.0
        self.heap: list[Event] = []
        self.seq = 0
        self.trace = SimTrace()
        self.chain = LedgerChain(0.0, config.block_size_txs)
        self.next_packet_id = 0
        self.pending_watch: dict[tuple[int, int], tuple[int, float]] = {}
        self.armed_seal: int | None = None
        self.seal_counter = 0
        self.srabc_on = config.protocol is Protocol.SRABC
        self.gate_on = config.protocol is Protocol.QAODV

        self.nodes: list[_Node] = []
        for i in range(config.node_count):
            node = _Node(i, Position(0.0, 0.0, (0.0, 0.0), 0.0, 0.0),
                         config.seed, config.route_lifetime_s,
                         config.reverse_path_lifetime_s)
            if config.positions is not None:
                x, y = config.positions[i]
                node.pos = Position(x, y, (x, y), 0.0, 0.0)
            else:
                node.pos = mobility.initial_position(node.rng_mob, config.area)
            self.nodes.append(node)
        self.positions = {n.node_id: n.pos for n in self.nodes}

        fakes = adversary.sybil_identities(config.node_count, list(config.attackers))
        for node_id, kind in config.attackers:
            attacker = self.nodes[node_id]
            attacker.attack = kind
            attacker.sybil_ids = fakes.get(node_id, [])

    # -- scheduling ---------------------------------------------------------

    def _push(self, time: float, kind: EventKind, payload: tuple) -> None:
        self.seq += 1
        heapq.heappush(self.heap, Event(time, self.seq, kind, payload))

    def _pid(self) -> int:
        pid = self.next_packet_id
        self.next_packet_id += 1
        return pid

    # -- run ----------------------------------------------------------------

    def run(self) -> tuple[SimTrace, LedgerChain]:
        c = self.c
        if self.srabc_on:
            for node in self.nodes:
                node.sec = SrabcState(secret_key=node.key)
            for node in self.nodes:
                ledger.register_node(self.chain, node.node_id, node.key, 0.0)
                self.trace.add(0.0, node.node_id, RecordKind.SENT_CTRL, None,
                               {"kind": "LEDGER_TX", "tx": "REGISTER"})
                self._ledger_tick(0.0)
        if c.speed_range[1] > 0:
            self._push(c.mobility_tick_s, EventKind.MOBILITY_TICK, ())
        if c.hello_interval_s > 0:
            for node in self.nodes:
                period = c.hello_interval_s
                if node.attack is not None and node.attack.type is AttackType.HELLO_FLOOD:
                    period = c.hello_interval_s / node.attack.rate_multiplier
                self._push(0.1 + node.node_id * 1e-3, EventKind.TIMER_EXPIRY,
                           ("hello", node.node_id, period))
        for i, flow in enumerate(c.traffic_flows):
            self._push(c.traffic_start_s + i * 0.01, EventKind.TRAFFIC_GEN,
                       ("flow", i))
        for node_id, kind in c.attackers:
            if kind.type is AttackType.DOS_FLOOD:
                self._push(c.traffic_start_s + 0.003 * (node_id + 1),
                           EventKind.TRAFFIC_GEN, ("dos", node_id))

        while self.heap:
            ev = heapq.heappop(self.heap)
            if ev.time > c.sim_duration_s:
                break
            if ev.time < self.now - 1e-9:
                raise RuntimeError("event time went backwards")
            self.now = ev.time
            self._dispatch(ev)

        if self.chain.pending:
            self._seal(c.sim_duration_s)
        return self.trace, self.chain

    def _dispatch(self, ev: Event) -> None:
        if ev.kind is EventKind.PACKET_ARRIVAL:
            receiver, packet, tx_start = ev.payload
            self._on_arrival(self.nodes[receiver], packet, ev.time, tx_start)
        elif ev.kind is EventKind.MOBILITY_TICK:
            self._on_mobility(ev.time)
        elif ev.kind is EventKind.TIMER_EXPIRY:
            self._on_timer(ev.time, ev.payload)
        elif ev.kind is EventKind.TRAFFIC_GEN:
            self._on_traffic(ev.time, ev.payload)
        elif ev.kind is EventKind.BLOCK_SEAL:
            token, = ev.payload
            if token == self.armed_seal:
                self.armed_seal = None
                if self.chain.pending:
                    self._seal(ev.time)
                self._ledger_tick(ev.time)

    # -- mobility and adjacency ---------------------------------------------

    def _on_mobility(self, t: float) -> None:
        c = self.c
        for node in self.nodes:
            mobility.step_mobility(node.pos, c.mobility_tick_s, node.rng_mob,
                                   c.area, c.speed_range, c.pause_time_s, t)
        nxt = t + c.mobility_tick_s
        if nxt <= c.sim_duration_s:
            self._push(nxt, EventKind.MOBILITY_TICK, ())

    def _in_range(self, a: int, b: int) -> bool:
        pa = self.positions.get(a)
        pb = self.positions.get(b)
        if pa is None or pb is None:
            return False
        return distance(pa, pb) <= self.c.radio_range_m

    def _receivers_of(self, node_id: int) -> list[int]:
        me = self.positions[node_id]
        return [n.node_id for n in self.nodes
                if n.node_id != node_id
                and distance(me, n.pos) <= self.c.radio_range_m]

    # -- timers ---------------------------------------------------------------

    def _on_timer(self, t: float, payload: tuple) -> None:
        what = payload[0]
        if what == "tx_done":
            node = self.nodes[payload[1]]
            node.transmitting = False
            self._pump(node, t)
        elif what == "hello":
            self._on_hello(t, payload[1], payload[2])
        elif what == "watchdog":
            _, watcher, forwarder, pid = payload
            self._on_watchdog(t, watcher, forwarder, pid)
        elif what == "rreq_retry":
            _, node_id, dst, rreq_id = payload
            self._on_rreq_retry(t, self.nodes[node_id], dst, rreq_id)

    # -- hello beacons ---------------------------------------------------------

    def _on_hello(self, t: float, node_id: int, period: float) -> None:
        c = self.c
        node = self.nodes[node_id]
        threshold = 3 * c.hello_interval_s
        lost = sorted(nbr for nbr, last in node.last_heard.items()
                      if t - last > threshold)
        for nbr in lost:
            del node.last_heard[nbr]
            for dest in routing.handle_link_break(node.routing, nbr, t):
                self._emit_rerr(node, dest, t)
        hello = Packet(self._pid(), PacketKind.HELLO, node_id, BROADCAST, t, 0,
                       c.control_packet_bits, sender=node_id)
        self._enqueue(node, hello, BROADCAST, t)
        if node.attack is not None:
            self._attack_beacons(node, t)
        nxt = t + period
        if nxt <= c.sim_duration_s:
            self._push(nxt, EventKind.TIMER_EXPIRY, ("hello", node_id, period))

    def _attack_beacons(self, node: _Node, t: float) -> None:
        kind = node.attack
        if kind.type is AttackType.SYBIL:
            for fake in node.sybil_ids:
                hello = Packet(self._pid(), PacketKind.HELLO, fake, BROADCAST,
                               t, 0, self.c.control_packet_bits, sender=fake)
                self._enqueue(node, hello, BROADCAST, t)
            # one fabricated route request per beacon, rotating origins
            fake = node.sybil_ids[node.sybil_counter % len(node.sybil_ids)]
            dst = node.sybil_counter % self.c.node_count
            node.sybil_counter += 1
            rreq = Packet(self._pid(), PacketKind.RREQ, fake, dst, t, 0,
                          self.c.control_packet_bits, sender=fake,
                          rreq_id=node.sybil_counter, dest_seq_no=0,
                          rand_gate=0.0 if self.gate_on else None)
            self._enqueue(node, rreq, BROADCAST, t)
        elif kind.type is AttackType.SPOOFED_ROUTING and node.spoof_replay is not None:
            self._enqueue(node, replace(node.spoof_replay), BROADCAST, t)

    # -- traffic ---------------------------------------------------------------

    def _on_traffic(self, t: float, payload: tuple) -> None:
        c = self.c
        if payload[0] == "flow":
            idx = payload[1]
            flow = c.traffic_flows[idx]
            packet = Packet(self._pid(), PacketKind.DATA, flow.src, flow.dst,
                            t, 0, flow.payload_bits, sender=flow.src)
            self._origin_send(self.nodes[flow.src], packet, t)
            nxt = t + 1.0 / flow.rate_pkt_per_s
            if nxt <= c.sim_duration_s:
                self._push(nxt, EventKind.TRAFFIC_GEN, ("flow", idx))
        else:
            node_id = payload[1]
            node = self.nodes[node_id]
            kind = node.attack
            victim = kind.victim if kind.victim is not None else \
                next(i for i in range(c.node_count) if i != node_id)
            packet = Packet(self._pid(), PacketKind.DATA, node_id, victim, t, 0,
                            8000.0, sender=node_id)
            self._origin_send(node, packet, t)
            nxt = t + 1.0 / kind.rate_pkt_per_s
            if nxt <= c.sim_duration_s:
                self._push(nxt, EventKind.TRAFFIC_GEN, ("dos", node_id))

    def _origin_send(self, node: _Node, packet: Packet, t: float) -> None:
        nh = self._pick_next_hop(node, packet.dst, t)
        if nh is None:
            buf = node.buffers.setdefault(packet.dst, [])
            if len(buf) >= BUFFER_CAPACITY:
                self.trace.add(t, node.node_id, RecordKind.DROPPED,
                               packet.packet_id,
                               {"reason": "buffer_overflow", "kind": "DATA"})
                return
            buf.append(packet)
            if packet.dst not in node.discovery:
                self._start_discovery(node, packet.dst, t, 0, t)
            return
        packet.origin_time = t
        self._enqueue(node, packet, nh, t)

    # -- route discovery --------------------------------------------------------

    def _start_discovery(self, node: _Node, dst: int, t: float, attempt: int,
                         first: float) -> None:
        rreq = routing.originate_rreq(node.routing, node.node_id, dst, t,
                                      self.gate_on, node.rng_proto, self._pid())
        rreq.payload_bits = self.c.control_packet_bits
        node.discovery[dst] = {"attempt": attempt, "first": first,
                               "rreq_id": rreq.rreq_id}
        self.trace.add(t, node.node_id, RecordKind.ROUTE_REQUESTED,
                       rreq.packet_id,
                       {"src": node.node_id, "dst": dst, "retry": attempt})
        self._enqueue(node, rreq, BROADCAST, t)
        self._push(t + self.c.rreq_retry_timeout_s, EventKind.TIMER_EXPIRY,
                   ("rreq_retry", node.node_id, dst, rreq.rreq_id))

    def _on_rreq_retry(self, t: float, node: _Node, dst: int, rreq_id: int) -> None:
        state = node.discovery.get(dst)
        if state is None or state["rreq_id"] != rreq_id:
            return
        if routing.best_route(node.routing, dst, t) is not None:
            node.discovery.pop(dst, None)
            return
        if state["attempt"] < self.c.rreq_retries:
            self._start_discovery(node, dst, t, state["attempt"] + 1,
                                  state["first"])
            return
        node.discovery.pop(dst, None)
        for packet in node.buffers.pop(dst, []):
            self.trace.add(t, node.node_id, RecordKind.DROPPED, packet.packet_id,
                           {"reason": "no_route", "kind": "DATA"})

    def _pick_next_hop(self, node: _Node, dst: int, t: float) -> int | None:
        candidates = routing.valid_candidates(node.routing, dst, t)
        horizon = 3 * self.c.hello_interval_s
        if self.c.hello_interval_s > 0 and t >= horizon:
            fresh = []
            for e in candidates:
                if t - node.last_heard.get(e.next_hop, -1e18) <= horizon:
                    fresh.append(e)
                else:
                    e.valid = False  # silent next hop, treat the link as gone
            candidates = fresh
        if not candidates:
            return None
        if self.srabc_on:
            usable = []
            for e in candidates:
                if srabc.is_blacklisted(node.sec, e.next_hop, t):
                    e.valid = False  # unusable while its owner is banned
                else:
                    usable.append(e)
            pairs = [(e.next_hop,
                      srabc.fuzzify_delay(node.sec.estimates.get(e.next_hop, 0.0),
                                          self.c.fuzzy_bounds))
                     for e in usable]
            choice = srabc.select_next_hop(pairs, node.sec, t)
        else:
            choice = routing.best_route(node.routing, dst, t)
            choice = choice.next_hop if choice is not None else None
        return choice

    # -- transmission ------------------------------------------------------------

    def _enqueue(self, node: _Node, packet: Packet, to: int, t: float) -> None:
        if len(node.queue) >= self.c.queue_capacity:
            self.trace.add(t, node.node_id, RecordKind.DROPPED, packet.packet_id,
                           {"reason": "queue_overflow", "kind": packet.kind.name})
            return
        node.queue.append((packet, to))
        self._pump(node, t)

    def _pump(self, node: _Node, t: float) -> None:
        if node.transmitting or not node.queue:
            return
        packet, to = node.queue.popleft()
        node.transmitting = True
        tx_time = packet.payload_bits / self.c.link_rate_bps
        finish = t + tx_time
        if self.srabc_on and packet.auth_tag is None:
            packet.auth_tag = ledger.message_tag(node.key,
                                                 canonical_packet_bytes(packet))
        if packet.kind is PacketKind.DATA:
            self.trace.add(t, node.node_id, RecordKind.SENT_DATA, packet.packet_id,
                           {"src": packet.src, "dst": packet.dst,
                            "origin": packet.hop_count == 0, "next_hop": to,
                            "payload_bits": packet.payload_bits,
                            "origin_time": packet.origin_time})
            watch = self.pending_watch.pop((packet.packet_id, node.node_id), None)
            if watch is not None:
                watcher_id, handoff = watch
                self._observe_forward(watcher_id, node.node_id,
                                      finish - handoff, t)
        else:
            detail = {"kind": packet.kind.name, "src": packet.src,
                      "hops": packet.hop_count}
            if packet.kind is PacketKind.RREQ:
                detail["rreq"] = [packet.src, packet.rreq_id]
            self.trace.add(t, node.node_id, RecordKind.SENT_CTRL,
                           packet.packet_id, detail)
        arrival = finish + self.c.per_hop_processing_s
        if to == BROADCAST:
            if (node.attack is not None
                    and node.attack.type is AttackType.HELLO_FLOOD
                    and packet.kind is PacketKind.HELLO):
                receivers = [n.node_id for n in self.nodes
                             if n.node_id != node.node_id]
            else:
                receivers = self._receivers_of(node.node_id)
            for r in receivers:
                self._push(arrival, EventKind.PACKET_ARRIVAL, (r, packet, t))
        else:
            if self._in_range(node.node_id, to):
                self._push(arrival, EventKind.PACKET_ARRIVAL, (to, packet, t))
                if (self.srabc_on and packet.kind is PacketKind.DATA
                        and to != packet.dst):
                    self.pending_watch[(packet.packet_id, to)] = (node.node_id,
                                                                  arrival)
                    self._push(arrival + self.c.watchdog_timeout_s,
                               EventKind.TIMER_EXPIRY,
                               ("watchdog", node.node_id, to, packet.packet_id))
            else:
                # missing link-layer handoff means a broken link, not a
                # misbehaving neighbor
                self.trace.add(t, node.node_id, RecordKind.DROPPED,
                               packet.packet_id,
                               {"reason": "link_lost", "kind": packet.kind.name})
                node.last_heard.pop(to, None)
                for dest in routing.handle_link_break(node.routing, to, t):
                    self._emit_rerr(node, dest, t)
        self._push(finish, EventKind.TIMER_EXPIRY, ("tx_done", node.node_id))

    def _tunnel(self, node: _Node, packet: Packet, peer: int, t: float) -> None:
        # out-of-band handoff: instant, silent to the radio medium; counts
        # as the single hop the wormhole advertises
        tunneled = replace(packet, sender=node.node_id,
                           hop_count=packet.hop_count + 1, auth_tag=None)
        if self.srabc_on:
            tunneled.auth_tag = ledger.message_tag(
                node.key, canonical_packet_bytes(tunneled))
        if peer < len(self.nodes):
            self._push(t, EventKind.PACKET_ARRIVAL, (peer, tunneled, t))

    # -- watchdog / detection ------------------------------------------------------

    def _observe_forward(self, watcher_id: int, forwarder: int, sample: float,
                         t: float) -> None:
        watcher = self.nodes[watcher_id]
        if watcher.sec is None or srabc.is_blacklisted(watcher.sec, forwarder, t):
            return
        estimate = srabc.record_delay_sample(watcher.sec, forwarder, sample, t)
        assessment = srabc.fuzzify_delay(estimate, self.c.fuzzy_bounds)
        srabc.observe_forwarding(watcher.sec, forwarder, dropped=False)
        if srabc.note_assessment(watcher.sec, forwarder, assessment.label):
            self._evict(watcher, forwarder, EvictReason.HIGH_DELAY, t)

    def _on_watchdog(self, t: float, watcher_id: int, forwarder: int,
                     pid: int) -> None:
        if self.pending_watch.pop((pid, forwarder), None) is None:
            return
        watcher = self.nodes[watcher_id]
        if watcher.sec is None or srabc.is_blacklisted(watcher.sec, forwarder, t):
            return
        if srabc.observe_forwarding(watcher.sec, forwarder, dropped=True):
            self._evict(watcher, forwarder, EvictReason.DROP_ANOMALY, t)
        elif sum(watcher.sec.drop_window[forwarder]) >= REROUTE_DROPS:
            # suspicion short of eviction: stop routing through the
            # neighbor so discovery samples another path
            for dest in routing.handle_link_break(watcher.routing, forwarder, t):
                self._emit_rerr(watcher, dest, t)

    def _evict(self, node: _Node, target: int, reason: EvictReason,
               t: float) -> None:
        if srabc.is_blacklisted(node.sec, target, t):
            return
        srabc.evict_node(node.sec, node.node_id, target, reason, self.chain,
                         t, self.c.blacklist_timer_s)
        self.trace.add(t, node.node_id, RecordKind.NODE_EVICTED, None,
                       {"evicted": target, "reason": reason.name})
        self.trace.add(t, node.node_id, RecordKind.SENT_CTRL, None,
                       {"kind": "LEDGER_TX", "tx": "EVICT"})
        for dest in routing.handle_link_break(node.routing, target, t):
            self._emit_rerr(node, dest, t)
        self._ledger_tick(t)

    # -- packet reception -----------------------------------------------------------

    def _auth_reason(self, node: _Node, packet: Packet, t: float) -> str | None:
        sender = packet.sender
        if srabc.is_blacklisted(node.sec, sender, t):
            return "blacklisted"
        if not self.chain.is_registered(sender):
            return "unregistered"
        if packet.auth_tag is None or not ledger.authenticate_message(
                self.chain, sender, canonical_packet_bytes(packet), packet.auth_tag):
            return "bad_tag"
        return None

    def _reject(self, node: _Node, packet: Packet, reason: str, t: float) -> None:
        self.trace.add(t, node.node_id, RecordKind.AUTH_FAIL, packet.packet_id,
                       {"claimed": packet.sender, "kind": packet.kind.name,
                        "reason": reason})
        if reason != "blacklisted":
            self._evict(node, packet.sender, EvictReason.AUTH_FAIL, t)

    def _on_arrival(self, node: _Node, packet: Packet, t: float,
                    tx_start: float) -> None:
        if packet.kind is PacketKind.DATA:
            self._recv_data(node, packet, t, tx_start)
        elif packet.kind is PacketKind.RREQ:
            self._recv_rreq(node, packet, t)
        elif packet.kind is PacketKind.RREP:
            self._recv_rrep(node, packet, t)
        elif packet.kind is PacketKind.RERR:
            self._recv_rerr(node, packet, t)
        elif packet.kind is PacketKind.HELLO:
            self._recv_hello(node, packet, t)

    def _accept_ctrl(self, node: _Node, packet: Packet, t: float) -> bool:
        """Shared admission check plus RECEIVED_CTRL tracing."""
        detail = {"kind": packet.kind.name, "from": packet.sender}
        if self.srabc_on:
            reason = self._auth_reason(node, packet, t)
            if reason is not None:
                self._reject(node, packet, reason, t)
                return False
            detail["auth"] = True
        self.trace.add(t, node.node_id, RecordKind.RECEIVED_CTRL,
                       packet.packet_id, detail)
        if node.attack is not None and node.attack.type is AttackType.SPOOFED_ROUTING \
                and packet.kind in (PacketKind.RREQ, PacketKind.RREP):
            node.spoof_replay = replace(packet)
        return True

    def _recv_hello(self, node: _Node, packet: Packet, t: float) -> None:
        if not self._accept_ctrl(node, packet, t):
            return
        node.last_heard[packet.sender] = t

    def _recv_rreq(self, node: _Node, packet: Packet, t: float) -> None:
        if not self._accept_ctrl(node, packet, t):
            return
        node.last_heard[packet.sender] = t
        decision = routing.process_rreq(node.routing, node.node_id, packet, t,
                                        self.gate_on, len(node.queue),
                                        self.c.queue_capacity)
        if decision is routing.ForwardDecision.DROP_DUPLICATE:
            return
        act = ActionSet() if node.attack is None else adversary.apply_attack(
            node.attack, packet, node.rng_proto, t)
        if act.forge_reply:
            forged = Packet(self._pid(), PacketKind.RREP, node.node_id,
                            packet.src, t, adversary.FORGED_HOP_COUNT,
                            self.c.control_packet_bits, sender=node.node_id,
                            dest_seq_no=act.forged_seq_no, route_dest=packet.dst)
            if act.invalid_tag:
                forged.auth_tag = b"\x00" * 32
            self._enqueue(node, forged, packet.sender, t)
        if act.tunnel_to is not None and packet.sender != act.tunnel_to:
            self._tunnel(node, packet, act.tunnel_to, t)
        if act.suppress_normal:
            return
        if decision is routing.ForwardDecision.REPLY:
            rrep = routing.build_rrep(node.routing, node.node_id, packet, t,
                                      self._pid())
            rrep.payload_bits = self.c.control_packet_bits
            self._enqueue(node, rrep, packet.sender, t)
        elif decision is routing.ForwardDecision.REBROADCAST:
            self._enqueue(node, packet.forward_copy(node.node_id), BROADCAST, t)

    def _recv_rrep(self, node: _Node, packet: Packet, t: float) -> None:
        if not self._accept_ctrl(node, packet, t):
            return
        node.last_heard[packet.sender] = t
        update = routing.process_rrep(node.routing, node.node_id, packet, t)
        if update.at_requester:
            if update.installed:
                self.trace.add(t, node.node_id, RecordKind.ROUTE_ESTABLISHED,
                               packet.packet_id,
                               {"src": node.node_id, "dst": packet.route_dest,
                                "hop_count": update.entry.hop_count})
            node.discovery.pop(packet.route_dest, None)
            for buffered in node.buffers.pop(packet.route_dest, []):
                self._origin_send(node, buffered, t)
        elif update.forward_to is not None:
            self._enqueue(node, packet.forward_copy(node.node_id),
                          update.forward_to, t)
        else:
            self.trace.add(t, node.node_id, RecordKind.DROPPED, packet.packet_id,
                           {"reason": "no_reverse_path", "kind": "RREP"})

    def _recv_rerr(self, node: _Node, packet: Packet, t: float) -> None:
        if not self._accept_ctrl(node, packet, t):
            return
        if routing.process_rerr(node.routing, packet, t):
            self._enqueue(node, packet.forward_copy(node.node_id), BROADCAST, t)

    def _recv_data(self, node: _Node, packet: Packet, t: float,
                   tx_start: float) -> None:
        detail = {"src": packet.src, "dst": packet.dst,
                  "final": node.node_id == packet.dst,
                  "prev_hop": packet.sender,
                  "origin_time": packet.origin_time,
                  "payload_bits": packet.payload_bits}
        if self.srabc_on:
            reason = self._auth_reason(node, packet, t)
            if reason is None:
                ok = srabc.authorize_forward(
                    node.sec, self.chain, packet.sender,
                    canonical_packet_bytes(packet), packet.auth_tag, t,
                    packet.packet_id, t - tx_start)
            else:
                ok = False
            if not ok:
                self._reject(node, packet, reason or "bad_tag", t)
                return
            detail["auth"] = True
            self.trace.add(t, node.node_id, RecordKind.SENT_CTRL, None,
                           {"kind": "LEDGER_TX", "tx": "FORWARD_EVENT"})
            self._ledger_tick(t)
        self.trace.add(t, node.node_id, RecordKind.RECEIVED_DATA,
                       packet.packet_id, detail)
        if node.node_id == packet.dst:
            return
        act = ActionSet() if node.attack is None else adversary.apply_attack(
            node.attack, packet, node.rng_proto, t)
        if act.drop:
            self.trace.add(t, node.node_id, RecordKind.DROPPED, packet.packet_id,
                           {"reason": act.drop_reason, "kind": "DATA"})
            return
        if act.tunnel_to is not None and packet.sender != act.tunnel_to:
            self._tunnel(node, packet, act.tunnel_to, t)
            return
        if packet.hop_count >= NET_DIAMETER:
            self.trace.add(t, node.node_id, RecordKind.DROPPED, packet.packet_id,
                           {"reason": "hop_limit", "kind": "DATA"})
            self._exonerate(node, packet)
            return
        nh = self._pick_next_hop(node, packet.dst, t)
        if nh is None:
            self.trace.add(t, node.node_id, RecordKind.DROPPED, packet.packet_id,
                           {"reason": "no_route", "kind": "DATA"})
            self._emit_rerr(node, packet.dst, t)
            self._exonerate(node, packet)
            return
        self._enqueue(node, packet.forward_copy(node.node_id), nh, t)

    def _exonerate(self, node: _Node, packet: Packet) -> None:
        # the drop was announced (RERR overheard), so the upstream watchdog
        # does not score it against this node
        self.pending_watch.pop((packet.packet_id, node.node_id), None)

    def _emit_rerr(self, node: _Node, dest: int, t: float) -> None:
        rerr = Packet(self._pid(), PacketKind.RERR, node.node_id, BROADCAST, t,
                      0, self.c.control_packet_bits, sender=node.node_id,
                      route_dest=dest)
        self._enqueue(node, rerr, BROADCAST, t)

    # -- ledger sealing ----------------------------------------------------------

    def _ledger_tick(self, t: float) -> None:
        while len(self.chain.pending) >= self.c.block_size_txs:
            self._seal(t)
        if self.chain.pending and self.armed_seal is None:
            self.seal_counter += 1
            self.armed_seal = self.seal_counter
            self._push(t + self.c.seal_timeout_s, EventKind.BLOCK_SEAL,
                       (self.seal_counter,))

    def _seal(self, t: float) -> None:
        block = ledger.append_block(self.chain, t)
        _, latency = self.chain.seal_times[-1]
        self.trace.add(t, SYSTEM_NODE, RecordKind.BLOCK_SEALED, None,
                       {"index": block.index, "latency": latency,
                        "txs": len(block.transactions)})
        self.armed_seal = None
        for tx in block.transactions:
            if tx.tx_kind is TxKind.EVICT:
                entry = srabc.BlacklistEntry(
                    tx.body.evicted, EvictReason(tx.body.reason_code),
                    tx.timestamp, tx.timestamp + self.c.blacklist_timer_s)
                for node in self.nodes:
                    if node.sec is not None:
                        srabc.adopt_blacklist_entry(node.sec, entry)


def run_simulation(config: ScenarioConfig) -> tuple[SimTrace, LedgerChain]:
    """Execute one scenario; identical configs give identical results."""
    return Simulation(config).run()
