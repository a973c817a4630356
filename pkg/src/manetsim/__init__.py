"""Deterministic MANET simulator: AODV, Q-AODV, and blockchain-secured
SRABC routing under configurable attacks, with QoS and ledger metrics."""

from .config import (Protocol, ScenarioConfig, ScenarioError,
                     ScenarioParseError, ScenarioValidationError, TrafficFlow,
                     load_scenario, scenario_from_dict)
from .engine import EventKind, Simulation, run_simulation
from .ledger import (Block, LedgerChain, LedgerTransaction, TxKind,
                     append_block, authenticate_message, block_height,
                     hash_transaction, register_node, verify_chain)
from .metrics import MetricsReport, analytic_delay, compute_report
from .mobility import Position, neighbors, step_mobility
from .packets import Packet, PacketKind
from .routing import (ForwardDecision, RoutingState, RoutingTableEntry,
                      shortest_path_oracle)
from .srabc import (BlacklistEntry, EvictReason, FuzzyAssessment, FuzzyLabel,
                    SrabcState, fuzzify_delay, record_delay_sample,
                    select_next_hop)
from .trace import RecordKind, SimTrace, TraceRecord

__version__ = "0.1.0"
