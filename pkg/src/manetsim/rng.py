"""Deterministic per-node random streams.

Each node gets independent generators derived from the scenario seed, so
adding or removing a node never perturbs the draws of the others. The
derivation is fixed: the scenario seed is XORed with the node id scaled
by a 64-bit odd constant, then folded through splitmix64; separate
domains (mobility vs protocol draws) fold in a domain counter.
"""

from __future__ import annotations

import hashlib
import random
import struct

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


MOBILITY_DOMAIN = 1
PROTOCOL_DOMAIN = 2


def node_stream(seed: int, node_id: int, domain: int) -> random.Random:
    """Seeded generator for one node and one draw domain."""
    base = splitmix64((seed & _MASK64) ^ ((node_id * _GOLDEN) & _MASK64))
    return random.Random(splitmix64(base ^ domain))


def derive_secret_key(seed: int, node_id: int) -> bytes:
    """Pre-provisioned 32-byte identity key for a node."""
    return hashlib.sha256(b"manetsim-node-key"
                          + struct.pack(">QI", seed & _MASK64, node_id)).digest()
