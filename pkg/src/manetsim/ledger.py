"""Append-only hash-chained ledger of node registrations and routing events.

Every transaction is hashed over a bit-exact canonical serialization
(big-endian fixed-width fields), blocks chain through their predecessor's
hash, and the genesis block carries an all-zero previous hash. The chain
also acts as the identity registry used for keyed-hash message
authentication.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import struct
from dataclasses import dataclass, field
from enum import IntEnum

ZERO_DIGEST = b"\x00" * 32


class LedgerError(Exception):
    pass


class EmptyPendingError(LedgerError):
    pass


class EmptyChainError(LedgerError):
    pass


class DuplicateRegistrationError(LedgerError):
    pass


class TxKind(IntEnum):
    REGISTER = 0
    FORWARD_EVENT = 1
    EVICT = 2


def digest(data: bytes) -> bytes:
    """32-byte digest primitive used for every hash in the ledger."""
    return hashlib.sha256(data).digest()


def message_tag(key: bytes, message: bytes) -> bytes:
    """Keyed authentication tag: digest(key || message || key)."""
    return digest(key + message + key)


def _us(seconds: float) -> int:
    # timestamps serialize as microseconds in 8 big-endian bytes
    return int(round(seconds * 1e6))


@dataclass(frozen=True)
class RegisterBody:
    key_digest: bytes  # digest of the node's secret key

    def serialize(self) -> bytes:
        return self.key_digest


@dataclass(frozen=True)
class ForwardBody:
    packet_id: int
    hop_delay_s: float

    def serialize(self) -> bytes:
        return struct.pack(">QQ", self.packet_id, _us(self.hop_delay_s))


@dataclass(frozen=True)
class EvictBody:
    evicted: int
    reason_code: int

    def serialize(self) -> bytes:
        return struct.pack(">IB", self.evicted, self.reason_code)


@dataclass(frozen=True)
class LedgerTransaction:
    tx_kind: TxKind
    node_id: int
    timestamp: float
    body: RegisterBody | ForwardBody | EvictBody
    tx_hash: bytes


def hash_transaction(tx_kind: TxKind, node_id: int, timestamp: float,
                     body) -> bytes:
    """Digest of the canonical serialization of all non-hash fields."""
    payload = (struct.pack(">B", int(tx_kind))
               + struct.pack(">I", node_id)
               + struct.pack(">Q", _us(timestamp))
               + body.serialize())
    return digest(payload)


def make_transaction(tx_kind: TxKind, node_id: int, timestamp: float,
                     body) -> LedgerTransaction:
    return LedgerTransaction(tx_kind, node_id, timestamp, body,
                             hash_transaction(tx_kind, node_id, timestamp, body))


@dataclass
class Block:
    index: int
    prev_hash: bytes
    timestamp: float
    transactions: list[LedgerTransaction]
    block_hash: bytes = b""

    def seal(self) -> None:
        self.block_hash = compute_block_hash(
            self.index, self.prev_hash, self.timestamp,
            [tx.tx_hash for tx in self.transactions])


def compute_block_hash(index: int, prev_hash: bytes, timestamp: float,
                       tx_hashes: list[bytes]) -> bytes:
    payload = (struct.pack(">Q", index)
               + prev_hash
               + struct.pack(">Q", _us(timestamp))
               + struct.pack(">I", len(tx_hashes))
               + b"".join(tx_hashes))
    return digest(payload)


@dataclass
class VerificationReport:
    valid: bool
    first_bad_index: int | None = None


class LedgerChain:
    """Single logical chain: genesis at construction, then sealed blocks.

    Secret keys live in a side registry so tags can be recomputed during
    authentication; only their digests enter the hashed record.
    """

    def __init__(self, created_at: float = 0.0, block_size_txs: int = 8):
        self.block_size_txs = block_size_txs
        self.pending: list[LedgerTransaction] = []
        self.seal_times: list[tuple[int, float]] = []
        genesis = Block(0, ZERO_DIGEST, created_at, [])
        genesis.seal()
        self.blocks: list[Block] = [genesis]
        self._keys: dict[int, bytes] = {}

    def is_registered(self, node_id: int) -> bool:
        return node_id in self._keys


def append_block(chain: LedgerChain, now: float) -> Block:
    """Seal up to block_size_txs pending transactions into a new block."""
    if not chain.pending:
        raise EmptyPendingError("no pending transactions to seal")
    txs = chain.pending[:chain.block_size_txs]
    chain.pending = chain.pending[chain.block_size_txs:]
    prev = chain.blocks[-1]
    block = Block(prev.index + 1, prev.block_hash, now, txs)
    block.seal()
    chain.blocks.append(block)
    latency = now - txs[0].timestamp
    chain.seal_times.append((block.index, latency))
    return block


def verify_chain(chain: LedgerChain) -> VerificationReport:
    """Recompute every hash and link; localize the first failing block."""
    for i, block in enumerate(chain.blocks):
        ok = block.index == i
        if ok and i == 0:
            ok = block.prev_hash == ZERO_DIGEST
        elif ok:
            ok = block.prev_hash == chain.blocks[i - 1].block_hash
        if ok:
            for tx in block.transactions:
                if hash_transaction(tx.tx_kind, tx.node_id, tx.timestamp,
                                    tx.body) != tx.tx_hash:
                    ok = False
                    break
        if ok:
            expected = compute_block_hash(block.index, block.prev_hash,
                                          block.timestamp,
                                          [tx.tx_hash for tx in block.transactions])
            ok = expected == block.block_hash
        if not ok:
            return VerificationReport(False, i)
    return VerificationReport(True, None)


def block_height(chain: LedgerChain) -> int:
    if not chain.blocks:
        raise EmptyChainError("chain has no blocks")
    return len(chain.blocks) - 1


def register_node(chain: LedgerChain, node_id: int, secret_key: bytes,
                  now: float) -> LedgerTransaction:
    """Record a node identity; its key digest becomes the registration key."""
    if node_id in chain._keys:
        raise DuplicateRegistrationError(f"node {node_id} already registered")
    tx = make_transaction(TxKind.REGISTER, node_id, now,
                          RegisterBody(digest(secret_key)))
    chain.pending.append(tx)
    chain._keys[node_id] = secret_key
    return tx


def authenticate_message(chain: LedgerChain, node_id: int,
                         message_bytes: bytes, tag: bytes) -> bool:
    """True iff node_id is registered and tag matches its keyed digest."""
    key = chain._keys.get(node_id)
    if key is None:
        return False
    return hmac.compare_digest(message_tag(key, message_bytes), tag)


def _tx_to_json(tx: LedgerTransaction) -> dict:
    body: dict
    if isinstance(tx.body, RegisterBody):
        body = {"key_digest": tx.body.key_digest.hex()}
    elif isinstance(tx.body, ForwardBody):
        body = {"packet_id": tx.body.packet_id, "hop_delay_s": tx.body.hop_delay_s}
    else:
        body = {"evicted": tx.body.evicted, "reason_code": tx.body.reason_code}
    return {"kind": tx.tx_kind.name, "node": tx.node_id,
            "timestamp": tx.timestamp, "body": body, "tx_hash": tx.tx_hash.hex()}


def export_chain_jsonl(chain: LedgerChain) -> str:
    """One JSON object per block, digests hex-encoded."""
    lines = []
    for block in chain.blocks:
        lines.append(json.dumps({
            "index": block.index,
            "prev_hash": block.prev_hash.hex(),
            "timestamp": block.timestamp,
            "transactions": [_tx_to_json(tx) for tx in block.transactions],
            "block_hash": block.block_hash.hex(),
        }, sort_keys=True))
    return "\n".join(lines) + "\n"
