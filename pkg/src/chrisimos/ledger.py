"""Transactions, Merkle commitments, committee-signed instances and blocks.

Transactions are opaque fee-carrying payloads; the only role of the body
is to make the Merkle root unique per miner through the coinbase.  The
committee is modeled as t-of-n individual Ed25519 signatures over
(instance id || graph digest); key material is pre-generated.

Blocks have two serializations: a canonical length-prefixed binary form
of the header (what gets hashed) and a canonical JSON form for files and
human inspection.  JSON key order never affects the hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from .bitseq import Bits, hash_bits, zero_bits
from .errors import EmptySet, MalformedBlock
from .graphs import Graph, canonical_text


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


# --- transactions ----------------------------------------------------------------


@dataclass(frozen=True)
class Transaction:
    payload: bytes
    fee: int = 0

    @cached_property
    def id(self) -> bytes:
        return sha256(self.payload)


@dataclass(frozen=True)
class TransactionSet:
    """Coinbase first; its payload is what makes each miner's root unique."""

    coinbase: Transaction
    others: tuple[Transaction, ...] = ()

    def all(self) -> tuple[Transaction, ...]:
        return (self.coinbase, *self.others)


def merkle_root(txs) -> bytes:
    """Binary Merkle tree over transaction ids in order.

    Leaves are H(tx.id); a single leaf is its own root; an odd internal
    level duplicates its last node.
    """
    if isinstance(txs, TransactionSet):
        items = txs.all()
    else:
        items = tuple(txs)
    if not items:
        raise EmptySet("cannot build a Merkle tree over zero transactions")
    level = [sha256(tx.id) for tx in items]
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [sha256(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def merkle_digest(txs, lam: int) -> Bits:
    """Merkle root as a protocol-width digest."""
    return Bits.from_bytes(merkle_root(txs), lam)


# --- committee --------------------------------------------------------------------


@dataclass(frozen=True)
class Committee:
    """Ordered member public keys (raw Ed25519) and the signing threshold."""

    members: tuple[bytes, ...]
    threshold: int

    def __post_init__(self):
        if not self.threshold > len(self.members) / 2:
            raise ValueError("threshold must be a strict majority")


@dataclass(frozen=True)
class CommitteeSigner:
    """Committee plus the private halves; tooling/test side only."""

    committee: Committee
    secrets: tuple[bytes, ...]

    def sign(self, index: int, message: bytes) -> bytes:
        key = Ed25519PrivateKey.from_private_bytes(self.secrets[index])
        return key.sign(message)


def generate_committee(n_members: int, threshold: int, seed: int) -> CommitteeSigner:
    secrets = tuple(
        sha256(f"committee-member:{seed}:{i}".encode()) for i in range(n_members)
    )
    members = tuple(
        Ed25519PrivateKey.from_private_bytes(s)
        .public_key()
        .public_bytes(Encoding.Raw, PublicFormat.Raw)
        for s in secrets
    )
    return CommitteeSigner(Committee(members, threshold), secrets)


def instance_message(id_g: int, digest: bytes) -> bytes:
    return id_g.to_bytes(8, "big") + digest


def sign_instance(secret: bytes, id_g: int, digest: bytes) -> bytes:
    key = Ed25519PrivateKey.from_private_bytes(secret)
    return key.sign(instance_message(id_g, digest))


@dataclass(frozen=True)
class CommitteeCheck:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


# --- problem instances ---------------------------------------------------------------


def graph_digest(g: Graph) -> bytes:
    return sha256(canonical_text(g).encode())


@dataclass(frozen=True)
class ProblemInstance:
    id_g: int
    graph: Graph
    digest: bytes
    sigs: tuple[tuple[int, bytes], ...]
    committee: Committee


def make_instance(graph: Graph, id_g: int, signer: CommitteeSigner,
                  signer_indices=None) -> ProblemInstance:
    if graph.delta < 1:
        raise ValueError("instances require minimum degree at least 1")
    if id_g < 1:
        raise ValueError("instance ids are positive")
    digest = graph_digest(graph)
    indices = (
        tuple(signer_indices)
        if signer_indices is not None
        else tuple(range(signer.committee.threshold))
    )
    msg = instance_message(id_g, digest)
    sigs = tuple((i, signer.sign(i, msg)) for i in sorted(indices))
    return ProblemInstance(id_g, graph, digest, sigs, signer.committee)


def verify_committee(inst: ProblemInstance,
                     sigs: tuple[tuple[int, bytes], ...] | None = None) -> CommitteeCheck:
    """Threshold check: at least t distinct members signed (id_g || digest)."""
    committee = inst.committee
    msg = instance_message(inst.id_g, inst.digest)
    reasons: list[str] = []
    valid: set[int] = set()
    for index, sig in inst.sigs if sigs is None else sigs:
        if not 0 <= index < len(committee.members):
            reasons.append(f"signature from unknown member {index}")
            continue
        try:
            Ed25519PublicKey.from_public_bytes(committee.members[index]).verify(sig, msg)
        except InvalidSignature:
            reasons.append(f"invalid signature from member {index}")
            continue
        valid.add(index)
    if len(valid) < committee.threshold:
        reasons.append(
            f"{len(valid)} valid signatures below threshold {committee.threshold}"
        )
        return CommitteeCheck(False, tuple(reasons))
    return CommitteeCheck(True, tuple(reasons))


# --- blocks ------------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockHeader:
    h_prev: Bits
    h_mr: Bits
    id_g: int
    graph_digest: bytes
    sigs: tuple[tuple[int, bytes], ...]
    delta_hat: int
    ds: tuple[int, ...]
    timestamp_ms: int


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    body: TransactionSet


def header_bytes(h: BlockHeader) -> bytes:
    """Canonical length-prefixed binary form; the block hash preimage."""
    parts = [h.h_prev.canonical_bytes(), h.h_mr.canonical_bytes()]
    parts.append(h.id_g.to_bytes(8, "big"))
    parts.append(len(h.graph_digest).to_bytes(4, "big") + h.graph_digest)
    sigs = sorted(h.sigs)
    parts.append(len(sigs).to_bytes(4, "big"))
    for index, sig in sigs:
        parts.append(index.to_bytes(4, "big"))
        parts.append(len(sig).to_bytes(4, "big") + sig)
    parts.append(h.delta_hat.to_bytes(4, "big"))
    parts.append(len(h.ds).to_bytes(4, "big"))
    parts.extend(v.to_bytes(4, "big") for v in h.ds)
    parts.append(h.timestamp_ms.to_bytes(8, "big"))
    return b"".join(parts)


def block_hash(b: Block, lam: int | None = None) -> Bits:
    return hash_bits(header_bytes(b.header), lam or b.header.h_prev.length)


def genesis_block(lam: int) -> Block:
    """Fixed anchor block; carries no solution and contributes no work."""
    body = TransactionSet(Transaction(b"genesis"))
    header = BlockHeader(
        h_prev=zero_bits(lam),
        h_mr=merkle_digest(body, lam),
        id_g=0,
        graph_digest=b"\x00" * 32,
        sigs=(),
        delta_hat=0,
        ds=(),
        timestamp_ms=0,
    )
    return Block(header, body)


# --- serialization -------------------------------------------------------------------------


def _tx_to_json(tx: Transaction) -> dict:
    return {"payload": tx.payload.hex(), "fee": tx.fee}


def _tx_from_json(obj, where: str) -> Transaction:
    try:
        return Transaction(bytes.fromhex(obj["payload"]), int(obj["fee"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedBlock(f"{where}: {exc}") from None


def block_to_json(b: Block) -> dict:
    return {
        "header": {
            "h_prev": b.header.h_prev.to_json(),
            "h_mr": b.header.h_mr.to_json(),
            "id_g": b.header.id_g,
            "graph_digest": b.header.graph_digest.hex(),
            "sigs": [[i, s.hex()] for i, s in b.header.sigs],
            "delta_hat": b.header.delta_hat,
            "ds": list(b.header.ds),
            "timestamp_ms": b.header.timestamp_ms,
        },
        "body": {
            "coinbase": _tx_to_json(b.body.coinbase),
            "others": [_tx_to_json(t) for t in b.body.others],
        },
    }


def block_from_json(obj) -> Block:
    if not isinstance(obj, dict):
        raise MalformedBlock("top level: expected an object")
    try:
        h = obj["header"]
        body = obj["body"]
    except (KeyError, TypeError) as exc:
        raise MalformedBlock(f"missing section: {exc}") from None

    def field(name):
        try:
            return h[name]
        except (KeyError, TypeError) as exc:
            raise MalformedBlock(f"header.{name}: {exc}") from None

    try:
        header = BlockHeader(
            h_prev=Bits.from_json(field("h_prev")),
            h_mr=Bits.from_json(field("h_mr")),
            id_g=int(field("id_g")),
            graph_digest=bytes.fromhex(field("graph_digest")),
            sigs=tuple((int(i), bytes.fromhex(s)) for i, s in field("sigs")),
            delta_hat=int(field("delta_hat")),
            ds=tuple(int(v) for v in field("ds")),
            timestamp_ms=int(field("timestamp_ms")),
        )
    except MalformedBlock:
        raise
    except (TypeError, ValueError) as exc:
        raise MalformedBlock(f"header: {exc}") from None
    try:
        coinbase = _tx_from_json(body["coinbase"], "body.coinbase")
        others = tuple(
            _tx_from_json(t, f"body.others[{i}]")
            for i, t in enumerate(body["others"])
        )
    except (KeyError, TypeError) as exc:
        raise MalformedBlock(f"body: {exc}") from None
    return Block(header, TransactionSet(coinbase, others))


def serialize_block(b: Block) -> bytes:
    """Canonical JSON bytes: sorted keys, no whitespace."""
    return json.dumps(block_to_json(b), sort_keys=True, separators=(",", ":")).encode()


def deserialize_block(data: bytes) -> Block:
    try:
        obj = json.loads(data)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedBlock(f"not valid JSON: {exc}") from None
    return block_from_json(obj)


# --- instance and committee files ----------------------------------------------------------


def committee_to_json(c: Committee, secrets: tuple[bytes, ...] | None = None) -> dict:
    obj = {"t": c.threshold, "members": [pk.hex() for pk in c.members]}
    if secrets is not None:
        obj["secrets"] = [s.hex() for s in secrets]
    return obj


def committee_from_json(obj) -> Committee:
    return Committee(
        tuple(bytes.fromhex(pk) for pk in obj["members"]), int(obj["t"])
    )


def save_committee(signer: CommitteeSigner, path, *, include_secrets: bool = True):
    obj = committee_to_json(
        signer.committee, signer.secrets if include_secrets else None
    )
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_committee(path) -> CommitteeSigner | Committee:
    obj = json.loads(Path(path).read_text())
    committee = committee_from_json(obj)
    if "secrets" in obj:
        return CommitteeSigner(committee, tuple(bytes.fromhex(s) for s in obj["secrets"]))
    return committee


def instance_to_json(inst: ProblemInstance, *, include_graph: bool = False) -> dict:
    obj = {
        "id_g": inst.id_g,
        "digest": inst.digest.hex(),
        "sigs": [[i, s.hex()] for i, s in inst.sigs],
        "committee": committee_to_json(inst.committee),
    }
    if include_graph:
        obj["graph"] = {"n": inst.graph.n, "edges": [list(e) for e in inst.graph.edges]}
    return obj


def instance_from_json(obj, graph: Graph | None = None) -> ProblemInstance:
    if graph is None:
        gobj = obj["graph"]
        graph = Graph.from_edges(int(gobj["n"]), [tuple(e) for e in gobj["edges"]])
    return ProblemInstance(
        id_g=int(obj["id_g"]),
        graph=graph,
        digest=bytes.fromhex(obj["digest"]),
        sigs=tuple((int(i), bytes.fromhex(s)) for i, s in obj["sigs"]),
        committee=committee_from_json(obj["committee"]),
    )


def save_instance(inst: ProblemInstance, sidecar_path) -> None:
    """Sidecar JSON next to the edge-list file."""
    Path(sidecar_path).write_text(
        json.dumps(instance_to_json(inst), indent=2, sort_keys=True) + "\n"
    )


def load_instance(sidecar_path, graph: Graph) -> ProblemInstance:
    obj = json.loads(Path(sidecar_path).read_text())
    return instance_from_json(obj, graph)
