"""Useful proof-of-work laboratory.

Miners race to find the smallest dominating set of a per-miner extension
of a committee-signed graph instance inside an estimated block interval;
verifiers check solutions lazily from the block alone; fork choice
weighs chains by work done.
"""

from ._kernels import implementation as kernel_implementation
from .bitseq import Bits
from .chain import ChainView, is_checkpointed, select_chain, work_done
from .graphs import Graph, generate_graph, load_graph, rank_vertices, save_graph
from .ledger import (
    Block,
    Committee,
    ProblemInstance,
    Transaction,
    TransactionSet,
    generate_committee,
    make_instance,
    merkle_root,
    verify_committee,
)
from .mining import DominatingSet, brute_min_ds, greedy_ds, mine_block
from .simnet import SimConfig, run_scenario
from .timing import LookupTable, build_table, estimate_tmax
from .transform import ExtendedGraph, compute_bound, extend, neighbors_t
from .verification import (
    EpochVerifierState,
    finalize_epoch,
    retrieve_ds_g,
    verify_block,
)

__version__ = "0.1.0"

__all__ = [
    "Bits",
    "Block",
    "ChainView",
    "Committee",
    "DominatingSet",
    "EpochVerifierState",
    "ExtendedGraph",
    "Graph",
    "LookupTable",
    "ProblemInstance",
    "SimConfig",
    "Transaction",
    "TransactionSet",
    "__version__",
    "brute_min_ds",
    "build_table",
    "compute_bound",
    "estimate_tmax",
    "extend",
    "finalize_epoch",
    "generate_committee",
    "generate_graph",
    "greedy_ds",
    "is_checkpointed",
    "kernel_implementation",
    "load_graph",
    "make_instance",
    "merkle_root",
    "mine_block",
    "neighbors_t",
    "rank_vertices",
    "retrieve_ds_g",
    "run_scenario",
    "save_graph",
    "select_chain",
    "verify_block",
    "verify_committee",
    "work_done",
]
