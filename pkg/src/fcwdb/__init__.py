"""Embedded transactional engine with first-committer-wins optimistic
concurrency control, a strict-2PL baseline, a high-contention order-entry
benchmark, and an independent serializability verifier over commit logs."""

from .core import Database, SnapshotRoot, genesis_root
from .errors import (ConflictError, ConstraintError, DatabaseError, DeadlockVictim,
                     HistoryError, NotFound, ReferentialViolation, ReplayError,
                     SchemaError, TransactionAbort, UniqueViolation)
from .log import open_database, replay
from .occ import OccEngine
from .pmap import PersistentMap
from .schema import Schema, TableDef, build_schema, define_table, foreign_key
from .tpl import TplEngine
from .values import NEG_INF, POS_INF, ValueKind, money
from .verify import Verdict, brute_force_check, build_graph, is_serializable

__all__ = [
    "Database", "SnapshotRoot", "genesis_root", "open_database", "replay",
    "OccEngine", "TplEngine", "PersistentMap",
    "Schema", "TableDef", "build_schema", "define_table", "foreign_key",
    "ValueKind", "money", "NEG_INF", "POS_INF",
    "Verdict", "build_graph", "is_serializable", "brute_force_check",
    "DatabaseError", "SchemaError", "UniqueViolation", "ReferentialViolation",
    "NotFound", "TransactionAbort", "ConflictError", "ConstraintError",
    "DeadlockVictim", "ReplayError", "HistoryError",
]
