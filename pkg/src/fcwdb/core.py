"""The published database root and the shared commit machinery.

A SnapshotRoot is an immutable picture of every table at one commit epoch.
Reads never synchronize: transactions capture the current root once and keep
using it. All mutation funnels through the single global commit section
(`Database.commit_section`); the final act inside it is `publish`, which
swaps in a root whose epoch is exactly one higher than the last.
"""

import itertools
import threading
from typing import NamedTuple

from .relation import bulk_load, delete_row, empty_state, insert_row, update_row
from .values import encode_key

# inserts into an empty table above this size take the balanced-build path
BULK_LOAD_THRESHOLD = 64


class SnapshotRoot(NamedTuple):
    epoch: int
    tables: dict            # table name -> TableState; never mutated once published
    schema_version: int


def genesis_root(schema) -> SnapshotRoot:
    return SnapshotRoot(0, {name: empty_state(t) for name, t in schema.tables.items()}, schema.version)


def apply_writeset(schema, base_tables: dict, ws, serial: int) -> dict:
    """Produce the candidate tables for a commit: deletes, then updates,
    then inserts, per table in name order. Raises UniqueViolation/NotFound
    only in races validation cannot see (e.g. two committers picking the
    same secondary-unique value); callers abort on those."""
    tables = dict(base_tables)
    for name in sorted(ws.tables):
        tws = ws.tables[name]
        if len(tws) == 0:
            continue
        tdef = schema.table(name)
        state = tables[name]
        for pk in sorted(tws.deletes, key=encode_key):
            state = delete_row(state, tdef, pk)
        for pk in sorted(tws.updates, key=encode_key):
            state = update_row(state, tdef, pk, tws.updates[pk], serial)
        if tws.inserts:
            if len(state.rows) == 0 and len(tws.inserts) > BULK_LOAD_THRESHOLD:
                state = bulk_load(state, tdef, tws.inserts.values(), serial)
            else:
                for pk in sorted(tws.inserts, key=encode_key):
                    state = insert_row(state, tdef, tws.inserts[pk], serial)
        tables[name] = state
    return tables


class Database:
    """Shared engine core: current root, commit log, the commit section.

    Safe for any number of sessions. Reading `current_root` takes no lock;
    the reference is swapped atomically inside the commit section.
    """

    def __init__(self, schema, log_path=None, _root=None, _records=None):
        self.schema = schema
        self._root = _root if _root is not None else genesis_root(schema)
        self._records = _records if _records is not None else []
        self._commit_mutex = threading.RLock()
        self._txn_ids = itertools.count(1)
        self._log_path = log_path
        self._log = open(log_path, "a", encoding="utf-8") if log_path else None
        # test hook: False turns first-committer-wins validation off so
        # anomaly histories can be produced for the verifier
        self.validate_commits = True

    def current_root(self) -> SnapshotRoot:
        return self._root

    def next_txn_id(self) -> int:
        return next(self._txn_ids)

    def commit_section(self):
        return self._commit_mutex

    def records_since(self, epoch: int):
        """Commit records with serial > epoch, ascending."""
        return self._records[epoch:]

    @property
    def records(self):
        return self._records

    def append_record(self, record, line: str | None):
        self._records.append(record)
        if self._log is not None and line is not None:
            self._log.write(line)
            self._log.write("\n")
            self._log.flush()

    def publish(self, root: SnapshotRoot):
        """Swap in the next root; epoch gaps or regressions are fatal."""
        current = self._root
        if root.epoch != current.epoch + 1:
            raise RuntimeError(f"publish epoch {root.epoch} after {current.epoch}; "
                               "commit section was bypassed")
        self._root = root

    def close(self):
        if self._log is not None:
            self._log.close()
            self._log = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
