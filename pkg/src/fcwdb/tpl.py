"""Pessimistic baseline engine: strict two-phase row locking.

Same statement surface and commit log as the optimistic engine, but reads
come from the live root under shared locks, writes take exclusive locks up
front, and commit needs no validation: whatever survived the lock protocol
is serializable by construction. Locks are held until after publish
(strictness), and deadlock victims abort with everything released.

Read summaries still go into the commit record, at the granularity the lock
footprint gives: per-row entries for point reads, a whole-table block marker
for scans.
"""

import time

from .core import apply_writeset
from .errors import ConstraintError, DeadlockVictim
from .locks import LockManager
from .log import build_record, encode_line
from .session import ABORTED, ACTIVE, COMMITTED, BaseTransaction, StateView


class TplTransaction(BaseTransaction):
    def __init__(self, db, locks: LockManager, track_reads=True):
        super().__init__(db, track_reads)
        self.locks = locks
        self.start_epoch = db.current_root().epoch
        self.serial = None

    def _base_tables(self):
        # 2PL reads current committed state; the locks make that stable
        return self.db.current_root().tables

    def _acquire(self, fn, *args):
        try:
            fn(*args)
        except DeadlockVictim:
            self.status = ABORTED
            self.abort_reason = "deadlock victim"
            self._on_finish()
            raise

    def _lock_row_shared(self, table, pk):
        self._acquire(self.locks.acquire_row, self.txn_id, table, pk, "S")

    def _lock_row_exclusive(self, table, pk):
        self._acquire(self.locks.acquire_row, self.txn_id, table, pk, "X")

    def _lock_table_shared(self, table):
        self._acquire(self.locks.acquire_table_shared, self.txn_id, table)

    def _on_finish(self):
        self.locks.release_all(self.txn_id)

    def commit(self):
        """Apply the buffered writes under the global commit section and
        release all locks only after the new root is published."""
        self._check_active()
        if self.ws.is_empty() and not self.deferred:
            self.status = COMMITTED
            self._on_finish()
            return None
        db = self.db
        try:
            with db.commit_section():
                base = db.current_root()
                serial = base.epoch + 1
                candidate_view = StateView(self.schema, base.tables, self.ws)
                for fn, message in self.deferred:
                    if not fn(candidate_view):
                        raise ConstraintError(message)
                # Strictness makes every read reproducible at the commit
                # point, so the record's read baseline is the epoch just
                # below our serial, not the begin-time epoch.
                record = build_record(self.schema, serial, self.txn_id, serial - 1,
                                      self.rc, self.ws, int(time.time() * 1_000_000))
                try:
                    tables = apply_writeset(self.schema, base.tables, self.ws, serial)
                except Exception as exc:
                    raise ConstraintError(f"commit-time integrity check failed: {exc}") from exc
                db.append_record(record, encode_line(self.schema, record, self.ws))
                db.publish(type(base)(serial, tables, base.schema_version))
        except Exception as exc:
            self.status = ABORTED
            self.abort_reason = str(exc)
            self._on_finish()
            raise
        self.status = COMMITTED
        self.serial = serial
        self._on_finish()
        return serial


class TplEngine:
    """Session factory for the locking engine; one shared lock table."""

    name = "2pl"

    def __init__(self, db):
        self.db = db
        self.locks = LockManager()

    def begin(self, track_reads=True) -> TplTransaction:
        return TplTransaction(self.db, self.locks, track_reads)

    @property
    def deadlocks_detected(self):
        return self.locks.deadlocks_detected
