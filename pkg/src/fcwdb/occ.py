"""Optimistic serializable transactions with first-committer-wins validation.

Reads run against the snapshot captured at begin and take no locks. Commit
enters the single global commit section, evaluates deferred checks against
the candidate state, then validates the transaction's read constraints and
write footprint against every commit record that landed after its snapshot.
The first conflicting committer wins: the later one aborts with nothing
written, and the winner's record is appended to the log before the new root
is published.
"""

import time

from .core import apply_writeset
from .errors import ConflictError, ConstraintError
from .log import CommitRecord, build_record, encode_line
from .session import ABORTED, ACTIVE, COMMITTED, BaseTransaction, StateView


def find_conflict(record: CommitRecord, committed: CommitRecord):
    """First-committer-wins test of `record` against one earlier committer.

    Returns (kind, table, detail) or None. Write-write conflicts are
    row-granular: any two writers of the same primary key collide, whatever
    columns they touched. Read-write conflicts honor the three constraint
    modes; in specific mode the noted key columns conservatively cover
    membership changes (inserts/deletes are phantoms for the selection).
    """
    my_writes = {tw.table: tw for tw in record.writes}
    for their in committed.writes:
        mine = my_writes.get(their.table)
        if mine is not None and mine.pk_set & their.pk_set:
            pk = next(iter(mine.pk_set & their.pk_set))
            return "ww", their.table, f"row {pk!r}"
    my_reads = {re.table: re for re in record.reads}
    for their in committed.writes:
        re = my_reads.get(their.table)
        if re is None:
            continue
        if re.mode == "block":
            return "rw", their.table, "blocked table was written"
        if re.mode == "columns":
            if their.ins:
                return "rw", their.table, f"insert {their.ins[0]!r} into scanned table"
            if their.dels:
                return "rw", their.table, f"delete {their.dels[0]!r} from scanned table"
            for pk, cols in their.upd:
                hit = cols & re.cols
                if hit:
                    return "rw", their.table, f"column {sorted(hit)[0]} updated"
        else:  # specific
            if re.keycols and (their.ins or their.dels):
                pk = their.ins[0] if their.ins else their.dels[0]
                return "rw", their.table, f"membership change {pk!r} touches key columns"
            rows = {pk: cols for pk, cols, _ in re.rows}
            for pk in their.dels:
                if pk in rows:
                    return "rw", their.table, f"read row {pk!r} deleted"
            for pk, cols in their.upd:
                if re.keycols & cols:
                    return "rw", their.table, f"key column {sorted(re.keycols & cols)[0]} updated"
                mine_cols = rows.get(pk)
                if mine_cols and mine_cols & cols:
                    return "rw", their.table, f"read column {sorted(mine_cols & cols)[0]} of {pk!r} updated"
    return None


def validate(record: CommitRecord, log_suffix) -> None:
    """Raise ConflictError if any already-committed record conflicts."""
    for committed in log_suffix:
        hit = find_conflict(record, committed)
        if hit is not None:
            raise ConflictError(*hit)


class OccTransaction(BaseTransaction):
    def __init__(self, db, track_reads=True):
        super().__init__(db, track_reads)
        self.snapshot = db.current_root()
        self.start_epoch = self.snapshot.epoch
        self.serial = None

    def _base_tables(self):
        return self.snapshot.tables

    def commit(self):
        """Validate and publish; returns the commit serial.

        Read-only transactions (empty write set) always succeed: their
        snapshot is a consistent cut, so they serialize at their start
        point, consume no serial and write no log record.
        """
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
                record = build_record(self.schema, serial, self.txn_id, self.start_epoch,
                                      self.rc, self.ws, int(time.time() * 1_000_000))
                if db.validate_commits:
                    validate(record, db.records_since(self.start_epoch))
                try:
                    tables = apply_writeset(self.schema, base.tables, self.ws, serial)
                except Exception as exc:
                    # races validation cannot see (secondary-unique pick by
                    # two committers); the later committer aborts cleanly
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


class OccEngine:
    """Session factory for the optimistic engine."""

    name = "occ"

    def __init__(self, db):
        self.db = db

    def begin(self, track_reads=True) -> OccTransaction:
        return OccTransaction(self.db, track_reads)
