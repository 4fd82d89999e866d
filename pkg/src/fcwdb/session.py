"""Statement surface shared by the optimistic and locking engines.

A transaction sees its base tables (engine-specific: a fixed snapshot for
the optimistic engine, the live root for the locking one) overlaid with its
own buffered writes. Every statement checks constraints immediately against
that effective state, so a failed statement raises and leaves the
transaction usable; nothing touches the database before commit.

Unique-key reads are tracked per row and column; scans escalate the whole
table's constraint. Foreign-key existence checks count as reads of the
parent row, which is what makes concurrent parent deletion a detectable
conflict instead of silent corruption.
"""

from .errors import NotFound, ReferentialViolation, UniqueViolation
from .relation import check_row, check_value, key_of, pk_of, resolve_unique
from .schema import FkAction
from .tracking import NullReadConstraints, ReadConstraints, WriteSet
from .values import NEG_INF, POS_INF, encode_key

ACTIVE = "active"
COMMITTED = "committed"
ABORTED = "aborted"


class StateView:
    """Read-only view over base tables overlaid with a write set.

    Same read semantics a transaction has; also handed to deferred checks
    at commit time as the candidate post-commit state.
    """

    def __init__(self, schema, tables, ws):
        self.schema = schema
        self.tables = tables
        self.ws = ws

    def get(self, table, pk):
        """-> (values, base_writer) or None; base_writer None means the row
        exists only in the overlay (own insert)."""
        state = self.tables[table]
        tws = self.ws.tables.get(table) if self.ws is not None else None
        if tws is not None and len(tws):
            if pk in tws.deletes:
                return None
            ins = tws.inserts.get(pk)
            if ins is not None:
                return ins, None
            row = state.rows.get(pk)
            if row is None:
                return None
            patch = tws.updates.get(pk)
            if patch:
                values = list(row.values)
                for cid, v in patch.items():
                    values[cid] = v
                return tuple(values), row.writer
            return row.values, row.writer
        row = state.rows.get(pk)
        return None if row is None else (row.values, row.writer)

    def iter_range(self, table, lo=NEG_INF, hi=POS_INF):
        """Ordered (pk, values, base_writer|None) within inclusive bounds."""
        state = self.tables[table]
        tws = self.ws.tables.get(table) if self.ws is not None else None
        base = state.rows.range(lo, hi)
        if tws is None or len(tws) == 0:
            for pk, row in base:
                yield pk, row.values, row.writer
            return
        elo = encode_key(lo) if isinstance(lo, tuple) else lo
        ehi = encode_key(hi) if isinstance(hi, tuple) else hi
        own = sorted((encode_key(pk), pk) for pk in tws.inserts
                     if not encode_key(pk) < elo and not ehi < encode_key(pk))
        i = 0
        for pk, row in base:
            ek = encode_key(pk)
            while i < len(own) and own[i][0] < ek:
                opk = own[i][1]
                yield opk, tws.inserts[opk], None
                i += 1
            if pk in tws.deletes:
                continue
            patch = tws.updates.get(pk)
            if patch:
                values = list(row.values)
                for cid, v in patch.items():
                    values[cid] = v
                yield pk, tuple(values), row.writer
            else:
                yield pk, row.values, row.writer
        while i < len(own):
            opk = own[i][1]
            yield opk, tws.inserts[opk], None
            i += 1

    def lookup_unique_key(self, table, uk_idx, key):
        """Effective secondary-unique lookup -> (pk, values, base_writer) or None."""
        tdef = self.schema.table(table)
        state = self.tables[table]
        uk = tdef.unique_keys[uk_idx]
        tws = self.ws.tables.get(table) if self.ws is not None else None
        if tws is not None and len(tws):
            own = tws.uk_maps[uk_idx].get(key)
            if own is not None:
                return own, tws.inserts[own], None
            for pk, patch in tws.updates.items():
                if not any(cid in patch for cid in uk):
                    continue
                got = self.get(table, pk)
                if got is not None and key_of(uk, got[0]) == key:
                    return pk, got[0], got[1]
        cand = state.indexes[uk_idx].get(key)
        if cand is not None:
            got = self.get(table, cand)
            if got is not None and key_of(uk, got[0]) == key:
                return cand, got[0], got[1]
        return None


class BaseTransaction:
    """Common statement machinery; engines supply base tables, lock hooks
    and commit."""

    def __init__(self, db, track_reads=True):
        self.db = db
        self.schema = db.schema
        self.txn_id = db.next_txn_id()
        self.rc = ReadConstraints() if track_reads else NullReadConstraints()
        self.ws = WriteSet()
        self.deferred = []
        self.status = ACTIVE
        self.abort_reason = None
        self._fk_seen = set()

    # -- engine hooks ------------------------------------------------------
    def _base_tables(self) -> dict:
        raise NotImplementedError

    def _lock_row_shared(self, table, pk):
        pass

    def _lock_row_exclusive(self, table, pk):
        pass

    def _lock_table_shared(self, table):
        pass

    # -- plumbing ----------------------------------------------------------
    def _check_active(self):
        if self.status is not ACTIVE:
            raise RuntimeError(f"transaction {self.txn_id} is {self.status}; no further operations")

    def _view(self) -> StateView:
        return StateView(self.schema, self._base_tables(), self.ws)

    def _project(self, tdef, values, col_ids):
        return {tdef.columns[cid].name: values[cid] for cid in col_ids}

    def _requested_cols(self, tdef, cols):
        if cols is None:
            return tuple(range(len(tdef.columns)))
        return tdef.col_ids(cols)

    # -- reads -------------------------------------------------------------
    def lookup_unique(self, table, key: dict, cols=None):
        """Exact-match read by primary or declared unique key.

        Returns the requested columns as a dict, or None. This is the access
        path that keeps the read constraint at row/column granularity.
        """
        self._check_active()
        tdef = self.schema.table(table)
        key_ids = tdef.col_ids(tuple(key))
        kind, uk_idx = resolve_unique(tdef, key_ids)
        col_ids = self._requested_cols(tdef, cols)
        tr = self.rc.table(table)
        by_id = {tdef.col_id(n): v for n, v in key.items()}
        if kind == "pk":
            pk = tuple(by_id[cid] for cid in tdef.primary_key)
            self._lock_row_shared(table, pk)
            got = self._view().get(table, pk)
            if got is None:
                tr.record_miss(tdef.primary_key)
                return None
            values, writer = got
        else:
            self._lock_table_shared(table)
            uk = tdef.unique_keys[uk_idx]
            got = self._view().lookup_unique_key(table, uk_idx, tuple(by_id[cid] for cid in uk))
            if got is None:
                tr.record_miss(uk)
                return None
            pk, values, writer = got
        if writer is not None:
            tr.record_lookup(pk, col_ids, writer, key_ids)
        return self._project(tdef, values, col_ids)

    def scan(self, table, lo=NEG_INF, hi=POS_INF, cols=None, block=False, limit=None):
        """Range read -> list of (pk, column dict), ascending by key.

        Escalates the table's read constraint to column-set mode, or to
        whole-table block mode when the caller flags that unique selection
        cannot apply (`block=True`).
        """
        self._check_active()
        tdef = self.schema.table(table)
        col_ids = self._requested_cols(tdef, cols)
        self._lock_table_shared(table)
        tr = self.rc.table(table)
        if block:
            tr.escalate_block()
        else:
            tr.escalate_columns(col_ids)
        out = []
        for pk, values, _ in self._view().iter_range(table, lo, hi):
            out.append((pk, self._project(tdef, values, col_ids)))
            if limit is not None and len(out) >= limit:
                break
        return out

    # -- constraint helpers --------------------------------------------------
    def _check_fk_parents(self, tdef, values, changed=None):
        for fk in tdef.foreign_keys:
            if changed is not None and not any(cid in changed for cid in fk.columns):
                continue
            vals = key_of(fk.columns, values)
            if None in vals:
                continue
            # a parent verified once stays verified: the lock (2pl) or the
            # recorded read (occ) pins it, and own deletes clear the cache
            cache_key = (fk.ref_table, fk.ref_columns, vals)
            if cache_key in self._fk_seen:
                continue
            parent_def = self.schema.table(fk.ref_table)
            view = self._view()
            if fk.ref_columns == parent_def.primary_key:
                self._lock_row_shared(fk.ref_table, vals)
                got = view.get(fk.ref_table, vals)
                parent_pk = vals
            else:
                self._lock_table_shared(fk.ref_table)
                uk_idx = parent_def.unique_keys.index(fk.ref_columns)
                hit = view.lookup_unique_key(fk.ref_table, uk_idx, vals)
                got = None if hit is None else (hit[1], hit[2])
                parent_pk = None if hit is None else hit[0]
            if got is None:
                raise ReferentialViolation(
                    tdef.name, f"{vals!r} has no parent in {fk.ref_table}")
            if got[1] is not None:
                # existence check is a read of the parent row
                self.rc.table(fk.ref_table).record_lookup(parent_pk, (), got[1], fk.ref_columns)
            self._fk_seen.add(cache_key)

    def _check_unique_indexes(self, tdef, values, self_pk, changed=None):
        view = self._view()
        for i, uk in enumerate(tdef.unique_keys):
            if changed is not None and not any(cid in changed for cid in uk):
                continue
            key = key_of(uk, values)
            hit = view.lookup_unique_key(tdef.name, i, key)
            if hit is not None and hit[0] != self_pk:
                raise UniqueViolation(tdef.name, tdef.col_names(uk), key)

    # -- writes --------------------------------------------------------------
    def insert(self, table, values: dict):
        """Buffer an insert; all columns must be supplied by name."""
        self._check_active()
        tdef = self.schema.table(table)
        try:
            row = tuple(values[c.name] for c in tdef.columns)
        except KeyError:
            missing = [c.name for c in tdef.columns if c.name not in values]
            raise TypeError(f"{table}: missing columns {missing}") from None
        if len(values) != len(tdef.columns):
            extra = set(values) - {c.name for c in tdef.columns}
            raise TypeError(f"{table}: unknown columns {sorted(extra)}")
        row = check_row(tdef, row)
        pk = pk_of(tdef, row)
        self._lock_row_exclusive(table, pk)
        if self._view().get(table, pk) is not None:
            raise UniqueViolation(table, tdef.col_names(tdef.primary_key), pk)
        self._check_unique_indexes(tdef, row, pk)
        self._check_fk_parents(tdef, row)
        self.ws.table(table, tdef).add_insert(pk, row)

    def update(self, table, pk: tuple, changes: dict):
        """Buffer a column patch for an existing row. Primary-key columns
        cannot change; delete and reinsert to move a row."""
        self._check_active()
        tdef = self.schema.table(table)
        patch = {}
        for name, v in changes.items():
            cid = tdef.col_id(name)
            if cid in tdef.primary_key:
                raise ValueError(f"{table}: update may not change primary-key column {name}")
            col = tdef.columns[cid]
            patch[cid] = check_value(col.kind, v, col.nullable)
        pk = tuple(pk)
        self._lock_row_exclusive(table, pk)
        got = self._view().get(table, pk)
        if got is None:
            raise NotFound(table, pk)
        new_values = list(got[0])
        for cid, v in patch.items():
            new_values[cid] = v
        new_values = tuple(new_values)
        self._check_unique_indexes(tdef, new_values, pk, changed=patch)
        self._check_fk_parents(tdef, new_values, changed=patch)
        self.ws.table(table, tdef).add_update(pk, patch)

    def delete(self, table, pk: tuple):
        """Buffer a delete; RESTRICT children block it, CASCADE children are
        deleted transitively (and show up in the write footprint)."""
        self._check_active()
        tdef = self.schema.table(table)
        pk = tuple(pk)
        self._lock_row_exclusive(table, pk)
        got = self._view().get(table, pk)
        if got is None:
            raise NotFound(table, pk)
        values = got[0]
        self._fk_seen = {k for k in self._fk_seen if k[0] != table}
        for child_def, fk in self.schema.referencing(table):
            target = key_of(fk.ref_columns, values)
            self._lock_table_shared(child_def.name)
            # the children scan constrains the child table's FK columns
            self.rc.table(child_def.name).escalate_columns(fk.columns)
            matches = [cpk for cpk, cvals, _ in self._view().iter_range(child_def.name)
                       if key_of(fk.columns, cvals) == target
                       and not (child_def.name == table and cpk == pk)]
            if matches:
                if fk.action is FkAction.RESTRICT:
                    raise ReferentialViolation(
                        table, f"{pk!r} still referenced by {len(matches)} {child_def.name} row(s)")
                for cpk in matches:
                    self.delete(child_def.name, cpk)
        self.ws.table(table, tdef).add_delete(pk)

    def defer_check(self, fn, message="deferred check failed"):
        """Register a predicate evaluated against the candidate post-commit
        state inside the commit section; falsy/raising aborts the commit."""
        self._check_active()
        self.deferred.append((fn, message))

    def rollback(self):
        """Abandon the transaction; nothing was ever visible to others."""
        if self.status is not ACTIVE:
            raise RuntimeError(f"transaction {self.txn_id} already {self.status}")
        self.status = ABORTED
        self.abort_reason = "rolled back"
        self._on_finish()

    def _on_finish(self):
        """Engine hook: release resources after commit/abort."""
