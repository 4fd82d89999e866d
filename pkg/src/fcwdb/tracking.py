"""Per-transaction read constraints and buffered writes.

Read constraints come in three per-table modes, strongest last:

* specific - rows obtained through a unique key, tracked per row and per
  column, plus the key columns used for selection;
* columns  - a scan happened, so any column in the set, table-wide, is
  constrained, and so is table membership (inserts/deletes);
* block    - the whole table; used when the caller knows unique selection
  cannot apply and the column set would be unbounded.

A table's mode only ever escalates within a transaction. Writes are
buffered per table and folded so each primary key carries at most one
pending operation; nothing reaches the database before commit.
"""

SPECIFIC = "specific"
COLUMNS = "columns"
BLOCK = "block"


class TableReads:
    __slots__ = ("mode", "rows", "vers", "key_cols", "cols")

    def __init__(self):
        self.mode = SPECIFIC
        self.rows = {}       # pk -> set of col ids read
        self.vers = {}       # pk -> writer serial of the version read
        self.key_cols = set()
        self.cols = set()    # COLUMNS mode only

    def record_lookup(self, pk, col_ids, ver, key_col_ids):
        if self.mode is SPECIFIC:
            self.rows.setdefault(pk, set()).update(col_ids)
            self.vers[pk] = ver
            self.key_cols.update(key_col_ids)
        elif self.mode is COLUMNS:
            self.cols.update(col_ids)

    def record_miss(self, key_col_ids):
        # Absent unique lookups leave no row to cite; the key columns alone
        # protect the membership the caller observed.
        if self.mode is SPECIFIC:
            self.key_cols.update(key_col_ids)

    def escalate_columns(self, col_ids):
        if self.mode is BLOCK:
            return
        if self.mode is SPECIFIC:
            self.mode = COLUMNS
            # earlier per-row reads become table-wide constraints
            for cols in self.rows.values():
                self.cols.update(cols)
            self.cols.update(self.key_cols)
            self.rows = {}
            self.vers = {}
            self.key_cols = set()
        self.cols.update(col_ids)

    def escalate_block(self):
        if self.mode is BLOCK:
            return
        self.mode = BLOCK
        self.rows = {}
        self.vers = {}
        self.key_cols = set()
        self.cols = set()


class ReadConstraints:
    __slots__ = ("tables",)

    def __init__(self):
        self.tables = {}   # table name -> TableReads

    def table(self, name) -> TableReads:
        tr = self.tables.get(name)
        if tr is None:
            tr = self.tables[name] = TableReads()
        return tr


class _NullTableReads:
    mode = SPECIFIC

    def record_lookup(self, pk, col_ids, ver, key_col_ids):
        pass

    def record_miss(self, key_col_ids):
        pass

    def escalate_columns(self, col_ids):
        pass

    def escalate_block(self):
        pass


class NullReadConstraints:
    """Read tracking turned off; for bulk loading on an otherwise idle
    database, where summaries would be enormous and protect nothing."""

    tables = {}
    _shared = _NullTableReads()

    def table(self, name):
        return self._shared


class TableWriteSet:
    __slots__ = ("inserts", "updates", "deletes", "_uks", "uk_maps")

    def __init__(self, unique_keys=()):
        self.inserts = {}   # pk -> full values tuple
        self.updates = {}   # pk -> {col_id: value}
        self.deletes = set()
        # incremental unique-key maps over buffered inserts, so uniqueness
        # probes against one's own writes stay O(1) at any write-set size
        self._uks = tuple(unique_keys)
        self.uk_maps = tuple({} for _ in self._uks)

    def _uk_track(self, pk, values):
        for m, uk in zip(self.uk_maps, self._uks):
            m[tuple(values[i] for i in uk)] = pk

    def _uk_untrack(self, values):
        for m, uk in zip(self.uk_maps, self._uks):
            m.pop(tuple(values[i] for i in uk), None)

    def add_insert(self, pk, values):
        if pk in self.deletes:
            # delete-then-insert of the same key: the row survives as a
            # full-row patch so the key keeps a single pending operation
            self.deletes.discard(pk)
            self.updates[pk] = dict(enumerate(values))
        else:
            self.inserts[pk] = values
            self._uk_track(pk, values)

    def add_update(self, pk, changes):
        if pk in self.inserts:
            values = list(self.inserts[pk])
            self._uk_untrack(values)
            for cid, v in changes.items():
                values[cid] = v
            self.inserts[pk] = tuple(values)
            self._uk_track(pk, self.inserts[pk])
        elif pk in self.updates:
            self.updates[pk].update(changes)
        else:
            self.updates[pk] = dict(changes)

    def add_delete(self, pk):
        if pk in self.inserts:
            self._uk_untrack(self.inserts[pk])
            del self.inserts[pk]      # insert-then-delete annihilates
        elif pk in self.updates:
            del self.updates[pk]
            self.deletes.add(pk)
        else:
            self.deletes.add(pk)

    def pks(self):
        return set(self.inserts) | set(self.updates) | self.deletes

    def __len__(self):
        return len(self.inserts) + len(self.updates) + len(self.deletes)


class WriteSet:
    __slots__ = ("tables",)

    def __init__(self):
        self.tables = {}   # table name -> TableWriteSet

    def table(self, name, tdef=None) -> TableWriteSet:
        tws = self.tables.get(name)
        if tws is None:
            tws = self.tables[name] = TableWriteSet(tdef.unique_keys if tdef is not None else ())
        return tws

    def is_empty(self):
        return all(len(t) == 0 for t in self.tables.values())
