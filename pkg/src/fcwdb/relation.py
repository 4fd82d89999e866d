"""Rows, per-table state and the pure state-in/state-out mutators.

A Row is the tuple of cell values (dense column order) plus the serial of
the commit that last wrote it. TableState holds the primary map and one
map per declared unique key; every mutator returns a fresh TableState and
never touches its input, so table states can live inside published
snapshots and be read without synchronization.
"""

from typing import NamedTuple

from .errors import NotFound, UniqueViolation
from .pmap import PersistentMap
from .schema import TableDef
from .values import check_value, encode_key


class Row(NamedTuple):
    values: tuple
    writer: int


class TableState(NamedTuple):
    rows: PersistentMap                # pk tuple -> Row
    indexes: tuple                     # PersistentMap per tdef.unique_keys: key tuple -> pk


def empty_state(tdef: TableDef) -> TableState:
    return TableState(PersistentMap(), tuple(PersistentMap() for _ in tdef.unique_keys))


def pk_of(tdef: TableDef, values: tuple) -> tuple:
    return tuple(values[i] for i in tdef.primary_key)


def key_of(col_ids, values) -> tuple:
    return tuple(values[i] for i in col_ids)


def check_row(tdef: TableDef, values) -> tuple:
    """Validate arity, kinds and nullability; returns the normalized tuple."""
    if len(values) != len(tdef.columns):
        raise TypeError(f"{tdef.name}: expected {len(tdef.columns)} values, got {len(values)}")
    out = []
    for col, v in zip(tdef.columns, values):
        try:
            out.append(check_value(col.kind, v, col.nullable))
        except TypeError as exc:
            raise TypeError(f"{tdef.name}.{col.name}: {exc}") from None
    return tuple(out)


def insert_row(state: TableState, tdef: TableDef, values: tuple, writer: int) -> TableState:
    """Insert a checked row; duplicate primary or unique key raises."""
    pk = pk_of(tdef, values)
    if pk in state.rows:
        raise UniqueViolation(tdef.name, tdef.col_names(tdef.primary_key), pk)
    indexes = list(state.indexes)
    for i, uk in enumerate(tdef.unique_keys):
        key = key_of(uk, values)
        if key in indexes[i]:
            raise UniqueViolation(tdef.name, tdef.col_names(uk), key)
        indexes[i] = indexes[i].put(key, pk)
    return TableState(state.rows.put(pk, Row(values, writer)), tuple(indexes))


def update_row(state: TableState, tdef: TableDef, pk: tuple, changes: dict, writer: int) -> TableState:
    """Patch columns of an existing row. Primary-key columns cannot change:
    key-moving updates are modeled as delete+insert by the caller."""
    old = state.rows.get(pk)
    if old is None:
        raise NotFound(tdef.name, pk)
    for cid in changes:
        if cid in tdef.primary_key:
            raise ValueError(f"{tdef.name}: update may not change primary-key column "
                             f"{tdef.columns[cid].name}; delete and reinsert instead")
    values = list(old.values)
    for cid, v in changes.items():
        values[cid] = v
    values = tuple(values)
    indexes = list(state.indexes)
    for i, uk in enumerate(tdef.unique_keys):
        if not any(cid in changes for cid in uk):
            continue
        old_key = key_of(uk, old.values)
        new_key = key_of(uk, values)
        if new_key == old_key:
            continue
        idx = indexes[i].remove(old_key)
        if new_key in idx:
            raise UniqueViolation(tdef.name, tdef.col_names(uk), new_key)
        indexes[i] = idx.put(new_key, pk)
    return TableState(state.rows.put(pk, Row(values, writer)), tuple(indexes))


def delete_row(state: TableState, tdef: TableDef, pk: tuple) -> TableState:
    old = state.rows.get(pk)
    if old is None:
        raise NotFound(tdef.name, pk)
    indexes = list(state.indexes)
    for i, uk in enumerate(tdef.unique_keys):
        indexes[i] = indexes[i].remove(key_of(uk, old.values))
    return TableState(state.rows.remove(pk), tuple(indexes))


def bulk_load(state: TableState, tdef: TableDef, rows, writer: int) -> TableState:
    """Insert many checked rows into an empty table in one balanced build.

    Used by the population and replay paths where per-row path copying
    would dominate; falls back to nothing clever for non-empty tables.
    """
    if len(state.rows) != 0:
        for values in rows:
            state = insert_row(state, tdef, values, writer)
        return state
    pairs = sorted(((encode_key(pk_of(tdef, v)), v) for v in rows), key=lambda p: p[0])
    for i in range(1, len(pairs)):
        if pairs[i - 1][0] == pairs[i][0]:
            raise UniqueViolation(tdef.name, tdef.col_names(tdef.primary_key), pairs[i][0])
    rows_map = PersistentMap.from_sorted((pk, Row(v, writer)) for pk, v in pairs)
    indexes = []
    for uk in tdef.unique_keys:
        ipairs = sorted(((encode_key(key_of(uk, v)), pk) for pk, v in pairs), key=lambda p: p[0])
        for i in range(1, len(ipairs)):
            if ipairs[i - 1][0] == ipairs[i][0]:
                raise UniqueViolation(tdef.name, tdef.col_names(uk), ipairs[i][0])
        indexes.append(PersistentMap.from_sorted(ipairs))
    return TableState(rows_map, tuple(indexes))


def resolve_unique(tdef: TableDef, key_cols) -> tuple:
    """Map a column-id tuple to ('pk', None) or ('uk', index); usage error otherwise."""
    if key_cols == tdef.primary_key or set(key_cols) == set(tdef.primary_key):
        return "pk", None
    for i, uk in enumerate(tdef.unique_keys):
        if key_cols == uk or set(key_cols) == set(uk):
            return "uk", i
    raise ValueError(f"{tdef.name}({', '.join(tdef.col_names(key_cols))}) is not a unique key; use a scan")


def lookup_by_unique(state: TableState, tdef: TableDef, key_cols, key_vals):
    """Exact-match lookup by primary or declared unique key -> (pk, Row) or None."""
    kind, idx = resolve_unique(tdef, key_cols)
    ordered = dict(zip(key_cols, key_vals))
    if kind == "pk":
        pk = tuple(ordered[c] for c in tdef.primary_key)
        row = state.rows.get(pk)
        return None if row is None else (pk, row)
    uk = tdef.unique_keys[idx]
    pk = state.indexes[idx].get(tuple(ordered[c] for c in uk))
    if pk is None:
        return None
    return pk, state.rows.get(pk)


def validate_state(schema, tables) -> list:
    """Full integrity audit of a snapshot: index coherence, typed rows,
    referential closure. Returns a list of problem strings (empty = clean).
    Test-mode tool; never on the commit path."""
    problems = []
    for name, tdef in schema.tables.items():
        state = tables[name]
        for i, uk in enumerate(tdef.unique_keys):
            rebuilt = {}
            for pk, row in state.rows.items():
                key = key_of(uk, row.values)
                if key in rebuilt:
                    problems.append(f"{name}: duplicate unique key {key}")
                rebuilt[key] = pk
            stored = dict(state.indexes[i].items())
            if rebuilt != stored:
                problems.append(f"{name}: index {tdef.col_names(uk)} out of sync "
                                f"({len(stored)} entries vs {len(rebuilt)} rebuilt)")
        for pk, row in state.rows.items():
            if pk_of(tdef, row.values) != pk:
                problems.append(f"{name}: row stored under wrong key {pk}")
            try:
                check_row(tdef, row.values)
            except TypeError as exc:
                problems.append(str(exc))
            for fk in tdef.foreign_keys:
                vals = key_of(fk.columns, row.values)
                if None in vals:
                    continue
                parent = tables[fk.ref_table]
                ref = schema.table(fk.ref_table)
                if lookup_by_unique(parent, ref, fk.ref_columns, vals) is None:
                    problems.append(f"{name}{pk}: dangling reference {vals} -> {fk.ref_table}")
    return problems
