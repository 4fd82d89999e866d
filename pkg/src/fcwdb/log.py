"""Append-only commit log: record model, JSON-lines wire format, replay.

One line per committed transaction, serials dense from 1 in file order.
The line layout is fixed:

    {"serial":int, "txn":int, "start":int,
     "writes":[{"table":s,"ins":[pk...],"upd":[{"pk":pk,"cols":[s...]}...],"del":[pk...]}...],
     "reads":[{"table":s,"mode":"specific"|"columns"|"block",
               "rows":[{"pk":pk,"cols":[s...],"ver":int}...],"cols":[s...],"keycols":[s...]}...],
     "ts":int,
     "data":[{"table":s,"ins":[[v...]...],"upd":[[v...]...]}...]}

pk encodes as an array of scalar values; decimals travel as strings. The
trailing "data" section carries the actual cell values (full rows for
inserts, new values aligned with the upd column lists) so that replaying
the log from genesis rebuilds the live root exactly. Unknown fields are
rejected on replay.
"""

import json
from typing import NamedTuple

from .core import Database, SnapshotRoot, genesis_root
from .errors import ReplayError
from .relation import bulk_load, delete_row, insert_row, update_row
from .values import decode_json_value, encode_json_value, encode_key, money


class TableWrites(NamedTuple):
    table: str
    ins: tuple          # pk tuples
    upd: tuple          # (pk, frozenset of column names)
    dels: tuple         # pk tuples
    pk_set: frozenset   # union of the three


class ReadEntry(NamedTuple):
    table: str
    mode: str                      # "specific" | "columns" | "block"
    rows: tuple                    # (pk, frozenset of column names, version serial)
    cols: frozenset
    keycols: frozenset


class CommitRecord(NamedTuple):
    serial: int
    txn: int
    start: int
    writes: tuple
    reads: tuple
    ts: int


def build_record(schema, serial, txn_id, start, rc, ws, ts) -> CommitRecord:
    """Freeze a transaction's footprint and read summary into a record."""
    writes = []
    for name in sorted(ws.tables):
        tws = ws.tables[name]
        if len(tws) == 0:
            continue
        tdef = schema.table(name)
        ins = tuple(sorted(tws.inserts, key=encode_key))
        upd = tuple((pk, frozenset(tdef.col_names(tws.updates[pk])))
                    for pk in sorted(tws.updates, key=encode_key))
        dels = tuple(sorted(tws.deletes, key=encode_key))
        writes.append(TableWrites(name, ins, upd, dels, frozenset(ins) | {p for p, _ in upd} | frozenset(dels)))
    reads = []
    for name in sorted(rc.tables):
        tr = rc.tables[name]
        tdef = schema.table(name)
        if tr.mode == "specific":
            if not tr.rows and not tr.key_cols:
                continue
            rows = tuple((pk, frozenset(tdef.col_names(tr.rows[pk])), tr.vers[pk])
                         for pk in sorted(tr.rows, key=encode_key))
            reads.append(ReadEntry(name, "specific", rows, frozenset(),
                                   frozenset(tdef.col_names(tr.key_cols))))
        elif tr.mode == "columns":
            reads.append(ReadEntry(name, "columns", (), frozenset(tdef.col_names(tr.cols)), frozenset()))
        else:
            reads.append(ReadEntry(name, "block", (), frozenset(), frozenset()))
    return CommitRecord(serial, txn_id, start, tuple(writes), tuple(reads), ts)


def _encode_pk(tdef, pk):
    if not any(cid in tdef.decimal_cols for cid in tdef.primary_key):
        return list(pk)
    return [encode_json_value(tdef.columns[cid].kind, v) for cid, v in zip(tdef.primary_key, pk)]


def _encode_row(tdef, values):
    # only decimals need a lossless detour through strings
    row = list(values)
    for cid in tdef.decimal_cols:
        v = row[cid]
        if v is not None:
            row[cid] = str(v)
    return row


def encode_line(schema, record: CommitRecord, ws=None) -> str:
    """Wire image of a record; `ws` supplies the data section (replay needs
    it; pass None only for footprint-only fixtures)."""
    writes = []
    data = []
    for tw in record.writes:
        tdef = schema.table(tw.table)
        upd_cols = [sorted(cols) for _, cols in tw.upd]
        writes.append({
            "table": tw.table,
            "ins": [_encode_pk(tdef, pk) for pk in tw.ins],
            "upd": [{"pk": _encode_pk(tdef, pk), "cols": cols}
                    for (pk, _), cols in zip(tw.upd, upd_cols)],
            "del": [_encode_pk(tdef, pk) for pk in tw.dels],
        })
        if ws is not None:
            tws = ws.tables[tw.table]
            data.append({
                "table": tw.table,
                "ins": [_encode_row(tdef, tws.inserts[pk]) for pk in tw.ins],
                "upd": [[encode_json_value(tdef.columns[tdef.col_id(c)].kind,
                                           tws.updates[pk][tdef.col_id(c)]) for c in cols]
                        for (pk, _), cols in zip(tw.upd, upd_cols)],
            })
    reads = []
    for re in record.reads:
        tdef = schema.table(re.table)
        reads.append({
            "table": re.table,
            "mode": re.mode,
            "rows": [{"pk": _encode_pk(tdef, pk), "cols": sorted(cols), "ver": ver}
                     for pk, cols, ver in re.rows],
            "cols": sorted(re.cols),
            "keycols": sorted(re.keycols),
        })
    doc = {"serial": record.serial, "txn": record.txn, "start": record.start,
           "writes": writes, "reads": reads, "ts": record.ts, "data": data}
    return json.dumps(doc, separators=(",", ":"))


_TOP_KEYS = {"serial", "txn", "start", "writes", "reads", "ts", "data"}
_WRITE_KEYS = {"table", "ins", "upd", "del"}
_UPD_KEYS = {"pk", "cols"}
_READ_KEYS = {"table", "mode", "rows", "cols", "keycols"}
_ROW_KEYS = {"pk", "cols", "ver"}
_DATA_KEYS = {"table", "ins", "upd"}


def _reject_unknown(obj, allowed, what, line_no):
    extra = set(obj) - allowed
    if extra:
        raise ReplayError(f"unknown field {sorted(extra)[0]!r} in {what}", line_no)
    missing = allowed - set(obj)
    if missing:
        raise ReplayError(f"missing field {sorted(missing)[0]!r} in {what}", line_no)


def _decode_pk(tdef, raw, line_no):
    if len(raw) != len(tdef.primary_key):
        raise ReplayError(f"{tdef.name}: bad key arity {raw!r}", line_no)
    try:
        return tuple(decode_json_value(tdef.columns[cid].kind, v)
                     for cid, v in zip(tdef.primary_key, raw))
    except ValueError as exc:
        raise ReplayError(f"{tdef.name}: {exc}", line_no) from None


def decode_line(schema, line: str, line_no: int):
    """Parse one log line -> (CommitRecord, data) where data maps table ->
    {"ins": [(pk, values)], "upd": [(pk, {col_id: value})], "del": [pk]}."""
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayError(f"bad JSON: {exc.msg}", line_no) from None
    if not isinstance(doc, dict):
        raise ReplayError("record is not an object", line_no)
    _reject_unknown(doc, _TOP_KEYS, "record", line_no)
    writes = []
    data = {}
    raw_data = doc["data"]
    if len(raw_data) != len(doc["writes"]):
        raise ReplayError("data section does not align with writes", line_no)
    for w, d in zip(doc["writes"], raw_data):
        _reject_unknown(w, _WRITE_KEYS, "writes entry", line_no)
        _reject_unknown(d, _DATA_KEYS, "data entry", line_no)
        name = w["table"]
        if name != d["table"]:
            raise ReplayError("data section does not align with writes", line_no)
        if name not in schema.tables:
            raise ReplayError(f"unknown table {name}", line_no)
        tdef = schema.table(name)
        ins_pks = [_decode_pk(tdef, pk, line_no) for pk in w["ins"]]
        if len(d["ins"]) != len(ins_pks):
            raise ReplayError(f"{name}: insert data does not align", line_no)
        ins_rows = []
        n_cols = len(tdef.columns)
        dec_cols = tdef.decimal_cols
        for pk, raw_row in zip(ins_pks, d["ins"]):
            if len(raw_row) != n_cols:
                raise ReplayError(f"{name}: bad row arity", line_no)
            try:
                for cid in dec_cols:
                    v = raw_row[cid]
                    if v is not None:
                        raw_row[cid] = money(v)
            except Exception:
                raise ReplayError(f"{name}: bad decimal value", line_no) from None
            ins_rows.append((pk, tuple(raw_row)))
        upd = []
        upd_data = []
        if len(d["upd"]) != len(w["upd"]):
            raise ReplayError(f"{name}: update data does not align", line_no)
        for u, raw_vals in zip(w["upd"], d["upd"]):
            _reject_unknown(u, _UPD_KEYS, "upd entry", line_no)
            pk = _decode_pk(tdef, u["pk"], line_no)
            cols = u["cols"]
            if len(raw_vals) != len(cols):
                raise ReplayError(f"{name}: update values do not align with columns", line_no)
            changes = {}
            for c, v in zip(cols, raw_vals):
                try:
                    cid = tdef.col_id(c)
                except Exception:
                    raise ReplayError(f"unknown column {name}.{c}", line_no) from None
                changes[cid] = decode_json_value(tdef.columns[cid].kind, v)
            upd.append((pk, frozenset(cols)))
            upd_data.append((pk, changes))
        dels = [_decode_pk(tdef, pk, line_no) for pk in w["del"]]
        writes.append(TableWrites(name, tuple(ins_pks), tuple(upd), tuple(dels),
                                  frozenset(ins_pks) | {p for p, _ in upd} | frozenset(dels)))
        data[name] = {"ins": ins_rows, "upd": upd_data, "del": dels}
    reads = []
    for r in doc["reads"]:
        _reject_unknown(r, _READ_KEYS, "reads entry", line_no)
        name = r["table"]
        if name not in schema.tables:
            raise ReplayError(f"unknown table {name}", line_no)
        tdef = schema.table(name)
        if r["mode"] not in ("specific", "columns", "block"):
            raise ReplayError(f"bad read mode {r['mode']!r}", line_no)
        rows = []
        for row in r["rows"]:
            _reject_unknown(row, _ROW_KEYS, "read row", line_no)
            rows.append((_decode_pk(tdef, row["pk"], line_no), frozenset(row["cols"]), row["ver"]))
        reads.append(ReadEntry(name, r["mode"], tuple(rows), frozenset(r["cols"]),
                               frozenset(r["keycols"])))
    for field, want in (("serial", int), ("txn", int), ("start", int), ("ts", int)):
        if type(doc[field]) is not want:
            raise ReplayError(f"field {field!r} must be an integer", line_no)
    record = CommitRecord(doc["serial"], doc["txn"], doc["start"],
                          tuple(writes), tuple(reads), doc["ts"])
    return record, data


def _apply_decoded(schema, tables, data, serial):
    for name in data:
        tdef = schema.table(name)
        state = tables[name]
        for pk in data[name]["del"]:
            state = delete_row(state, tdef, pk)
        for pk, changes in data[name]["upd"]:
            state = update_row(state, tdef, pk, changes, serial)
        ins = data[name]["ins"]
        if ins:
            if len(state.rows) == 0 and len(ins) > 64:
                state = bulk_load(state, tdef, (v for _, v in ins), serial)
            else:
                for _, values in ins:
                    state = insert_row(state, tdef, values, serial)
        tables[name] = state
    return tables


def replay(schema, path):
    """Rebuild the root by reapplying every record to genesis.

    Returns (SnapshotRoot, [CommitRecord]). Serial gaps, unknown fields or
    malformed lines raise ReplayError naming the offending line.
    """
    tables = dict(genesis_root(schema).tables)
    records = []
    serial = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record, data = decode_line(schema, line, line_no)
            if record.serial != serial + 1:
                raise ReplayError(f"serial {record.serial} after {serial}", line_no)
            serial = record.serial
            try:
                tables = _apply_decoded(schema, tables, data, serial)
            except Exception as exc:
                raise ReplayError(f"cannot apply serial {serial}: {exc}", line_no) from None
            records.append(record)
    return SnapshotRoot(serial, tables, schema.version), records


def read_records(schema, path):
    """Just the records, for verification; serial density still enforced."""
    return replay_footprints(schema, path)


def replay_footprints(schema, path):
    records = []
    serial = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record, _ = decode_line(schema, line, line_no)
            if record.serial != serial + 1:
                raise ReplayError(f"serial {record.serial} after {serial}", line_no)
            serial = record.serial
            records.append(record)
    return records


def open_database(schema, log_path) -> Database:
    """Open (or create) a database whose durable form is its commit log."""
    import os

    if os.path.exists(log_path):
        root, records = replay(schema, log_path)
    else:
        root, records = genesis_root(schema), []
    return Database(schema, log_path=log_path, _root=root, _records=records)
