"""Table definitions and the immutable catalog.

Column ids are dense (position in the column list). Constraint columns are
declared by name and resolved to id tuples at construction time. Referential
actions are restricted to CASCADE and RESTRICT: "no action" semantics, which
would let a statement leave dangling references until end of transaction,
are rejected outright so every applied statement leaves a consistent state.
"""

import enum
from dataclasses import dataclass, field

from .errors import SchemaError
from .values import ValueKind


class FkAction(enum.Enum):
    CASCADE = "cascade"
    RESTRICT = "restrict"


@dataclass(frozen=True)
class ColumnDef:
    col_id: int
    name: str
    kind: ValueKind
    nullable: bool = False


@dataclass(frozen=True)
class ForeignKeyDef:
    columns: tuple          # referencing column ids, in ref-key order
    ref_table: str
    ref_columns: tuple      # referenced column ids (a unique key there)
    action: FkAction


class TableDef:
    """Schema of one table: columns, primary key, unique keys, foreign keys.

    primary_key / unique_keys / foreign key columns are given by name; the
    resolved id tuples live on the instance. unique_keys excludes the
    primary key.
    """

    def __init__(self, table_id, name, columns, primary_key, unique_keys=(), foreign_keys=()):
        self.table_id = table_id
        self.name = name
        self.columns = []
        seen = set()
        for i, (col_name, kind, *rest) in enumerate(columns):
            if col_name in seen:
                raise SchemaError(f"{name}: duplicate column {col_name}")
            seen.add(col_name)
            nullable = rest[0] if rest else False
            self.columns.append(ColumnDef(i, col_name, kind, nullable))
        self._ids = {c.name: c.col_id for c in self.columns}
        self.decimal_cols = tuple(c.col_id for c in self.columns if c.kind is ValueKind.DECIMAL)
        if not primary_key:
            raise SchemaError(f"{name}: empty primary key")
        self.primary_key = self.col_ids(primary_key)
        for cid in self.primary_key:
            if self.columns[cid].nullable:
                raise SchemaError(f"{name}: primary key column {self.columns[cid].name} is nullable")
        self.unique_keys = tuple(self.col_ids(uk) for uk in unique_keys)
        # raw foreign specs (names); resolved against the catalog in define_table
        self._fk_specs = tuple(foreign_keys)
        self.foreign_keys: tuple = ()

    def col_ids(self, names):
        try:
            return tuple(self._ids[n] for n in names)
        except KeyError as exc:
            raise SchemaError(f"{self.name}: unknown column {exc.args[0]}") from None

    def col_id(self, name):
        try:
            return self._ids[name]
        except KeyError:
            raise SchemaError(f"{self.name}: unknown column {name}") from None

    def col_names(self, ids):
        return tuple(self.columns[i].name for i in ids)

    def __repr__(self):
        return f"TableDef({self.name})"


def foreign_key(columns, ref_table, ref_columns, action):
    """FK spec for TableDef(foreign_keys=...); action is 'cascade' or 'restrict'."""
    if isinstance(action, str):
        try:
            action = FkAction(action.lower())
        except ValueError:
            raise SchemaError(f"referential action {action!r} is not allowed") from None
    return (tuple(columns), ref_table, tuple(ref_columns), action)


@dataclass(frozen=True)
class Schema:
    """Immutable catalog; define_table returns an extended copy."""

    tables: dict = field(default_factory=dict)
    version: int = 0

    def table(self, name) -> TableDef:
        try:
            return self.tables[name]
        except KeyError:
            raise SchemaError(f"no table {name}") from None

    def referencing(self, name):
        """(child TableDef, ForeignKeyDef) pairs whose FK targets `name`."""
        out = []
        for t in self.tables.values():
            for fk in t.foreign_keys:
                if fk.ref_table == name:
                    out.append((t, fk))
        return out


def define_table(schema: Schema, tdef: TableDef) -> Schema:
    """Add a table; rejects duplicate names, NO ACTION FKs and dangling targets."""
    if tdef.name in schema.tables:
        raise SchemaError(f"table {tdef.name} already defined")
    fks = []
    for cols, ref_table, ref_cols, action in tdef._fk_specs:
        if not isinstance(action, FkAction):
            raise SchemaError(f"{tdef.name}: referential action {action!r} is not allowed")
        ref = schema.tables.get(ref_table) if ref_table != tdef.name else tdef
        if ref is None:
            raise SchemaError(f"{tdef.name}: foreign key target {ref_table} does not exist")
        ref_ids = ref.col_ids(ref_cols)
        if ref_ids != ref.primary_key and ref_ids not in ref.unique_keys:
            raise SchemaError(
                f"{tdef.name}: foreign key target {ref_table}({', '.join(ref_cols)}) is not a unique key")
        col_ids = tdef.col_ids(cols)
        if len(col_ids) != len(ref_ids):
            raise SchemaError(f"{tdef.name}: foreign key arity mismatch vs {ref_table}")
        fks.append(ForeignKeyDef(col_ids, ref_table, ref_ids, action))
    tdef.foreign_keys = tuple(fks)
    new_tables = dict(schema.tables)
    new_tables[tdef.name] = tdef
    return Schema(new_tables, schema.version + 1)


def build_schema(tdefs) -> Schema:
    schema = Schema()
    for tdef in tdefs:
        schema = define_table(schema, tdef)
    return schema
