"""Exception hierarchy shared by the engines, the relational layer and the tools."""


class DatabaseError(Exception):
    """Base class for all engine errors."""


class SchemaError(DatabaseError):
    """Invalid table definition (duplicate name, bad constraint target, NO ACTION)."""


class ConstraintViolation(DatabaseError):
    """Base for integrity violations raised by single statements."""


class UniqueViolation(ConstraintViolation):
    def __init__(self, table, key_cols, key):
        super().__init__(f"duplicate key {key!r} for {table}({', '.join(key_cols)})")
        self.table = table
        self.key_cols = tuple(key_cols)
        self.key = key


class ReferentialViolation(ConstraintViolation):
    def __init__(self, table, message):
        super().__init__(f"{table}: {message}")
        self.table = table


class NotFound(DatabaseError):
    def __init__(self, table, pk):
        super().__init__(f"no row {pk!r} in {table}")
        self.table = table
        self.pk = pk


class TransactionAbort(DatabaseError):
    """Base for errors that abort the whole transaction at commit."""


class ConflictError(TransactionAbort):
    """First-committer-wins validation failure.

    kind is "ww" (write footprints overlap on a row) or "rw" (a concurrent
    committer wrote something this transaction's read constraints cover).
    """

    def __init__(self, kind, table, detail=""):
        super().__init__(f"{kind} conflict on {table}" + (f": {detail}" if detail else ""))
        self.kind = kind
        self.table = table
        self.detail = detail


class ConstraintError(TransactionAbort):
    """A deferred check or commit-time integrity re-check failed."""


class DeadlockVictim(TransactionAbort):
    """This transaction was chosen to break a lock cycle (2PL engine only)."""


class ReplayError(DatabaseError):
    """Transaction log cannot be replayed (gap, corrupt line, unknown field)."""

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class HistoryError(DatabaseError):
    """A commit history is internally inconsistent (e.g. cites an unknown version)."""
