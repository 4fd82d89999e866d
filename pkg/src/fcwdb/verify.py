"""Independent serializability verifier over commit histories.

Builds the conflict graph (ww / wr / rw edges) from the records alone and
checks it for cycles; acyclic means conflict-serializable and the witness is
a topological order. For small histories a brute-force oracle replays every
permutation of the recorded writes and accepts one that lets each
transaction read exactly the versions its read summary cites and that lands
on the same final state; the two verdicts cross-validate each other.

Table-wide read summaries (columns/block modes) carry no per-row versions,
so their anti-dependency edges are generated conservatively against the
read baseline; such edges can only flip a verdict from serializable to not,
never the reverse, and the verdict reports how many were drawn.
"""

from dataclasses import dataclass, field
from heapq import heapify, heappop, heappush

from .errors import HistoryError
from .log import CommitRecord


@dataclass
class ConflictGraph:
    nodes: list                      # serials, ascending
    edges: dict                      # serial -> set of successor serials
    labels: dict                     # (u, v) -> (kind, table, detail) of first witness
    conservative_edges: int = 0
    txn_of: dict = field(default_factory=dict)   # serial -> txn id


@dataclass
class Verdict:
    serializable: bool
    witness: list | None             # topological order of serials
    cycle: list | None               # serials of one offending cycle
    conservative_edges: int = 0

    def cycle_txns(self, graph: ConflictGraph):
        return [graph.txn_of.get(s, s) for s in (self.cycle or [])]


def _writers_index(records):
    """(table, pk) -> [(serial, kind, cols)] in serial order; kind ins/upd/del."""
    writers = {}
    for rec in records:
        for tw in rec.writes:
            for pk in tw.ins:
                writers.setdefault((tw.table, pk), []).append((rec.serial, "ins", frozenset()))
            for pk, cols in tw.upd:
                writers.setdefault((tw.table, pk), []).append((rec.serial, "upd", cols))
            for pk in tw.dels:
                writers.setdefault((tw.table, pk), []).append((rec.serial, "del", frozenset()))
    return writers


def build_graph(records) -> ConflictGraph:
    """Conflict graph of a history; records must have dense ascending serials."""
    records = list(records)
    for i, rec in enumerate(records):
        if i and rec.serial != records[i - 1].serial + 1:
            raise HistoryError(f"serial {rec.serial} after {records[i - 1].serial}")
    serials = {rec.serial for rec in records}
    base = records[0].serial - 1 if records else 0
    graph = ConflictGraph([r.serial for r in records], {r.serial: set() for r in records}, {})
    graph.txn_of = {r.serial: r.txn for r in records}

    def add_edge(u, v, kind, table, detail, conservative=False):
        if u == v:
            return
        if v not in graph.edges[u]:
            graph.edges[u].add(v)
            graph.labels[(u, v)] = (kind, table, detail)
            if conservative:
                graph.conservative_edges += 1

    writers = _writers_index(records)
    # ww: all writer pairs of one row, directed by serial order
    for (table, pk), ws in writers.items():
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                add_edge(ws[i][0], ws[j][0], "ww", table, f"row {pk!r}")

    for rec in records:
        for re in rec.reads:
            if re.mode == "specific":
                for pk, cols, ver in re.rows:
                    if ver > rec.start:
                        raise HistoryError(
                            f"serial {rec.serial} cites version {ver} newer than its snapshot")
                    if ver > base and ver not in serials:
                        raise HistoryError(f"serial {rec.serial} cites unknown version {ver}")
                    if ver > base:
                        add_edge(ver, rec.serial, "wr", re.table, f"row {pk!r}@{ver}")
                    for w_serial, kind, w_cols in writers.get((re.table, pk), ()):
                        if w_serial <= ver:
                            continue
                        if kind == "upd" and cols and not (w_cols & cols):
                            continue
                        if kind == "upd" and not cols:
                            continue  # existence-only read; updates keep the row
                        add_edge(rec.serial, w_serial, "rw", re.table, f"row {pk!r}@{ver}")
                if re.keycols:
                    for other in records:
                        if other.serial <= rec.start:
                            continue
                        for tw in other.writes:
                            if tw.table != re.table:
                                continue
                            if tw.ins or tw.dels or any(c & re.keycols for _, c in tw.upd):
                                add_edge(rec.serial, other.serial, "rw", re.table,
                                         "write touching key columns")
            else:
                block = re.mode == "block"
                for other in records:
                    if other.serial <= rec.start:
                        continue
                    for tw in other.writes:
                        if tw.table != re.table:
                            continue
                        if block or tw.ins or tw.dels or any(c & re.cols for _, c in tw.upd):
                            add_edge(rec.serial, other.serial, "rw", re.table,
                                     f"{re.mode}-mode table read", conservative=True)
    return graph


def _topological_order(graph: ConflictGraph):
    """Kahn's algorithm, smallest serial first; None if the graph has a cycle."""
    indeg = {n: 0 for n in graph.nodes}
    for u, vs in graph.edges.items():
        for v in vs:
            indeg[v] += 1
    ready = [n for n, d in indeg.items() if d == 0]
    heapify(ready)
    order = []
    while ready:
        n = heappop(ready)
        order.append(n)
        for v in graph.edges[n]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heappush(ready, v)
    return order if len(order) == len(graph.nodes) else None


def _find_cycle(graph: ConflictGraph):
    color = {}
    for root in graph.nodes:
        if color.get(root):
            continue
        path = [root]
        iters = [iter(sorted(graph.edges[root]))]
        color[root] = 1
        while iters:
            try:
                nxt = next(iters[-1])
            except StopIteration:
                color[path.pop()] = 2
                iters.pop()
                continue
            c = color.get(nxt)
            if c == 1:
                return path[path.index(nxt):]
            if c == 2:
                continue
            color[nxt] = 1
            path.append(nxt)
            iters.append(iter(sorted(graph.edges[nxt])))
    return None


def is_serializable(records) -> Verdict:
    """Acyclicity verdict with a topological witness or one offending cycle."""
    graph = build_graph(records)
    order = _topological_order(graph)
    if order is not None:
        return Verdict(True, order, None, graph.conservative_edges)
    cycle = _find_cycle(graph)
    return Verdict(False, None, cycle, graph.conservative_edges)


MAX_BRUTE_FORCE = 8


def replay_history(schema, items, base_tables, order):
    """Apply (record, data) items in `order` (serial list) onto base tables.
    Returns the resulting tables dict; raises on structurally impossible
    orders (e.g. deleting a row that was never inserted)."""
    from .log import _apply_decoded

    by_serial = {rec.serial: (rec, data) for rec, data in items}
    tables = dict(base_tables)
    for serial in order:
        rec, data = by_serial[serial]
        tables = _apply_decoded(schema, tables, data, rec.serial)
    return tables


def _tables_equal(a, b):
    for name in a:
        ra, rb = a[name].rows, b[name].rows
        if len(ra) != len(rb):
            return False
        for (ka, va), (kb, vb) in zip(ra.items(), rb.items()):
            if ka != kb or va != vb:
                return False
    return True


def brute_force_check(schema, items, base_tables) -> bool:
    """True iff some serial order of the committed transactions lets every
    one read exactly the versions its summary cites and reproduces the
    log-order final state. items: [(CommitRecord, decoded data)], at most 8.
    """
    if len(items) > MAX_BRUTE_FORCE:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE} transactions")
    from .log import _apply_decoded

    target = replay_history(schema, items, base_tables,
                            [rec.serial for rec, _ in items])

    def citations_ok(rec, tables):
        for re in rec.reads:
            state = tables[re.table]
            for pk, _cols, ver in re.rows:
                row = state.rows.get(pk)
                if row is None or row.writer != ver:
                    return False
        return True

    def search(tables, remaining):
        if not remaining:
            return _tables_equal(tables, target)
        for i, (rec, data) in enumerate(remaining):
            if not citations_ok(rec, tables):
                continue
            try:
                nxt = _apply_decoded(schema, dict(tables), data, rec.serial)
            except Exception:
                continue
            if search(nxt, remaining[:i] + remaining[i + 1:]):
                return True
        return False

    return search(dict(base_tables), list(items))
