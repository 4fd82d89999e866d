"""Strict two-phase lock manager with waits-for deadlock detection.

Row locks are shared/exclusive per (table, pk); scans take a table-level
shared lock, which conflicts with row-exclusive holders in that table (and
vice versa), giving phantom-safe reads without key-range machinery. Queueing
is FIFO per resource so writers on hot rows are not starved by a stream of
readers; a holder upgrading S->X barges past the queue and waits only on the
other holders, which is where the classic two-upgrader deadlock comes from.

Every block event runs cycle detection over the waits-for graph; the
youngest transaction (largest id) in a detected cycle is the victim. Waits
poll with a short timeout so victims abort promptly.
"""

import threading
from collections import defaultdict

from .errors import DeadlockVictim


class _RowLock:
    __slots__ = ("s", "x")

    def __init__(self):
        self.s = set()
        self.x = None


class LockManager:
    def __init__(self, poll_interval=0.02):
        self._mutex = threading.Lock()
        self._cond = threading.Condition(self._mutex)
        self._rows = {}                       # (table, pk) -> _RowLock
        self._table_s = defaultdict(set)      # table -> set of txn holding table-S
        self._x_rows = defaultdict(dict)      # table -> {txn: count of X row locks}
        self._held = defaultdict(set)         # txn -> {("row", t, pk, mode) | ("table", t)}
        self._waiting = {}                    # txn -> (seq, kind, args, mode)
        self._victims = set()
        self._seq = 0
        self._poll = poll_interval
        self.deadlocks_detected = 0

    # -- public API ----------------------------------------------------------
    def acquire_row(self, txn, table, pk, mode):
        self._acquire(txn, ("row", table, pk), mode)

    def acquire_table_shared(self, txn, table):
        self._acquire(txn, ("table", table), "S")

    def release_all(self, txn):
        with self._mutex:
            for item in self._held.pop(txn, ()):
                if item[0] == "row":
                    _, table, pk, mode = item
                    lock = self._rows.get((table, pk))
                    if lock is None:
                        continue
                    if mode == "X":
                        if lock.x == txn:
                            lock.x = None
                        counts = self._x_rows[table]
                        if counts.get(txn, 0) <= 1:
                            counts.pop(txn, None)
                        else:
                            counts[txn] -= 1
                    else:
                        lock.s.discard(txn)
                    if lock.x is None and not lock.s:
                        del self._rows[(table, pk)]
                else:
                    self._table_s[item[1]].discard(txn)
            self._victims.discard(txn)
            self._cond.notify_all()

    # -- grant logic ---------------------------------------------------------
    def _holder_blockers(self, txn, res, mode):
        blockers = set()
        if res[0] == "row":
            _, table, pk = res
            lock = self._rows.get((table, pk))
            if lock is not None:
                if lock.x is not None and lock.x != txn:
                    blockers.add(lock.x)
                if mode == "X":
                    blockers.update(s for s in lock.s if s != txn)
            if mode == "X":
                blockers.update(t for t in self._table_s[table] if t != txn)
        else:
            _, table = res
            blockers.update(t for t in self._x_rows[table] if t != txn)
        return blockers

    def _queue_blockers(self, txn, res, mode, seq, upgrading):
        # FIFO per resource; upgrades barge. A waiting table-S also fences
        # new row-X requests in that table so scans are not starved.
        if upgrading:
            return set()
        blockers = set()
        for other, (oseq, ores, omode) in self._waiting.items():
            if other == txn or oseq >= seq:
                continue
            if ores == res and (mode == "X" or omode == "X"):
                blockers.add(other)
            elif (mode == "X" and res[0] == "row" and ores == ("table", res[1])):
                blockers.add(other)
        return blockers

    def _grant(self, txn, res, mode):
        if res[0] == "row":
            _, table, pk = res
            lock = self._rows.get((table, pk))
            if lock is None:
                lock = self._rows[(table, pk)] = _RowLock()
            if mode == "X":
                if txn in lock.s:
                    lock.s.discard(txn)
                    self._held[txn].discard(("row", table, pk, "S"))
                lock.x = txn
                counts = self._x_rows[table]
                counts[txn] = counts.get(txn, 0) + 1
            else:
                lock.s.add(txn)
            self._held[txn].add(("row", table, pk, mode))
        else:
            _, table = res
            self._table_s[table].add(txn)
            self._held[txn].add(("table", table))

    def _already_held(self, txn, res, mode):
        if res[0] == "row":
            _, table, pk = res
            lock = self._rows.get((table, pk))
            if lock is None:
                return False
            if lock.x == txn:
                return True
            return mode == "S" and txn in lock.s
        return txn in self._table_s[res[1]]

    def _acquire(self, txn, res, mode):
        with self._mutex:
            if self._already_held(txn, res, mode):
                return
            upgrading = (res[0] == "row"
                         and (lock := self._rows.get((res[1], res[2]))) is not None
                         and txn in lock.s and mode == "X")
            self._seq += 1
            seq = self._seq
            blockers = self._holder_blockers(txn, res, mode)
            blockers |= self._queue_blockers(txn, res, mode, seq, upgrading)
            if not blockers:
                self._grant(txn, res, mode)
                return
            self._waiting[txn] = (seq, res, mode)
            try:
                while True:
                    victim = self._detect_cycle(txn)
                    if victim is not None:
                        self.deadlocks_detected += 1
                        if victim == txn:
                            raise DeadlockVictim(f"transaction {txn} chosen as deadlock victim")
                        self._victims.add(victim)
                        self._cond.notify_all()
                    self._cond.wait(self._poll)
                    if txn in self._victims:
                        self._victims.discard(txn)
                        raise DeadlockVictim(f"transaction {txn} chosen as deadlock victim")
                    seq, res, mode = self._waiting[txn]
                    blockers = self._holder_blockers(txn, res, mode)
                    blockers |= self._queue_blockers(txn, res, mode, seq, upgrading)
                    if not blockers:
                        self._grant(txn, res, mode)
                        return
            finally:
                del self._waiting[txn]

    # -- deadlock detection ----------------------------------------------------
    def _edges_of(self, txn):
        waiting = self._waiting.get(txn)
        if waiting is None:
            return set()
        seq, res, mode = waiting
        lock = self._rows.get((res[1], res[2])) if res[0] == "row" else None
        upgrading = res[0] == "row" and lock is not None and txn in lock.s and mode == "X"
        return (self._holder_blockers(txn, res, mode)
                | self._queue_blockers(txn, res, mode, seq, upgrading))

    def _detect_cycle(self, start):
        """DFS from `start` over waiter->blocker edges; returns the victim
        (largest txn id on a cycle through start) or None. Cycles not
        involving `start` are found by their own members' detection passes."""
        path = [start]
        on_path = {start}
        iters = [iter(self._edges_of(start))]
        visited = set()
        while iters:
            try:
                nxt = next(iters[-1])
            except StopIteration:
                node = path.pop()
                on_path.discard(node)
                visited.add(node)
                iters.pop()
                continue
            if nxt in on_path:
                cycle = path[path.index(nxt):]
                return max(cycle)
            if nxt in visited or nxt not in self._waiting:
                continue
            path.append(nxt)
            on_path.add(nxt)
            iters.append(iter(self._edges_of(nxt)))
        return None
