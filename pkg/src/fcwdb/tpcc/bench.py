"""Multi-clerk benchmark driver.

Each clerk runs on its own thread with a private seeded RNG, so the task
and parameter stream is a pure function of (seed, clerk index). Delays are
simulated seconds multiplied by the time scale, which is how a 10-minute
experiment compresses to ~10 wall seconds at scale 1/60. A clerk admits the
next task only while both its simulated clock is below the configured
duration and the wall deadline has not passed; engine stalls (lock waits)
burn wall time without advancing the simulated clock, which is exactly how
a slow engine ends up attempting less work.

Failed tasks count as exceptions and the clerk moves on to its next
scripted task; with retry_on_conflict the same parameters are retried until
they commit or time runs out.
"""

import random
import threading
import time
from dataclasses import dataclass, field

from ..errors import ConflictError, DeadlockVictim, TransactionAbort
from . import schema as tp
from .load import BASE_TS
from .tasks import DRAW, RUN, TASK_NAMES, TASK_WEIGHTS, THINK


@dataclass
class TpccConfig:
    warehouses: int = 1
    clerks: int = 1
    duration: float = 600.0        # simulated seconds of clerk time
    time_scale: float = 1.0        # real seconds per simulated second
    seed: int = 0
    engine: str = "occ"            # "occ" | "2pl"
    retry_on_conflict: bool = False

    def validate(self):
        if self.clerks < 1:
            raise ValueError("clerks must be >= 1")
        if self.time_scale <= 0:
            raise ValueError("time_scale must be > 0")
        if self.duration < 0:
            raise ValueError("duration must be >= 0")
        if self.engine not in ("occ", "2pl"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.warehouses < 1:
            raise ValueError("warehouses must be >= 1")
        return self


@dataclass
class Metrics:
    engine: str = ""
    clerks: int = 0
    duration: float = 0.0
    time_scale: float = 1.0
    seed: int = 0
    commits: int = 0
    exceptions: int = 0            # aborts of any kind
    conflicts: int = 0
    deadlocks: int = 0
    deliveries: int = 0            # districts actually delivered
    per_task: dict = field(default_factory=dict)    # name -> [commits, aborts]
    per_clerk_aborts: list = field(default_factory=list)
    order_rows: int = 0
    new_order_rows: int = 0
    order_line_rows: int = 0
    wall_seconds: float = 0.0

    @property
    def max_clerk_aborts(self):
        return max(self.per_clerk_aborts, default=0)

    def table_lines(self):
        return [("Commits", self.commits), ("Exceptions", self.exceptions),
                ("ORDER", self.order_rows), ("NEW_ORDER", self.new_order_rows),
                ("ORDER_LINE", self.order_line_rows), ("DELIVERY", self.deliveries)]

    def csv_row(self):
        return [self.engine, self.clerks, int(self.duration), self.time_scale, self.seed,
                self.commits, self.exceptions, self.order_rows, self.new_order_rows,
                self.order_line_rows, self.deliveries]

    @staticmethod
    def csv_header():
        return ["engine", "clerks", "duration", "timescale", "seed", "commits",
                "exceptions", "order", "new_order", "order_line", "delivery"]


class _ClerkStats:
    __slots__ = ("commits", "aborts", "conflicts", "deadlocks", "deliveries", "per_task", "error")

    def __init__(self):
        self.commits = 0
        self.aborts = 0
        self.conflicts = 0
        self.deadlocks = 0
        self.deliveries = 0
        self.per_task = {name: [0, 0] for name in TASK_NAMES}
        self.error = None


def run_clerk(engine, cfg: TpccConfig, clerk_idx: int, deadline: float, stats: _ClerkStats):
    rng = random.Random(f"{cfg.seed}:{clerk_idx}")
    w_id = 1 + clerk_idx % cfg.warehouses
    sim_clock = 0.0

    def pause(sim_seconds):
        nonlocal sim_clock
        sim_clock += sim_seconds
        wall = sim_seconds * cfg.time_scale
        if wall > 0:
            time.sleep(wall)

    def clock():
        # deterministic timestamps derived from the simulated clock
        return BASE_TS + clerk_idx * 1_000 + int(sim_clock * 1_000_000)

    while sim_clock < cfg.duration and time.monotonic() < deadline:
        name = rng.choices(TASK_NAMES, weights=TASK_WEIGHTS)[0]
        params = DRAW[name](rng)
        while True:
            try:
                result = RUN[name](engine, w_id, params, pause, clock)
                stats.commits += 1
                stats.per_task[name][0] += 1
                if name == "delivery":
                    stats.deliveries += result
                break
            except DeadlockVictim:
                stats.aborts += 1
                stats.deadlocks += 1
                stats.per_task[name][1] += 1
            except ConflictError:
                stats.aborts += 1
                stats.conflicts += 1
                stats.per_task[name][1] += 1
            except TransactionAbort:
                stats.aborts += 1
                stats.per_task[name][1] += 1
            if not cfg.retry_on_conflict:
                break
            if sim_clock >= cfg.duration or time.monotonic() >= deadline:
                break
        pause(THINK[name])


def run_benchmark(engine, cfg: TpccConfig) -> Metrics:
    """Drive `cfg.clerks` clerk threads against an initialized database and
    collect the run's counters plus final table sizes."""
    cfg.validate()
    db = engine.db
    metrics = Metrics(engine=cfg.engine, clerks=cfg.clerks, duration=cfg.duration,
                      time_scale=cfg.time_scale, seed=cfg.seed)
    started = time.monotonic()
    deadline = started + cfg.duration * cfg.time_scale
    all_stats = [_ClerkStats() for _ in range(cfg.clerks)]

    def clerk_main(idx):
        try:
            run_clerk(engine, cfg, idx, deadline, all_stats[idx])
        except Exception as exc:   # engine bugs surface at join, not silently
            all_stats[idx].error = exc

    threads = [threading.Thread(target=clerk_main, args=(i,), name=f"clerk-{i}")
               for i in range(cfg.clerks)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    for st in all_stats:
        if st.error is not None:
            raise st.error
    metrics.wall_seconds = time.monotonic() - started
    for st in all_stats:
        metrics.commits += st.commits
        metrics.exceptions += st.aborts
        metrics.conflicts += st.conflicts
        metrics.deadlocks += st.deadlocks
        metrics.deliveries += st.deliveries
        metrics.per_clerk_aborts.append(st.aborts)
        for name, (c, a) in st.per_task.items():
            agg = metrics.per_task.setdefault(name, [0, 0])
            agg[0] += c
            agg[1] += a
    root = db.current_root()
    metrics.order_rows = len(root.tables[tp.ORDER].rows)
    metrics.new_order_rows = len(root.tables[tp.NEW_ORDER].rows)
    metrics.order_line_rows = len(root.tables[tp.ORDER_LINE].rows)
    return metrics
