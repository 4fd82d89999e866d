"""Initial population of the order-entry database.

Per warehouse: 10 districts, 30000 customers (3000 per district), 100000
stock rows, 30000 orders with 5..14 lines each, and the newest 900 orders
per district queued for delivery. ITEM is global (100000 rows regardless of
warehouse count). Everything is loaded through ordinary engine commits so
the log replays to exactly this state; read tracking is off because the
database is idle and the summaries would dwarf the data.
"""

import random
import string
from decimal import Decimal

from ..values import money
from . import schema as tp

# fixed wall-clock origin for generated timestamps (microseconds)
BASE_TS = 1_500_000_000_000_000

_SYLLABLES = ("BAR", "OUGHT", "ABLE", "PRI", "PRES",
              "ESE", "ANTI", "CALLY", "ATION", "EING")


def _last_name(rng):
    n = rng.randrange(1000)
    return _SYLLABLES[n // 100] + _SYLLABLES[n // 10 % 10] + _SYLLABLES[n % 10]


def _text(rng, lo=8, hi=16):
    return "".join(rng.choices(string.ascii_lowercase, k=rng.randint(lo, hi)))


def _amount(rng, lo_cents, hi_cents):
    return (Decimal(rng.randint(lo_cents, hi_cents)) / 100).quantize(Decimal("0.01"))


def generate_initial(engine, warehouses=1, seed=0):
    """Populate an empty database; returns {table: row count}.

    Usage error if any table already has rows.
    """
    db = engine.db
    root = db.current_root()
    for name, state in root.tables.items():
        if len(state.rows):
            raise ValueError(f"database is not empty: {name} has {len(state.rows)} rows")
    rng = random.Random(seed)

    def txn():
        return engine.begin(track_reads=False)

    t = txn()
    for w in range(1, warehouses + 1):
        t.insert(tp.WAREHOUSE, {
            "W_ID": w, "W_NAME": _text(rng, 6, 10), "W_STREET": _text(rng),
            "W_CITY": _text(rng), "W_STATE": "CA", "W_ZIP": f"{rng.randint(10000, 99999)}",
            "W_TAX": _amount(rng, 0, 20), "W_YTD": money("300000.00"),
        })
    t.commit()

    t = txn()
    for w in range(1, warehouses + 1):
        for d in range(1, tp.DISTRICTS_PER_WAREHOUSE + 1):
            t.insert(tp.DISTRICT, {
                "D_W_ID": w, "D_ID": d, "D_NAME": _text(rng, 6, 10),
                "D_TAX": _amount(rng, 0, 20), "D_YTD": money("30000.00"),
                "D_NEXT_O_ID": tp.ORDERS_PER_DISTRICT + 1,
            })
    t.commit()

    t = txn()
    for w in range(1, warehouses + 1):
        for d in range(1, tp.DISTRICTS_PER_WAREHOUSE + 1):
            for c in range(1, tp.CUSTOMERS_PER_DISTRICT + 1):
                t.insert(tp.CUSTOMER, {
                    "C_W_ID": w, "C_D_ID": d, "C_ID": c,
                    "C_FIRST": _text(rng, 6, 10), "C_MIDDLE": "OE", "C_LAST": _last_name(rng),
                    "C_CREDIT": "BC" if rng.random() < 0.10 else "GC",
                    "C_DISCOUNT": _amount(rng, 0, 50), "C_BALANCE": money("-10.00"),
                    "C_YTD_PAYMENT": money("10.00"), "C_PAYMENT_CNT": 1,
                    "C_DELIVERY_CNT": 0, "C_DATA": _text(rng, 10, 20),
                })
    t.commit()

    t = txn()
    h_id = 0
    for w in range(1, warehouses + 1):
        for d in range(1, tp.DISTRICTS_PER_WAREHOUSE + 1):
            for c in range(1, tp.CUSTOMERS_PER_DISTRICT + 1):
                h_id += 1
                t.insert(tp.HISTORY, {
                    "H_ID": h_id, "H_C_W_ID": w, "H_C_D_ID": d, "H_C_ID": c,
                    "H_W_ID": w, "H_D_ID": d, "H_DATE": BASE_TS,
                    "H_AMOUNT": money("10.00"), "H_DATA": _text(rng, 8, 12),
                })
    t.commit()

    t = txn()
    for i in range(1, tp.ITEMS + 1):
        t.insert(tp.ITEM, {
            "I_ID": i, "I_IM_ID": rng.randint(1, 10000), "I_NAME": _text(rng, 8, 14),
            "I_PRICE": _amount(rng, 100, 10000), "I_DATA": _text(rng, 12, 24),
        })
    t.commit()

    t = txn()
    for w in range(1, warehouses + 1):
        for i in range(1, tp.ITEMS + 1):
            t.insert(tp.STOCK, {
                "S_W_ID": w, "S_I_ID": i, "S_QUANTITY": rng.randint(10, 100),
                "S_YTD": 0, "S_ORDER_CNT": 0, "S_REMOTE_CNT": 0,
                "S_DATA": _text(rng, 12, 24),
            })
    t.commit()

    # orders: per district a random permutation of customers, one order each
    order_specs = []   # (w, d, o, c_id, ol_cnt, delivered)
    for w in range(1, warehouses + 1):
        for d in range(1, tp.DISTRICTS_PER_WAREHOUSE + 1):
            perm = list(range(1, tp.CUSTOMERS_PER_DISTRICT + 1))
            rng.shuffle(perm)
            for o in range(1, tp.ORDERS_PER_DISTRICT + 1):
                delivered = o < tp.FIRST_UNDELIVERED_O_ID
                order_specs.append((w, d, o, perm[o - 1],
                                    rng.randint(tp.MIN_ORDER_LINES, tp.MAX_ORDER_LINES),
                                    delivered))

    t = txn()
    for w, d, o, c_id, ol_cnt, delivered in order_specs:
        t.insert(tp.ORDER, {
            "O_W_ID": w, "O_D_ID": d, "O_ID": o, "O_C_ID": c_id,
            "O_ENTRY_D": BASE_TS, "O_CARRIER_ID": rng.randint(1, 10) if delivered else None,
            "O_OL_CNT": ol_cnt, "O_ALL_LOCAL": 1,
        })
    t.commit()

    t = txn()
    for w, d, o, c_id, ol_cnt, delivered in order_specs:
        for ln in range(1, ol_cnt + 1):
            t.insert(tp.ORDER_LINE, {
                "OL_W_ID": w, "OL_D_ID": d, "OL_O_ID": o, "OL_NUMBER": ln,
                "OL_I_ID": rng.randint(1, tp.ITEMS), "OL_SUPPLY_W_ID": w,
                "OL_DELIVERY_D": BASE_TS if delivered else None,
                "OL_QUANTITY": 5,
                "OL_AMOUNT": money("0.00") if delivered else _amount(rng, 1, 999999),
                "OL_DIST_INFO": _text(rng, 12, 16),
            })
    t.commit()

    t = txn()
    for w, d, o, c_id, ol_cnt, delivered in order_specs:
        if not delivered:
            t.insert(tp.NEW_ORDER, {"NO_W_ID": w, "NO_D_ID": d, "NO_O_ID": o})
    t.commit()

    root = db.current_root()
    return {name: len(state.rows) for name, state in sorted(root.tables.items())}
