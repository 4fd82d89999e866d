"""The five clerk tasks.

Each task splits into a parameter draw (pure function of the clerk's RNG,
so the stream is identical run-to-run for a given seed) and an execution
against one transaction. Clerk keying happens inside the transaction via the
injected `pause` callback, which is what makes transactions long and
overlapping under load; think time between tasks belongs to the clerk loop.

The new-order task reads the warehouse row at field granularity (the tax
column only, never the year-to-date total), so under the optimistic engine
it never collides with a concurrent payment on the same warehouse; the two
meet only if they pick the same district row.
"""

from decimal import Decimal
from typing import NamedTuple

from ..errors import TransactionAbort
from ..values import POS_INF, money
from . import schema as tp

# keying time inside the transaction, think time after commit (simulated s)
KEYING = {"new_order": 18.0, "payment": 3.0, "order_status": 2.0,
          "delivery": 2.0, "stock_level": 2.0}
THINK = {"new_order": 19.5, "payment": 11.0, "order_status": 10.0,
         "delivery": 5.0, "stock_level": 5.0}

TASK_NAMES = ("new_order", "payment", "order_status", "delivery", "stock_level")
# standard minimum mix proportions
TASK_WEIGHTS = (45, 43, 4, 4, 4)


class NewOrderParams(NamedTuple):
    d_id: int
    c_id: int
    lines: tuple     # (item id, quantity) pairs


def draw_new_order(rng) -> NewOrderParams:
    n = rng.randint(tp.MIN_ORDER_LINES, tp.MAX_ORDER_LINES)
    return NewOrderParams(
        rng.randint(1, tp.DISTRICTS_PER_WAREHOUSE),
        rng.randint(1, tp.CUSTOMERS_PER_DISTRICT),
        tuple((rng.randint(1, tp.ITEMS), rng.randint(1, 10)) for _ in range(n)),
    )


def run_new_order(engine, w_id, p: NewOrderParams, pause, clock, read_whole_warehouse=False):
    """One order: read tax/customer info, claim the district's next order
    number, insert the order with its lines, decrement stock.

    `read_whole_warehouse` switches the warehouse read to a whole-table
    block constraint (as if unique selection could not be guaranteed),
    which turns any concurrent warehouse writer into a conflict.
    """
    t = engine.begin()
    try:
        if read_whole_warehouse:
            t.scan(tp.WAREHOUSE, cols=["W_TAX"], block=True)
        else:
            t.lookup_unique(tp.WAREHOUSE, {"W_ID": w_id}, cols=["W_TAX"])
        d = t.lookup_unique(tp.DISTRICT, {"D_W_ID": w_id, "D_ID": p.d_id},
                            cols=["D_TAX", "D_NEXT_O_ID"])
        t.lookup_unique(tp.CUSTOMER, {"C_W_ID": w_id, "C_D_ID": p.d_id, "C_ID": p.c_id},
                        cols=["C_DISCOUNT", "C_LAST", "C_CREDIT"])
        o_id = d["D_NEXT_O_ID"]
        t.update(tp.DISTRICT, (w_id, p.d_id), {"D_NEXT_O_ID": o_id + 1})
        pause(KEYING["new_order"])   # clerk keys the order lines
        t.insert(tp.ORDER, {
            "O_W_ID": w_id, "O_D_ID": p.d_id, "O_ID": o_id, "O_C_ID": p.c_id,
            "O_ENTRY_D": clock(), "O_CARRIER_ID": None,
            "O_OL_CNT": len(p.lines), "O_ALL_LOCAL": 1,
        })
        total = money("0.00")
        for number, (i_id, qty) in enumerate(p.lines, start=1):
            item = t.lookup_unique(tp.ITEM, {"I_ID": i_id}, cols=["I_PRICE"])
            s = t.lookup_unique(tp.STOCK, {"S_W_ID": w_id, "S_I_ID": i_id},
                                cols=["S_QUANTITY", "S_YTD", "S_ORDER_CNT"])
            quantity = s["S_QUANTITY"]
            new_quantity = quantity - qty if quantity - qty >= 10 else quantity - qty + 91
            t.update(tp.STOCK, (w_id, i_id), {
                "S_QUANTITY": new_quantity, "S_YTD": s["S_YTD"] + qty,
                "S_ORDER_CNT": s["S_ORDER_CNT"] + 1,
            })
            amount = (item["I_PRICE"] * qty).quantize(Decimal("0.01"))
            total += amount
            t.insert(tp.ORDER_LINE, {
                "OL_W_ID": w_id, "OL_D_ID": p.d_id, "OL_O_ID": o_id, "OL_NUMBER": number,
                "OL_I_ID": i_id, "OL_SUPPLY_W_ID": w_id, "OL_DELIVERY_D": None,
                "OL_QUANTITY": qty, "OL_AMOUNT": amount, "OL_DIST_INFO": f"dist-{p.d_id:02d}",
            })
        t.insert(tp.NEW_ORDER, {"NO_W_ID": w_id, "NO_D_ID": p.d_id, "NO_O_ID": o_id})
        t.insert(tp.HISTORY, {
            "H_ID": t.txn_id * 1_000_000, "H_C_W_ID": w_id, "H_C_D_ID": p.d_id,
            "H_C_ID": p.c_id, "H_W_ID": w_id, "H_D_ID": p.d_id,
            "H_DATE": clock(), "H_AMOUNT": total, "H_DATA": "new order",
        })
        t.commit()
        return True
    except TransactionAbort:
        if t.status == "active":
            t.rollback()
        raise


class PaymentParams(NamedTuple):
    d_id: int
    c_id: int
    amount: Decimal


def draw_payment(rng) -> PaymentParams:
    return PaymentParams(
        rng.randint(1, tp.DISTRICTS_PER_WAREHOUSE),
        rng.randint(1, tp.CUSTOMERS_PER_DISTRICT),
        (Decimal(rng.randint(100, 500000)) / 100).quantize(Decimal("0.01")),
    )


def run_payment(engine, w_id, p: PaymentParams, pause, clock):
    """Record a customer payment: warehouse and district year-to-date totals
    grow, the customer's balance shrinks, and a history row is written."""
    t = engine.begin()
    try:
        w = t.lookup_unique(tp.WAREHOUSE, {"W_ID": w_id}, cols=["W_YTD"])
        d = t.lookup_unique(tp.DISTRICT, {"D_W_ID": w_id, "D_ID": p.d_id}, cols=["D_YTD"])
        c = t.lookup_unique(tp.CUSTOMER, {"C_W_ID": w_id, "C_D_ID": p.d_id, "C_ID": p.c_id},
                            cols=["C_BALANCE", "C_YTD_PAYMENT", "C_PAYMENT_CNT"])
        pause(KEYING["payment"])
        t.update(tp.WAREHOUSE, (w_id,), {"W_YTD": w["W_YTD"] + p.amount})
        t.update(tp.DISTRICT, (w_id, p.d_id), {"D_YTD": d["D_YTD"] + p.amount})
        t.update(tp.CUSTOMER, (w_id, p.d_id, p.c_id), {
            "C_BALANCE": c["C_BALANCE"] - p.amount,
            "C_YTD_PAYMENT": c["C_YTD_PAYMENT"] + p.amount,
            "C_PAYMENT_CNT": c["C_PAYMENT_CNT"] + 1,
        })
        t.insert(tp.HISTORY, {
            "H_ID": t.txn_id * 1_000_000, "H_C_W_ID": w_id, "H_C_D_ID": p.d_id,
            "H_C_ID": p.c_id, "H_W_ID": w_id, "H_D_ID": p.d_id,
            "H_DATE": clock(), "H_AMOUNT": p.amount, "H_DATA": "payment",
        })
        t.commit()
        return True
    except TransactionAbort:
        if t.status == "active":
            t.rollback()
        raise


class DeliveryParams(NamedTuple):
    carrier: int


def draw_delivery(rng) -> DeliveryParams:
    return DeliveryParams(rng.randint(1, 10))


def run_delivery(engine, w_id, p: DeliveryParams, pause, clock):
    """One warehouse sweep: per district, deliver the oldest undelivered
    order (delete its queue row, stamp the carrier and delivery times,
    settle the customer balance). Returns the number of districts served."""
    t = engine.begin()
    delivered = 0
    try:
        pause(KEYING["delivery"])
        for d_id in range(1, tp.DISTRICTS_PER_WAREHOUSE + 1):
            oldest = t.scan(tp.NEW_ORDER, lo=(w_id, d_id), hi=(w_id, d_id, POS_INF),
                            cols=["NO_O_ID"], limit=1)
            if not oldest:
                continue
            o_id = oldest[0][1]["NO_O_ID"]
            t.delete(tp.NEW_ORDER, (w_id, d_id, o_id))
            order = t.lookup_unique(
                tp.ORDER, {"O_W_ID": w_id, "O_D_ID": d_id, "O_ID": o_id},
                cols=["O_C_ID"])
            t.update(tp.ORDER, (w_id, d_id, o_id), {"O_CARRIER_ID": p.carrier})
            lines = t.scan(tp.ORDER_LINE, lo=(w_id, d_id, o_id), hi=(w_id, d_id, o_id, POS_INF),
                           cols=["OL_AMOUNT"])
            total = money("0.00")
            now = clock()
            for pk, line in lines:
                total += line["OL_AMOUNT"]
                t.update(tp.ORDER_LINE, pk, {"OL_DELIVERY_D": now})
            c_id = order["O_C_ID"]
            c = t.lookup_unique(tp.CUSTOMER, {"C_W_ID": w_id, "C_D_ID": d_id, "C_ID": c_id},
                                cols=["C_BALANCE", "C_DELIVERY_CNT"])
            t.update(tp.CUSTOMER, (w_id, d_id, c_id), {
                "C_BALANCE": c["C_BALANCE"] + total,
                "C_DELIVERY_CNT": c["C_DELIVERY_CNT"] + 1,
            })
            delivered += 1
        t.commit()
        return delivered
    except TransactionAbort:
        if t.status == "active":
            t.rollback()
        raise


class OrderStatusParams(NamedTuple):
    d_id: int
    c_id: int


def draw_order_status(rng) -> OrderStatusParams:
    return OrderStatusParams(rng.randint(1, tp.DISTRICTS_PER_WAREHOUSE),
                             rng.randint(1, tp.CUSTOMERS_PER_DISTRICT))


def run_order_status(engine, w_id, p: OrderStatusParams, pause, clock):
    """Read-only: the customer's most recent order and its lines."""
    t = engine.begin()
    try:
        pause(KEYING["order_status"])
        t.lookup_unique(tp.CUSTOMER, {"C_W_ID": w_id, "C_D_ID": p.d_id, "C_ID": p.c_id},
                        cols=["C_BALANCE", "C_FIRST", "C_LAST"])
        orders = t.scan(tp.ORDER, lo=(w_id, p.d_id), hi=(w_id, p.d_id, POS_INF),
                        cols=["O_ID", "O_C_ID", "O_CARRIER_ID"])
        latest = None
        for _, row in orders:
            if row["O_C_ID"] == p.c_id and (latest is None or row["O_ID"] > latest["O_ID"]):
                latest = row
        lines = []
        if latest is not None:
            lines = t.scan(tp.ORDER_LINE,
                           lo=(w_id, p.d_id, latest["O_ID"]),
                           hi=(w_id, p.d_id, latest["O_ID"], POS_INF),
                           cols=["OL_I_ID", "OL_QUANTITY", "OL_AMOUNT", "OL_DELIVERY_D"])
        t.commit()
        return latest, lines
    except TransactionAbort:
        if t.status == "active":
            t.rollback()
        raise


class StockLevelParams(NamedTuple):
    d_id: int
    threshold: int


def draw_stock_level(rng) -> StockLevelParams:
    return StockLevelParams(rng.randint(1, tp.DISTRICTS_PER_WAREHOUSE), rng.randint(10, 20))


def run_stock_level(engine, w_id, p: StockLevelParams, pause, clock):
    """Read-only: count items from the district's last 20 orders whose stock
    sits below the threshold."""
    t = engine.begin()
    try:
        pause(KEYING["stock_level"])
        d = t.lookup_unique(tp.DISTRICT, {"D_W_ID": w_id, "D_ID": p.d_id}, cols=["D_NEXT_O_ID"])
        next_o = d["D_NEXT_O_ID"]
        lines = t.scan(tp.ORDER_LINE,
                       lo=(w_id, p.d_id, max(1, next_o - 20)),
                       hi=(w_id, p.d_id, next_o - 1, POS_INF),
                       cols=["OL_I_ID"])
        low = 0
        for i_id in {row["OL_I_ID"] for _, row in lines}:
            s = t.lookup_unique(tp.STOCK, {"S_W_ID": w_id, "S_I_ID": i_id}, cols=["S_QUANTITY"])
            if s is not None and s["S_QUANTITY"] < p.threshold:
                low += 1
        t.commit()
        return low
    except TransactionAbort:
        if t.status == "active":
            t.rollback()
        raise


DRAW = {"new_order": draw_new_order, "payment": draw_payment,
        "order_status": draw_order_status, "delivery": draw_delivery,
        "stock_level": draw_stock_level}

RUN = {"new_order": run_new_order, "payment": run_payment,
       "order_status": run_order_status, "delivery": run_delivery,
       "stock_level": run_stock_level}
