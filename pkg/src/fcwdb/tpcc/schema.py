"""Order-entry benchmark schema: nine tables, keys per the standard layout.

Every referential action is RESTRICT. HISTORY gets a synthetic H_ID primary
key (the standard leaves it keyless, but every row here must be addressable
by its key). ORDER carries a secondary unique key (W, D, C, O) so a
customer's orders are reachable without a surrogate index.
"""

from ..schema import Schema, TableDef, build_schema, foreign_key
from ..values import ValueKind as VK

WAREHOUSE = "WAREHOUSE"
DISTRICT = "DISTRICT"
CUSTOMER = "CUSTOMER"
HISTORY = "HISTORY"
ITEM = "ITEM"
STOCK = "STOCK"
ORDER = "ORDER"
NEW_ORDER = "NEW_ORDER"
ORDER_LINE = "ORDER_LINE"

ITEMS = 100_000
DISTRICTS_PER_WAREHOUSE = 10
CUSTOMERS_PER_DISTRICT = 3_000
ORDERS_PER_DISTRICT = 3_000
NEW_ORDERS_PER_DISTRICT = 900          # the newest 900 orders await delivery
FIRST_UNDELIVERED_O_ID = ORDERS_PER_DISTRICT - NEW_ORDERS_PER_DISTRICT + 1
MIN_ORDER_LINES = 5
MAX_ORDER_LINES = 14                   # uniform 5..14, mean 9.5 lines per order


def tpcc_schema() -> Schema:
    return build_schema([
        TableDef(0, WAREHOUSE, [
            ("W_ID", VK.INTEGER), ("W_NAME", VK.TEXT), ("W_STREET", VK.TEXT),
            ("W_CITY", VK.TEXT), ("W_STATE", VK.TEXT), ("W_ZIP", VK.TEXT),
            ("W_TAX", VK.DECIMAL), ("W_YTD", VK.DECIMAL),
        ], ["W_ID"]),
        TableDef(1, DISTRICT, [
            ("D_W_ID", VK.INTEGER), ("D_ID", VK.INTEGER), ("D_NAME", VK.TEXT),
            ("D_TAX", VK.DECIMAL), ("D_YTD", VK.DECIMAL), ("D_NEXT_O_ID", VK.INTEGER),
        ], ["D_W_ID", "D_ID"],
            foreign_keys=[foreign_key(["D_W_ID"], WAREHOUSE, ["W_ID"], "restrict")]),
        TableDef(2, CUSTOMER, [
            ("C_W_ID", VK.INTEGER), ("C_D_ID", VK.INTEGER), ("C_ID", VK.INTEGER),
            ("C_FIRST", VK.TEXT), ("C_MIDDLE", VK.TEXT), ("C_LAST", VK.TEXT),
            ("C_CREDIT", VK.TEXT), ("C_DISCOUNT", VK.DECIMAL), ("C_BALANCE", VK.DECIMAL),
            ("C_YTD_PAYMENT", VK.DECIMAL), ("C_PAYMENT_CNT", VK.INTEGER),
            ("C_DELIVERY_CNT", VK.INTEGER), ("C_DATA", VK.TEXT),
        ], ["C_W_ID", "C_D_ID", "C_ID"],
            foreign_keys=[foreign_key(["C_W_ID", "C_D_ID"], DISTRICT, ["D_W_ID", "D_ID"], "restrict")]),
        TableDef(3, HISTORY, [
            ("H_ID", VK.INTEGER), ("H_C_W_ID", VK.INTEGER), ("H_C_D_ID", VK.INTEGER),
            ("H_C_ID", VK.INTEGER), ("H_W_ID", VK.INTEGER), ("H_D_ID", VK.INTEGER),
            ("H_DATE", VK.TIMESTAMP), ("H_AMOUNT", VK.DECIMAL), ("H_DATA", VK.TEXT),
        ], ["H_ID"],
            foreign_keys=[
                foreign_key(["H_C_W_ID", "H_C_D_ID", "H_C_ID"], CUSTOMER,
                            ["C_W_ID", "C_D_ID", "C_ID"], "restrict"),
                foreign_key(["H_W_ID", "H_D_ID"], DISTRICT, ["D_W_ID", "D_ID"], "restrict"),
            ]),
        TableDef(4, ITEM, [
            ("I_ID", VK.INTEGER), ("I_IM_ID", VK.INTEGER), ("I_NAME", VK.TEXT),
            ("I_PRICE", VK.DECIMAL), ("I_DATA", VK.TEXT),
        ], ["I_ID"]),
        TableDef(5, STOCK, [
            ("S_W_ID", VK.INTEGER), ("S_I_ID", VK.INTEGER), ("S_QUANTITY", VK.INTEGER),
            ("S_YTD", VK.INTEGER), ("S_ORDER_CNT", VK.INTEGER),
            ("S_REMOTE_CNT", VK.INTEGER), ("S_DATA", VK.TEXT),
        ], ["S_W_ID", "S_I_ID"],
            foreign_keys=[
                foreign_key(["S_W_ID"], WAREHOUSE, ["W_ID"], "restrict"),
                foreign_key(["S_I_ID"], ITEM, ["I_ID"], "restrict"),
            ]),
        TableDef(6, ORDER, [
            ("O_W_ID", VK.INTEGER), ("O_D_ID", VK.INTEGER), ("O_ID", VK.INTEGER),
            ("O_C_ID", VK.INTEGER), ("O_ENTRY_D", VK.TIMESTAMP),
            ("O_CARRIER_ID", VK.INTEGER, True), ("O_OL_CNT", VK.INTEGER),
            ("O_ALL_LOCAL", VK.INTEGER),
        ], ["O_W_ID", "O_D_ID", "O_ID"],
            unique_keys=[["O_W_ID", "O_D_ID", "O_C_ID", "O_ID"]],
            foreign_keys=[foreign_key(["O_W_ID", "O_D_ID", "O_C_ID"], CUSTOMER,
                                      ["C_W_ID", "C_D_ID", "C_ID"], "restrict")]),
        TableDef(7, NEW_ORDER, [
            ("NO_W_ID", VK.INTEGER), ("NO_D_ID", VK.INTEGER), ("NO_O_ID", VK.INTEGER),
        ], ["NO_W_ID", "NO_D_ID", "NO_O_ID"],
            foreign_keys=[foreign_key(["NO_W_ID", "NO_D_ID", "NO_O_ID"], ORDER,
                                      ["O_W_ID", "O_D_ID", "O_ID"], "restrict")]),
        TableDef(8, ORDER_LINE, [
            ("OL_W_ID", VK.INTEGER), ("OL_D_ID", VK.INTEGER), ("OL_O_ID", VK.INTEGER),
            ("OL_NUMBER", VK.INTEGER), ("OL_I_ID", VK.INTEGER),
            ("OL_SUPPLY_W_ID", VK.INTEGER), ("OL_DELIVERY_D", VK.TIMESTAMP, True),
            ("OL_QUANTITY", VK.INTEGER), ("OL_AMOUNT", VK.DECIMAL),
            ("OL_DIST_INFO", VK.TEXT),
        ], ["OL_W_ID", "OL_D_ID", "OL_O_ID", "OL_NUMBER"],
            foreign_keys=[
                foreign_key(["OL_W_ID", "OL_D_ID", "OL_O_ID"], ORDER,
                            ["O_W_ID", "O_D_ID", "O_ID"], "restrict"),
                foreign_key(["OL_SUPPLY_W_ID", "OL_I_ID"], STOCK,
                            ["S_W_ID", "S_I_ID"], "restrict"),
            ]),
    ])
