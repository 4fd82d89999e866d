"""Persistent ordered map: weight-balanced binary tree with path copying.

Every mutation returns a new map that shares all untouched nodes with its
parent, so any published version can keep being read, from any thread,
while newer versions are built. Keys are tuples of cell values compared
lexicographically; None sorts first (see values.encode_key).

Balance constants follow Hirai & Yamamoto, "Balancing Weight-Balanced
Trees" (JFP 2011), for the size+1 weight variant.
"""

from .values import NEG_INF, POS_INF, decode_key, encode_key

_DELTA = 3
_GAMMA = 2


class _Node:
    __slots__ = ("left", "key", "value", "right", "size")

    def __init__(self, left, key, value, right):
        self.left = left
        self.key = key
        self.value = value
        self.right = right
        self.size = 1 + (left.size if left is not None else 0) + (right.size if right is not None else 0)


def _weight(node):
    return 1 if node is None else node.size + 1


def _single_left(l, key, value, r):
    return _Node(_Node(l, key, value, r.left), r.key, r.value, r.right)


def _single_right(l, key, value, r):
    return _Node(l.left, l.key, l.value, _Node(l.right, key, value, r))


def _double_left(l, key, value, r):
    rl = r.left
    return _Node(_Node(l, key, value, rl.left), rl.key, rl.value, _Node(rl.right, r.key, r.value, r.right))


def _double_right(l, key, value, r):
    lr = l.right
    return _Node(_Node(l.left, l.key, l.value, lr.left), lr.key, lr.value, _Node(lr.right, key, value, r))


def _join(l, key, value, r):
    lw = _weight(l)
    rw = _weight(r)
    if rw > _DELTA * lw:
        if _weight(r.left) < _GAMMA * _weight(r.right):
            return _single_left(l, key, value, r)
        return _double_left(l, key, value, r)
    if lw > _DELTA * rw:
        if _weight(l.right) < _GAMMA * _weight(l.left):
            return _single_right(l, key, value, r)
        return _double_right(l, key, value, r)
    return _Node(l, key, value, r)


def _insert(node, key, value):
    if node is None:
        return _Node(None, key, value, None)
    nk = node.key
    if key < nk:
        return _join(_insert(node.left, key, value), nk, node.value, node.right)
    if nk < key:
        return _join(node.left, nk, node.value, _insert(node.right, key, value))
    return _Node(node.left, key, value, node.right)


def _pop_min(node):
    if node.left is None:
        return node.key, node.value, node.right
    k, v, new_left = _pop_min(node.left)
    return k, v, _join(new_left, node.key, node.value, node.right)


def _delete(node, key):
    """Returns the new subtree, or the node itself if key is absent."""
    if node is None:
        return None
    nk = node.key
    if key < nk:
        new_left = _delete(node.left, key)
        if new_left is node.left:
            return node
        return _join(new_left, nk, node.value, node.right)
    if nk < key:
        new_right = _delete(node.right, key)
        if new_right is node.right:
            return node
        return _join(node.left, nk, node.value, new_right)
    if node.right is None:
        return node.left
    if node.left is None:
        return node.right
    k, v, new_right = _pop_min(node.right)
    return _join(node.left, k, v, new_right)


def _build_sorted(pairs, lo, hi):
    if lo >= hi:
        return None
    mid = (lo + hi) // 2
    key, value = pairs[mid]
    return _Node(_build_sorted(pairs, lo, mid), key, value, _build_sorted(pairs, mid + 1, hi))


def _iter_range(node, lo, hi):
    """In-order (key, value) pairs with lo <= key <= hi; explicit stack."""
    stack = []
    while node is not None:
        if node.key < lo:
            node = node.right
        else:
            stack.append(node)
            node = node.left
    while stack:
        node = stack.pop()
        if hi < node.key:
            return
        yield node.key, node.value
        node = node.right
        while node is not None:
            stack.append(node)
            node = node.left


class PersistentMap:
    """Immutable ordered map; all mutators return a new map."""

    __slots__ = ("_root",)

    def __init__(self, _root=None):
        self._root = _root

    @classmethod
    def from_sorted(cls, pairs):
        """Bulk-build from (key, value) pairs with strictly ascending keys."""
        pairs = [(encode_key(k), v) for k, v in pairs]
        for i in range(1, len(pairs)):
            if not pairs[i - 1][0] < pairs[i][0]:
                raise ValueError("from_sorted requires strictly ascending keys")
        return cls(_build_sorted(pairs, 0, len(pairs)))

    def __len__(self):
        return self._root.size if self._root is not None else 0

    def __contains__(self, key):
        return self.get(key, _MISSING) is not _MISSING

    def get(self, key, default=None):
        node = self._root
        key = encode_key(key)
        while node is not None:
            nk = node.key
            if key < nk:
                node = node.left
            elif nk < key:
                node = node.right
            else:
                return node.value
        return default

    def put(self, key, value):
        return PersistentMap(_insert(self._root, encode_key(key), value))

    def remove(self, key):
        """Map without key; removing an absent key returns an equal map."""
        new_root = _delete(self._root, encode_key(key))
        return self if new_root is self._root else PersistentMap(new_root)

    def items(self):
        return self.range()

    def keys(self):
        for k, _ in self.range():
            yield k

    def range(self, lo=NEG_INF, hi=POS_INF):
        """Ordered (key, value) pairs with lo <= key <= hi, both inclusive.

        Bounds are whole keys, NEG_INF/POS_INF, or tuples containing those
        sentinels for prefix scans. lo > hi is a usage error.
        """
        if isinstance(lo, tuple):
            lo = encode_key(lo)
        if isinstance(hi, tuple):
            hi = encode_key(hi)
        if hi < lo:
            raise ValueError(f"range lower bound {lo!r} above upper bound {hi!r}")
        for k, v in _iter_range(self._root, lo, hi):
            yield decode_key(k), v


_MISSING = object()
