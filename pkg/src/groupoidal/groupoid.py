"""Finite groupoid data model, axiom validation and the constructor zoo.

Arrows are dense integer indices with a label table; composition is a dense
partial table with -1 for non-composable pairs, so every structural check is
an exhaustive loop over arrows, pairs or triples.
"""

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Groupoid",
    "GroupoidError",
    "NotAGroup",
    "NotAnAction",
    "NotAUnit",
    "CapExceeded",
    "default_size_cap",
    "from_tables",
    "from_group",
    "pair_groupoid",
    "from_action",
    "product",
    "disjoint_union",
    "fibers",
    "validate",
    "is_isomorphism",
    "cyclic_table",
    "symmetric_table",
]

DEFAULT_SIZE_CAP = 256


class GroupoidError(Exception):
    pass


class NotAGroup(GroupoidError):
    pass


class NotAnAction(GroupoidError):
    pass


class NotAUnit(GroupoidError):
    pass


class CapExceeded(GroupoidError):
    pass


def default_size_cap():
    """Arrow cap for constructors; GROUPOIDAL_SIZE_CAP overrides the default.

    Downstream commutant solves scale like the sixth power of the arrow
    count, hence the deliberately small default.
    """
    raw = os.environ.get("GROUPOIDAL_SIZE_CAP")
    if raw:
        return int(raw)
    return DEFAULT_SIZE_CAP


def _check_cap(n, size_cap):
    cap = default_size_cap() if size_cap is None else size_cap
    if n > cap:
        raise CapExceeded("%d arrows exceed the size cap %d" % (n, cap))


@dataclass(frozen=True, eq=False)
class Groupoid:
    """Finite groupoid: arrows 0..n-1, unit subset, r/s/inverse maps and a
    dense composition table (-1 where not composable)."""

    labels: tuple
    units: np.ndarray
    r: np.ndarray
    s: np.ndarray
    inv: np.ndarray
    comp: np.ndarray
    unit_pos: np.ndarray = field(init=False)

    def __post_init__(self):
        pos = np.full(self.n_arrows, -1, dtype=np.int64)
        pos[self.units] = np.arange(len(self.units))
        object.__setattr__(self, "unit_pos", pos)

    @property
    def n_arrows(self):
        return len(self.labels)

    @property
    def n_units(self):
        return len(self.units)

    def is_unit(self, a):
        return self.unit_pos[a] >= 0

    def r_fiber(self, x):
        """Arrows with range x (x must be a unit arrow index)."""
        if not self.is_unit(x):
            raise NotAUnit("arrow %d is not a unit" % x)
        return np.nonzero(self.r == x)[0]

    def s_fiber(self, x):
        if not self.is_unit(x):
            raise NotAUnit("arrow %d is not a unit" % x)
        return np.nonzero(self.s == x)[0]

    def __repr__(self):
        return "Groupoid(%d arrows, %d units)" % (self.n_arrows, self.n_units)


def _make(labels, units, r, s, inv, comp):
    return Groupoid(
        labels=tuple(labels),
        units=np.asarray(units, dtype=np.int64),
        r=np.asarray(r, dtype=np.int64),
        s=np.asarray(s, dtype=np.int64),
        inv=np.asarray(inv, dtype=np.int64),
        comp=np.asarray(comp, dtype=np.int64),
    )


def from_tables(labels, units, r, s, inv, comp, size_cap=None):
    """Assemble a groupoid from raw tables without validating the axioms
    (use :func:`validate` to inspect externally supplied data)."""
    _check_cap(len(labels), size_cap)
    return _make(labels, units, r, s, inv, comp)


def validate(g):
    """Exhaustively check the groupoid axioms.

    Returns a list of human-readable diagnostics, one per violated axiom
    instance; an empty list means the structure is a groupoid.
    """
    out = []
    n = g.n_arrows
    units = set(int(x) for x in g.units)
    for x in units:
        if g.r[x] != x or g.s[x] != x:
            out.append("unit %d has r=%d s=%d (expected itself)" % (x, g.r[x], g.s[x]))
    for a in range(n):
        if int(g.r[a]) not in units or int(g.s[a]) not in units:
            out.append("arrow %d has non-unit range or source" % a)
            continue
        if g.comp[a, g.s[a]] != a:
            out.append("right unit law fails at arrow %d" % a)
        if g.comp[g.r[a], a] != a:
            out.append("left unit law fails at arrow %d" % a)
        b = int(g.inv[a])
        if int(g.inv[b]) != a:
            out.append("inverse is not involutive at arrow %d" % a)
        if g.r[b] != g.s[a] or g.s[b] != g.r[a]:
            out.append("inverse of arrow %d swaps r/s incorrectly" % a)
        if g.comp[a, b] != g.r[a]:
            out.append("a.inv(a) != r(a) at arrow %d" % a)
        if g.comp[b, a] != g.s[a]:
            out.append("inv(a).a != s(a) at arrow %d" % a)
    for a in range(n):
        for b in range(n):
            c = int(g.comp[a, b])
            composable = g.s[a] == g.r[b]
            if composable and c < 0:
                out.append("composable pair (%d,%d) has no product" % (a, b))
            if not composable and c >= 0:
                out.append("non-composable pair (%d,%d) has a product" % (a, b))
            if c >= 0 and (g.r[c] != g.r[a] or g.s[c] != g.s[b]):
                out.append("range/source of product (%d,%d) wrong" % (a, b))
    for a in range(n):
        for b in np.nonzero(g.r == g.s[a])[0]:
            ab = int(g.comp[a, b])
            for c in np.nonzero(g.r == g.s[b])[0]:
                bc = int(g.comp[b, c])
                if g.comp[ab, c] != g.comp[a, bc]:
                    out.append(
                        "associativity fails on triple (%d,%d,%d)" % (a, int(b), int(c))
                    )
    return out


def _group_check(table):
    table = np.asarray(table, dtype=np.int64)
    k = table.shape[0]
    if table.ndim != 2 or table.shape != (k, k):
        raise NotAGroup("multiplication table must be square")
    if table.min() < 0 or table.max() >= k:
        raise NotAGroup("table entries out of range")
    ident = None
    for e in range(k):
        if all(table[e, j] == j for j in range(k)) and all(
            table[i, e] == i for i in range(k)
        ):
            ident = e
            break
    if ident is None:
        raise NotAGroup("no two-sided identity element")
    for i, j, l in itertools.product(range(k), repeat=3):
        if table[table[i, j], l] != table[i, table[j, l]]:
            raise NotAGroup("associativity fails at (%d,%d,%d)" % (i, j, l))
    inv = np.full(k, -1, dtype=np.int64)
    for i in range(k):
        for j in range(k):
            if table[i, j] == ident and table[j, i] == ident:
                inv[i] = j
                break
        if inv[i] < 0:
            raise NotAGroup("element %d has no inverse" % i)
    return table, ident, inv


def from_group(table, labels=None, size_cap=None):
    """Groupoid of a finite group given by its multiplication table."""
    table, ident, inv = _group_check(table)
    k = table.shape[0]
    _check_cap(k, size_cap)
    if labels is None:
        labels = ["g%d" % i for i in range(k)]
    return _make(labels, [ident], [ident] * k, [ident] * k, inv, table)


def pair_groupoid(n, size_cap=None):
    """Pair groupoid on n points: arrows (x,y), (x,y)(y,z) = (x,z)."""
    if n < 1:
        raise GroupoidError("pair groupoid needs n >= 1")
    _check_cap(n * n, size_cap)
    idx = lambda x, y: x * n + y
    labels = ["(%d,%d)" % (x, y) for x in range(n) for y in range(n)]
    units = [idx(x, x) for x in range(n)]
    r = [idx(x, x) for x in range(n) for _ in range(n)]
    s = [idx(y, y) for _ in range(n) for y in range(n)]
    inv = [idx(y, x) for x in range(n) for y in range(n)]
    comp = np.full((n * n, n * n), -1, dtype=np.int64)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                comp[idx(x, y), idx(y, z)] = idx(x, z)
    return _make(labels, units, r, s, inv, comp)


def from_action(table, n_points, action, size_cap=None):
    """Transformation groupoid of a right action of a group on a finite set.

    ``action[x][g]`` is x.g; arrows are (x, g) with r = x and s = x.g.
    """
    table, ident, ginv = _group_check(table)
    k = table.shape[0]
    action = np.asarray(action, dtype=np.int64)
    if action.shape != (n_points, k):
        raise NotAnAction("action table must be n_points x group_order")
    if action.min() < 0 or action.max() >= n_points:
        raise NotAnAction("action values out of range")
    for x in range(n_points):
        if action[x, ident] != x:
            raise NotAnAction("identity does not act trivially at point %d" % x)
        for g in range(k):
            for h in range(k):
                if action[action[x, g], h] != action[x, table[g, h]]:
                    raise NotAnAction(
                        "action law fails at (point %d, %d, %d)" % (x, g, h)
                    )
    _check_cap(n_points * k, size_cap)
    idx = lambda x, g: x * k + g
    labels = ["(%d;g%d)" % (x, g) for x in range(n_points) for g in range(k)]
    units = [idx(x, ident) for x in range(n_points)]
    r = [idx(x, ident) for x in range(n_points) for _ in range(k)]
    s = [idx(action[x, g], ident) for x in range(n_points) for g in range(k)]
    inv = [idx(action[x, g], ginv[g]) for x in range(n_points) for g in range(k)]
    comp = np.full((n_points * k, n_points * k), -1, dtype=np.int64)
    for x in range(n_points):
        for g in range(k):
            xg = action[x, g]
            for h in range(k):
                comp[idx(x, g), idx(xg, h)] = idx(x, table[g, h])
    return _make(labels, units, r, s, inv, comp)


def product(g1, g2, size_cap=None):
    """Componentwise product groupoid; arrow (a,b) has index a*n2 + b."""
    n1, n2 = g1.n_arrows, g2.n_arrows
    _check_cap(n1 * n2, size_cap)
    idx = lambda a, b: a * n2 + b
    labels = [
        "%s|%s" % (g1.labels[a], g2.labels[b]) for a in range(n1) for b in range(n2)
    ]
    units = [idx(x, y) for x in g1.units for y in g2.units]
    r = [idx(g1.r[a], g2.r[b]) for a in range(n1) for b in range(n2)]
    s = [idx(g1.s[a], g2.s[b]) for a in range(n1) for b in range(n2)]
    inv = [idx(g1.inv[a], g2.inv[b]) for a in range(n1) for b in range(n2)]
    comp = np.full((n1 * n2, n1 * n2), -1, dtype=np.int64)
    c1 = g1.comp
    c2 = g2.comp
    for a in range(n1):
        for b in range(n2):
            row = comp[idx(a, b)]
            for a2 in range(n1):
                ca = c1[a, a2]
                if ca < 0:
                    continue
                for b2 in range(n2):
                    cb = c2[b, b2]
                    if cb >= 0:
                        row[idx(a2, b2)] = idx(ca, cb)
    return _make(labels, units, r, s, inv, comp)


def disjoint_union(g1, g2, size_cap=None):
    """Disjoint union; arrows of g2 are shifted past those of g1."""
    n1, n2 = g1.n_arrows, g2.n_arrows
    _check_cap(n1 + n2, size_cap)
    labels = list(g1.labels) + ["%s'" % lab for lab in g2.labels]
    units = list(g1.units) + [x + n1 for x in g2.units]
    r = list(g1.r) + [x + n1 for x in g2.r]
    s = list(g1.s) + [x + n1 for x in g2.s]
    inv = list(g1.inv) + [x + n1 for x in g2.inv]
    comp = np.full((n1 + n2, n1 + n2), -1, dtype=np.int64)
    comp[:n1, :n1] = g1.comp
    shifted = g2.comp.copy()
    shifted[shifted >= 0] += n1
    comp[n1:, n1:] = shifted
    return _make(labels, units, r, s, inv, comp)


def fibers(g, x):
    """The pair (G^x, G_x) of range and source fibers at the unit x."""
    return g.r_fiber(x), g.s_fiber(x)


def is_isomorphism(g1, g2, mapping):
    """Check that ``mapping`` (arrow index array) is a groupoid isomorphism
    g1 -> g2 by exhaustive table comparison."""
    m = np.asarray(mapping, dtype=np.int64)
    if g1.n_arrows != g2.n_arrows or sorted(m) != list(range(g1.n_arrows)):
        return False
    if not np.array_equal(np.sort(m[g1.units]), np.sort(g2.units)):
        return False
    if not (
        np.array_equal(m[g1.r], g2.r[m])
        and np.array_equal(m[g1.s], g2.s[m])
        and np.array_equal(m[g1.inv], g2.inv[m])
    ):
        return False
    for a in range(g1.n_arrows):
        for b in range(g1.n_arrows):
            c = g1.comp[a, b]
            c2 = g2.comp[m[a], m[b]]
            if (c < 0) != (c2 < 0):
                return False
            if c >= 0 and m[c] != c2:
                return False
    return True


def cyclic_table(n):
    """Multiplication table of Z/n."""
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def symmetric_table(n):
    """Multiplication table of the symmetric group S_n (product = compose
    left-then-right within the chosen permutation listing)."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(q[p[i]] for i in range(n))] for q in perms] for p in perms
    ]
    return table
