"""Bundled measured-groupoid fixtures used by the verification suites and
the tests: cyclic groups, S3, pair groupoids with uniform and skew measures,
transformation groupoids, a disjoint union and a product."""

import numpy as np

from . import groupoid as gpd
from .measure import build, product_measured

__all__ = ["FIXTURE_NAMES", "bundled", "bundled_all"]


def _z(n):
    return gpd.from_group(gpd.cyclic_table(n))


def _build_fixture(name):
    if name == "z2":
        return build(_z(2), 1.0, 1.0)
    if name == "z3":
        return build(_z(3), 1.0, 1.0)
    if name == "z4":
        return build(_z(4), 1.0, 1.0)
    if name == "s3":
        return build(gpd.from_group(gpd.symmetric_table(3)), 1.0, 1.0)
    if name == "pair2_uniform":
        return build(gpd.pair_groupoid(2), 1.0, 1.0)
    if name == "pair2_skew":
        return build(gpd.pair_groupoid(2), 1.0, [1.0, 4.0])
    if name == "pair3_uniform":
        return build(gpd.pair_groupoid(3), 1.0, 1.0)
    if name == "pair3_skew":
        return build(gpd.pair_groupoid(3), [1.0, 2.0, 1.0], [1.0, 2.0, 5.0])
    if name == "action_trivial":
        action = [[0, 0], [1, 1]]  # Z/2 fixing two points: a group bundle
        return build(
            gpd.from_action(gpd.cyclic_table(2), 2, action), 1.0, [1.0, 3.0]
        )
    if name == "action_swap":
        action = [[0, 1], [1, 0]]  # Z/2 swapping two points
        return build(
            gpd.from_action(gpd.cyclic_table(2), 2, action), 1.0, [1.0, 4.0]
        )
    if name == "union_z2_pair2":
        g = gpd.disjoint_union(_z(2), gpd.pair_groupoid(2))
        return build(g, 1.0, [1.0, 1.0, 4.0])
    if name == "product_z2_pair2":
        mg1 = build(_z(2), 1.0, 1.0)
        mg2 = build(gpd.pair_groupoid(2), 1.0, [1.0, 4.0])
        return product_measured(mg1, mg2)
    raise KeyError("unknown fixture %r" % (name,))


FIXTURE_NAMES = (
    "z2",
    "z3",
    "z4",
    "s3",
    "pair2_uniform",
    "pair2_skew",
    "pair3_uniform",
    "pair3_skew",
    "action_trivial",
    "action_swap",
    "union_z2_pair2",
    "product_z2_pair2",
)


def bundled(name):
    """A fresh copy of the named bundled fixture."""
    if name not in FIXTURE_NAMES:
        raise KeyError("unknown fixture %r" % (name,))
    return _build_fixture(name)


def bundled_all():
    """All bundled fixtures as an ordered name -> MeasuredGroupoid dict."""
    return {name: _build_fixture(name) for name in FIXTURE_NAMES}
