from __future__ import annotations

import numpy as np
import pytest

from qdecay.charts import flat, polar_plane
from qdecay.errors import BudgetError
from qdecay.netdist import GraphDistance, primitive_offsets


def test_primitive_offsets_are_primitive_and_positive():
    off = primitive_offsets(2, 4)
    assert len(off) == 24
    assert all(np.gcd.reduce(np.abs(o)) == 1 for o in off)
    assert len(primitive_offsets(3, 1)) == 13


def test_flat_graph_distance_is_within_net_error():
    net = GraphDistance(flat(2, half_width=1.0), 0.02)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.9, 0.9, (200, 2))
    exact = np.linalg.norm(pts, axis=1)
    # anisotropy of the 24-direction stencil (~1.1%) plus half a cell at the ends
    excess = net(pts) - exact
    assert np.all(excess <= 0.012 * exact + 0.01) and np.min(excess) > -1e-9


def test_polar_chart_wraps_angle():
    net = GraphDistance(polar_plane().with_(sample_box=((0.0, 2.5), (0.0, 2 * np.pi))), 0.02)
    d = net(np.array([[2.0, 0.05], [2.0, 2 * np.pi - 0.05]]))
    assert d == pytest.approx([2.0, 2.0], rel=0.02)


def test_node_budget_is_enforced():
    with pytest.raises(BudgetError):
        GraphDistance(flat(2, half_width=10.0), 0.001, max_nodes=1000)
