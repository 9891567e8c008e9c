"""Graph distances on a regular epsilon-net of a chart.

Edges join every node to the nodes reached by short primitive lattice
vectors, weighted by the metric length of the straight chart segment
(midpoint rule). Longer primitive moves make the lattice metric nearly
isotropic: with reach 4 in two dimensions the worst-case overestimate in
flat space is below 0.8%.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import BudgetError
from .metric import ChartedMetric

_DEFAULT_REACH = {1: 1, 2: 4, 3: 2}


def primitive_offsets(n: int, reach: int) -> np.ndarray:
    """Lexicographically positive primitive integer vectors with max-norm <= reach."""
    out = []
    for v in itertools.product(range(-reach, reach + 1), repeat=n):
        if not any(v):
            continue
        if math.gcd(*[abs(x) for x in v]) != 1:
            continue
        first = next(x for x in v if x != 0)
        if first > 0:
            out.append(v)
    return np.array(out, dtype=int)


class GraphDistance:
    """Distances from the basepoint, computed once by Dijkstra on an epsilon-net."""

    def __init__(self, metric: ChartedMetric, eps: float, box=None, reach: int | None = None,
                 max_nodes: int = 3_000_000, chunk: int = 400_000):
        self.metric = metric
        n = metric.dim
        box = metric.box() if box is None else box
        periods = metric.periods or (None,) * n
        bp = metric.basepoint
        axes, self.periodic, steps = [], [], []
        for i, (lo, hi) in enumerate(box):
            per = periods[i]
            if per is not None:
                count = max(int(round(per / eps)), 3)
                step = per / count
                axes.append(bp[i] + step * np.arange(count))
                self.periodic.append(per)
            else:
                k_lo = math.ceil((lo - bp[i]) / eps - 1e-9)
                k_hi = math.floor((hi - bp[i]) / eps + 1e-9)
                step = eps
                axes.append(bp[i] + eps * np.arange(k_lo, k_hi + 1))
                self.periodic.append(None)
            steps.append(step)
        self.axes = axes
        self.steps = np.array(steps)
        self.shape = tuple(len(a) for a in axes)
        size = int(np.prod(self.shape))
        if size > max_nodes:
            raise BudgetError(f"epsilon-net with {size} nodes exceeds budget {max_nodes}")
        reach = _DEFAULT_REACH.get(n, 1) if reach is None else reach
        offsets = primitive_offsets(n, reach)

        idx = np.indices(self.shape).reshape(n, -1).T
        coords = np.stack([axes[i][idx[:, i]] for i in range(n)], axis=-1)
        rows, cols, weights = [], [], []
        for off in offsets:
            tgt = idx + off
            ok = np.ones(len(idx), dtype=bool)
            for i in range(n):
                if self.periodic[i] is not None:
                    tgt[:, i] %= self.shape[i]
                else:
                    ok &= (tgt[:, i] >= 0) & (tgt[:, i] < self.shape[i])
            src = np.nonzero(ok)[0]
            dst = np.ravel_multi_index(tgt[ok].T, self.shape)
            delta = off * self.steps
            for s in range(0, len(src), chunk):
                sl = src[s:s + chunk]
                mid = coords[sl] + 0.5 * delta
                g = metric.components(mid)
                w = np.sqrt(np.maximum(np.einsum("i,...ij,j->...", delta, g, delta), 0.0))
                rows.append(sl)
                cols.append(dst[s:s + chunk])
                weights.append(np.maximum(w, 1e-300))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        weights = np.concatenate(weights)
        graph = coo_matrix((weights, (rows, cols)), shape=(size, size)).tocsr()
        source = np.ravel_multi_index(tuple(self._nearest(bp)), self.shape)
        self.dist = dijkstra(graph, directed=False, indices=source).reshape(self.shape)

    def _nearest(self, p):
        out = []
        for i, a in enumerate(self.axes):
            k = int(round((p[i] - a[0]) / self.steps[i]))
            if self.periodic[i] is not None:
                k %= self.shape[i]
            else:
                k = min(max(k, 0), self.shape[i] - 1)
            out.append(k)
        return out

    def __call__(self, points) -> np.ndarray:
        """Net distance to ``points``: best corner of the enclosing cell plus a straight segment."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        n = p.shape[-1]
        best = np.full(len(p), np.inf)
        base = []
        for i, a in enumerate(self.axes):
            x = p[:, i]
            if self.periodic[i] is not None:
                x = a[0] + np.mod(x - a[0], self.periodic[i])
            base.append(np.floor((x - a[0]) / self.steps[i]).astype(int))
        base = np.stack(base, axis=-1)
        for corner in itertools.product((0, 1), repeat=n):
            k = base + np.array(corner)
            ok = np.ones(len(p), dtype=bool)
            pos = np.empty_like(p)
            for i, a in enumerate(self.axes):
                if self.periodic[i] is not None:
                    pos[:, i] = a[0] + k[:, i] * self.steps[i]
                    k[:, i] %= self.shape[i]
                else:
                    ok &= (k[:, i] >= 0) & (k[:, i] < self.shape[i])
                    k[:, i] = np.clip(k[:, i], 0, self.shape[i] - 1)
                    pos[:, i] = a[k[:, i]]
            d_corner = self.dist[tuple(k.T)]
            x = p.copy()
            for i in range(n):
                if self.periodic[i] is not None:
                    x[:, i] = self.axes[i][0] + np.mod(p[:, i] - self.axes[i][0], self.periodic[i])
            delta = x - pos
            g = self.metric.components(0.5 * (x + pos))
            seg = np.sqrt(np.maximum(np.einsum("...i,...ij,...j->...", delta, g, delta), 0.0))
            best = np.where(ok, np.minimum(best, d_corner + seg), best)
        return best
