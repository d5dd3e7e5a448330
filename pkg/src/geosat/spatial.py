"""Exact k-nearest-neighbor search on the unit torus.

Two interchangeable backends answer queries over a static set of labeled
points: a k-d tree whose pruning bound uses per-axis circular distances to
the subtree bounding interval (an axis contributes nothing while the query
lies inside the subtree's interval on it), and a vectorized linear scan.
Results are identical across backends and against `brute_force_k_nearest`:
exactly k labels ordered by (distance, label), ties at the cut resolved
toward the smaller label.

K-d trees degenerate in high dimension, so the "auto" policy switches to
the linear scan from D_FALLBACK dimensions up.
"""

from __future__ import annotations

import heapq

import numpy as np

D_FALLBACK = 16
_LEAF_SIZE = 24


def _validate_points(points, labels):
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("need a nonempty (n, d) point array")
    if (points < 0).any() or (points >= 1).any():
        raise ValueError("coordinates must lie in [0, 1)")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (points.shape[0],):
        raise ValueError("labels must be one per point")
    if len(np.unique(labels)) != len(labels):
        raise ValueError("labels must be distinct")
    return points, labels


def _validate_query(query, dim, k, n):
    query = np.ascontiguousarray(query, dtype=np.float64)
    if query.shape != (dim,):
        raise ValueError(f"query must have dimension {dim}, got shape {query.shape}")
    if (query < 0).any() or (query >= 1).any():
        raise ValueError("query coordinates must lie in [0, 1)")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return query


def brute_force_k_nearest(points, labels, query, k: int) -> list[int]:
    """Reference semantics: all distances, sorted by (distance, label), first k."""
    points, labels = _validate_points(points, labels)
    query = _validate_query(query, points.shape[1], k, len(labels))
    diff = np.abs(points - query)
    wrapped = np.minimum(diff, 1.0 - diff)
    d2 = (wrapped * wrapped).sum(axis=1)
    ranked = sorted(zip(d2.tolist(), labels.tolist()))
    return [label for _, label in ranked[:k]]


class LinearScanIndex:
    """Full-scan backend; the right choice in high dimension."""

    backend = "linear-scan"

    def __init__(self, points, labels):
        self.points, self.labels = _validate_points(points, labels)
        self.dimension = self.points.shape[1]

    def __len__(self):
        return len(self.labels)

    def k_nearest(self, query, k: int) -> list[int]:
        query = _validate_query(query, self.dimension, k, len(self.labels))
        diff = np.abs(self.points - query)
        wrapped = np.minimum(diff, 1.0 - diff)
        d2 = (wrapped * wrapped).sum(axis=1)
        order = np.lexsort((self.labels, d2))
        return self.labels[order[:k]].tolist()


class KdTreeIndex:
    """K-d tree over torus points; exact under the circular metric.

    Nodes split at the median along the axis of widest extent.  Each node
    stores its children's coordinate intervals on the split axis, and the
    query maintains per-axis gaps to the current subtree incrementally, so
    visiting a node costs O(1) rather than O(d).
    """

    backend = "kd-tree"

    def __init__(self, points, labels):
        self.points, self.labels = _validate_points(points, labels)
        self.dimension = self.points.shape[1]
        # parallel node arrays; leaves carry point/label blocks instead of children
        self._axis: list[int] = []
        self._kids: list[tuple[int, int]] = []
        self._ivals: list[tuple[float, float, float, float]] = []
        self._leaf_pts: list = []
        self._leaf_labels: list = []
        self._build(np.arange(len(self.labels)))

    def __len__(self):
        return len(self.labels)

    def _new_node(self):
        self._axis.append(-1)
        self._kids.append((-1, -1))
        self._ivals.append((0.0, 0.0, 0.0, 0.0))
        self._leaf_pts.append(None)
        self._leaf_labels.append(None)
        return len(self._axis) - 1

    def _build(self, idx) -> int:
        node = self._new_node()
        if len(idx) <= _LEAF_SIZE:
            self._leaf_pts[node] = np.ascontiguousarray(self.points[idx])
            self._leaf_labels[node] = self.labels[idx].copy()
            return node
        sub = self.points[idx]
        axis = int(np.argmax(sub.max(axis=0) - sub.min(axis=0)))
        coords = sub[:, axis]
        mid = len(idx) // 2
        part = np.argpartition(coords, mid)
        left_idx, right_idx = idx[part[:mid]], idx[part[mid:]]
        lvals = self.points[left_idx, axis]
        rvals = self.points[right_idx, axis]
        self._axis[node] = axis
        self._ivals[node] = (float(lvals.min()), float(lvals.max()),
                             float(rvals.min()), float(rvals.max()))
        left = self._build(left_idx)
        right = self._build(right_idx)
        self._kids[node] = (left, right)
        return node

    @staticmethod
    def _gap(q: float, lo: float, hi: float) -> float:
        """Circular distance from coordinate q to the interval [lo, hi]."""
        if lo <= q <= hi:
            return 0.0
        dlo = abs(q - lo)
        dhi = abs(q - hi)
        return min(dlo, 1.0 - dlo, dhi, 1.0 - dhi)

    def k_nearest(self, query, k: int) -> list[int]:
        query = _validate_query(query, self.dimension, k, len(self.labels))
        # heap of (-d2, -label): the root is the current worst of the k best
        heap: list[tuple[float, int]] = []
        self._search(0, 0.0, [0.0] * self.dimension, query, query.tolist(), k, heap)
        best = sorted((-d2, -lbl) for d2, lbl in heap)
        return [lbl for _, lbl in best]

    def _search(self, node, bound2, gaps, q, qlist, k, heap):
        if len(heap) == k and bound2 > -heap[0][0]:
            return
        axis = self._axis[node]
        if axis < 0:
            pts = self._leaf_pts[node]
            diff = np.abs(pts - q)
            wrapped = np.minimum(diff, 1.0 - diff)
            d2s = (wrapped * wrapped).sum(axis=1)
            for d2, lbl in zip(d2s.tolist(), self._leaf_labels[node].tolist()):
                if len(heap) < k:
                    heapq.heappush(heap, (-d2, -lbl))
                else:
                    worst_d2, worst_lbl = heap[0]
                    if d2 < -worst_d2 or (d2 == -worst_d2 and lbl < -worst_lbl):
                        heapq.heapreplace(heap, (-d2, -lbl))
            return
        qa = qlist[axis]
        l_lo, l_hi, r_lo, r_hi = self._ivals[node]
        g_old = gaps[axis]
        g_left = self._gap(qa, l_lo, l_hi)
        g_right = self._gap(qa, r_lo, r_hi)
        left, right = self._kids[node]
        if g_left <= g_right:
            order = ((left, g_left), (right, g_right))
        else:
            order = ((right, g_right), (left, g_left))
        base = bound2 - g_old * g_old
        for child, g in order:
            gaps[axis] = g
            self._search(child, base + g * g, gaps, q, qlist, k, heap)
        gaps[axis] = g_old


def build_index(points, labels, policy: str = "auto"):
    """Build a spatial index; `policy` is "auto", "kd" or "linear"."""
    points = np.asarray(points, dtype=np.float64)
    if policy == "auto":
        policy = "kd" if points.ndim == 2 and points.shape[1] < D_FALLBACK else "linear"
    if policy == "kd":
        return KdTreeIndex(points, labels)
    if policy == "linear":
        return LinearScanIndex(points, labels)
    raise ValueError(f"unknown backend policy {policy!r}")
