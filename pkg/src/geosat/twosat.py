"""Linear-time 2-SAT decision via the implication graph.

Each clause (a or b) contributes the implications not-a -> b and
not-b -> a.  The formula is unsatisfiable exactly when some variable and
its negation share a strongly connected component; otherwise a satisfying
assignment sets x true iff x's component comes after not-x's in a
topological order of the condensation.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import Formula
from .solving import SAT, UNSAT, SolverOutcome


def solve_2sat(formula: Formula) -> SolverOutcome:
    if formula.k != 2:
        raise ValueError(f"2-SAT solver requires k = 2, got k = {formula.k}")
    t0 = time.monotonic()
    n = formula.n
    if formula.m == 0:
        assignment = np.zeros(n + 1, dtype=bool)
        return SolverOutcome(SAT, assignment=assignment, wall_time=time.monotonic() - t0)

    lits = formula.clauses.astype(np.int64)

    def node(col: np.ndarray) -> np.ndarray:
        # positive literal of v -> 2(v-1), negative -> 2(v-1)+1
        return 2 * (np.abs(col) - 1) + (col < 0)

    a, b = lits[:, 0], lits[:, 1]
    src = np.concatenate([node(-a), node(-b)])
    dst = np.concatenate([node(b), node(a)])
    nn = 2 * n
    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(nn, nn))
    _, labels = connected_components(graph, directed=True, connection="strong")

    comp_pos = labels[0::2]
    comp_neg = labels[1::2]
    if (comp_pos == comp_neg).any():
        return SolverOutcome(UNSAT, wall_time=time.monotonic() - t0)

    # topological order of the condensation (component labels carry no order
    # guarantee), then the standard later-component-wins rule
    cs, cd = labels[src], labels[dst]
    keep = cs != cd
    cond = csr_matrix((np.ones(keep.sum(), dtype=np.int8), (cs[keep], cd[keep])),
                      shape=(labels.max() + 1,) * 2)
    cond.sum_duplicates()
    indeg = np.asarray((cond > 0).sum(axis=0)).ravel()
    indptr, indices = cond.indptr, cond.indices.tolist()
    order = np.empty(len(indeg), dtype=np.int64)
    pos = 0
    stack = np.flatnonzero(indeg == 0).tolist()
    indeg = indeg.tolist()
    while stack:
        c = stack.pop()
        order[pos] = c
        pos += 1
        for nb in indices[indptr[c]:indptr[c + 1]]:
            indeg[nb] -= 1
            if indeg[nb] == 0:
                stack.append(nb)
    topo_rank = np.empty_like(order)
    topo_rank[order] = np.arange(len(order))

    assignment = np.zeros(n + 1, dtype=bool)
    assignment[1:] = topo_rank[comp_pos] > topo_rank[comp_neg]
    return SolverOutcome(SAT, assignment=assignment, wall_time=time.monotonic() - t0)
