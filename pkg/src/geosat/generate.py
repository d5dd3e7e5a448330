"""Seeded generation of random uniform and geometric k-SAT instances.

Both models are deterministic functions of their parameters and seed.  The
draw order is fixed:

  uniform    for j = 0..k-1, one batch of subset draws (one per clause,
             clause order); then all m*k polarity bits in clause order.
  geometric  all n variable coordinates (axis-major: every point's axis-0
             coordinate first, then axis 1, ...), then all m clause
             coordinates the same way, then all m*k polarity bits in
             clause order.  Nearest-neighbor queries consume no randomness.

The k variables of a uniform clause are a uniform k-subset of [1, n],
sampled by a partial Fisher-Yates shuffle (exact, no rejection, valid for
k = n).  A geometric clause takes the k variables nearest to its point on
the torus, ordered by (distance, label).  Literals are negated
independently with probability 1/2 in both models.  Duplicate clauses are
kept; clauses are never deduplicated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Formula, GenerationMeta
from .seeds import SeedStream
from .spatial import build_index


@dataclass(frozen=True)
class GenParams:
    model: str  # "uniform" or "geometric"
    k: int
    n: int
    m: int
    seed: int
    dimension: Optional[int] = None  # geometric only

    def __post_init__(self):
        if self.model not in ("uniform", "geometric"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n < self.k:
            raise ValueError(f"need n >= k, got n={self.n}, k={self.k}")
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.model == "geometric":
            if self.dimension is None or self.dimension < 1:
                raise ValueError("geometric model needs dimension >= 1")
        elif self.dimension is not None:
            raise ValueError("dimension is only valid for the geometric model")

    def meta(self) -> GenerationMeta:
        return GenerationMeta(model=self.model, seed=self.seed, dimension=self.dimension)


@dataclass(frozen=True)
class Layout:
    """Torus positions of a geometric instance: one point per variable and clause."""

    variable_points: np.ndarray  # (n, d), row i-1 is variable i
    clause_points: np.ndarray    # (m, d), row i is clause i


def _fisher_yates_subsets(stream: SeedStream, n: int, k: int, m: int) -> np.ndarray:
    """m independent uniform ordered k-selections from [0, n), vectorized.

    Runs the first k steps of a Fisher-Yates shuffle of [0, n) for every
    clause at once.  The virtual array starts as the identity; the at most
    k displaced entries per clause are kept in (key, value) rows, looked up
    by most-recent write.
    """
    out = np.empty((m, k), dtype=np.int64)
    keys = np.empty((m, k), dtype=np.int64)
    vals = np.empty((m, k), dtype=np.int64)
    rows = np.arange(m)

    def lookup(pos: np.ndarray, j: int) -> np.ndarray:
        if j == 0:
            return pos.copy()
        eq = keys[:, :j] == pos[:, None]
        has = eq.any(axis=1)
        last = j - 1 - np.argmax(eq[:, ::-1][:, -j:], axis=1)
        res = pos.copy()
        res[has] = vals[rows[has], last[has]]
        return res

    for j in range(k):
        r = stream.integers(n - j, m) + j
        out[:, j] = lookup(r, j)
        vals[:, j] = lookup(np.full(m, j, dtype=np.int64), j)
        keys[:, j] = r
    return out


def _apply_polarity(variables: np.ndarray, stream: SeedStream) -> np.ndarray:
    bits = stream.bits(variables.size).reshape(variables.shape)
    return variables * (1 - 2 * bits.astype(np.int64))


def generate_uniform(params: GenParams) -> Formula:
    """Draw a uniform random k-SAT instance."""
    if params.model != "uniform":
        raise ValueError("params.model must be 'uniform'")
    stream = SeedStream(params.seed)
    variables = _fisher_yates_subsets(stream, params.n, params.k, params.m) + 1
    lits = _apply_polarity(variables, stream)
    return Formula(params.n, params.k, lits, meta=params.meta(), validate=False)


def _sample_points(stream: SeedStream, count: int, dim: int) -> np.ndarray:
    return stream.floats(count * dim).reshape(dim, count).T.copy()


def generate_geometric(params: GenParams) -> tuple[Formula, Layout]:
    """Draw a geometric random k-SAT instance; returns the formula and its layout."""
    if params.model != "geometric":
        raise ValueError("params.model must be 'geometric'")
    d = params.dimension
    stream = SeedStream(params.seed)
    var_points = _sample_points(stream, params.n, d)
    clause_points = _sample_points(stream, params.m, d)
    index = build_index(var_points, np.arange(1, params.n + 1))
    variables = np.empty((params.m, params.k), dtype=np.int64)
    for i in range(params.m):
        variables[i] = index.k_nearest(clause_points[i], params.k)
    lits = _apply_polarity(variables, stream)
    formula = Formula(params.n, params.k, lits, meta=params.meta(), validate=False)
    return formula, Layout(variable_points=var_points, clause_points=clause_points)


def generate(params: GenParams) -> Formula:
    """Generate an instance of either model, discarding any layout."""
    if params.model == "uniform":
        return generate_uniform(params)
    formula, _ = generate_geometric(params)
    return formula
