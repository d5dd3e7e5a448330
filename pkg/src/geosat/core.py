"""CNF formula model and torus geometry.

Literals use the DIMACS convention throughout: a literal is a nonzero signed
integer whose absolute value is the 1-indexed variable and whose sign is the
polarity (negative = negated).  A clause is one row of the formula's literal
array; every clause of a formula has exactly k literals over k distinct
variables.  Duplicate clauses are allowed and preserved.

Points on the d-dimensional unit torus are float arrays with coordinates in
[0, 1); distances use the per-axis circular difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class GenerationMeta:
    """Parameters an instance was generated with, for reproducibility."""

    model: str  # "uniform" or "geometric"
    seed: int
    dimension: Optional[int] = None  # geometric only

    def __post_init__(self):
        if self.model not in ("uniform", "geometric"):
            raise ValueError(f"unknown model {self.model!r}")
        if (self.dimension is not None) != (self.model == "geometric"):
            raise ValueError("dimension must be given exactly for the geometric model")


class Formula:
    """A k-SAT formula: n variables and m clauses of k literals each.

    Clauses are stored as an (m, k) int32 array of signed DIMACS literals.
    Literal order within a clause is preserved as generated.
    """

    def __init__(self, n: int, k: int, clauses, meta: Optional[GenerationMeta] = None,
                 validate: bool = True):
        self.n = int(n)
        self.k = int(k)
        arr = np.asarray(clauses, dtype=np.int32)
        if arr.size == 0:
            arr = arr.reshape(0, self.k)
        if arr.ndim != 2 or arr.shape[1] != self.k:
            raise ValueError(f"clauses must be an (m, {self.k}) array, got shape {arr.shape}")
        self.clauses = arr
        self.meta = meta
        if validate:
            self.validate()

    @property
    def m(self) -> int:
        return self.clauses.shape[0]

    def validate(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.m == 0:
            return
        if (self.clauses == 0).any():
            raise ValueError("literal 0 is not allowed")
        variables = np.abs(self.clauses)
        if variables.max() > self.n:
            raise ValueError("literal references a variable above n")
        # distinct variables within each clause
        if self.k > 1:
            srt = np.sort(variables, axis=1)
            if (srt[:, 1:] == srt[:, :-1]).any():
                raise ValueError("clause contains a repeated variable")

    def clause(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.clauses[i])

    def iter_clauses(self) -> Iterator[tuple[int, ...]]:
        for row in self.clauses.tolist():
            yield tuple(row)

    def clause_list(self) -> list[list[int]]:
        """Clauses as plain Python lists (the solvers' working representation)."""
        return self.clauses.tolist()

    def __eq__(self, other) -> bool:
        # equality is by (n, clause sequence); k is derived except for m = 0
        if not isinstance(other, Formula):
            return NotImplemented
        if self.n != other.n or self.m != other.m:
            return False
        return self.m == 0 or bool((self.clauses == other.clauses).all())

    def __repr__(self) -> str:
        model = self.meta.model if self.meta else "?"
        return f"Formula(n={self.n}, k={self.k}, m={self.m}, model={model})"


def density(formula: Formula) -> float:
    """Clause-to-variable ratio m/n."""
    if formula.n < 1:
        raise ValueError("density is undefined for n = 0")
    return formula.m / formula.n


def make_assignment(n: int, values: Sequence[bool] | dict) -> np.ndarray:
    """Build a total assignment array of length n+1 (index 0 unused).

    `values` is either a sequence of n booleans for variables 1..n or a
    dict mapping every variable in [1, n] to a boolean.
    """
    out = np.zeros(n + 1, dtype=bool)
    if isinstance(values, dict):
        if len(values) != n or any(v not in values for v in range(1, n + 1)):
            raise ValueError("assignment must cover exactly the variables 1..n")
        for v, b in values.items():
            out[v] = bool(b)
    else:
        if len(values) != n:
            raise ValueError(f"expected {n} values, got {len(values)}")
        out[1:] = np.asarray(values, dtype=bool)
    return out


def evaluate(formula, assignment: np.ndarray | Sequence[bool]) -> bool:
    """True iff every clause has at least one literal satisfied by the (total) assignment.

    Accepts a Formula or a bare iterable of clauses (tuples of signed
    literals, any lengths); the latter form exists for general CNF not
    bound to a fixed clause length.
    """
    if isinstance(formula, Formula):
        assignment = np.asarray(assignment, dtype=bool)
        if assignment.shape != (formula.n + 1,):
            raise ValueError(
                f"assignment must be total: expected length {formula.n + 1} "
                f"(index 0 unused), got {assignment.shape}")
        if formula.m == 0:
            return True
        lits = formula.clauses
        lit_true = assignment[np.abs(lits)] == (lits > 0)
        return bool(lit_true.any(axis=1).all())
    clauses = [tuple(c) for c in formula]
    values = np.asarray(assignment, dtype=bool)
    top = max((abs(l) for c in clauses for l in c), default=0)
    if len(values) < top + 1:
        raise ValueError(f"assignment must cover variables up to {top}")
    return all(any(values[abs(l)] == (l > 0) for l in clause) for clause in clauses)


# ---------------------------------------------------------------------------
# torus geometry


def circular_diff(a: float, b: float) -> float:
    """Distance between two coordinates on the unit circle: min(|a-b|, 1-|a-b|)."""
    if not (0.0 <= a < 1.0 and 0.0 <= b < 1.0):
        raise ValueError(f"coordinates must lie in [0, 1): got {a}, {b}")
    d = abs(a - b)
    return min(d, 1.0 - d)


def _check_points(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"points must be 1-d and of equal dimension: {p.shape} vs {q.shape}")
    if (p < 0).any() or (p >= 1).any() or (q < 0).any() or (q >= 1).any():
        raise ValueError("point coordinates must lie in [0, 1)")
    return p, q


def torus_distance_sq(p, q) -> float:
    """Squared toroidal Euclidean distance (same ordering as torus_distance)."""
    p, q = _check_points(p, q)
    d = np.abs(p - q)
    w = np.minimum(d, 1.0 - d)
    return float(np.sum(w * w))


def torus_distance(p, q) -> float:
    """Euclidean distance on the unit torus; at most sqrt(d)/2."""
    return float(np.sqrt(torus_distance_sq(p, q)))
