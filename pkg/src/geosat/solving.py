"""Shared solver types, unit propagation, and the exhaustive oracle.

All solvers return a `SolverOutcome`: a SAT verdict carries a verifying
total assignment, an UNSAT verdict optionally carries a clause proof, and
TIMEOUT means a conflict/time budget ran out before a decision was reached.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .cnf_io import DratProof
from .core import Formula, make_assignment

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

BRUTE_FORCE_MAX_VARS = 25


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0


@dataclass
class SolverConfig:
    """Knobs of the clause-learning solver; every constant lives here.

    The restart schedule is geometric: the first restart happens after
    `restart_base` conflicts and each interval is `restart_factor` times
    the previous one.  The learned-clause store is capped at
    `max_learnts_base` clauses (at least), growing by `max_learnts_growth`
    after each reduction; reductions drop the less active half.
    """

    seed: int = 0
    emit_proof: bool = False
    conflict_limit: Optional[int] = None
    time_limit: Optional[float] = None  # seconds
    restart_base: int = 100
    restart_factor: float = 1.5
    var_decay: float = 0.95
    clause_decay: float = 0.999
    max_learnts_base: int = 3000
    max_learnts_frac: float = 0.33  # of the original clause count, if larger
    max_learnts_growth: float = 1.02

    def __post_init__(self):
        if self.conflict_limit is not None and self.conflict_limit < 0:
            raise ValueError("conflict_limit must be nonnegative")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be nonnegative")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class SolverOutcome:
    verdict: str
    assignment: Optional[np.ndarray] = None  # total, index 0 unused (SAT only)
    proof: Optional[DratProof] = None        # UNSAT with proof emission only
    wall_time: float = 0.0
    stats: SolverStats = field(default_factory=SolverStats)


@dataclass
class PropagationResult:
    assignment: dict[int, bool]
    conflict: bool


def unit_propagate(clauses: Iterable[Sequence[int]],
                   assignment: Optional[dict[int, bool]] = None) -> PropagationResult:
    """Propagate unit clauses to fixpoint over a partial assignment.

    Scans the clauses in order, asserting the literal of any clause whose
    other literals are all false, until a full pass changes nothing; a
    clause with every literal false means a conflict.  The input assignment
    is not modified.
    """
    assign = dict(assignment) if assignment else {}
    clause_list = [tuple(c) for c in clauses]
    changed = True
    while changed:
        changed = False
        for clause in clause_list:
            unassigned = 0
            last = 0
            satisfied = False
            for lit in clause:
                val = assign.get(abs(lit))
                if val is None:
                    unassigned += 1
                    last = lit
                elif (lit > 0) == val:
                    satisfied = True
                    break
            if satisfied:
                continue
            if unassigned == 0:
                return PropagationResult(assign, conflict=True)
            if unassigned == 1:
                assign[abs(last)] = last > 0
                changed = True
    return PropagationResult(assign, conflict=False)


def brute_force_solve(formula) -> SolverOutcome:
    """Enumerate all 2^n assignments in lexicographic order (x1 most significant).

    Returns the first satisfying assignment, or UNSAT.  Accepts a Formula
    or a bare iterable of clauses (n inferred from the largest variable).
    Refuses n above BRUTE_FORCE_MAX_VARS; this is a test oracle, not a
    solver.
    """
    if isinstance(formula, Formula):
        n = formula.n
        rows = [tuple(r) for r in formula.iter_clauses()]
    else:
        rows = [tuple(c) for c in formula]
        n = max((abs(l) for c in rows for l in c), default=0)
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_VARS}")
    t0 = time.monotonic()
    if not rows:
        return SolverOutcome(SAT, assignment=make_assignment(n, [False] * n),
                             wall_time=time.monotonic() - t0)
    per_clause = [((n - np.abs(np.array(row, dtype=np.int64))).astype(np.uint64),
                   np.array(row, dtype=np.int64) > 0)
                  for row in rows]
    total = 1 << n
    chunk = 1 << 16
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        ok = np.ones(len(codes), dtype=bool)
        for shifts, want in per_clause:
            bits = (codes[:, None] >> shifts) & np.uint64(1)
            ok &= (bits.astype(bool) == want).any(axis=1)
            if not ok.any():
                break
        if ok.any():
            code = int(codes[int(np.argmax(ok))])
            values = [bool((code >> (n - v)) & 1) for v in range(1, n + 1)]
            return SolverOutcome(SAT, assignment=make_assignment(n, values),
                                 wall_time=time.monotonic() - t0)
    return SolverOutcome(UNSAT, wall_time=time.monotonic() - t0)
