"""Clause-proof checking by reverse unit propagation, and proof-size metrics.

An addition step C is accepted iff asserting the negation of every literal
of C triggers a unit-propagation conflict over the current working set (C
has the RUP property); C then joins the working set.  A deletion removes
one clause with the same literal multiset.  A proof is valid iff every
addition is accepted and a refutation is reached: either an accepted empty
clause, or unit propagation alone conflicting on the working set (for a
zero-step proof this means the formula itself propagates to a conflict).
Steps after the first refutation are not examined.

Two checkers share these semantics.  ``check_rup_proof`` keeps a
propagation-saturated root trail with watched literals, so each step costs
about as much as the propagation it causes; ``check_rup_proof_reference``
literally reruns `unit_propagate` over the whole working set per step and
serves as the independent cross-check for the fast engine.  As in standard
forward checking, deleting a clause never retracts propagations already
made at the root (the two engines can differ only on proofs that delete a
clause while it is forcing a root literal, which well-formed proofs
do not).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cnf_io import DratProof
from .core import Formula
from .solving import unit_propagate

NOT_RUP = "not-RUP"
NO_REFUTATION = "no-refutation"
MALFORMED_DELETE = "malformed-delete"


@dataclass(frozen=True)
class ProofMetrics:
    total_clauses: int
    additions: int
    deletions: int
    total_literals: int
    literals_in_additions: int
    literals_in_deletions: int
    max_clause_length: int


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    failing_step: Optional[int] = None
    reason: Optional[str] = None


def compute_proof_metrics(proof: DratProof) -> ProofMetrics:
    """Count steps and literals; the empty clause contributes length 0."""
    additions = deletions = 0
    lits_add = lits_del = 0
    max_len = 0
    for step in proof.steps:
        length = len(step.literals)
        max_len = max(max_len, length)
        if step.kind == "add":
            additions += 1
            lits_add += length
        else:
            deletions += 1
            lits_del += length
    return ProofMetrics(
        total_clauses=additions + deletions,
        additions=additions,
        deletions=deletions,
        total_literals=lits_add + lits_del,
        literals_in_additions=lits_add,
        literals_in_deletions=lits_del,
        max_clause_length=max_len,
    )


class _RupEngine:
    """Incremental unit propagation over a mutable clause set.

    Maintains a root trail saturated under unit propagation.  RUP checks
    assert assumptions on top of the root and are undone afterwards; root
    assignments are permanent.
    """

    def __init__(self, n: int):
        self._n = n
        self._val = [2] * (2 * n + 2)  # 1 true, 0 false, 2 unassigned
        self._watches: list[list[list[int]]] = [[] for _ in range(2 * n + 2)]
        self._trail: list[int] = []
        self._qhead = 0
        self.root_conflict = False

    @staticmethod
    def _to_idx(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _propagate(self) -> bool:
        """Propagate queued literals; True means conflict."""
        val = self._val
        watches = self._watches
        trail = self._trail
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            nws = len(ws)
            while i < nws:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                moved = False
                for t in range(2, len(c)):
                    lt = c[t]
                    if val[lt] != 0:
                        c[1] = lt
                        c[t] = false_lit
                        watches[lt].append(c)
                        moved = True
                        break
                if moved:
                    continue
                ws[j] = c
                j += 1
                if val[first] == 0:
                    while i < nws:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self._qhead = len(trail)
                    return True
                val[first] = 1
                val[first ^ 1] = 0
                trail.append(first)
            del ws[j:]
        return False

    def assert_root(self, lit_idx: int) -> None:
        """Permanently assert a literal at the root and propagate."""
        if self.root_conflict:
            return
        if self._val[lit_idx] == 0:
            self.root_conflict = True
            return
        if self._val[lit_idx] == 2:
            self._val[lit_idx] = 1
            self._val[lit_idx ^ 1] = 0
            self._trail.append(lit_idx)
            if self._propagate():
                self.root_conflict = True

    def attach(self, lits: list[int]) -> Optional[list[int]]:
        """Add a clause (DIMACS literals) to the propagation structures.

        Returns the internal clause object when it was watch-attached, so
        the caller can detach it on deletion.  Clauses that are unit or
        satisfied-by-unit at the root only contribute their propagation.
        """
        if self.root_conflict:
            return None
        idxs = [self._to_idx(l) for l in lits]
        val = self._val
        nonfalse = [x for x in idxs if val[x] != 0]
        if not nonfalse:
            # all literals false under the saturated root: immediate conflict
            self.root_conflict = True
            return None
        if len(nonfalse) == 1:
            self.assert_root(nonfalse[0])
            return None
        # watch two literals that are not false at the root
        clause = nonfalse + [x for x in idxs if val[x] == 0]
        self._watches[clause[0]].append(clause)
        self._watches[clause[1]].append(clause)
        return clause

    def detach(self, clause: list[int]) -> None:
        for w in (clause[0], clause[1]):
            wl = self._watches[w]
            for t, entry in enumerate(wl):
                if entry is clause:
                    wl.pop(t)
                    break

    def is_rup(self, lits: list[int]) -> bool:
        """True iff asserting the negation of every literal conflicts under UP."""
        if self.root_conflict:
            return True
        val = self._val
        trail = self._trail
        save = len(trail)
        conflict = False
        for l in lits:
            neg = self._to_idx(-l)
            w = val[neg]
            if w == 0:
                conflict = True  # the literal itself is true at the root
                break
            if w == 2:
                val[neg] = 1
                val[neg ^ 1] = 0
                trail.append(neg)
        if not conflict:
            conflict = self._propagate()
        for i in range(len(trail) - 1, save - 1, -1):
            lit = trail[i]
            val[lit] = 2
            val[lit ^ 1] = 2
        del trail[save:]
        self._qhead = save
        return conflict


def check_rup_proof(formula: Formula, proof: DratProof,
                    lenient: bool = False) -> CheckReport:
    """Check a clause proof against a formula with the incremental engine.

    With ``lenient`` set, deleting a clause that is not present is skipped
    instead of failing the proof (useful for externally produced proofs).
    """
    top = formula.n
    for step in proof.steps:
        for l in step.literals:
            if abs(l) > top:
                top = abs(l)
    engine = _RupEngine(top)
    db: dict[tuple[int, ...], list] = {}

    def key(lits) -> tuple[int, ...]:
        return tuple(sorted(lits))

    for row in formula.iter_clauses():
        handle = engine.attach(list(row))
        db.setdefault(key(row), []).append((row, handle))

    for i, step in enumerate(proof.steps):
        if engine.root_conflict:
            return CheckReport(valid=True)
        lits = list(step.literals)
        if step.kind == "add":
            if not engine.is_rup(lits):
                return CheckReport(valid=False, failing_step=i, reason=NOT_RUP)
            if not lits:
                return CheckReport(valid=True)
            handle = engine.attach(lits)
            db.setdefault(key(lits), []).append((tuple(lits), handle))
        else:
            entries = db.get(key(lits))
            if not entries:
                if lenient:
                    continue
                return CheckReport(valid=False, failing_step=i, reason=MALFORMED_DELETE)
            _, handle = entries.pop()
            if handle is not None:
                engine.detach(handle)
    if engine.root_conflict:
        return CheckReport(valid=True)
    return CheckReport(valid=False, failing_step=None, reason=NO_REFUTATION)


def check_rup_proof_reference(formula: Formula, proof: DratProof,
                              lenient: bool = False) -> CheckReport:
    """Same acceptance semantics, built directly on `unit_propagate`.

    Quadratic in proof size; this is the slow cross-check used to validate
    the incremental engine, not the production path.
    """
    working: list[tuple[int, ...]] = [tuple(row) for row in formula.iter_clauses()]

    def refutes(assumed: dict[int, bool]) -> bool:
        return unit_propagate(working, assumed).conflict

    def negated(lits) -> Optional[dict[int, bool]]:
        assumed: dict[int, bool] = {}
        for l in lits:
            want = l < 0  # negation of the literal
            if assumed.get(abs(l), want) != want:
                return None  # tautological clause: trivially RUP
            assumed[abs(l)] = want
        return assumed

    for i, step in enumerate(proof.steps):
        if refutes({}):
            return CheckReport(valid=True)
        lits = tuple(step.literals)
        if step.kind == "add":
            assumed = negated(lits)
            if assumed is not None and not refutes(assumed):
                return CheckReport(valid=False, failing_step=i, reason=NOT_RUP)
            if not lits:
                return CheckReport(valid=True)
            working.append(lits)
        else:
            target = tuple(sorted(lits))
            for pos in range(len(working) - 1, -1, -1):
                if tuple(sorted(working[pos])) == target:
                    working.pop(pos)
                    break
            else:
                if lenient:
                    continue
                return CheckReport(valid=False, failing_step=i, reason=MALFORMED_DELETE)
    if refutes({}):
        return CheckReport(valid=True)
    return CheckReport(valid=False, failing_step=None, reason=NO_REFUTATION)
