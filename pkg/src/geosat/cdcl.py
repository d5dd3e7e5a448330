"""Conflict-driven clause learning with two watched literals.

The solver is complete: it returns a verifying assignment or decides
unsatisfiability, optionally emitting a clause proof (learned clauses as
additions, reduced learned clauses as deletions, and a final empty
clause).  Branching picks the unassigned variable of highest activity
(ties toward the lowest index), polarity follows the saved phase and
starts at false.  Restarts follow a geometric schedule and the learned
clause store is halved by activity when it outgrows its cap.  Learned
clauses are shrunk by recursive self-subsumption before they are attached.

Everything is deterministic given the formula and configuration; the
configuration seed only jitters initial variable activities (seed 0 means
no jitter).

Internally a literal is an index: variable v positive -> 2v, negated ->
2v + 1, so negation is XOR 1.  `_val` holds one slot per literal index:
1 true, 0 false, 2 unassigned.  A clause is a plain list of literal
indices.  Binary clauses live in per-literal implication lists and are
never moved; longer clauses keep their two watched literals in the first
two slots, and their watch entries carry a blocker literal whose truth
lets propagation skip the clause without touching it.  Unit clauses are
enqueued at level zero and never attached.
"""

from __future__ import annotations

import time
from heapq import heapify, heappop, heappush

import numpy as np

from .cnf_io import DratProof, DratStep
from .core import Formula
from .seeds import mix64
from .solving import SAT, TIMEOUT, UNSAT, SolverConfig, SolverOutcome, SolverStats

_UNASSIGNED = 2


def _to_idx(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _to_dimacs(idx: int) -> int:
    return -(idx >> 1) if idx & 1 else (idx >> 1)


class CdclSolver:
    def __init__(self, formula: Formula, config: SolverConfig | None = None):
        self.formula = formula
        self.config = config or SolverConfig()
        n = formula.n
        self._n = n
        self._val = [_UNASSIGNED] * (2 * n + 2)
        # long-clause watcher pairs (blocker, clause) and binary implication
        # pairs (implied, clause), per watched literal
        self._watches: list[list] = [[] for _ in range(2 * n + 2)]
        self._bins: list[list] = [[] for _ in range(2 * n + 2)]
        self._reason: list = [None] * (n + 1)
        self._level = [0] * (n + 1)
        self._activity = [0.0] * (n + 1)
        self._phase = [False] * (n + 1)
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._learnts: list[list[int]] = []
        self._cla_act: dict[int, float] = {}
        self._var_inc = 1.0
        self._cla_inc = 1.0
        self._proof: list[DratStep] = []
        self.stats = SolverStats()
        if self.config.seed:
            # deterministic sub-ulp jitter so different seeds break activity ties
            for v in range(1, n + 1):
                self._activity[v] = mix64(self.config.seed + v) * 2.0 ** -64 * 1e-9
        self._heap: list[tuple[float, int]] = [(-self._activity[v], v)
                                               for v in range(1, n + 1)]
        heapify(self._heap)

    # -- assignment plumbing ------------------------------------------------

    def _enqueue(self, lit: int, reason) -> None:
        self._val[lit] = 1
        self._val[lit ^ 1] = 0
        v = lit >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(lit)

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        val = self._val
        heap = self._heap
        activity = self._activity
        phase = self._phase
        reason = self._reason
        trail = self._trail
        bound = self._trail_lim[level]
        for i in range(len(trail) - 1, bound - 1, -1):
            lit = trail[i]
            v = lit >> 1
            phase[v] = not (lit & 1)
            val[lit] = _UNASSIGNED
            val[lit ^ 1] = _UNASSIGNED
            reason[v] = None
            heappush(heap, (-activity[v], v))
        del trail[bound:]
        del self._trail_lim[level:]
        self._qhead = bound

    def _rescale_activities(self) -> None:
        scale = 1e-100
        for u in range(1, self._n + 1):
            self._activity[u] *= scale
        self._var_inc *= scale
        self._heap = [(-self._activity[u], u) for u in range(1, self._n + 1)
                      if self._val[2 * u] == _UNASSIGNED]
        heapify(self._heap)

    # -- propagation --------------------------------------------------------

    def _propagate(self):
        """Propagate all queued assignments; returns a conflicting clause or None."""
        val = self._val
        watches = self._watches
        bins = self._bins
        trail = self._trail
        level = self._level
        reason = self._reason
        cur_level = len(self._trail_lim)
        qhead = self._qhead
        props = 0
        confl = None
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            props += 1
            false_lit = p ^ 1

            for other, cl in bins[false_lit]:
                w = val[other]
                if w == 2:
                    if cl[0] != other:
                        cl[0] = other
                        cl[1] = false_lit
                    val[other] = 1
                    val[other ^ 1] = 0
                    v = other >> 1
                    level[v] = cur_level
                    reason[v] = cl
                    trail.append(other)
                elif w == 0:
                    confl = cl
                    break
            if confl is not None:
                break

            ws = watches[false_lit]
            i = j = 0
            nws = len(ws)
            while i < nws:
                entry = ws[i]
                i += 1
                if val[entry[0]] == 1:  # blocker satisfied: clause untouched
                    ws[j] = entry
                    j += 1
                    continue
                c = entry[1]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = (first, c)
                    j += 1
                    continue
                ln = len(c)
                t = 2
                while t < ln:
                    lt = c[t]
                    if val[lt] != 0:
                        c[1] = lt
                        c[t] = false_lit
                        watches[lt].append((first, c))
                        break
                    t += 1
                else:
                    ws[j] = (first, c)
                    j += 1
                    if val[first] == 0:
                        # conflict: keep the remaining watchers and stop
                        while i < nws:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        confl = c
                        break
                    val[first] = 1
                    val[first ^ 1] = 0
                    v = first >> 1
                    level[v] = cur_level
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
            if confl is not None:
                break
        self._qhead = len(trail) if confl is not None else qhead
        self.stats.propagations += props
        return confl

    # -- conflict analysis --------------------------------------------------

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        """First-UIP learning with recursive minimization; returns (clause, backjump level)."""
        n_level = len(self._trail_lim)
        seen = bytearray(self._n + 1)
        learnt: list[int] = [0]
        path = 0
        p = -1
        trail = self._trail
        level = self._level
        reason = self._reason
        cla_act = self._cla_act
        activity = self._activity
        var_inc = self._var_inc
        cla_inc = self._cla_inc
        rescale = False
        index = len(trail) - 1
        while True:
            key = id(confl)
            act = cla_act.get(key)
            if act is not None:
                cla_act[key] = act + cla_inc
            for qi in range(0 if p < 0 else 1, len(confl)):
                q = confl[qi]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    a = activity[v] + var_inc
                    activity[v] = a
                    if a > 1e100:
                        rescale = True
                    if level[v] >= n_level:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            seen[p >> 1] = 0
            path -= 1
            if path <= 0:
                break
            confl = reason[p >> 1]
        learnt[0] = p ^ 1
        if rescale:
            self._rescale_activities()

        # recursive self-subsumption: drop any literal whose negation is
        # implied, through reason clauses, by the rest of the learnt clause
        minimize_mark = bytearray(self._n + 1)
        kept = [learnt[0]]
        for q in learnt[1:]:
            if self._redundant(q, seen, minimize_mark):
                continue
            kept.append(q)
        learnt = kept

        if len(learnt) == 1:
            bt = 0
        else:
            # move a literal of the highest remaining level into the watch slot
            hi = 1
            for t in range(2, len(learnt)):
                if level[learnt[t] >> 1] > level[learnt[hi] >> 1]:
                    hi = t
            learnt[1], learnt[hi] = learnt[hi], learnt[1]
            bt = level[learnt[1] >> 1]
        return learnt, bt

    def _redundant(self, lit: int, seen: bytearray, mark: bytearray) -> bool:
        """True iff `lit` is implied by the other learnt literals via reasons.

        `mark` caches variables proven redundant during this analysis (1)
        or proven necessary (2).
        """
        reason = self._reason
        level = self._level
        if reason[lit >> 1] is None:
            return False
        stack = [lit]
        probe = []
        while stack:
            top = stack.pop()
            r = reason[top >> 1]
            for ri in range(1, len(r)):
                q = r[ri]
                v = q >> 1
                if seen[v] or level[v] == 0 or mark[v] == 1:
                    continue
                if mark[v] == 2 or reason[v] is None:
                    # necessary: undo the optimistic marks from this probe
                    for u in probe:
                        mark[u] = 2
                    mark[lit >> 1] = 2
                    return False
                mark[v] = 1  # optimistic; corrected to 2 on failure
                probe.append(v)
                stack.append(q)
        mark[lit >> 1] = 1
        return True

    # -- learned clause store -----------------------------------------------

    def _detach_long(self, c: list[int]) -> None:
        for w in (c[0], c[1]):
            wl = self._watches[w]
            for t, entry in enumerate(wl):
                if entry[1] is c:  # identity, not value: duplicates may exist
                    wl.pop(t)
                    break

    def _reduce_db(self) -> None:
        cla_act = self._cla_act
        reason = self._reason
        ranked = sorted(self._learnts, key=lambda c: cla_act[id(c)])
        cut = len(ranked) // 2
        kept = []
        for pos, c in enumerate(ranked):
            locked = reason[c[0] >> 1] is c
            if pos < cut and not locked and len(c) > 2:
                self._detach_long(c)
                del cla_act[id(c)]
                if self.config.emit_proof:
                    self._proof.append(DratStep("delete", tuple(map(_to_dimacs, c))))
            else:
                kept.append(c)
        self._learnts = kept

    def _attach(self, clause: list[int]) -> None:
        if len(clause) == 2:
            a, b = clause
            self._bins[a].append((b, clause))
            self._bins[b].append((a, clause))
        else:
            self._watches[clause[0]].append((clause[1], clause))
            self._watches[clause[1]].append((clause[0], clause))

    def _attach_learnt(self, learnt: list[int]) -> None:
        if self.config.emit_proof:
            self._proof.append(DratStep("add", tuple(map(_to_dimacs, learnt))))
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
            return
        self._attach(learnt)
        self._learnts.append(learnt)
        self._cla_act[id(learnt)] = self._cla_inc
        self._enqueue(learnt[0], learnt)

    # -- search -------------------------------------------------------------

    def _decide(self) -> bool:
        val = self._val
        heap = self._heap
        while heap:
            _, v = heappop(heap)
            if val[2 * v] == _UNASSIGNED:
                self._trail_lim.append(len(self._trail))
                lit = 2 * v if self._phase[v] else 2 * v + 1
                self._enqueue(lit, None)
                self.stats.decisions += 1
                return True
        return False

    def _finish(self, verdict: str, t0: float) -> SolverOutcome:
        proof = None
        if verdict == UNSAT and self.config.emit_proof:
            self._proof.append(DratStep("add", ()))
            proof = DratProof(self._proof)
        assignment = None
        if verdict == SAT:
            assignment = np.zeros(self._n + 1, dtype=bool)
            for v in range(1, self._n + 1):
                assignment[v] = self._val[2 * v] == 1
        return SolverOutcome(verdict, assignment=assignment, proof=proof,
                             wall_time=time.monotonic() - t0, stats=self.stats)

    def solve(self) -> SolverOutcome:
        t0 = time.monotonic()
        cfg = self.config
        # load the original clauses; duplicates are kept as given
        for row in self.formula.clause_list():
            clause = [_to_idx(l) for l in row]
            if len(clause) == 1:
                lit = clause[0]
                if self._val[lit] == 0:
                    return self._finish(UNSAT, t0)
                if self._val[lit] == _UNASSIGNED:
                    self._enqueue(lit, None)
            else:
                self._attach(clause)

        max_learnts = max(cfg.max_learnts_base, int(self.formula.m * cfg.max_learnts_frac))
        restart_limit = cfg.restart_base
        conflicts_since_restart = 0
        var_decay_mul = 1.0 / cfg.var_decay
        cla_decay_mul = 1.0 / cfg.clause_decay
        deadline = None if cfg.time_limit is None else t0 + cfg.time_limit

        if self._propagate() is not None:
            return self._finish(UNSAT, t0)

        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats.conflicts += 1
                conflicts_since_restart += 1
                if not self._trail_lim:
                    return self._finish(UNSAT, t0)
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                self._attach_learnt(learnt)
                self._var_inc *= var_decay_mul
                self._cla_inc *= cla_decay_mul
                if self._cla_inc > 1e20:
                    scale = 1e-20
                    for k in self._cla_act:
                        self._cla_act[k] *= scale
                    self._cla_inc *= scale
                if cfg.conflict_limit is not None and self.stats.conflicts >= cfg.conflict_limit:
                    return self._finish(TIMEOUT, t0)
                if deadline is not None and time.monotonic() > deadline:
                    return self._finish(TIMEOUT, t0)
                continue
            if len(self._learnts) >= max_learnts:
                self._reduce_db()
                max_learnts = int(max_learnts * cfg.max_learnts_growth)
            if conflicts_since_restart >= restart_limit:
                conflicts_since_restart = 0
                restart_limit = int(restart_limit * cfg.restart_factor)
                self._cancel_until(0)
                continue
            if not self._decide():
                return self._finish(SAT, t0)


def solve_cdcl(formula: Formula, config: SolverConfig | None = None) -> SolverOutcome:
    """Decide a formula with the clause-learning solver."""
    return CdclSolver(formula, config).solve()
