"""Parameter-grid experiment harness: generate, solve, verify, record.

A grid spans clause lengths, variable counts, densities (or clause counts),
and dimensions, where dimension None stands for the uniform model.  Every
(cell, instance index) pair derives its own seed from the master seed, so
the produced record sequence is a deterministic function of the grid alone:
worker count and scheduling never change anything but wall times.

Records serialize to CSV with a fixed column set (see RECORD_COLUMNS);
durations are written with 6 decimal places, empty fields mean "not
applicable" (no dimension for uniform records, no proof columns without a
proof).
"""

from __future__ import annotations

import csv
import logging
import math
import os
import subprocess
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cnf_io import read_drat_file, write_dimacs_file
from .core import density as formula_density
from .generate import GenParams, generate
from .proofs import ProofMetrics, check_rup_proof, compute_proof_metrics
from .seeds import derive_instance_seed
from .solving import SAT, TIMEOUT, UNSAT, SolverConfig
from .cdcl import solve_cdcl
from .twosat import solve_2sat

log = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "model", "k", "n", "m", "density", "dimension", "instance_seed",
    "solver_id", "verdict", "wall_time_s",
    "proof_total_clauses", "proof_additions", "proof_deletions",
    "proof_total_literals", "proof_literals_additions",
    "proof_literals_deletions", "proof_max_clause_length", "proof_checked",
]

UNIFORM_DIMENSION = None  # the distinguished pseudo-dimension


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class GridCell:
    index: int
    k: int
    n: int
    m: int
    dimension: Optional[int]

    @property
    def model(self) -> str:
        return "uniform" if self.dimension is None else "geometric"


@dataclass(frozen=True)
class ExperimentGrid:
    ks: Sequence[int]
    ns: Sequence[int]
    densities: Optional[Sequence[float]] = None
    ms: Optional[Sequence[int]] = None
    dimensions: Sequence[Optional[int]] = (UNIFORM_DIMENSION,)
    instances_per_cell: int = 1
    master_seed: int = 0
    solver: str = "cdcl"  # "cdcl", "twosat", or "external"
    external_command: Optional[Sequence[str]] = None
    timeout: Optional[float] = 60.0
    emit_proof: bool = False

    def __post_init__(self):
        if (self.densities is None) == (self.ms is None):
            raise ValueError("give exactly one of densities or ms")
        if not self.ks or not self.ns or not self.dimensions:
            raise ValueError("ks, ns, and dimensions must be nonempty")
        if self.instances_per_cell < 1:
            raise ValueError("instances_per_cell must be at least 1")
        if self.solver not in ("cdcl", "twosat", "external"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.solver == "twosat" and any(k != 2 for k in self.ks):
            raise ValueError("the 2-SAT solver requires k = 2 everywhere")
        if self.solver == "external" and not self.external_command:
            raise ValueError("external solver needs external_command")

    def cells(self) -> list[GridCell]:
        out = []
        index = 0
        for k in self.ks:
            for n in self.ns:
                sizes = (self.ms if self.ms is not None
                         else [round_half_up(d * n) for d in self.densities])
                for m in sizes:
                    for dim in self.dimensions:
                        out.append(GridCell(index, k, n, m, dim))
                        index += 1
        return out


@dataclass
class RunRecord:
    model: str
    k: int
    n: int
    m: int
    density: float
    dimension: Optional[int]
    instance_seed: int
    solver_id: str
    verdict: str
    wall_time: float
    proof_metrics: Optional[ProofMetrics] = None
    proof_checked: Optional[bool] = None
    failure_reason: Optional[str] = field(default=None, compare=False)  # not serialized


def _solve_record(cell: GridCell, instance_seed: int, grid: ExperimentGrid) -> RunRecord:
    params = GenParams(model=cell.model, k=cell.k, n=cell.n, m=cell.m,
                       seed=instance_seed, dimension=cell.dimension)
    formula = generate(params)
    record = RunRecord(
        model=cell.model, k=cell.k, n=cell.n, m=cell.m,
        density=formula_density(formula), dimension=cell.dimension,
        instance_seed=instance_seed, solver_id=grid.solver,
        verdict=TIMEOUT, wall_time=0.0,
    )
    if grid.solver == "cdcl":
        config = SolverConfig(emit_proof=grid.emit_proof, time_limit=grid.timeout)
        outcome = solve_cdcl(formula, config)
        record.verdict = outcome.verdict
        record.wall_time = outcome.wall_time
        if outcome.verdict == UNSAT and outcome.proof is not None:
            record.proof_metrics = compute_proof_metrics(outcome.proof)
            record.proof_checked = check_rup_proof(formula, outcome.proof).valid
    elif grid.solver == "twosat":
        outcome = solve_2sat(formula)
        record.verdict = outcome.verdict
        record.wall_time = outcome.wall_time
    else:
        with tempfile.TemporaryDirectory(prefix="geosat-bench-") as tmp:
            cnf_path = os.path.join(tmp, "instance.cnf")
            proof_path = os.path.join(tmp, "proof.drat") if grid.emit_proof else None
            write_dimacs_file(formula, cnf_path)
            fragment = run_external_solver(
                grid.external_command[0], cnf_path, proof_path,
                grid.timeout, extra_args=list(grid.external_command[1:]))
            record.verdict = fragment.verdict
            record.wall_time = fragment.wall_time
            record.solver_id = fragment.solver_id
            record.failure_reason = fragment.failure_reason
            if fragment.proof is not None:
                record.proof_metrics = compute_proof_metrics(fragment.proof)
                record.proof_checked = check_rup_proof(
                    formula, fragment.proof, lenient=True).valid
    return record


@dataclass
class ExternalResult:
    verdict: str
    wall_time: float
    solver_id: str
    proof: Optional[object] = None
    failure_reason: Optional[str] = None


def run_external_solver(executable, instance_file, proof_file=None,
                        timeout: Optional[float] = None,
                        extra_args: Optional[Sequence[str]] = None) -> ExternalResult:
    """Run a SAT-competition-style solver process on a DIMACS file.

    Exit code 10 or an `s SATISFIABLE` line means SAT, 20 or
    `s UNSATISFIABLE` means UNSAT; the process is killed at the timeout.
    When a proof path is given it is passed as the trailing argument and
    parsed afterwards if the solver wrote it.  Crashes and unparseable
    output yield a TIMEOUT-like failure with a reason.
    """
    solver_id = f"external:{os.path.basename(str(executable))}"
    argv = [str(executable)]
    argv += [str(a) for a in (extra_args or [])]
    argv.append(str(instance_file))
    if proof_file is not None:
        argv.append(str(proof_file))
    start = time.monotonic()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return ExternalResult(TIMEOUT, time.monotonic() - start, solver_id)
    except OSError as exc:
        return ExternalResult(TIMEOUT, time.monotonic() - start, solver_id,
                              failure_reason=f"failed to run solver: {exc}")
    wall = time.monotonic() - start
    verdict = None
    if proc.returncode == 10 or "s SATISFIABLE" in proc.stdout:
        verdict = SAT
    elif proc.returncode == 20 or "s UNSATISFIABLE" in proc.stdout:
        verdict = UNSAT
    if verdict is None:
        return ExternalResult(TIMEOUT, wall, solver_id,
                              failure_reason=f"unrecognized solver output "
                                             f"(exit code {proc.returncode})")
    proof = None
    if (verdict == UNSAT and proof_file is not None
            and os.path.exists(proof_file) and os.path.getsize(proof_file) > 0):
        proof = read_drat_file(proof_file)
    return ExternalResult(verdict, wall, solver_id, proof=proof)


def _run_task(args) -> RunRecord:
    grid, cell, seed = args
    return _solve_record(cell, seed, grid)


def run_experiment(grid: ExperimentGrid, workers: int = 1) -> list[RunRecord]:
    """Run every (cell, instance) of the grid; records ordered by (cell, index).

    Cells with unsatisfiable generation parameters (k > n) are skipped with
    a logged warning; the remaining cells still run.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    tasks = []
    for cell in grid.cells():
        if cell.k > cell.n:
            log.warning("skipping cell %s: k=%d exceeds n=%d", cell.index, cell.k, cell.n)
            continue
        for j in range(grid.instances_per_cell):
            seed = derive_instance_seed(
                grid.master_seed, cell.index * grid.instances_per_cell + j)
            tasks.append((grid, cell, seed))
    if workers == 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))


# ---------------------------------------------------------------------------
# record persistence


def _format_record(r: RunRecord) -> list[str]:
    pm = r.proof_metrics
    return [
        r.model, str(r.k), str(r.n), str(r.m), repr(r.density),
        "" if r.dimension is None else str(r.dimension),
        str(r.instance_seed), r.solver_id, r.verdict, f"{r.wall_time:.6f}",
        "" if pm is None else str(pm.total_clauses),
        "" if pm is None else str(pm.additions),
        "" if pm is None else str(pm.deletions),
        "" if pm is None else str(pm.total_literals),
        "" if pm is None else str(pm.literals_in_additions),
        "" if pm is None else str(pm.literals_in_deletions),
        "" if pm is None else str(pm.max_clause_length),
        "" if r.proof_checked is None else ("true" if r.proof_checked else "false"),
    ]


def persist_records(records: Sequence[RunRecord], sink) -> None:
    """Write records as CSV (UTF-8, LF, mandatory header)."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        writer.writerow(_format_record(r))


def load_records(source) -> list[RunRecord]:
    """Read records back from CSV; raises ValueError with the offending row."""
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty records file: missing header") from None
    if header != RECORD_COLUMNS:
        raise ValueError(f"unexpected header {header!r}")
    records = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RECORD_COLUMNS):
            raise ValueError(f"row {rownum}: expected {len(RECORD_COLUMNS)} fields, "
                             f"got {len(row)}")
        try:
            pm = None
            if row[10]:
                pm = ProofMetrics(
                    total_clauses=int(row[10]), additions=int(row[11]),
                    deletions=int(row[12]), total_literals=int(row[13]),
                    literals_in_additions=int(row[14]),
                    literals_in_deletions=int(row[15]),
                    max_clause_length=int(row[16]))
            records.append(RunRecord(
                model=row[0], k=int(row[1]), n=int(row[2]), m=int(row[3]),
                density=float(row[4]),
                dimension=int(row[5]) if row[5] else None,
                instance_seed=int(row[6]), solver_id=row[7], verdict=row[8],
                wall_time=float(row[9]), proof_metrics=pm,
                proof_checked=(row[17] == "true") if row[17] else None,
            ))
        except (ValueError, IndexError) as exc:
            raise ValueError(f"row {rownum}: {exc}") from None
    return records


def persist_records_file(records: Sequence[RunRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        persist_records(records, fp)


def load_records_file(path) -> list[RunRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fp:
        return load_records(fp)
