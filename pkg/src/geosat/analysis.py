"""Aggregation of run records: satisfiability ratios, critical densities,
and density-by-dimension matrices.

Records are grouped by (model, k, n, dimension); the uniform model is the
distinguished dimension None and sorts after every integer dimension.
Timed-out records never enter ratios or means; they are reported as
separate coverage counts.  All functions are order-independent in their
record input.
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

from .bench import RunRecord
from .solving import SAT, TIMEOUT, UNSAT

MATRIX_METRICS = ("sat_ratio", "mean_wall_time", "mean_proof_clauses",
                  "mean_max_proof_len")


@dataclass(frozen=True, order=True)
class GroupKey:
    model: str
    k: int
    n: int
    dimension: Optional[int] = None

    def __post_init__(self):
        if (self.dimension is None) != (self.model == "uniform"):
            raise ValueError("dimension must be None exactly for the uniform model")


def group_of(record: RunRecord) -> GroupKey:
    return GroupKey(record.model, record.k, record.n, record.dimension)


def group_records(records: Sequence[RunRecord]) -> dict[GroupKey, list[RunRecord]]:
    grouped: dict[GroupKey, list[RunRecord]] = defaultdict(list)
    for r in records:
        grouped[group_of(r)].append(r)
    return dict(grouped)


def satisfiable_ratio(records: Sequence[RunRecord],
                      group: GroupKey) -> dict[float, float]:
    """Per-density fraction of satisfiable instances among decided ones.

    Timeouts are excluded; a density where nothing was decided is omitted.
    An empty group is an error.
    """
    counts = coverage(records, group)
    ratios = {}
    for dens, (n_sat, n_unsat, _) in counts.items():
        if n_sat + n_unsat > 0:
            ratios[dens] = n_sat / (n_sat + n_unsat)
    return ratios


def coverage(records: Sequence[RunRecord],
             group: GroupKey) -> dict[float, tuple[int, int, int]]:
    """Per-density (sat, unsat, timeout) counts for one group."""
    counts: dict[float, list[int]] = {}
    for r in records:
        if group_of(r) != group:
            continue
        slot = counts.setdefault(r.density, [0, 0, 0])
        if r.verdict == SAT:
            slot[0] += 1
        elif r.verdict == UNSAT:
            slot[1] += 1
        elif r.verdict == TIMEOUT:
            slot[2] += 1
        else:
            raise ValueError(f"unexpected verdict {r.verdict!r}")
    if not counts:
        raise ValueError(f"no records for group {group}")
    return {d: tuple(c) for d, c in sorted(counts.items())}


@dataclass(frozen=True)
class ThresholdEstimate:
    critical_density: float
    ratio_at_estimate: float
    group: Optional[GroupKey] = None
    sample_sizes: Optional[dict[float, int]] = None


def estimate_critical_density(ratios: dict[float, float],
                              group: Optional[GroupKey] = None,
                              sample_sizes: Optional[dict[float, int]] = None,
                              ) -> ThresholdEstimate:
    """The grid density whose satisfiable ratio is closest to 1/2.

    Ties go to the lowest density.  Needs at least two densities to mean
    anything; fewer is an error.
    """
    if len(ratios) < 2:
        raise ValueError("need ratios for at least two densities")
    best = min(sorted(ratios), key=lambda d: (abs(ratios[d] - 0.5), d))
    return ThresholdEstimate(critical_density=best, ratio_at_estimate=ratios[best],
                             group=group, sample_sizes=sample_sizes)


def threshold_estimates(records: Sequence[RunRecord]) -> list[ThresholdEstimate]:
    """One critical-density estimate per group, in sorted group order."""
    out = []
    for key in sorted(group_records(records),
                      key=lambda g: (g.model, g.k, g.n,
                                     g.dimension if g.dimension is not None else -1)):
        ratios = satisfiable_ratio(records, key)
        if len(ratios) < 2:
            continue
        sizes = {d: c[0] + c[1] for d, c in coverage(records, key).items()}
        out.append(estimate_critical_density(ratios, group=key, sample_sizes=sizes))
    return out


# ---------------------------------------------------------------------------
# density x dimension matrices


def _cell_value(cell_records: list[RunRecord], metric: str) -> Optional[float]:
    decided = [r for r in cell_records if r.verdict in (SAT, UNSAT)]
    if metric == "sat_ratio":
        if not decided:
            return None
        return sum(r.verdict == SAT for r in decided) / len(decided)
    if metric == "mean_wall_time":
        if not decided:
            return None
        return sum(r.wall_time for r in decided) / len(decided)
    if metric == "mean_proof_clauses":
        vals = [r.proof_metrics.total_clauses for r in decided if r.proof_metrics]
    elif metric == "mean_max_proof_len":
        vals = [r.proof_metrics.max_clause_length for r in decided if r.proof_metrics]
    else:
        raise ValueError(f"unknown metric {metric!r}; choose from {MATRIX_METRICS}")
    if not vals:
        return None
    return sum(vals) / len(vals)


def matrix_export(records: Sequence[RunRecord], metric: str):
    """Dense density-by-dimension matrix of a metric, plus its CSV rendering.

    Rows are densities ascending; columns are integer dimensions ascending
    with the uniform model as the final column.  Cells with no applicable
    records are None in the matrix and empty fields in the CSV.  Returns
    (densities, dimensions, matrix, csv_text).
    """
    if metric not in MATRIX_METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {MATRIX_METRICS}")
    by_cell: dict[tuple[float, Optional[int]], list[RunRecord]] = defaultdict(list)
    for r in records:
        by_cell[(r.density, r.dimension)].append(r)
    densities = sorted({d for d, _ in by_cell})
    int_dims = sorted({dim for _, dim in by_cell if dim is not None})
    dims: list[Optional[int]] = list(int_dims)
    if any(dim is None for _, dim in by_cell):
        dims.append(None)
    matrix = [[_cell_value(by_cell.get((dens, dim), []), metric) for dim in dims]
              for dens in densities]
    buf = io.StringIO()
    header = ["density"] + [("uniform" if dim is None else str(dim)) for dim in dims]
    buf.write(",".join(header) + "\n")
    for dens, row in zip(densities, matrix):
        cells = [repr(dens)] + ["" if v is None else repr(v) for v in row]
        buf.write(",".join(cells) + "\n")
    return densities, dims, matrix, buf.getvalue()
