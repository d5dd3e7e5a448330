import numpy as np
import pytest

from geosat.analysis import (GroupKey, estimate_critical_density, group_of,
                             matrix_export, satisfiable_ratio,
                             threshold_estimates, coverage)
from geosat.bench import RunRecord
from geosat.proofs import ProofMetrics
from geosat.solving import SAT, TIMEOUT, UNSAT


def record(density, verdict, dimension=None, k=3, n=100, wall=0.5, proof=None):
    return RunRecord(model="uniform" if dimension is None else "geometric",
                     k=k, n=n, m=int(density * n), density=density,
                     dimension=dimension, instance_seed=0, solver_id="cdcl",
                     verdict=verdict, wall_time=wall, proof_metrics=proof,
                     proof_checked=True if proof else None)


UNIFORM = GroupKey("uniform", 3, 100, None)


def test_ratio_basic():
    records = [record(2.0, SAT)] * 9 + [record(2.0, UNSAT)]
    assert satisfiable_ratio(records, UNIFORM) == {2.0: 0.9}


def test_ratio_extremes():
    assert satisfiable_ratio([record(1.0, SAT)] * 4, UNIFORM) == {1.0: 1.0}
    assert satisfiable_ratio([record(9.0, UNSAT)] * 4, UNIFORM) == {9.0: 0.0}


def test_ratio_excludes_timeouts_and_reports_coverage():
    records = [record(3.0, SAT), record(3.0, UNSAT), record(3.0, TIMEOUT)]
    assert satisfiable_ratio(records, UNIFORM) == {3.0: 0.5}
    assert coverage(records, UNIFORM) == {3.0: (1, 1, 1)}


def test_ratio_empty_group_is_error():
    with pytest.raises(ValueError):
        satisfiable_ratio([record(1.0, SAT, dimension=2)], UNIFORM)


def test_estimate_picks_closest_to_half():
    est = estimate_critical_density({2.0: 0.9, 3.0: 0.5, 4.0: 0.1})
    assert est.critical_density == 3.0
    assert est.ratio_at_estimate == 0.5


def test_estimate_tie_breaks_to_lowest_density():
    est = estimate_critical_density({2.0: 0.6, 3.0: 0.4})
    assert est.critical_density == 2.0


def test_estimate_needs_two_densities():
    with pytest.raises(ValueError):
        estimate_critical_density({2.0: 0.5})


def test_estimate_on_random_monotone_curves():
    rng = np.random.default_rng(0)
    for _ in range(200):
        densities = np.sort(rng.choice(np.arange(1.0, 8.0, 0.2), size=8,
                                       replace=False))
        ratios = np.sort(rng.random(8))[::-1]  # strictly decreasing in density
        table = {float(d): float(r) for d, r in zip(densities, ratios)}
        est = estimate_critical_density(table)
        best = min(table, key=lambda d: (abs(table[d] - 0.5), d))
        assert est.critical_density == best
        assert est.critical_density in table


def test_order_independence():
    rng = np.random.default_rng(1)
    records = []
    for dens in (1.0, 2.0, 3.0):
        for _ in range(10):
            verdict = SAT if rng.random() < 0.5 else UNSAT
            records.append(record(dens, verdict))
    ratios = satisfiable_ratio(records, UNIFORM)
    shuffled = list(records)
    rng.shuffle(shuffled)
    assert satisfiable_ratio(shuffled, UNIFORM) == ratios
    assert [e.critical_density for e in threshold_estimates(records)] == \
        [e.critical_density for e in threshold_estimates(shuffled)]


def test_threshold_estimates_per_group():
    records = ([record(1.0, SAT, dimension=1), record(2.0, UNSAT, dimension=1)] +
               [record(3.0, SAT), record(5.0, UNSAT)])
    estimates = threshold_estimates(records)
    assert len(estimates) == 2
    keys = {e.group for e in estimates}
    assert UNIFORM in keys and GroupKey("geometric", 3, 100, 1) in keys
    for e in estimates:
        assert e.sample_sizes is not None


def test_matrix_single_cell():
    densities, dims, matrix, csv_text = matrix_export([record(2.0, SAT)],
                                                      "sat_ratio")
    assert densities == [2.0] and dims == [None]
    assert matrix == [[1.0]]
    assert csv_text.splitlines()[0] == "density,uniform"


def test_matrix_empty_cell_for_missing_proofs():
    records = [record(2.0, SAT, dimension=1)]
    _, _, matrix, csv_text = matrix_export(records, "mean_proof_clauses")
    assert matrix == [[None]]
    assert csv_text.splitlines()[1].endswith(",")


def test_matrix_uniform_column_last():
    pm = ProofMetrics(10, 8, 2, 30, 25, 5, 4)
    records = [record(2.0, SAT, dimension=3), record(2.0, UNSAT, dimension=1, proof=pm),
               record(2.0, UNSAT), record(4.0, UNSAT, dimension=1, proof=pm)]
    densities, dims, matrix, csv_text = matrix_export(records, "sat_ratio")
    assert dims == [1, 3, None]
    assert densities == [2.0, 4.0]
    assert matrix[0] == [0.0, 1.0, 0.0]
    assert matrix[1] == [0.0, None, None]
    header = csv_text.splitlines()[0]
    assert header == "density,1,3,uniform"
    _, _, pmatrix, _ = matrix_export(records, "mean_proof_clauses")
    assert pmatrix[0][0] == 10.0 and pmatrix[0][2] is None


def test_matrix_mean_wall_time_excludes_timeouts():
    records = [record(2.0, SAT, wall=1.0), record(2.0, UNSAT, wall=3.0),
               record(2.0, TIMEOUT, wall=60.0)]
    _, _, matrix, _ = matrix_export(records, "mean_wall_time")
    assert matrix == [[2.0]]


def test_matrix_unknown_metric():
    with pytest.raises(ValueError):
        matrix_export([record(2.0, SAT)], "nope")


def test_group_key_validation():
    with pytest.raises(ValueError):
        GroupKey("uniform", 3, 100, 5)
    with pytest.raises(ValueError):
        GroupKey("geometric", 3, 100, None)
    assert group_of(record(1.0, SAT, dimension=4)).dimension == 4
