"""Acceptance suite: desk-scale quantitative anchors and exact-equivalence checks.

Every test prints one PASS/FAIL line (run with -s to watch progress).  The
experiment tests run real workloads through the full stack and take a
while; `pytest -m "not acceptance"` skips them during development.
"""

import statistics
import time

import numpy as np
import pytest

from geosat.analysis import GroupKey, estimate_critical_density, satisfiable_ratio
from geosat.bench import ExperimentGrid, run_experiment
from geosat.cnf_io import (DratProof, DratStep, dimacs_to_string,
                           drat_to_string, read_dimacs, read_drat)
from geosat.core import Formula, evaluate
from geosat.generate import GenParams, generate, generate_geometric
from geosat.proofs import (check_rup_proof, check_rup_proof_reference,
                           compute_proof_metrics)
from geosat.seeds import derive_instance_seed
from geosat.solving import SAT, UNSAT, SolverConfig, brute_force_solve
from geosat.spatial import brute_force_k_nearest, build_index
from geosat.cdcl import solve_cdcl
from geosat.twosat import solve_2sat

pytestmark = pytest.mark.acceptance


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{criterion}: {detail}"


def density_grid(start: float, count: int, step: float = 0.2) -> list[float]:
    return [round(start + i * step, 10) for i in range(count)]


def test_c01_uniform_2sat_threshold():
    grid = ExperimentGrid(
        ks=[2], ns=[100_000], densities=density_grid(0.90, 16, 0.02),
        instances_per_cell=20, master_seed=101, solver="twosat", timeout=None)
    records = run_experiment(grid)
    ratios = satisfiable_ratio(records, GroupKey("uniform", 2, 100_000, None))
    est = estimate_critical_density(ratios).critical_density
    report("C1 uniform 2-SAT threshold", 0.95 <= est <= 1.08,
           f"estimate={est:.3f}, window=[0.95, 1.08]")


def test_c02_uniform_3sat_threshold():
    grid = ExperimentGrid(
        ks=[3], ns=[150], densities=density_grid(3.6, 15, 0.1),
        instances_per_cell=30, master_seed=202, solver="cdcl", timeout=60.0)
    records = run_experiment(grid)
    ratios = satisfiable_ratio(records, GroupKey("uniform", 3, 150, None))
    est = estimate_critical_density(ratios).critical_density
    report("C2 uniform 3-SAT threshold", 3.93 <= est <= 4.60,
           f"estimate={est:.3f}, window=[3.93, 4.60]")


def test_c03_geometric_threshold_shift_d1():
    grid = ExperimentGrid(
        ks=[3], ns=[300], densities=density_grid(1.0, 16, 0.2),
        dimensions=(1,), instances_per_cell=30, master_seed=303,
        solver="cdcl", timeout=60.0)
    records = run_experiment(grid)
    ratios = satisfiable_ratio(records, GroupKey("geometric", 3, 300, 1))
    est = estimate_critical_density(ratios).critical_density
    ratio_at_3 = ratios[3.0]
    report("C3 geometric threshold shift (d=1)",
           est <= 2.5 and ratio_at_3 <= 0.2,
           f"estimate={est:.3f} (<= 2.5), ratio@3.0={ratio_at_3:.3f} (<= 0.2)")


D_GRIDS = {
    1: density_grid(0.6, 15),
    2: density_grid(1.2, 13),
    3: density_grid(1.8, 12),
    4: density_grid(2.2, 11),
    5: density_grid(2.6, 11),
    6: density_grid(2.8, 11),
    7: density_grid(3.2, 9),
}


def crossing_span(ratios: dict[float, float]) -> float:
    """Density span between leaving ratio >= 0.9 and reaching ratio <= 0.1."""
    densities = sorted(ratios)
    high = [d for d in densities if ratios[d] >= 0.9]
    assert high, "grid never reaches ratio >= 0.9"
    a = max(high)
    low = [d for d in densities if d > a and ratios[d] <= 0.1]
    assert low, "grid never reaches ratio <= 0.1"
    return min(low) - a


def test_c04_monotone_convergence_in_dimension():
    estimates = {}
    spans = {}
    for dim, densities in D_GRIDS.items():
        grid = ExperimentGrid(
            ks=[3], ns=[300], densities=densities, dimensions=(dim,),
            instances_per_cell=30, master_seed=404 + dim, solver="cdcl",
            timeout=120.0)
        records = run_experiment(grid)
        ratios = satisfiable_ratio(records, GroupKey("geometric", 3, 300, dim))
        estimates[dim] = estimate_critical_density(ratios).critical_density
        if dim in (1, 7):
            spans[dim] = crossing_span(ratios)
        print(f"  d={dim}: estimate={estimates[dim]:.2f}")
    seq = [estimates[d] for d in range(1, 8)]
    inversions = [max(0.0, seq[i] - seq[i + 1]) for i in range(6)]
    bad = [x for x in inversions if x > 1e-9]
    monotone_ok = len(bad) <= 1 and all(x <= 0.2 + 1e-9 for x in bad)
    d7_ok = 3.8 <= estimates[7] <= 4.4
    span_ok = spans[1] >= 1.5 * spans[7] - 1e-9
    report("C4 monotone convergence in dimension",
           monotone_ok and d7_ok and span_ok,
           f"estimates={['%.2f' % v for v in seq]}, d7={estimates[7]:.2f} in [3.8,4.4], "
           f"span(d1)={spans[1]:.2f} vs 1.5*span(d7)={1.5 * spans[7]:.2f}")


def test_c05_uniform_4sat_sanity():
    grid = ExperimentGrid(
        ks=[4], ns=[80], densities=density_grid(8.0, 15, 0.25),
        instances_per_cell=20, master_seed=505, solver="cdcl", timeout=120.0)
    records = run_experiment(grid)
    ratios = satisfiable_ratio(records, GroupKey("uniform", 4, 80, None))
    est = estimate_critical_density(ratios).critical_density
    report("C5 uniform 4-SAT sanity", 8.5 <= est <= 11.0,
           f"estimate={est:.3f}, window=[8.5, 11.0] around 9.931")


def test_c06_spatial_index_oracle_equivalence():
    rng = np.random.default_rng(606)
    checked = mismatches = 0
    for dim in (1, 2, 3, 10, 100):
        points = rng.random((500, dim))
        labels = rng.permutation(500) + 1
        index = build_index(points, labels)  # auto backend policy
        for _ in range(100):
            query = rng.random(dim)
            for k in (1, 3, 7):
                got = index.k_nearest(query, k)
                expect = brute_force_k_nearest(points, labels, query, k)
                checked += 1
                if got != expect:
                    mismatches += 1
    report("C6 spatial-index oracle equivalence", mismatches == 0,
           f"{checked} queries across d in {{1,2,3,10,100}}, {mismatches} mismatches")


def test_c07_solver_oracle_equivalence():
    rng = np.random.default_rng(707)
    total = agreements = twosat_agreements = twosat_checked = 0
    for _ in range(1000):
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(max(5, k), 21))
        dens = float(rng.uniform(1.0, 10.0))
        m = max(1, round(dens * n))
        if rng.random() < 0.5:
            params = GenParams("uniform", k=k, n=n, m=m,
                               seed=int(rng.integers(2 ** 63)))
        else:
            params = GenParams("geometric", k=k, n=n, m=m,
                               seed=int(rng.integers(2 ** 63)),
                               dimension=int(rng.integers(1, 4)))
        formula = generate(params)
        oracle = brute_force_solve(formula).verdict
        cdcl = solve_cdcl(formula)
        total += 1
        ok = cdcl.verdict == oracle
        if ok and cdcl.verdict == SAT:
            ok = evaluate(formula, cdcl.assignment)
        agreements += ok
        if k == 2:
            twosat_checked += 1
            twosat_agreements += solve_2sat(formula).verdict == oracle
    report("C7 solver oracle equivalence",
           agreements == total and twosat_agreements == twosat_checked,
           f"cdcl {agreements}/{total}, 2sat {twosat_agreements}/{twosat_checked}")


def _unsat_proof_pool(count, master_seed):
    rng = np.random.default_rng(master_seed)
    pool = []
    while len(pool) < count:
        k = int(rng.choice([2, 3]))
        n = int(rng.integers(k + 2, 15))
        m = max(1, round(float(rng.uniform(4.5, 9.0)) * n))
        if rng.random() < 0.5:
            params = GenParams("uniform", k=k, n=n, m=m,
                               seed=int(rng.integers(2 ** 63)))
        else:
            params = GenParams("geometric", k=k, n=n, m=m,
                               seed=int(rng.integers(2 ** 63)),
                               dimension=int(rng.integers(1, 4)))
        formula = generate(params)
        out = solve_cdcl(formula, SolverConfig(emit_proof=True))
        if out.verdict == UNSAT:
            pool.append((formula, out.proof))
    return pool


def test_c08_proof_soundness_and_tamper_rejection():
    rng = np.random.default_rng(808)
    pool = _unsat_proof_pool(110, master_seed=808)
    all_pass = all(check_rup_proof(f, p).valid for f, p in pool)
    tampered = rejected = disagreement = 0
    for formula, proof in pool:
        steps = list(proof.steps)
        addable = [i for i, s in enumerate(steps) if s.kind == "add" and s.literals]
        if not addable:
            continue
        i = int(rng.choice(addable))
        lits = list(steps[i].literals)
        j = int(rng.integers(len(lits)))
        lits[j] = -lits[j]
        steps[i] = DratStep("add", tuple(lits))
        mutated = DratProof(steps)
        fast = check_rup_proof(formula, mutated)
        slow = check_rup_proof_reference(formula, mutated)
        tampered += 1
        if fast != slow:
            disagreement += 1
        if not slow.valid and not fast.valid:
            rejected += 1
    report("C8 proof soundness",
           all_pass and disagreement == 0 and tampered >= 100 and rejected > 0,
           f"{len(pool)} proofs all valid={all_pass}; {tampered} tampered, "
           f"{rejected} rejected, checker disagreements={disagreement}")


def test_c09_low_dimension_proof_collapse():
    d1_sizes = []
    d1_max_len = []
    for j in range(30):
        seed = derive_instance_seed(909, j)
        params = GenParams("geometric", k=3, n=300, m=900, seed=seed, dimension=1)
        formula = generate(params)
        out = solve_cdcl(formula, SolverConfig(emit_proof=True, time_limit=60.0))
        if out.verdict == UNSAT:
            assert check_rup_proof(formula, out.proof).valid
            metrics = compute_proof_metrics(out.proof)
            d1_sizes.append(metrics.total_clauses)
            d1_max_len.append(metrics.max_clause_length)
    uniform_sizes = []
    for j in range(30):
        seed = derive_instance_seed(910, j)
        params = GenParams("uniform", k=3, n=300, m=1290, seed=seed)
        formula = generate(params)
        out = solve_cdcl(formula, SolverConfig(emit_proof=True, time_limit=180.0))
        if out.verdict == UNSAT:
            uniform_sizes.append(compute_proof_metrics(out.proof).total_clauses)
    enough = len(d1_sizes) >= 10 and len(uniform_sizes) >= 5
    d1_median = statistics.median(d1_sizes) if d1_sizes else float("inf")
    uni_median = statistics.median(uniform_sizes) if uniform_sizes else 0.0
    len_median = statistics.median(d1_max_len) if d1_max_len else float("inf")
    report("C9 low-dimension proof collapse",
           enough and uni_median >= 5 * d1_median and len_median <= 10,
           f"d1: {len(d1_sizes)} UNSAT median={d1_median} (max_len median={len_median}); "
           f"uniform: {len(uniform_sizes)} UNSAT median={uni_median}; "
           f"need uniform >= 5x d1 and d1 max_len <= 10")


def test_c10_generation_scaling():
    def timed(n):
        params = GenParams("geometric", k=3, n=n, m=n, seed=1010, dimension=3)
        t0 = time.perf_counter()
        generate_geometric(params)
        return time.perf_counter() - t0

    small = timed(10_000)
    big = timed(100_000)
    ratio = big / small
    report("C10 generation scaling", ratio < 20,
           f"t(1e5)={big:.2f}s / t(1e4)={small:.2f}s = {ratio:.1f} (< 20)")


def test_c11_determinism_and_round_trips(tmp_path):
    # byte-identical generation and proofs under a fixed seed
    params = GenParams("geometric", k=3, n=60, m=200, seed=1111, dimension=2)
    text_a = dimacs_to_string(generate(params))
    text_b = dimacs_to_string(generate(params))
    dimacs_same = text_a == text_b

    unsat = GenParams("uniform", k=3, n=20, m=140, seed=1112)
    out_a = solve_cdcl(generate(unsat), SolverConfig(emit_proof=True))
    out_b = solve_cdcl(generate(unsat), SolverConfig(emit_proof=True))
    drat_same = (out_a.verdict == out_b.verdict == UNSAT
                 and drat_to_string(out_a.proof) == drat_to_string(out_b.proof))

    # record CSVs: identical apart from the wall-time column
    from geosat.bench import persist_records
    import io

    grid = ExperimentGrid(ks=[3], ns=[15], densities=[2.0, 6.0],
                          instances_per_cell=3, master_seed=1113, timeout=30.0,
                          emit_proof=True)

    def masked_csv():
        buf = io.StringIO()
        persist_records(run_experiment(grid), buf)
        rows = [line.split(",") for line in buf.getvalue().splitlines()]
        for row in rows[1:]:
            row[9] = "-"
        return "\n".join(",".join(r) for r in rows)

    csv_same = masked_csv() == masked_csv()

    # write-read identities on 1000 random artifacts
    rng = np.random.default_rng(1114)
    rt_fail = 0
    for _ in range(500):
        n = int(rng.integers(2, 30))
        k = int(rng.integers(1, min(n, 5) + 1))
        m = int(rng.integers(0, 40))
        rows = []
        for _ in range(m):
            variables = rng.choice(n, size=k, replace=False) + 1
            signs = rng.choice([-1, 1], size=k)
            rows.append((variables * signs).tolist())
        f = Formula(n, k, rows)
        if read_dimacs(dimacs_to_string(f)) != f:
            rt_fail += 1
    for _ in range(500):
        steps = []
        for _ in range(int(rng.integers(0, 30))):
            kind = "delete" if rng.random() < 0.3 else "add"
            ln = int(rng.integers(0, 6))
            lits = tuple(int(v) * int(s) for v, s in
                         zip(rng.integers(1, 40, ln), rng.choice([-1, 1], ln)))
            steps.append(DratStep(kind, lits))
        proof = DratProof(steps)
        if read_drat(drat_to_string(proof)) != proof:
            rt_fail += 1
    report("C11 determinism and round-trips",
           dimacs_same and drat_same and csv_same and rt_fail == 0,
           f"dimacs={dimacs_same}, drat={drat_same}, csv(masked times)={csv_same}, "
           f"round-trip failures={rt_fail}/1000")
