"""Command-line interface: generate, solve, check, bench, analyze.

Exit codes are stable: 10 satisfiable, 20 unsatisfiable, 0 timeout or
successful analysis run, 1 proof rejection, 2 operational error (bad
usage, missing file, parse failure).  Every run prints the resolved
master seed as a comment line so batches can be replayed; the environment
variable GEOSAT_SEED is the fallback when --seed is not given.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import analysis, bench
from .cnf_io import (ParseError, read_dimacs_file, read_drat_file,
                     write_dimacs_file, write_drat_file)
from .generate import GenParams, generate_geometric, generate_uniform
from .proofs import check_rup_proof
from .seeds import derive_instance_seed
from .solving import SAT, UNSAT, SolverConfig
from .cdcl import solve_cdcl
from .twosat import solve_2sat

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("GEOSAT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(f"GEOSAT_SEED must be an integer, got {env!r}")
    return 0


def _print_seed(seed: int) -> None:
    print(f"c master_seed = {seed}")


def cmd_generate(args) -> int:
    seed = _resolve_seed(args)
    _print_seed(seed)
    if args.m is None and args.density is None:
        print("error: give --m or --density", file=sys.stderr)
        return EXIT_ERROR
    m = args.m if args.m is not None else bench.round_half_up(args.density * args.n)
    os.makedirs(args.out, exist_ok=True)
    for idx in range(args.count):
        params = GenParams(model=args.model, k=args.k, n=args.n, m=m,
                           seed=derive_instance_seed(seed, idx),
                           dimension=args.dim)
        if args.model == "uniform":
            formula = generate_uniform(params)
        else:
            formula, _ = generate_geometric(params)
        dim_part = f"_d{args.dim}" if args.dim is not None else ""
        name = f"inst_{args.model}_k{args.k}_n{args.n}_m{m}{dim_part}_s{seed}_i{idx}.cnf"
        path = os.path.join(args.out, name)
        write_dimacs_file(formula, path)
        print(path)
    return EXIT_OK


def cmd_solve(args) -> int:
    seed = _resolve_seed(args)
    _print_seed(seed)
    formula = read_dimacs_file(args.file)
    if args.solver.startswith("external:"):
        proof_path = args.proof
        result = bench.run_external_solver(args.solver[len("external:"):],
                                           args.file, proof_path, args.timeout_s)
        verdict = result.verdict
        assignment = None
    elif args.solver == "twosat":
        outcome = solve_2sat(formula)
        verdict, assignment = outcome.verdict, outcome.assignment
    else:
        config = SolverConfig(seed=seed, emit_proof=args.proof is not None,
                              time_limit=args.timeout_s)
        outcome = solve_cdcl(formula, config)
        verdict, assignment = outcome.verdict, outcome.assignment
        if verdict == UNSAT and args.proof is not None and outcome.proof is not None:
            write_drat_file(outcome.proof, args.proof)
    if verdict == SAT:
        print("s SATISFIABLE")
        if assignment is not None:
            lits = [v if assignment[v] else -v for v in range(1, formula.n + 1)]
            for start in range(0, len(lits), 12):
                chunk = lits[start:start + 12]
                tail = " 0" if start + 12 >= len(lits) else ""
                print("v " + " ".join(map(str, chunk)) + tail)
            if not lits:
                print("v 0")
        return EXIT_SAT
    if verdict == UNSAT:
        print("s UNSATISFIABLE")
        return EXIT_UNSAT
    print("s UNKNOWN")
    return EXIT_OK


def cmd_check(args) -> int:
    formula = read_dimacs_file(args.file)
    proof = read_drat_file(args.drat)
    report = check_rup_proof(formula, proof, lenient=args.lenient)
    if report.valid:
        print("VERIFIED")
        return EXIT_OK
    where = "" if report.failing_step is None else f" at step {report.failing_step}"
    print(f"REJECTED ({report.reason}{where})")
    return EXIT_REJECTED


def cmd_bench(args) -> int:
    seed = _resolve_seed(args)
    _print_seed(seed)
    if (args.m is None) == (args.density is None):
        print("error: give exactly one of --m or --density", file=sys.stderr)
        return EXIT_ERROR
    solver = args.solver
    external_command = None
    if solver.startswith("external:"):
        external_command = [solver[len("external:"):]]
        solver = "external"
    dims = (bench.UNIFORM_DIMENSION,) if args.model == "uniform" else tuple(args.dim or ())
    if args.model == "geometric" and not dims:
        print("error: geometric bench needs --dim", file=sys.stderr)
        return EXIT_ERROR
    grid = bench.ExperimentGrid(
        ks=tuple(args.k), ns=tuple(args.n),
        densities=tuple(args.density) if args.density else None,
        ms=tuple(args.m) if args.m else None,
        dimensions=dims, instances_per_cell=args.count, master_seed=seed,
        solver=solver, external_command=external_command,
        timeout=args.timeout_s, emit_proof=args.emit_proof)
    records = bench.run_experiment(grid, workers=args.threads)
    bench.persist_records_file(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    records = []
    for path in args.records:
        records.extend(bench.load_records_file(path))
    if not records:
        print("error: no records", file=sys.stderr)
        return EXIT_ERROR
    os.makedirs(args.out, exist_ok=True)

    ratio_path = os.path.join(args.out, "ratios.csv")
    with open(ratio_path, "w", encoding="utf-8", newline="\n") as fp:
        fp.write("model,k,n,dimension,density,ratio,n_sat,n_unsat,n_timeout\n")
        for key in sorted(analysis.group_records(records),
                          key=lambda g: (g.model, g.k, g.n,
                                         g.dimension if g.dimension is not None else -1)):
            cov = analysis.coverage(records, key)
            ratios = analysis.satisfiable_ratio(records, key)
            dim = "" if key.dimension is None else key.dimension
            for dens, (n_sat, n_unsat, n_to) in cov.items():
                ratio = "" if dens not in ratios else repr(ratios[dens])
                fp.write(f"{key.model},{key.k},{key.n},{dim},{dens!r},"
                         f"{ratio},{n_sat},{n_unsat},{n_to}\n")

    thresh_path = os.path.join(args.out, "thresholds.csv")
    with open(thresh_path, "w", encoding="utf-8", newline="\n") as fp:
        fp.write("model,k,n,dimension,critical_density,ratio_at_estimate,samples\n")
        for est in analysis.threshold_estimates(records):
            g = est.group
            dim = "" if g.dimension is None else g.dimension
            samples = sum(est.sample_sizes.values())
            fp.write(f"{g.model},{g.k},{g.n},{dim},{est.critical_density!r},"
                     f"{est.ratio_at_estimate!r},{samples}\n")

    written = [ratio_path, thresh_path]
    metrics = ["sat_ratio", "mean_wall_time"]
    if any(r.proof_metrics is not None for r in records):
        metrics += ["mean_proof_clauses", "mean_max_proof_len"]
    for metric in metrics:
        _, _, _, csv_text = analysis.matrix_export(records, metric)
        path = os.path.join(args.out, f"matrix_{metric}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(csv_text)
        written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosat",
        description="Generate, solve, and analyze random uniform and geometric k-SAT instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write DIMACS instances")
    gen.add_argument("--model", choices=["uniform", "geometric"], required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int)
    gen.add_argument("--density", type=float)
    gen.add_argument("--dim", type=int, help="dimension (geometric only)")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out", default=".", help="output directory")
    gen.set_defaults(func=cmd_generate)

    slv = sub.add_parser("solve", help="solve one DIMACS file")
    slv.add_argument("file")
    slv.add_argument("--solver", default="cdcl",
                     help="cdcl, twosat, or external:<path>")
    slv.add_argument("--timeout-s", type=float, default=None)
    slv.add_argument("--proof", help="write a DRAT proof here when unsatisfiable")
    slv.add_argument("--seed", type=int)
    slv.set_defaults(func=cmd_solve)

    chk = sub.add_parser("check", help="verify a DRAT proof against a DIMACS file")
    chk.add_argument("file")
    chk.add_argument("drat")
    chk.add_argument("--lenient", action="store_true",
                     help="ignore deletions of absent clauses")
    chk.set_defaults(func=cmd_check)

    ben = sub.add_parser("bench", help="run a parameter grid, write a record CSV")
    ben.add_argument("--model", choices=["uniform", "geometric"], required=True)
    ben.add_argument("--k", type=int, nargs="+", required=True)
    ben.add_argument("--n", type=int, nargs="+", required=True)
    ben.add_argument("--m", type=int, nargs="+")
    ben.add_argument("--density", type=float, nargs="+")
    ben.add_argument("--dim", type=int, nargs="+")
    ben.add_argument("--count", type=int, default=1, help="instances per cell")
    ben.add_argument("--seed", type=int)
    ben.add_argument("--solver", default="cdcl",
                     help="cdcl, twosat, or external:<path>")
    ben.add_argument("--timeout-s", type=float, default=60.0)
    ben.add_argument("--emit-proof", action="store_true")
    ben.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ben.add_argument("--out", required=True, help="records CSV path")
    ben.set_defaults(func=cmd_bench)

    ana = sub.add_parser("analyze", help="aggregate record CSVs")
    ana.add_argument("--records", nargs="+", required=True)
    ana.add_argument("--out", required=True, help="output directory")
    ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
