"""Random uniform and geometric k-SAT: generation, solving, proofs, experiments."""

from .core import (Formula, GenerationMeta, circular_diff, density, evaluate,
                   make_assignment, torus_distance, torus_distance_sq)
from .generate import GenParams, Layout, generate, generate_geometric, generate_uniform
from .seeds import SeedStream, derive_instance_seed
from .solving import (SAT, TIMEOUT, UNSAT, SolverConfig, SolverOutcome,
                      SolverStats, brute_force_solve, unit_propagate)
from .cdcl import CdclSolver, solve_cdcl
from .twosat import solve_2sat
from .proofs import (CheckReport, ProofMetrics, check_rup_proof,
                     check_rup_proof_reference, compute_proof_metrics)
from .spatial import (KdTreeIndex, LinearScanIndex, brute_force_k_nearest,
                      build_index)
from .cnf_io import (DratProof, DratStep, ParseError, read_dimacs, read_drat,
                     write_dimacs, write_drat)
from .bench import (ExperimentGrid, RunRecord, load_records, persist_records,
                    run_experiment, run_external_solver)
from .analysis import (GroupKey, ThresholdEstimate, estimate_critical_density,
                       matrix_export, satisfiable_ratio, threshold_estimates)

__version__ = "0.1.0"
