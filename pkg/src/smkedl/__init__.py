"""Deterministic threshold-greedy maximization of non-monotone submodular
functions under a knapsack constraint, with metered value oracles,
reference solvers and a benchmark harness."""
from .edl import (EdlConfig, EstimatorResult, ExactEstimator, FixedEstimator, RunTrace,
                  SingletonEstimator, ThresholdSchedule, TraceMismatchError, build_schedule,
                  edl_solve, estimate_opt, replay_trace)
from .generators import GeneratorConfig, generate_instance
from .instance_io import dumps_instance, instance_digest, load_instance, loads_instance, save_instance
from .objectives import (CoverageObjective, CutObjective, RevenueObjective, ScaledObjective,
                         TableObjective, check_normalization, check_submodularity, modular,
                         tabulate)
from .oracle import (ContractViolation, Instance, InstanceFormatError, InvalidObjectiveError,
                     MeteredOracle, Objective, Solution, VacuousInstanceError, bits_from_ids,
                     density, ids_from_bits, marginal_gain, normalize_instance)
from .reference import (brute_force, density_greedy, greedy_plus_singleton,
                        random_instance_sweep, run_solvers)

__version__ = "0.1.0"
