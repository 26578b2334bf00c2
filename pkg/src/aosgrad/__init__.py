"""Gradient methods with approximately optimal stepsizes.

Library and benchmark harness for large-scale unconstrained minimization:
a gradient method whose stepsizes minimize local cubic-regularized or
quadratic models, a Barzilai-Borwein baseline sharing the same
nonmonotone line search, a native test-problem suite, and Dolan-More
performance-profile reporting.
"""

from .bench import (
    BenchPlan,
    ProfileCurve,
    emit_outputs,
    performance_profile,
    read_records_csv,
    run_suite,
)
from .problems import EvalCounters, Problem, check_gradient, evaluate, gradient
from .solver import (
    IterateState,
    RunRecord,
    SolverConfig,
    TraceRow,
    initial_stepsize,
    solve,
    solve_bb,
    verify_trace,
)
from .stepsize import CurvatureInfo, PairMemory, StepProposal, choose_stepsize
from .suite import block_size, make_problem, problem_names

__version__ = "0.1.0"

__all__ = [
    "BenchPlan",
    "CurvatureInfo",
    "EvalCounters",
    "IterateState",
    "PairMemory",
    "Problem",
    "ProfileCurve",
    "RunRecord",
    "SolverConfig",
    "StepProposal",
    "TraceRow",
    "block_size",
    "check_gradient",
    "choose_stepsize",
    "emit_outputs",
    "evaluate",
    "gradient",
    "initial_stepsize",
    "make_problem",
    "performance_profile",
    "problem_names",
    "read_records_csv",
    "run_suite",
    "solve",
    "solve_bb",
    "verify_trace",
]
