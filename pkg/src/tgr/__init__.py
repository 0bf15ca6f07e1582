"""Temporal goal recognition in nondeterministic planning domains."""

from .automata import Dfa, Pdfa, accepts, lift, ltlf_to_dfa, pltlf_to_dfa, to_dot
from .bench import BenchConfig, load_config, run_benchmark
from .compilation import AugmentedProblem, compile_goal, emit_pddl, strip_sync
from .executions import (Execution, average_distances, enumerate_executions,
                         order_relations)
from .fond import (Domain, GroundedFond, ProblemInstance, ground,
                   parse_domain, parse_problem)
from .logic import Atom, Formula, atoms, dialect, evaluate, parse_formula, to_nnf
from .planner import (Policy, PolicyReport, policy_from_text, policy_to_text,
                      solve_strong_cyclic, verify_policy)
from .recognizer import (RecognitionProblem, RecognitionResult, load_bundle,
                         recognize)

__version__ = "0.1.0"

__all__ = [
    "Atom", "Formula", "parse_formula", "evaluate", "atoms", "dialect",
    "to_nnf",
    "Dfa", "Pdfa", "ltlf_to_dfa", "pltlf_to_dfa", "accepts", "lift", "to_dot",
    "Domain", "ProblemInstance", "GroundedFond", "parse_domain",
    "parse_problem", "ground",
    "AugmentedProblem", "compile_goal", "emit_pddl", "strip_sync",
    "Policy", "PolicyReport", "solve_strong_cyclic", "verify_policy",
    "policy_to_text", "policy_from_text",
    "Execution", "enumerate_executions", "average_distances",
    "order_relations",
    "RecognitionProblem", "RecognitionResult", "recognize", "load_bundle",
    "BenchConfig", "load_config", "run_benchmark",
    "__version__",
]
