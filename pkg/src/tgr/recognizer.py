"""Goal recognition over candidate temporal goals.

Each candidate goal is compiled (temporal) or planned directly
(propositional), solved for a strong-cyclic policy, and summarized by
its execution set. Observed actions are scored against each goal by how
many actions typically remain after them in that goal's executions;
actions that never occur get a large constant distance, and an observed
pair that matches no execution's ordering incurs a penalty factor. Lower
average scores mean better explanations; the posterior combines them
with the goal priors.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from . import compilation, executions as executions_mod, fond, logic, planner
from .errors import (BundleError, CompileError, ExecutionCapError,
                     AutomatonCapError, GroundingCapError, TgrError,
                     UnsolvableError)
from .executions import ABSENT_DISTANCE, Execution
from .fond import Domain, ProblemInstance
from .logic import Formula
from .planner import Policy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecognitionProblem:
    """A domain/problem pair, candidate goals, and an observation sequence.

    Observations are ground action names in the order they were seen;
    they may skip actions but never reorder them. Priors default to
    uniform and only need to be positive: they are normalized internally,
    so scaling them all by a constant changes nothing.
    """

    domain: Domain
    problem: ProblemInstance
    goals: tuple[Formula, ...]
    obs: tuple[str, ...]
    priors: tuple[float, ...] = ()
    real_goal_index: int | None = None

    def normalized_priors(self) -> tuple[float, ...]:
        n = len(self.goals)
        if not self.priors:
            return tuple(1.0 / n for _ in range(n))
        if len(self.priors) != n:
            raise BundleError(
                f"{len(self.priors)} priors for {n} goals")
        if any(p < 0 for p in self.priors):
            raise BundleError("priors must be non-negative")
        total = sum(self.priors)
        if total <= 0:
            raise BundleError("priors must not all be zero")
        return tuple(p / total for p in self.priors)


@dataclass
class GoalAnalysis:
    """Everything the pipeline derived for one candidate goal."""

    formula: Formula
    solvable: bool
    error: str | None = None
    n_executions: int = 0
    distances: dict[str, float] | None = field(default=None, repr=False)
    executions: list[Execution] | None = field(default=None, repr=False)
    penalties: tuple[int, ...] = ()
    scores: tuple[float, ...] = ()
    avg_score: float | None = None
    likelihood: float = 0.0
    prior: float = 0.0
    posterior: float = 0.0


@dataclass
class RecognitionResult:
    goals: tuple[Formula, ...]
    analyses: tuple[GoalAnalysis, ...]
    gstar: tuple[int, ...]
    planner_calls: int
    elapsed_s: float

    def to_json(self) -> dict:
        return {
            "goals": [str(g) for g in self.goals],
            "gstar": list(self.gstar),
            "posteriors": [a.posterior for a in self.analyses],
            "likelihoods": [a.likelihood for a in self.analyses],
            "planner_calls": self.planner_calls,
            "elapsed_s": self.elapsed_s,
            "per_goal": [
                {
                    "goal": str(a.formula),
                    "solvable": a.solvable,
                    "error": a.error,
                    "executions": a.n_executions,
                    "penalties": list(a.penalties),
                    "scores": list(a.scores),
                    "avg_score": a.avg_score,
                    "likelihood": a.likelihood,
                    "prior": a.prior,
                    "posterior": a.posterior,
                }
                for a in self.analyses
            ],
        }


def penalty(o_prev: str | None, o_i: str,
            execs: Sequence[Execution]) -> int:
    """1 when the observed pair (o_prev before o_i) matches the order
    relations of no execution; 0 for the first observation."""
    if o_prev is None:
        return 0
    pair = (o_prev, o_i)
    for ex in execs:
        if pair in executions_mod.order_relations(ex):
            return 0
    return 1


def pairwise_score(o_prev: str | None, o_i: str, goal_index: int,
                   tables: Sequence[dict[str, float] | None],
                   execs: Sequence[Sequence[Execution] | None]) -> float:
    """e^penalty * d(o_i, goal) / sum over goals of d(o_i, goal').

    Goals without a distance table (unsolvable) are left out of the sum.
    Returns 0 when every distance in the denominator is zero.
    """
    table = tables[goal_index]
    if table is None:
        raise TgrError("pairwise_score called for an unsolvable goal")
    denominator = sum(t.get(o_i, ABSENT_DISTANCE)
                      for t in tables if t is not None)
    if denominator == 0:
        return 0.0
    goal_execs = execs[goal_index] or ()
    p = penalty(o_prev, o_i, goal_execs)
    d = table.get(o_i, ABSENT_DISTANCE)
    return math.exp(p) * d / denominator


def average_score(obs: Sequence[str], goal_index: int,
                  tables: Sequence[dict[str, float] | None],
                  execs: Sequence[Sequence[Execution] | None]) -> float:
    """Mean pairwise score over consecutive observation pairs."""
    if not obs:
        raise TgrError("cannot score an empty observation sequence")
    total = 0.0
    prev: str | None = None
    for o in obs:
        total += pairwise_score(prev, o, goal_index, tables, execs)
        prev = o
    return total / len(obs)


def likelihood(avg: float) -> float:
    """Map an average score to (0, 1]: lower scores explain better."""
    return 1.0 / (1.0 + avg)


def posteriors(likelihoods: Sequence[float],
               priors: Sequence[float]) -> list[float]:
    """Normalized likelihood * prior; uniform fallback when all are zero."""
    weights = [l * p for l, p in zip(likelihoods, priors)]
    total = sum(weights)
    if total <= 0:
        log.warning("all goal likelihoods are zero; falling back to a "
                    "uniform posterior")
        n = len(weights)
        return [1.0 / n] * n
    return [w / total for w in weights]


PlannerFn = Callable[[fond.GroundedFond], Policy]


def _builtin_planner(state_cap: int,
                     deadline: float | None) -> PlannerFn:
    def solve(grounded: fond.GroundedFond) -> Policy:
        return planner.solve_strong_cyclic(
            grounded, state_cap=state_cap, deadline=deadline)
    return solve


def _resolve_planner(spec: "str | PlannerFn", state_cap: int,
                     deadline: float | None) -> PlannerFn:
    if callable(spec):
        return spec
    if spec == "builtin":
        return _builtin_planner(state_cap, deadline)
    if spec.startswith("exec:"):
        command = spec[len("exec:"):]
        if not command:
            raise TgrError("--planner exec: needs a command")

        def solve(grounded: fond.GroundedFond) -> Policy:
            domain_text = fond.domain_to_pddl(grounded.domain)
            problem_text = fond.problem_to_pddl(grounded.problem)
            return planner.solve_with_external(
                command, grounded, domain_text, problem_text,
                deadline=deadline)
        return solve
    raise TgrError(f"unknown planner {spec!r}; use builtin or exec:<command>")


def recognize(problem: RecognitionProblem, *,
              planner_spec: "str | PlannerFn" = "builtin",
              state_cap: int = planner.DEFAULT_STATE_CAP,
              execution_cap: int = executions_mod.DEFAULT_EXECUTION_CAP,
              deadline: float | None = None,
              keep_executions: bool = False) -> RecognitionResult:
    """Run the full pipeline for every candidate goal and rank them.

    The planner is invoked exactly once per candidate goal; goals whose
    pipeline fails (uncompilable or unsolvable) keep likelihood 0 and
    stay in the ranking with their error recorded.
    """
    start = time.monotonic()
    if not problem.goals:
        raise BundleError("recognition needs at least one candidate goal")
    priors = problem.normalized_priors()
    solve = _resolve_planner(planner_spec, state_cap, deadline)

    base_grounded = fond.ground(problem.domain,
                                replace(problem.problem, goal=None))
    for name in problem.obs:
        if name not in base_grounded.action_index:
            raise BundleError(
                f"observed action {name} is not a ground action of the domain")

    analyses: list[GoalAnalysis] = []
    planner_calls = 0
    for goal in problem.goals:
        analysis = GoalAnalysis(formula=goal, solvable=False)
        try:
            if logic.is_propositional(goal):
                aug = None
                grounded = fond.ground(problem.domain,
                                       replace(problem.problem, goal=goal))
            else:
                aug = compilation.compile_goal(problem.domain, problem.problem,
                                               goal)
                grounded = aug.grounded
            planner_calls += 1
            policy = solve(grounded)
            execs = executions_mod.enumerate_executions(
                policy, aug, cap=execution_cap)
            analysis.solvable = True
            analysis.n_executions = len(execs)
            analysis.distances = executions_mod.average_distances(execs)
            analysis.executions = execs
        except (UnsolvableError, CompileError, AutomatonCapError,
                GroundingCapError, ExecutionCapError) as exc:
            analysis.error = str(exc)
            log.info("goal %s dropped to likelihood 0: %s", goal, exc)
        analyses.append(analysis)

    tables = [a.distances for a in analyses]
    exec_sets = [a.executions for a in analyses]
    for i, analysis in enumerate(analyses):
        analysis.prior = priors[i]
        if not analysis.solvable:
            continue
        if problem.obs:
            scores = []
            pens = []
            prev: str | None = None
            for o in problem.obs:
                pens.append(penalty(prev, o, analysis.executions or ()))
                scores.append(pairwise_score(prev, o, i, tables, exec_sets))
                prev = o
            analysis.scores = tuple(scores)
            analysis.penalties = tuple(pens)
            analysis.avg_score = sum(scores) / len(scores)
        else:
            # Nothing observed: every solvable goal explains equally well.
            analysis.avg_score = 0.0
        analysis.likelihood = likelihood(analysis.avg_score)

    post = posteriors([a.likelihood for a in analyses], priors)
    for analysis, p in zip(analyses, post):
        analysis.posterior = p
    best = max(post)
    gstar = tuple(i for i, p in enumerate(post)
                  if math.isclose(p, best, rel_tol=1e-9, abs_tol=1e-12))

    if not keep_executions:
        for analysis in analyses:
            analysis.executions = None

    return RecognitionResult(
        goals=problem.goals,
        analyses=tuple(analyses),
        gstar=gstar,
        planner_calls=planner_calls,
        elapsed_s=time.monotonic() - start,
    )


# ---------------------------------------------------------------------------
# Bundle I/O

def canonical_action(name: str) -> str:
    """Normalize an action string to `(name arg ...)`."""
    text = name.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    parts = text.split()
    if not parts:
        raise BundleError(f"empty action name {name!r}")
    return "(" + " ".join(parts) + ")"


def load_bundle(path: str) -> RecognitionProblem:
    """Load a recognition bundle: a JSON file (or a directory containing
    bundle.json) with domain/problem paths, goal formulas, observations,
    and optional priors and real goal index."""
    if os.path.isdir(path):
        path = os.path.join(path, "bundle.json")
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise BundleError(f"cannot read bundle: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle is not valid JSON: {exc}") from exc

    for key in ("domain", "problem", "goals", "obs"):
        if key not in data:
            raise BundleError(f"bundle is missing the {key!r} field")

    base = os.path.dirname(os.path.abspath(path))

    def resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.normpath(os.path.join(base, p))

    with open(resolve(data["domain"])) as fh:
        domain = fond.parse_domain(fh.read())
    with open(resolve(data["problem"])) as fh:
        problem = fond.parse_problem(fh.read())

    goals = tuple(logic.parse_formula(s) for s in data["goals"])
    if not goals:
        raise BundleError("bundle has an empty goal list")
    obs = tuple(canonical_action(s) for s in data["obs"])
    priors = tuple(float(p) for p in data.get("priors", ()))
    real = data.get("real_goal_index")
    if real is not None:
        real = int(real)
        if not 0 <= real < len(goals):
            raise BundleError(f"real_goal_index {real} out of range")
    rp = RecognitionProblem(domain=domain, problem=problem, goals=goals,
                            obs=obs, priors=priors, real_goal_index=real)
    rp.normalized_priors()
    return rp
