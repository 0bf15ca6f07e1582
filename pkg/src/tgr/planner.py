"""Strong-cyclic planning over grounded FOND models.

The solver enumerates the reachable state space, then repeatedly prunes
state-action pairs until a fixpoint: a pair dies when one of its
outcomes is a dead state, and a state dies when no goal is weakly
reachable from it through surviving pairs. Surviving pairs reach the
goal under the usual fairness assumption: every outcome of an action
that is tried infinitely often occurs infinitely often.

The extracted policy picks, per state, the action whose best outcome is
closest to the goal (BFS distance in the surviving graph), breaking ties
by lowest ground-action index. The result is deterministic and is
checked by `verify_policy` before being returned.
"""

from __future__ import annotations

import re
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .errors import (DeadlineExceeded, ExternalPlannerError, PlannerCapError,
                     PolicyParseError, UnsolvableError)
from .fond import GroundedFond, pddl_atom_str
from .logic import Atom

DEFAULT_STATE_CAP = 500_000


@dataclass
class Policy:
    """A partial mapping from non-goal states to ground action indices."""

    grounded: GroundedFond
    mapping: dict[frozenset[int], int] = field(repr=False)

    def action_name(self, state: frozenset[int]) -> str:
        return self.grounded.actions[self.mapping[state]].name

    def __len__(self) -> int:
        return len(self.mapping)


@dataclass
class PolicyReport:
    """Outcome of the independent policy check."""

    closed: bool
    strong_cyclic: bool
    counterexample: frozenset[int] | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.closed and self.strong_cyclic


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise DeadlineExceeded("planner deadline exceeded")


def solve_strong_cyclic(grounded: GroundedFond, *,
                        state_cap: int = DEFAULT_STATE_CAP,
                        deadline: float | None = None) -> Policy:
    """Return a strong-cyclic policy or raise UnsolvableError."""
    if grounded.goal is None:
        raise UnsolvableError("planning task has no goal")

    s0 = grounded.s0
    order: dict[frozenset[int], int] = {s0: 0}
    states: list[frozenset[int]] = [s0]
    goals: set[frozenset[int]] = set()
    # candidates[s] = list of (action index, outcome states)
    candidates: dict[frozenset[int], list[tuple[int, tuple[frozenset[int], ...]]]] = {}

    i = 0
    while i < len(states):
        state = states[i]
        i += 1
        if i % 512 == 0:
            _check_deadline(deadline)
        if grounded.is_goal(state):
            goals.add(state)
            continue
        pairs = []
        for ai in grounded.applicable_actions(state):
            outcomes = grounded.successors(state, ai)
            pairs.append((ai, outcomes))
            for succ in outcomes:
                if succ not in order:
                    if len(states) >= state_cap:
                        raise PlannerCapError(
                            f"reachable state space exceeded {state_cap} states")
                    order[succ] = len(states)
                    states.append(succ)
        candidates[state] = pairs

    if s0 in goals:
        return Policy(grounded, {})

    non_goal = [s for s in states if s not in goals]
    changed = True
    while changed:
        _check_deadline(deadline)
        changed = False
        # Prune pairs with an outcome that is neither a goal nor a state
        # that still has surviving pairs.
        for state in non_goal:
            pairs = candidates[state]
            if not pairs:
                continue
            kept = [
                (ai, outcomes) for ai, outcomes in pairs
                if all(t in goals or candidates.get(t) for t in outcomes)
            ]
            if len(kept) != len(pairs):
                candidates[state] = kept
                changed = True
        # Prune states from which no goal is weakly reachable through
        # surviving pairs.
        reach: set[frozenset[int]] = set(goals)
        frontier = True
        while frontier:
            frontier = False
            for state in non_goal:
                if state in reach or not candidates[state]:
                    continue
                if any(t in reach for _, outcomes in candidates[state]
                       for t in outcomes):
                    reach.add(state)
                    frontier = True
        for state in non_goal:
            if state not in reach and candidates[state]:
                candidates[state] = []
                changed = True

    if not candidates.get(s0):
        raise UnsolvableError(
            "no strong-cyclic policy: the initial state was pruned")

    # BFS distance to a goal through surviving pairs, counting each action
    # as one step and taking the best outcome.
    dist: dict[frozenset[int], int] = {}
    queue: list[frozenset[int]] = []
    for state in states:
        if state in goals:
            dist[state] = 0
            queue.append(state)
    rev: dict[frozenset[int], list[frozenset[int]]] = {}
    for state in non_goal:
        for _, outcomes in candidates[state]:
            for t in outcomes:
                rev.setdefault(t, []).append(state)
    qi = 0
    while qi < len(queue):
        target = queue[qi]
        qi += 1
        for source in rev.get(target, []):
            if source not in dist:
                dist[source] = dist[target] + 1
                queue.append(source)

    def choice(state: frozenset[int]) -> int:
        best: tuple[int, int] | None = None
        for ai, outcomes in candidates[state]:
            reachable = [dist[t] for t in outcomes if t in dist]
            if not reachable:
                continue
            key = (min(reachable), ai)
            if best is None or key < best:
                best = key
        if best is None:  # pragma: no cover - fixpoint guarantees a choice
            raise UnsolvableError("extraction failed: no surviving action")
        return best[1]

    mapping: dict[frozenset[int], int] = {}
    closure = [s0]
    seen = {s0}
    ci = 0
    while ci < len(closure):
        state = closure[ci]
        ci += 1
        if state in goals:
            continue
        ai = choice(state)
        mapping[state] = ai
        for succ in grounded.successors(state, ai):
            if succ not in seen:
                seen.add(succ)
                closure.append(succ)

    policy = Policy(grounded, mapping)
    report = verify_policy(policy)
    if not report.ok:  # pragma: no cover - solver internal invariant
        raise UnsolvableError(f"extracted policy failed verification: "
                              f"{report.reason}")
    return policy


def verify_policy(policy: Policy) -> PolicyReport:
    """Check closure and strong cyclicity by an independent traversal.

    Closed: every state reachable from s0 under the policy is a goal
    state or has an applicable mapped action. Strong cyclic: from every
    reachable state, some goal state is reachable along policy edges.
    """
    g = policy.grounded
    reached: list[frozenset[int]] = [g.s0]
    seen = {g.s0}
    edges: dict[frozenset[int], tuple[frozenset[int], ...]] = {}
    goals: set[frozenset[int]] = set()
    closed = True
    counterexample: frozenset[int] | None = None
    reason = ""

    i = 0
    while i < len(reached):
        state = reached[i]
        i += 1
        if g.is_goal(state):
            goals.add(state)
            continue
        ai = policy.mapping.get(state)
        if ai is None:
            closed = False
            if counterexample is None:
                counterexample = state
                reason = (f"non-goal state {g.state_str(state)} reachable "
                          "under the policy has no mapped action")
            continue
        if not g.applicable(state, ai):
            closed = False
            if counterexample is None:
                counterexample = state
                reason = (f"mapped action {g.actions[ai].name} is not "
                          f"applicable in {g.state_str(state)}")
            continue
        succs = g.successors(state, ai)
        edges[state] = succs
        for succ in succs:
            if succ not in seen:
                seen.add(succ)
                reached.append(succ)

    # Backward reachability from goals along policy edges.
    can_reach = set(goals)
    changed = True
    while changed:
        changed = False
        for state, succs in edges.items():
            if state not in can_reach and any(t in can_reach for t in succs):
                can_reach.add(state)
                changed = True

    strong_cyclic = closed
    for state in reached:
        if state not in can_reach and state not in goals:
            strong_cyclic = False
            if counterexample is None:
                counterexample = state
                reason = (f"no goal state is reachable from "
                          f"{g.state_str(state)} along policy edges")
            break

    if closed and strong_cyclic and not reason:
        reason = "policy is closed and strong cyclic"
    return PolicyReport(closed, strong_cyclic, counterexample, reason)


# ---------------------------------------------------------------------------
# Policy text format and the external planner adapter

def policy_to_text(policy: Policy) -> str:
    """One line per entry: sorted state fluents, a tab, the action."""
    g = policy.grounded
    lines = []
    for state, ai in policy.mapping.items():
        lines.append(f"{g.state_str(state)}\t{g.actions[ai].name}")
    return "\n".join(lines) + ("\n" if lines else "")


_ATOM_RE = re.compile(r"\(([^()]*)\)")


def _parse_atom_list(text: str) -> list[Atom]:
    out = []
    for inner in _ATOM_RE.findall(text):
        parts = inner.split()
        if not parts:
            raise PolicyParseError(f"empty atom in {text!r}")
        out.append(Atom(parts[0], tuple(parts[1:])))
    return out


def policy_from_text(text: str, grounded: GroundedFond) -> Policy:
    """Parse the policy text format against a grounded model."""
    mapping: dict[frozenset[int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise PolicyParseError(
                f"line {lineno}: expected 'state<TAB>action', got {raw!r}")
        state_part, action_part = line.split("\t", 1)
        atoms = _parse_atom_list(state_part)
        try:
            state = grounded.state_of(frozenset(atoms))
        except Exception as exc:
            raise PolicyParseError(f"line {lineno}: {exc}") from exc
        action = action_part.strip()
        ai = grounded.action_index.get(action)
        if ai is None:
            raise PolicyParseError(
                f"line {lineno}: unknown action {action!r}")
        mapping[state] = ai
    return Policy(grounded, mapping)


def solve_with_external(command: str, grounded: GroundedFond,
                        domain_text: str, problem_text: str, *,
                        deadline: float | None = None) -> Policy:
    """Run an external planner: `command domain.pddl problem.pddl`.

    The planner must print the policy in the text format above on stdout
    and exit 0; exit code 2 means the task is unsolvable; anything else
    is an error. The returned policy is verified before use.
    """
    timeout = None
    if deadline is not None:
        timeout = max(0.1, deadline - time.monotonic())
    with tempfile.TemporaryDirectory(prefix="tgr-planner-") as tmp:
        dom = f"{tmp}/domain.pddl"
        prob = f"{tmp}/problem.pddl"
        with open(dom, "w") as fh:
            fh.write(domain_text)
        with open(prob, "w") as fh:
            fh.write(problem_text)
        argv = command.split() + [dom, prob]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  timeout=timeout)
        except FileNotFoundError as exc:
            raise ExternalPlannerError(f"cannot run {argv[0]!r}: {exc}") from exc
        except subprocess.TimeoutExpired as exc:
            raise DeadlineExceeded(
                f"external planner exceeded its deadline") from exc
    if proc.returncode == 2:
        raise UnsolvableError(
            f"external planner reports the task unsolvable")
    if proc.returncode != 0:
        raise ExternalPlannerError(
            f"external planner exited with {proc.returncode}: "
            f"{proc.stderr.strip()[:500]}")
    try:
        policy = policy_from_text(proc.stdout, grounded)
    except PolicyParseError as exc:
        raise ExternalPlannerError(f"bad policy output: {exc}") from exc
    report = verify_policy(policy)
    if not report.ok:
        raise ExternalPlannerError(
            f"external policy failed verification: {report.reason}")
    return policy
