"""Enumerate the executions of a strong-cyclic policy.

An execution is a path from the initial state to a goal state that
follows the policy and visits no state more than twice, which lets each
fairness loop fire at most once. For compiled tasks the sync actions are
stripped and the bookkeeping fluents projected away; two paths with the
same stripped action sequence count as one execution (the first found in
DFS order is kept as the representative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import compilation
from .errors import ExecutionCapError, TgrError
from .logic import Atom
from .planner import Policy

DEFAULT_EXECUTION_CAP = 10_000
ABSENT_DISTANCE = math.e ** 5


@dataclass(frozen=True)
class Execution:
    """One policy execution after stripping and projection.

    `actions` are the observable action names, `trace` the projected
    state sequence including the initial state (so len(trace) ==
    len(actions) + 1), and `raw_actions` the unstripped sequence.
    """

    actions: tuple[str, ...]
    trace: tuple[frozenset[Atom], ...]
    raw_actions: tuple[str, ...]


def enumerate_executions(policy: Policy,
                         aug: "compilation.AugmentedProblem | None" = None,
                         *, cap: int = DEFAULT_EXECUTION_CAP,
                         max_visits: int = 2) -> list[Execution]:
    """All executions of `policy`, deduplicated by stripped action sequence.

    Raises ExecutionCapError when more than `cap` goal-reaching paths are
    found before deduplication.
    """
    g = policy.grounded
    if aug is not None and aug.grounded is not g:
        raise TgrError("policy was not produced from the given compiled task")
    sync_schema = aug.sync_schema if aug is not None else None

    def is_sync(name: str) -> bool:
        return sync_schema is not None \
            and name[1:-1].split()[0] == sync_schema

    def project(state: frozenset[int]) -> frozenset[Atom]:
        atoms = g.atoms_of(state)
        return aug.project(atoms) if aug is not None else atoms

    def make_execution(actions: list[str],
                       states: list[frozenset[int]]) -> Execution:
        if sync_schema is not None:
            stripped = tuple(compilation.strip_sync(actions, sync_schema))
            trace = [project(states[0])]
            trace.extend(project(states[j + 1])
                         for j, name in enumerate(actions)
                         if not is_sync(name))
        else:
            stripped = tuple(actions)
            trace = [project(s) for s in states]
        return Execution(stripped, tuple(trace), tuple(actions))

    kept: dict[tuple[str, ...], Execution] = {}
    raw_found = 0

    def record(actions: list[str], states: list[frozenset[int]]) -> None:
        nonlocal raw_found
        raw_found += 1
        if raw_found > cap:
            raise ExecutionCapError(
                f"policy has more than {cap} goal-reaching paths")
        ex = make_execution(actions, states)
        kept.setdefault(ex.actions, ex)

    path_states: list[frozenset[int]] = [g.s0]
    path_actions: list[str] = []
    visit_counts: dict[frozenset[int], int] = {g.s0: 1}

    if g.is_goal(g.s0):
        record(path_actions, path_states)
        return list(kept.values())

    def frame_for(state: frozenset[int]):
        ai = policy.mapping.get(state)
        if ai is None:
            raise TgrError(
                f"policy is not closed: no action for {g.state_str(state)}")
        return [state, g.actions[ai].name, g.successors(state, ai), 0]

    stack = [frame_for(g.s0)]
    while stack:
        frame = stack[-1]
        state, action_name, outcomes, idx = frame
        if idx >= len(outcomes):
            stack.pop()
            visit_counts[state] -= 1
            if path_actions:
                path_states.pop()
                path_actions.pop()
            continue
        frame[3] += 1
        succ = outcomes[idx]
        if visit_counts.get(succ, 0) >= max_visits:
            continue
        path_actions.append(action_name)
        path_states.append(succ)
        if g.is_goal(succ):
            record(path_actions, path_states)
            path_actions.pop()
            path_states.pop()
            continue
        visit_counts[succ] = visit_counts.get(succ, 0) + 1
        stack.append(frame_for(succ))

    return list(kept.values())


def average_distances(executions: list[Execution]) -> dict[str, float]:
    """Mean number of actions remaining after each occurrence of an action,
    averaged over all its occurrences across all executions."""
    totals: dict[str, int] = {}
    counts: dict[str, int] = {}
    for ex in executions:
        n = len(ex.actions)
        for i, name in enumerate(ex.actions):
            totals[name] = totals.get(name, 0) + (n - 1 - i)
            counts[name] = counts.get(name, 0) + 1
    return {name: totals[name] / counts[name] for name in totals}


def order_relations(execution: Execution) -> frozenset[tuple[str, str]]:
    """All ordered pairs (earlier, later) of actions in the execution."""
    acts = execution.actions
    return frozenset((acts[i], acts[j])
                     for i in range(len(acts))
                     for j in range(i + 1, len(acts)))
