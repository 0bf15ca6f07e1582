"""Execution enumeration and the distance/order statistics built on it."""

import pytest

from tgr import bench, compilation, executions, fond, logic, planner
from tgr.errors import ExecutionCapError, TgrError

TIREWORLD = bench.bundled_dataset("triangle-tireworld")

FIG1 = sorted([
    ("(move 11 21)", "(move 21 22)"),
    ("(move 11 21)", "(changetire 21)", "(move 21 22)"),
])


def solved_f22():
    dom = fond.parse_domain(TIREWORLD.domain_text)
    prob = fond.parse_problem(TIREWORLD.problem_text)
    aug = compilation.compile_goal(dom, prob,
                                   logic.parse_formula("F((vAt 22))"))
    return aug, planner.solve_strong_cyclic(aug.grounded)


def test_compiled_executions_match_the_short_detour():
    aug, policy = solved_f22()
    execs = executions.enumerate_executions(policy, aug)
    assert sorted(tuple(e.actions) for e in execs) == FIG1


def test_classical_executions_match_too():
    dom = fond.parse_domain(TIREWORLD.domain_text)
    prob = fond.parse_problem(TIREWORLD.problem_text)
    policy = planner.solve_strong_cyclic(fond.ground(dom, prob))
    execs = executions.enumerate_executions(policy)
    assert sorted(tuple(e.actions) for e in execs) == FIG1


def test_trace_shape_and_projection():
    aug, policy = solved_f22()
    for ex in executions.enumerate_executions(policy, aug):
        assert len(ex.trace) == len(ex.actions) + 1
        for state in ex.trace:
            assert not state & aug.bookkeeping
        # raw sequence alternates sync, action, sync, ..., sync
        assert len(ex.raw_actions) == 2 * len(ex.actions) + 1
        assert ex.raw_actions[0].startswith("(trans")
        assert ex.raw_actions[-1].startswith("(trans")
        # the goal held at the end: position the formula claims
        assert logic.evaluate(aug.formula, ex.trace)


def test_satisfying_trace_content():
    aug, policy = solved_f22()
    execs = executions.enumerate_executions(policy, aug)
    short = min(execs, key=lambda e: len(e.actions))
    where = [sorted(str(a) for a in v if a.predicate == "vAt")
             for v in short.trace]
    assert where == [["(vAt 11)"], ["(vAt 21)"], ["(vAt 22)"]]


def test_mismatched_policy_and_task():
    aug, _ = solved_f22()
    other_aug, other_policy = solved_f22()
    assert other_aug.grounded is not aug.grounded
    with pytest.raises(TgrError):
        executions.enumerate_executions(other_policy, aug)


def test_cap():
    aug, policy = solved_f22()
    with pytest.raises(ExecutionCapError):
        executions.enumerate_executions(policy, aug, cap=1)


def test_cyclic_policy_terminates_with_no_executions():
    # a live-locked policy has no goal-reaching path; the visit bound
    # keeps the walk finite
    blocks = bench.bundled_dataset("blocks-world")
    g = fond.ground(fond.parse_domain(blocks.domain_text),
                    fond.parse_problem(blocks.problem_text))
    pick = g.action_index["(pick-up-from-table b3)"]
    put = g.action_index["(put-down b3)"]
    holding = [s for s in g.successors(g.s0, pick) if s != g.s0][0]
    policy = planner.Policy(g, {g.s0: pick, holding: put})
    assert executions.enumerate_executions(policy) == []


def test_open_policy_is_reported():
    aug, policy = solved_f22()
    broken = planner.Policy(aug.grounded, dict(policy.mapping))
    victim = next(s for s in broken.mapping if s != aug.grounded.s0)
    del broken.mapping[victim]
    with pytest.raises(TgrError):
        executions.enumerate_executions(broken, aug)


def test_average_distances():
    aug, policy = solved_f22()
    execs = executions.enumerate_executions(policy, aug)
    d = executions.average_distances(execs)
    assert d["(move 11 21)"] == pytest.approx(1.5)
    assert d["(changetire 21)"] == pytest.approx(1.0)
    assert d["(move 21 22)"] == pytest.approx(0.0)
    assert "(move 21 31)" not in d


def test_order_relations():
    ex = executions.Execution(("a", "b", "c"), (frozenset(),) * 4, ("a", "b", "c"))
    assert executions.order_relations(ex) == frozenset(
        {("a", "b"), ("a", "c"), ("b", "c")})
    empty = executions.Execution((), (frozenset(),), ())
    assert executions.order_relations(empty) == frozenset()
