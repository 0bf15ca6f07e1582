"""Strong-cyclic policy synthesis, verification, and the external protocol."""

import sys
import textwrap
import time

import pytest

from tgr import bench, fond, logic, planner
from tgr.errors import (DeadlineExceeded, ExternalPlannerError,
                        PlannerCapError, PolicyParseError, UnsolvableError)

TIREWORLD = bench.bundled_dataset("triangle-tireworld")
BLOCKS = bench.bundled_dataset("blocks-world")


def grounded_tireworld(problem_text=None):
    dom = fond.parse_domain(TIREWORLD.domain_text)
    prob = fond.parse_problem(problem_text or TIREWORLD.problem_text)
    return fond.ground(dom, prob)


def test_tireworld_policy_is_the_short_detour():
    g = grounded_tireworld()
    policy = planner.solve_strong_cyclic(g)
    actions = sorted(g.actions[i].name for i in policy.mapping.values())
    assert actions == ["(changetire 21)", "(move 11 21)",
                       "(move 21 22)", "(move 21 22)"]
    report = planner.verify_policy(policy)
    assert report.ok and report.closed and report.strong_cyclic


def test_unsolvable_raises():
    spec = bench.bundled_text("triangle-tireworld", "trap.pddl")
    g = grounded_tireworld(spec)
    with pytest.raises(UnsolvableError):
        planner.solve_strong_cyclic(g)


def test_state_cap():
    g = grounded_tireworld()
    with pytest.raises(PlannerCapError):
        planner.solve_strong_cyclic(g, state_cap=2)


def test_deadline_checked_during_search():
    g = grounded_tireworld()
    with pytest.raises(DeadlineExceeded):
        planner.solve_strong_cyclic(g, deadline=time.monotonic() - 1.0)


def blocks_cycle_policy():
    """A policy that shuttles b3 between table and hand forever.

    Closed (both reachable states are mapped and every outcome stays
    inside them) but the goal (on b1 b2) is never reached.
    """
    dom = fond.parse_domain(BLOCKS.domain_text)
    prob = fond.parse_problem(BLOCKS.problem_text)
    g = fond.ground(dom, prob)
    pick = g.action_index["(pick-up-from-table b3)"]
    put = g.action_index["(put-down b3)"]
    holding = [s for s in g.successors(g.s0, pick) if s != g.s0]
    assert len(holding) == 1
    return g, planner.Policy(g, {g.s0: pick, holding[0]: put})


def test_verify_detects_a_live_lock():
    _, policy = blocks_cycle_policy()
    report = planner.verify_policy(policy)
    assert report.closed
    assert not report.strong_cyclic
    assert not report.ok
    assert report.counterexample is not None


def test_verify_detects_an_open_policy():
    g, policy = blocks_cycle_policy()
    del policy.mapping[next(s for s in policy.mapping if s != g.s0)]
    report = planner.verify_policy(policy)
    assert not report.closed
    assert not report.ok
    assert report.counterexample is not None


def test_policy_text_round_trip():
    g = grounded_tireworld()
    policy = planner.solve_strong_cyclic(g)
    text = planner.policy_to_text(policy)
    back = planner.policy_from_text(text, g)
    assert back.mapping == policy.mapping
    # unknown action names and unknown fluents are rejected
    with pytest.raises(PolicyParseError):
        planner.policy_from_text("(vAt 11)\t(teleport 11 51)\n", g)
    with pytest.raises(PolicyParseError):
        planner.policy_from_text("(warp 3)\t(move 11 21)\n", g)
    with pytest.raises(PolicyParseError):
        planner.policy_from_text("no tab here\n", g)


def write_script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return f"{sys.executable} {path}"


def test_external_planner_round_trip(tmp_path):
    g = grounded_tireworld()
    command = write_script(tmp_path, "ok.py", """
        import sys
        from tgr import fond, planner
        dom = fond.parse_domain(open(sys.argv[1]).read())
        prob = fond.parse_problem(open(sys.argv[2]).read())
        policy = planner.solve_strong_cyclic(fond.ground(dom, prob))
        sys.stdout.write(planner.policy_to_text(policy))
        """)
    policy = planner.solve_with_external(
        command, g, fond.domain_to_pddl(g.domain),
        fond.problem_to_pddl(g.problem))
    assert planner.verify_policy(policy).ok


def test_external_planner_exit_codes(tmp_path):
    g = grounded_tireworld()
    texts = (fond.domain_to_pddl(g.domain), fond.problem_to_pddl(g.problem))
    unsat = write_script(tmp_path, "unsat.py", "raise SystemExit(2)\n")
    with pytest.raises(UnsolvableError):
        planner.solve_with_external(unsat, g, *texts)
    crash = write_script(tmp_path, "crash.py", "raise SystemExit(7)\n")
    with pytest.raises(ExternalPlannerError):
        planner.solve_with_external(crash, g, *texts)
    garbled = write_script(tmp_path, "garbled.py",
                           "print('not a policy at all')\n")
    with pytest.raises(ExternalPlannerError):
        planner.solve_with_external(garbled, g, *texts)
    missing = "/no/such/binary"
    with pytest.raises(ExternalPlannerError):
        planner.solve_with_external(missing, g, *texts)


def test_external_planner_output_is_verified(tmp_path):
    # a syntactically fine policy that never reaches the goal must be
    # rejected, not trusted
    g = grounded_tireworld()
    dom = fond.parse_domain(BLOCKS.domain_text)
    prob = fond.parse_problem(BLOCKS.problem_text)
    bg = fond.ground(dom, prob)
    _, cycle = blocks_cycle_policy()
    command = write_script(tmp_path, "cycle.py", f"""
        import sys
        sys.stdout.write({planner.policy_to_text(cycle)!r})
        """)
    with pytest.raises(ExternalPlannerError):
        planner.solve_with_external(
            command, bg, fond.domain_to_pddl(bg.domain),
            fond.problem_to_pddl(bg.problem))


def test_external_planner_deadline(tmp_path):
    g = grounded_tireworld()
    slow = write_script(tmp_path, "slow.py",
                        "import time; time.sleep(30)\n")
    with pytest.raises(DeadlineExceeded):
        planner.solve_with_external(
            slow, g, fond.domain_to_pddl(g.domain),
            fond.problem_to_pddl(g.problem),
            deadline=time.monotonic() + 0.2)
