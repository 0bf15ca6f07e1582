"""Compile a temporal goal into an augmented FOND problem.

The automaton for the goal formula is embedded into the planning task:
one zero-ary fluent per automaton state, plus a turn-alternation fluent.
Every domain action requires the turn fluent and retracts it; a single
sync action (`trans`) requires it to be false and asserts it, advancing
the automaton with one conditional effect per transition. Plans therefore
alternate `trans, a1, trans, a2, ..., trans`: the first sync reads the
initial state as the first letter, so the induced trace includes s0.

The augmented goal demands the turn fluent plus an accepting-state
fluent (a disjunction when the minimal DFA has several accepting
states). The problem's original classical goal is discarded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

from . import automata, fond, logic
from .automata import Dfa, Pdfa
from .errors import CompileError, MalformedAlternationError
from .fond import (ActionSchema, Domain, Effect, Literal, Parameter,
                   PredicateSchema, ProblemInstance, eff_and, eff_lit,
                   eff_when)
from .logic import Atom, Formula


def _type_chain(domain: Domain, t: str) -> set[str]:
    parents = dict(domain.types)
    chain = {"object"}
    cur: str | None = t
    while cur is not None and cur not in chain:
        chain.add(cur)
        cur = parents.get(cur)
    return chain


def validate_goal_atoms(domain: Domain, problem: ProblemInstance,
                        formula: Formula) -> None:
    """Every atom of the goal must be a well-typed ground instance of a
    declared predicate over declared objects."""
    obj_types = dict(problem.objects)
    for a in sorted(logic.atoms(formula)):
        schema = domain.predicate(a.predicate)
        if schema is None:
            raise CompileError(f"goal atom {fond.pddl_atom_str(a)}: predicate "
                               f"{a.predicate!r} is not declared")
        if len(a.args) != len(schema.params):
            raise CompileError(
                f"goal atom {fond.pddl_atom_str(a)}: {a.predicate} takes "
                f"{len(schema.params)} arguments, got {len(a.args)}")
        for arg, param in zip(a.args, schema.params):
            if arg.startswith("?"):
                raise CompileError(
                    f"goal atom {fond.pddl_atom_str(a)} is not ground")
            if arg not in obj_types:
                raise CompileError(
                    f"goal atom {fond.pddl_atom_str(a)}: {arg!r} is not a "
                    "declared object")
            if param.type not in _type_chain(domain, obj_types[arg]):
                raise CompileError(
                    f"goal atom {fond.pddl_atom_str(a)}: object {arg!r} has "
                    f"type {obj_types[arg]!r}, expected {param.type!r}")


def _pick_prefix(domain: Domain, n_states: int) -> str:
    taken = {p.name for p in domain.predicates} | {a.name for a in domain.actions}
    for prefix in ("", "sync-", "sync2-"):
        names = {f"{prefix}q{i}" for i in range(n_states)}
        names |= {f"{prefix}turnDomain", f"{prefix}trans", f"{prefix}tracked"}
        if not names & taken:
            return prefix
    raise CompileError("cannot find a collision-free name prefix for the "
                       "automaton fluents")


@dataclass
class AugmentedProblem:
    """A compiled temporal-goal planning task plus its bookkeeping."""

    base_domain: Domain
    base_problem: ProblemInstance
    formula: Formula
    goal_id: str
    dfa: Dfa
    domain: Domain
    problem: ProblemInstance
    grounded: fond.GroundedFond
    prefix: str
    q_atoms: tuple[Atom, ...]
    turn_atom: Atom
    sync_schema: str
    sync_name: str
    bookkeeping: frozenset[Atom] = field(repr=False)

    def project(self, atoms: frozenset[Atom]) -> frozenset[Atom]:
        """Drop automaton bookkeeping fluents from a state."""
        return atoms - self.bookkeeping

    @cached_property
    def objects_of_interest(self) -> tuple[str, ...]:
        out: list[str] = []
        for a in sorted(logic.atoms(self.formula)):
            for arg in a.args:
                if arg not in out:
                    out.append(arg)
        return tuple(out)

    @cached_property
    def pdfa(self) -> Pdfa:
        return automata.lift(self.dfa, self.objects_of_interest)


def compile_goal(domain: Domain, problem: ProblemInstance, formula: Formula,
                 *, goal_id: str = "g0",
                 state_cap: int = automata.DEFAULT_STATE_CAP) -> AugmentedProblem:
    """Build the augmented domain/problem pair for `formula` and ground it."""
    validate_goal_atoms(domain, problem, formula)
    dfa = automata.formula_to_dfa(formula, state_cap)
    prefix = _pick_prefix(domain, dfa.n_states)

    q_atoms = tuple(Atom(f"{prefix}q{i}") for i in range(dfa.n_states))
    turn_atom = Atom(f"{prefix}turnDomain")
    sync_schema = f"{prefix}trans"

    predicates = list(domain.predicates)
    predicates.extend(PredicateSchema(a.predicate, ()) for a in q_atoms)
    predicates.append(PredicateSchema(turn_atom.predicate, ()))

    actions = [
        ActionSchema(
            name=a.name, params=a.params,
            precondition=a.precondition + (Literal(turn_atom, True),),
            effect=eff_and((a.effect, eff_lit(Literal(turn_atom, False)))))
        for a in domain.actions
    ]
    actions.append(_sync_action(dfa, q_atoms, turn_atom, sync_schema, ()))

    requirements = list(domain.requirements)
    for extra in (":negative-preconditions", ":conditional-effects"):
        if extra not in requirements:
            requirements.append(extra)

    aug_domain = Domain(
        name=f"{domain.name}-{goal_id}",
        requirements=tuple(requirements),
        types=domain.types,
        predicates=tuple(predicates),
        actions=tuple(actions),
    )

    accepting = [q_atoms[i] for i in sorted(dfa.accepting)]
    if not accepting:
        raise CompileError(
            f"goal {formula} is unsatisfiable: its automaton has no "
            "accepting state")
    goal = logic.land(
        logic.disj([logic.from_atom(a) for a in accepting]),
        logic.from_atom(turn_atom))

    aug_problem = ProblemInstance(
        name=f"{problem.name}-{goal_id}",
        domain_name=aug_domain.name,
        objects=problem.objects,
        init=problem.init | {q_atoms[0]},
        goal=goal,
    )

    grounded = fond.ground(aug_domain, aug_problem)
    bookkeeping = frozenset(q_atoms) | {turn_atom}
    return AugmentedProblem(
        base_domain=domain, base_problem=problem, formula=formula,
        goal_id=goal_id, dfa=dfa, domain=aug_domain, problem=aug_problem,
        grounded=grounded, prefix=prefix, q_atoms=q_atoms,
        turn_atom=turn_atom, sync_schema=sync_schema,
        sync_name=fond.ground_action_name(sync_schema, ()),
        bookkeeping=bookkeeping)


def _sync_action(dfa: Dfa | Pdfa, q_atoms: tuple[Atom, ...], turn_atom: Atom,
                 name: str, params: tuple[Parameter, ...],
                 extra_pre: tuple[Literal, ...] = ()) -> ActionSchema:
    """One conditional effect per DFA transition: entering state t asserts
    q_t and retracts every other state fluent."""
    effects: list[Effect] = [eff_lit(Literal(turn_atom, True))]
    n = len(q_atoms)
    for s in range(n):
        source = logic.from_atom(q_atoms[s])
        for guard, target in dfa.transitions[s]:
            cond = source if guard.kind == "true" else logic.land(source, guard)
            body = [eff_lit(Literal(q_atoms[target], True))]
            body.extend(eff_lit(Literal(q_atoms[u], False))
                        for u in range(n) if u != target)
            effects.append(eff_when(cond, eff_and(body)))
    return ActionSchema(
        name=name, params=params,
        precondition=(Literal(turn_atom, False),) + extra_pre,
        effect=eff_and(effects))


def _parametric_pair(aug: AugmentedProblem) -> tuple[Domain, ProblemInstance]:
    """Rebuild the augmented pair with the objects of interest lifted to
    parameters of the automaton fluents and of the sync action.

    A static `tracked` fact pins the sync parameters to the objects of
    interest, so grounding the emitted files yields exactly one sync
    action and the automaton cannot skip letters."""
    objs = aug.objects_of_interest
    obj_types = dict(aug.base_problem.objects)
    pdfa = aug.pdfa
    params = tuple(Parameter(var, obj_types[obj])
                   for obj, var in pdfa.object_map)
    variables = tuple(var for _, var in pdfa.object_map)

    q_lifted = tuple(Atom(a.predicate, variables) for a in aug.q_atoms)
    tracked_name = f"{aug.prefix}tracked"

    predicates = list(aug.base_domain.predicates)
    predicates.extend(PredicateSchema(a.predicate, params) for a in q_lifted)
    predicates.append(PredicateSchema(aug.turn_atom.predicate, ()))
    predicates.append(PredicateSchema(tracked_name, params))

    actions = [
        ActionSchema(
            name=a.name, params=a.params,
            precondition=a.precondition + (Literal(aug.turn_atom, True),),
            effect=eff_and((a.effect, eff_lit(Literal(aug.turn_atom, False)))))
        for a in aug.base_domain.actions
    ]
    actions.append(_sync_action(
        pdfa, q_lifted, aug.turn_atom, aug.sync_schema, params,
        extra_pre=(Literal(Atom(tracked_name, variables), True),)))

    domain = Domain(
        name=aug.domain.name,
        requirements=aug.domain.requirements,
        types=aug.base_domain.types,
        predicates=tuple(predicates),
        actions=tuple(actions),
    )

    accepting = [Atom(aug.q_atoms[i].predicate, objs)
                 for i in sorted(aug.dfa.accepting)]
    goal = logic.land(
        logic.disj([logic.from_atom(a) for a in accepting]),
        logic.from_atom(aug.turn_atom))
    problem = ProblemInstance(
        name=aug.problem.name,
        domain_name=domain.name,
        objects=aug.base_problem.objects,
        init=aug.base_problem.init
        | {Atom(aug.q_atoms[0].predicate, objs), Atom(tracked_name, objs)},
        goal=goal,
    )
    return domain, problem


def emit_pddl(aug: AugmentedProblem, mode: str = "grounded") -> tuple[str, str]:
    """Render the augmented task as PDDL text (domain, problem)."""
    if mode == "grounded":
        return fond.domain_to_pddl(aug.domain), fond.problem_to_pddl(aug.problem)
    if mode == "parametric":
        domain, problem = _parametric_pair(aug)
        return fond.domain_to_pddl(domain), fond.problem_to_pddl(problem)
    raise CompileError(f"unknown emission mode {mode!r}")


def write_pddl(aug: AugmentedProblem, out_dir: str, *,
               mode: str = "grounded") -> tuple[str, str]:
    """Write `<task>__<goal-id>__domain.pddl` and `...__problem.pddl`."""
    domain_text, problem_text = emit_pddl(aug, mode)
    task = aug.base_problem.name
    stem = f"{task}__{aug.goal_id}__"
    os.makedirs(out_dir, exist_ok=True)
    domain_path = os.path.join(out_dir, stem + "domain.pddl")
    problem_path = os.path.join(out_dir, stem + "problem.pddl")
    with open(domain_path, "w") as fh:
        fh.write(domain_text)
    with open(problem_path, "w") as fh:
        fh.write(problem_text)
    return domain_path, problem_path


def strip_sync(actions, sync_schema: str = "trans") -> list[str]:
    """Remove sync actions from a compiled action sequence.

    Valid sequences alternate strictly, starting and ending with a sync
    action: t, a1, t, a2, ..., t. Anything else is malformed.
    """

    def is_sync(name: str) -> bool:
        head = name[1:-1].split() if name.startswith("(") else name.split()
        return bool(head) and head[0] == sync_schema

    acts = list(actions)
    if not acts:
        raise MalformedAlternationError(
            "empty sequence: a compiled execution starts with the sync action")
    out: list[str] = []
    for i, name in enumerate(acts):
        if i % 2 == 0:
            if not is_sync(name):
                raise MalformedAlternationError(
                    f"expected the sync action at position {i}, found {name}")
        else:
            if is_sync(name):
                raise MalformedAlternationError(
                    f"unexpected sync action at position {i}")
            out.append(name)
    if len(acts) % 2 == 0:
        raise MalformedAlternationError(
            "compiled execution must end with the sync action")
    return out
