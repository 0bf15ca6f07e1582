"""PDDL subset for fully observable nondeterministic planning.

Supported: :strips, :typing (flat or chained parents),
:negative-preconditions, :conditional-effects, and :non-deterministic
oneof effects (nested oneofs are distributed into flat alternatives).
Names are case-sensitive. Preconditions are conjunctions of literals;
conditions of `when` effects and problem goals may use and/or/not.

Grounding enumerates the full typed fluent universe in declaration
order, prunes action bindings whose static precondition literals fail in
the initial state, and yields an indexed model: states are frozensets of
fluent indices, `successors` returns one state per nondeterministic
branch with duplicates merged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import logic
from .errors import (GroundingCapError, InapplicableActionError,
                     PddlParseError, UnsupportedFeatureError)
from .logic import Atom, Formula


# ---------------------------------------------------------------------------
# S-expression reader

class Symbol(str):
    """A bare token; carries its source position for error messages."""

    line: int = 0
    column: int = 0


def _read_sexprs(text: str) -> list:
    exprs: list = []
    stack: list[list] = [exprs]
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if ch == "(":
            new: list = []
            stack[-1].append(new)
            stack.append(new)
            col += 1
            i += 1
            continue
        if ch == ")":
            if len(stack) == 1:
                raise PddlParseError("unbalanced ')'", line, col)
            stack.pop()
            col += 1
            i += 1
            continue
        j = i
        while j < n and text[j] not in " \t\r\n();":
            j += 1
        sym = Symbol(text[i:j])
        sym.line, sym.column = line, col
        stack[-1].append(sym)
        col += j - i
        i = j
    if len(stack) != 1:
        raise PddlParseError("unbalanced '('", line, col)
    return exprs


def _head_is(expr, word: str) -> bool:
    return isinstance(expr, list) and expr and isinstance(expr[0], str) \
        and expr[0] == word


def _err(node, message: str) -> PddlParseError:
    if isinstance(node, Symbol):
        return PddlParseError(message, node.line, node.column)
    if isinstance(node, list):
        for item in node:
            if isinstance(item, Symbol):
                return PddlParseError(message, item.line, item.column)
    return PddlParseError(message)


# ---------------------------------------------------------------------------
# Schema-level model

@dataclass(frozen=True)
class Parameter:
    name: str
    type: str


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple[Parameter, ...]


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)


@dataclass(frozen=True)
class Effect:
    """Effect tree node: kind is one of lit, and, when, oneof."""

    kind: str
    literal: Literal | None = None
    condition: Formula | None = None
    children: tuple["Effect", ...] = ()


def eff_lit(literal: Literal) -> Effect:
    return Effect("lit", literal=literal)


def eff_and(children) -> Effect:
    return Effect("and", children=tuple(children))


def eff_when(condition: Formula, body: Effect) -> Effect:
    return Effect("when", condition=condition, children=(body,))


def eff_oneof(children) -> Effect:
    return Effect("oneof", children=tuple(children))


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[Parameter, ...]
    precondition: tuple[Literal, ...]
    effect: Effect


@dataclass(frozen=True)
class Domain:
    name: str
    requirements: tuple[str, ...]
    types: tuple[tuple[str, str], ...]  # (type, parent) pairs
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]

    def predicate(self, name: str) -> PredicateSchema | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]  # (object, type) pairs
    init: frozenset[Atom]
    goal: Formula | None = None


_KNOWN_REQUIREMENTS = {
    ":strips", ":typing", ":negative-preconditions",
    ":conditional-effects", ":non-deterministic",
}

_UNSUPPORTED_HINTS = {
    "forall", "exists", "imply", "increase", "decrease", "assign",
    "scale-up", "scale-down", "=",
}


# ---------------------------------------------------------------------------
# Parsing

def _parse_typed_list(items: list, what: str) -> list[tuple[str, str]]:
    """Parse `a b - t c - u d` into [(a,t),(b,t),(c,u),(d,"object")]."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        tok = items[i]
        if not isinstance(tok, str):
            raise _err(tok, f"expected a name in {what} list")
        if tok == "-":
            if i + 1 >= len(items) or not isinstance(items[i + 1], str):
                raise _err(tok, f"missing type after '-' in {what} list")
            t = str(items[i + 1])
            out.extend((name, t) for name in pending)
            pending = []
            i += 2
            continue
        pending.append(str(tok))
        i += 1
    out.extend((name, "object") for name in pending)
    return out


def _parse_atom(expr, what: str) -> Atom:
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str):
        raise _err(expr, f"malformed atom in {what}")
    head = str(expr[0])
    if head in _UNSUPPORTED_HINTS:
        raise UnsupportedFeatureError(f"unsupported construct ({head} ...) in {what}")
    if not all(isinstance(x, str) for x in expr):
        raise _err(expr, f"malformed atom in {what}")
    return Atom(head, tuple(str(x) for x in expr[1:]))


def _parse_condition(expr, what: str) -> Formula:
    """General propositional condition: and / or / not / atom."""
    if isinstance(expr, list) and expr and isinstance(expr[0], str):
        head = str(expr[0])
        if head == "and":
            return logic.conj([_parse_condition(c, what) for c in expr[1:]])
        if head == "or":
            return logic.disj([_parse_condition(c, what) for c in expr[1:]])
        if head == "not":
            if len(expr) != 2:
                raise _err(expr, f"(not ...) takes one argument in {what}")
            return logic.lnot(_parse_condition(expr[1], what))
        if head in ("oneof", "when"):
            raise _err(expr, f"({head} ...) is not allowed inside a condition")
    return logic.from_atom(_parse_atom(expr, what))


def _condition_to_literals(f: Formula, what: str) -> tuple[Literal, ...]:
    """Flatten a condition into a conjunction of literals or reject it."""
    lits: list[Literal] = []

    def walk(g: Formula) -> None:
        if g.kind == "true":
            return
        if g.kind == "and":
            walk(g.children[0])
            walk(g.children[1])
            return
        if g.kind == "atom":
            assert g.atom is not None
            lits.append(Literal(g.atom, True))
            return
        if g.kind == "not" and g.children[0].kind == "atom":
            inner = g.children[0].atom
            assert inner is not None
            lits.append(Literal(inner, False))
            return
        raise UnsupportedFeatureError(
            f"{what} must be a conjunction of literals")

    walk(f)
    return tuple(lits)


def _parse_effect(expr, what: str) -> Effect:
    if isinstance(expr, list) and expr and isinstance(expr[0], str):
        head = str(expr[0])
        if head == "and":
            return eff_and(_parse_effect(c, what) for c in expr[1:])
        if head == "oneof":
            children = [_parse_effect(c, what) for c in expr[1:]]
            if not children:
                raise _err(expr, "(oneof) needs at least one alternative")
            return eff_oneof(children)
        if head == "when":
            if len(expr) != 3:
                raise _err(expr, "(when condition effect) takes two arguments")
            cond = _parse_condition(expr[1], f"{what} when-condition")
            return eff_when(cond, _parse_effect(expr[2], what))
        if head == "not":
            if len(expr) != 2:
                raise _err(expr, "(not ...) takes one argument")
            return eff_lit(Literal(_parse_atom(expr[1], what), False))
        if head in _UNSUPPORTED_HINTS:
            raise UnsupportedFeatureError(
                f"unsupported construct ({head} ...) in {what}")
    return eff_lit(Literal(_parse_atom(expr, what), True))


def parse_domain(text: str) -> Domain:
    exprs = _read_sexprs(text)
    if len(exprs) != 1 or not _head_is(exprs[0], "define"):
        raise PddlParseError("expected a single (define (domain ...)) form")
    body = exprs[0][1:]
    if not body or not _head_is(body[0], "domain") or len(body[0]) != 2:
        raise _err(exprs[0], "expected (domain NAME)")
    name = str(body[0][1])

    requirements: tuple[str, ...] = ()
    types: list[tuple[str, str]] = []
    predicates: list[PredicateSchema] = []
    actions: list[ActionSchema] = []

    for section in body[1:]:
        if not isinstance(section, list) or not section \
                or not isinstance(section[0], str):
            raise _err(section, "malformed domain section")
        head = str(section[0])
        if head == ":requirements":
            reqs = [str(r) for r in section[1:]]
            for r in reqs:
                if r not in _KNOWN_REQUIREMENTS:
                    raise UnsupportedFeatureError(f"unsupported requirement {r}")
            requirements = tuple(reqs)
        elif head == ":types":
            types = _parse_typed_list(section[1:], "types")
        elif head == ":predicates":
            for p in section[1:]:
                if not isinstance(p, list) or not p or not isinstance(p[0], str):
                    raise _err(p, "malformed predicate declaration")
                params = _parse_typed_list(p[1:], "predicate parameters")
                predicates.append(PredicateSchema(
                    str(p[0]), tuple(Parameter(n, t) for n, t in params)))
        elif head == ":action":
            actions.append(_parse_action(section))
        elif head in (":constants", ":functions", ":axioms", ":derived"):
            raise UnsupportedFeatureError(f"unsupported domain section {head}")
        else:
            raise UnsupportedFeatureError(f"unknown domain section {head}")

    return Domain(name, requirements, tuple(types), tuple(predicates),
                  tuple(actions))


def _parse_action(section: list) -> ActionSchema:
    if len(section) < 2 or not isinstance(section[1], str):
        raise _err(section, "expected (:action NAME ...)")
    name = str(section[1])
    params: tuple[Parameter, ...] = ()
    precondition: tuple[Literal, ...] = ()
    effect: Effect | None = None
    i = 2
    while i < len(section):
        key = section[i]
        if not isinstance(key, str) or not key.startswith(":"):
            raise _err(key, f"expected a keyword in action {name}")
        if i + 1 >= len(section):
            raise _err(key, f"missing value for {key} in action {name}")
        value = section[i + 1]
        if key == ":parameters":
            if not isinstance(value, list):
                raise _err(value, ":parameters expects a list")
            params = tuple(Parameter(n, t)
                           for n, t in _parse_typed_list(value, "parameters"))
        elif key == ":precondition":
            cond = _parse_condition(value, f"precondition of {name}")
            precondition = _condition_to_literals(
                cond, f"precondition of {name}")
        elif key == ":effect":
            effect = _parse_effect(value, f"effect of {name}")
        else:
            raise UnsupportedFeatureError(f"unsupported action keyword {key}")
        i += 2
    if effect is None:
        raise PddlParseError(f"action {name} has no :effect")
    return ActionSchema(name, params, precondition, effect)


def parse_problem(text: str) -> ProblemInstance:
    exprs = _read_sexprs(text)
    if len(exprs) != 1 or not _head_is(exprs[0], "define"):
        raise PddlParseError("expected a single (define (problem ...)) form")
    body = exprs[0][1:]
    if not body or not _head_is(body[0], "problem") or len(body[0]) != 2:
        raise _err(exprs[0], "expected (problem NAME)")
    name = str(body[0][1])

    domain_name = ""
    objects: list[tuple[str, str]] = []
    init: list[Atom] = []
    goal: Formula | None = None

    for section in body[1:]:
        if not isinstance(section, list) or not section \
                or not isinstance(section[0], str):
            raise _err(section, "malformed problem section")
        head = str(section[0])
        if head == ":domain":
            if len(section) != 2:
                raise _err(section, "expected (:domain NAME)")
            domain_name = str(section[1])
        elif head == ":objects":
            objects = _parse_typed_list(section[1:], "objects")
        elif head == ":init":
            for item in section[1:]:
                init.append(_parse_atom(item, "init"))
        elif head == ":goal":
            if len(section) != 2:
                raise _err(section, "expected (:goal CONDITION)")
            goal = _parse_condition(section[1], "goal")
        else:
            raise UnsupportedFeatureError(f"unsupported problem section {head}")

    if not domain_name:
        raise PddlParseError(f"problem {name} has no (:domain ...) section")
    return ProblemInstance(name, domain_name, tuple(objects),
                           frozenset(init), goal)


# ---------------------------------------------------------------------------
# Branch normalization: one flat alternative list per action

def effect_branches(effect: Effect) -> list[tuple[tuple[Formula, Literal], ...]]:
    """Distribute oneof/when/and into a list of deterministic branches.

    Each branch is a tuple of (condition, literal): apply the literal when
    the condition holds in the pre-state. Independent oneofs multiply.
    """
    if effect.kind == "lit":
        assert effect.literal is not None
        return [((logic.TRUE, effect.literal),)]
    if effect.kind == "and":
        combos: list[tuple[tuple[Formula, Literal], ...]] = [()]
        for child in effect.children:
            child_branches = effect_branches(child)
            combos = [acc + cb for acc in combos for cb in child_branches]
        return combos
    if effect.kind == "oneof":
        out: list[tuple[tuple[Formula, Literal], ...]] = []
        for child in effect.children:
            out.extend(effect_branches(child))
        return out
    if effect.kind == "when":
        assert effect.condition is not None
        gate = effect.condition
        out = []
        for branch in effect_branches(effect.children[0]):
            out.append(tuple(
                (gate if cond.kind == "true" else logic.land(gate, cond), lit)
                for cond, lit in branch))
        return out
    raise UnsupportedFeatureError(f"unknown effect kind {effect.kind!r}")


# ---------------------------------------------------------------------------
# Grounding

# Compiled conditions are nested tuples evaluated against a state set.
def _compile_condition(f: Formula, index: dict[Atom, int], what: str):
    k = f.kind
    if k == "atom":
        assert f.atom is not None
        i = index.get(f.atom)
        if i is None:
            raise PddlParseError(f"unknown atom {f.atom} in {what}")
        return ("atom", i)
    if k == "true":
        return ("true",)
    if k == "false":
        return ("false",)
    if k == "not":
        return ("not", _compile_condition(f.children[0], index, what))
    if k == "and":
        return ("and", _compile_condition(f.children[0], index, what),
                _compile_condition(f.children[1], index, what))
    if k == "or":
        return ("or", _compile_condition(f.children[0], index, what),
                _compile_condition(f.children[1], index, what))
    raise UnsupportedFeatureError(f"temporal operator inside {what}")


def _eval_compiled(cond, state: frozenset[int]) -> bool:
    tag = cond[0]
    if tag == "atom":
        return cond[1] in state
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "not":
        return not _eval_compiled(cond[1], state)
    if tag == "and":
        return _eval_compiled(cond[1], state) and _eval_compiled(cond[2], state)
    return _eval_compiled(cond[1], state) or _eval_compiled(cond[2], state)


@dataclass(frozen=True)
class GroundAction:
    name: str
    index: int
    pre_pos: frozenset[int]
    pre_neg: frozenset[int]
    # branches[b] = tuple of (compiled condition, fluent index, positive)
    branches: tuple[tuple[tuple[object, int, bool], ...], ...] = field(repr=False)


@dataclass
class GroundedFond:
    """Indexed FOND model: fluents, ground actions, initial state, goal."""

    domain: Domain
    problem: ProblemInstance
    fluents: tuple[Atom, ...]
    fluent_index: dict[Atom, int] = field(repr=False)
    actions: tuple[GroundAction, ...] = field(repr=False)
    action_index: dict[str, int] = field(repr=False)
    s0: frozenset[int] = frozenset()
    goal: Formula | None = None
    _goal_compiled: object | None = field(default=None, repr=False)

    def applicable(self, state: frozenset[int], action: int) -> bool:
        a = self.actions[action]
        return a.pre_pos <= state and not a.pre_neg & state

    def applicable_actions(self, state: frozenset[int]) -> list[int]:
        return [i for i in range(len(self.actions)) if self.applicable(state, i)]

    def successors(self, state: frozenset[int], action: int) -> tuple[frozenset[int], ...]:
        a = self.actions[action]
        if not self.applicable(state, action):
            raise InapplicableActionError(
                f"{a.name} is not applicable in {self.state_str(state)}")
        out: list[frozenset[int]] = []
        seen: set[frozenset[int]] = set()
        for branch in a.branches:
            adds: set[int] = set()
            dels: set[int] = set()
            for cond, fluent, positive in branch:
                if _eval_compiled(cond, state):
                    (adds if positive else dels).add(fluent)
            succ = frozenset((state - dels) | adds)
            if succ not in seen:
                seen.add(succ)
                out.append(succ)
        return tuple(out)

    def is_goal(self, state: frozenset[int]) -> bool:
        if self._goal_compiled is None:
            raise PddlParseError("problem has no goal")
        return _eval_compiled(self._goal_compiled, state)

    def atoms_of(self, state: frozenset[int]) -> frozenset[Atom]:
        return frozenset(self.fluents[i] for i in state)

    def state_of(self, atoms: frozenset[Atom] | set[Atom]) -> frozenset[int]:
        missing = [a for a in atoms if a not in self.fluent_index]
        if missing:
            raise PddlParseError(f"unknown fluent {sorted(map(str, missing))[0]}")
        return frozenset(self.fluent_index[a] for a in atoms)

    def state_str(self, state: frozenset[int]) -> str:
        return " ".join(sorted(pddl_atom_str(self.fluents[i]) for i in state))


def pddl_atom_str(a: Atom) -> str:
    """Always-parenthesized rendering, unambiguous in space-joined lists."""
    return "(" + " ".join((a.predicate,) + a.args) + ")"


def ground_action_name(action: str, args: tuple[str, ...]) -> str:
    return "(" + " ".join((action,) + args) + ")"


def _type_table(domain: Domain,
                problem: ProblemInstance) -> dict[str, list[str]]:
    parents = dict(domain.types)
    table: dict[str, list[str]] = {"object": []}
    for t, _ in domain.types:
        table.setdefault(t, [])
    for name, t in problem.objects:
        if t != "object" and t not in parents:
            raise PddlParseError(f"object {name} has undeclared type {t}")
        seen_chain = set()
        cur: str | None = t
        while cur is not None and cur not in seen_chain:
            seen_chain.add(cur)
            table.setdefault(cur, []).append(name)
            cur = parents.get(cur)
        if "object" not in seen_chain:
            table["object"].append(name)
    return table


def ground(domain: Domain, problem: ProblemInstance, *,
           fluent_cap: int = 200_000, action_cap: int = 100_000) -> GroundedFond:
    """Instantiate the schema model into an indexed ground FOND model."""
    if problem.domain_name != domain.name:
        raise PddlParseError(
            f"problem {problem.name} targets domain {problem.domain_name!r}, "
            f"got {domain.name!r}")
    by_type = _type_table(domain, problem)

    fluents: list[Atom] = []
    fluent_index: dict[Atom, int] = {}
    for pred in domain.predicates:
        pools = [by_type.get(p.type, []) for p in pred.params]
        for combo in itertools.product(*pools):
            a = Atom(pred.name, tuple(combo))
            if a not in fluent_index:
                fluent_index[a] = len(fluents)
                fluents.append(a)
            if len(fluents) > fluent_cap:
                raise GroundingCapError(
                    f"grounding exceeded {fluent_cap} fluents")

    for a in problem.init:
        if a not in fluent_index:
            raise PddlParseError(
                f"init atom {pddl_atom_str(a)} is not a well-typed instance "
                "of a declared predicate")

    static_preds = {p.name for p in domain.predicates}
    for schema in domain.actions:
        for branch in effect_branches(schema.effect):
            for _, lit in branch:
                static_preds.discard(lit.atom.predicate)

    actions: list[GroundAction] = []
    action_index: dict[str, int] = {}
    init_set = problem.init
    for schema in domain.actions:
        schema_branches = effect_branches(schema.effect)
        pools = [by_type.get(p.type, []) for p in schema.params]
        names = [p.name for p in schema.params]
        for combo in itertools.product(*pools):
            theta = dict(zip(names, combo))

            def subst(a: Atom) -> Atom:
                return Atom(a.predicate, tuple(theta.get(x, x) for x in a.args))

            pre_pos: set[int] = set()
            pre_neg: set[int] = set()
            ok = True
            for lit in schema.precondition:
                ga = subst(lit.atom)
                if ga not in fluent_index:
                    raise PddlParseError(
                        f"precondition atom {pddl_atom_str(ga)} of "
                        f"{schema.name} is not a declared fluent")
                if ga.predicate in static_preds:
                    holds = ga in init_set
                    if holds != lit.positive:
                        ok = False
                        break
                    continue
                (pre_pos if lit.positive else pre_neg).add(fluent_index[ga])
            if not ok:
                continue

            ground_branches = []
            for branch in schema_branches:
                parts = []
                for cond, lit in branch:
                    gcond = _substitute_formula(cond, theta)
                    ga = subst(lit.atom)
                    if ga not in fluent_index:
                        raise PddlParseError(
                            f"effect atom {pddl_atom_str(ga)} of "
                            f"{schema.name} is not a declared fluent")
                    parts.append((
                        _compile_condition(gcond, fluent_index,
                                           f"effect condition of {schema.name}"),
                        fluent_index[ga], lit.positive))
                ground_branches.append(tuple(parts))

            name = ground_action_name(schema.name, tuple(combo))
            action_index[name] = len(actions)
            actions.append(GroundAction(
                name=name, index=len(actions),
                pre_pos=frozenset(pre_pos), pre_neg=frozenset(pre_neg),
                branches=tuple(ground_branches)))
            if len(actions) > action_cap:
                raise GroundingCapError(
                    f"grounding exceeded {action_cap} actions")

    goal_compiled = None
    goal = problem.goal
    if goal is not None:
        goal_compiled = _compile_condition(goal, fluent_index, "goal")

    return GroundedFond(
        domain=domain, problem=problem,
        fluents=tuple(fluents), fluent_index=fluent_index,
        actions=tuple(actions), action_index=action_index,
        s0=frozenset(fluent_index[a] for a in problem.init),
        goal=goal, _goal_compiled=goal_compiled)


def _substitute_formula(f: Formula, theta: dict[str, str]) -> Formula:
    if f.kind == "atom":
        assert f.atom is not None
        return logic.from_atom(
            Atom(f.atom.predicate,
                 tuple(theta.get(x, x) for x in f.atom.args)))
    if not f.children:
        return f
    return Formula(f.kind, tuple(_substitute_formula(c, theta)
                                 for c in f.children))


# ---------------------------------------------------------------------------
# Writing PDDL back out

def _format_typed(pairs, indent: str) -> str:
    return " ".join(f"{n} - {t}" for n, t in pairs)


def _condition_to_sexpr(f: Formula) -> str:
    k = f.kind
    if k == "atom":
        assert f.atom is not None
        return pddl_atom_str(f.atom)
    if k == "true":
        return "(and)"
    if k == "false":
        return "(or)"
    if k == "not":
        return f"(not {_condition_to_sexpr(f.children[0])})"
    if k in ("and", "or"):
        flat: list[Formula] = []

        def gather(g: Formula) -> None:
            if g.kind == k:
                gather(g.children[0])
                gather(g.children[1])
            else:
                flat.append(g)

        gather(f)
        inner = " ".join(_condition_to_sexpr(c) for c in flat)
        return f"({k} {inner})"
    raise UnsupportedFeatureError(f"cannot write temporal operator {k} as PDDL")


def _literal_to_sexpr(lit: Literal) -> str:
    s = pddl_atom_str(lit.atom)
    return s if lit.positive else f"(not {s})"


def _effect_to_sexpr(e: Effect) -> str:
    if e.kind == "lit":
        assert e.literal is not None
        return _literal_to_sexpr(e.literal)
    if e.kind == "and":
        if not e.children:
            return "(and)"
        return "(and " + " ".join(_effect_to_sexpr(c) for c in e.children) + ")"
    if e.kind == "when":
        assert e.condition is not None
        return (f"(when {_condition_to_sexpr(e.condition)} "
                f"{_effect_to_sexpr(e.children[0])})")
    if e.kind == "oneof":
        return "(oneof " + " ".join(_effect_to_sexpr(c) for c in e.children) + ")"
    raise UnsupportedFeatureError(f"unknown effect kind {e.kind!r}")


def domain_to_pddl(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append("  (:requirements " + " ".join(domain.requirements) + ")")
    if domain.types:
        lines.append("  (:types " + _format_typed(domain.types, "") + ")")
    preds = []
    for p in domain.predicates:
        if p.params:
            inner = " ".join(f"{q.name} - {q.type}" for q in p.params)
            preds.append(f"({p.name} {inner})")
        else:
            preds.append(f"({p.name})")
    lines.append("  (:predicates " + " ".join(preds) + ")")
    for a in domain.actions:
        lines.append(f"  (:action {a.name}")
        params = " ".join(f"{p.name} - {p.type}" for p in a.params)
        lines.append(f"    :parameters ({params})")
        pre = logic.conj([logic.from_atom(l.atom) if l.positive
                          else logic.lnot(logic.from_atom(l.atom))
                          for l in a.precondition])
        lines.append(f"    :precondition {_condition_to_sexpr(pre)}")
        lines.append(f"    :effect {_effect_to_sexpr(a.effect)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def problem_to_pddl(problem: ProblemInstance) -> str:
    lines = [f"(define (problem {problem.name})",
             f"  (:domain {problem.domain_name})"]
    if problem.objects:
        lines.append("  (:objects " + _format_typed(problem.objects, "") + ")")
    init = " ".join(sorted(pddl_atom_str(a) for a in problem.init))
    lines.append(f"  (:init {init})")
    if problem.goal is not None:
        lines.append(f"  (:goal {_condition_to_sexpr(problem.goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"
