"""Translation of finite-trace temporal formulas into minimal DFAs.

The alphabet of a formula's DFA is the powerset of its atoms. Letters are
handled as "minterms": integer bitmasks over the sorted atom tuple, so the
exponential alphabet is never materialized as formula objects. Transition
guards presented to callers are propositional formulas obtained from the
minterm groups by Quine-McCluskey simplification.

LTLf formulas go through negation normal form and a syntax-driven NFA
(states are sets of pending obligations), then subset construction.
PLTLf formulas use the standard truth-vector construction: a state is the
truth value of every subformula after reading a prefix. Both results are
completed, Hopcroft-minimized, and renumbered in BFS order so equal
formulas always yield structurally identical automata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import logic
from .errors import AutomatonCapError, TgrError
from .logic import Atom, Formula

DEFAULT_STATE_CAP = 100_000
_MAX_ATOMS = 12  # alphabet has 2^n minterms; beyond this the table is hopeless


@dataclass(frozen=True)
class Dfa:
    """A complete, minimal DFA over subsets of `atoms`.

    `table[s][m]` is the successor of state s on minterm m, where bit i of
    m is the truth of atoms[i]. `transitions[s]` presents the same rows as
    (guard formula, target) pairs with mutually exclusive, total guards.
    State 0 is initial.
    """

    atoms: tuple[Atom, ...]
    accepting: frozenset[int]
    table: tuple[tuple[int, ...], ...]
    transitions: tuple[tuple[tuple[Formula, int], ...], ...] = field(repr=False)

    @property
    def n_states(self) -> int:
        return len(self.table)

    @property
    def initial(self) -> int:
        return 0

    def minterm(self, valuation: Iterable[Atom]) -> int:
        val = valuation if isinstance(valuation, (set, frozenset)) else set(valuation)
        m = 0
        for i, a in enumerate(self.atoms):
            if a in val:
                m |= 1 << i
        return m

    def step(self, state: int, valuation: Iterable[Atom]) -> int:
        return self.table[state][self.minterm(valuation)]

    def accepts(self, trace: Sequence[Iterable[Atom]]) -> bool:
        state = 0
        for valuation in trace:
            state = self.step(state, valuation)
        return state in self.accepting


@dataclass(frozen=True)
class Pdfa:
    """A DFA whose atoms mention parameters instead of concrete objects.

    `object_map` records, in order, which object each parameter replaced.
    Atom order matches the source DFA so `instantiate` is the structural
    inverse of `lift`.
    """

    atoms: tuple[Atom, ...]
    accepting: frozenset[int]
    table: tuple[tuple[int, ...], ...]
    transitions: tuple[tuple[tuple[Formula, int], ...], ...] = field(repr=False)
    object_map: tuple[tuple[str, str], ...] = ()  # (object, variable) pairs

    @property
    def n_states(self) -> int:
        return len(self.table)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(var for _, var in self.object_map)

    def instantiate(self, bindings: dict[str, str] | None = None) -> Dfa:
        """Substitute objects back for variables. With no argument, undo
        the lift exactly."""
        if bindings is None:
            bindings = {var: obj for obj, var in self.object_map}
        missing = [var for _, var in self.object_map if var not in bindings]
        if missing:
            raise TgrError(f"instantiate: no binding for {missing[0]!r}")
        sub = {a: Atom(a.predicate, tuple(bindings.get(x, x) for x in a.args))
               for a in self.atoms}
        return Dfa(
            atoms=tuple(sub[a] for a in self.atoms),
            accepting=self.accepting,
            table=self.table,
            transitions=tuple(
                tuple((_substitute(guard, sub), tgt) for guard, tgt in row)
                for row in self.transitions),
        )


def _substitute(f: Formula, sub: dict[Atom, Atom]) -> Formula:
    if f.kind == "atom":
        assert f.atom is not None
        return Formula("atom", atom=sub.get(f.atom, f.atom))
    if not f.children:
        return f
    return Formula(f.kind, tuple(_substitute(c, sub) for c in f.children))


# ---------------------------------------------------------------------------
# LTLf: obligation-set NFA + subset construction

def _expand(f: Formula, val: frozenset[Atom],
            memo: dict) -> frozenset[frozenset]:
    """Ways to satisfy NNF formula `f` when the current letter is `val`.

    Each way is a set of obligations (strong, formula) that the rest of
    the trace must fulfil; a strong obligation demands that a next letter
    exists. The empty result means `f` cannot hold here.
    """
    key = (f, val)
    hit = memo.get(key)
    if hit is not None:
        return hit
    k = f.kind
    empty = frozenset()
    if k == "atom":
        out = frozenset([empty]) if f.atom in val else frozenset()
    elif k == "not":  # NNF: child is an atom
        child = f.children[0]
        out = frozenset() if child.atom in val else frozenset([empty])
    elif k == "true":
        out = frozenset([empty])
    elif k == "false":
        out = frozenset()
    elif k == "and":
        lefts = _expand(f.children[0], val, memo)
        rights = _expand(f.children[1], val, memo)
        out = frozenset(x | y for x in lefts for y in rights)
    elif k == "or":
        out = _expand(f.children[0], val, memo) | _expand(f.children[1], val, memo)
    elif k == "next":
        out = frozenset([frozenset([(True, f.children[0])])])
    elif k == "weak_next":
        out = frozenset([frozenset([(False, f.children[0])])])
    elif k == "until":
        now = _expand(f.children[1], val, memo)
        later = _expand(f.children[0], val, memo)
        out = now | frozenset(x | frozenset([(True, f)]) for x in later)
    elif k == "eventually":
        now = _expand(f.children[0], val, memo)
        out = now | frozenset([frozenset([(True, f)])])
    elif k == "always":
        now = _expand(f.children[0], val, memo)
        out = frozenset(x | frozenset([(False, f)]) for x in now)
    else:  # pragma: no cover
        raise TgrError(f"unexpected kind in NNF: {k!r}")
    memo[key] = out
    return out


def _nfa_step(state: frozenset, val: frozenset[Atom],
              memo: dict) -> frozenset[frozenset]:
    """Successor obligation sets of an NFA state on letter `val`."""
    options: frozenset[frozenset] = frozenset([frozenset()])
    for _, formula in state:
        ways = _expand(formula, val, memo)
        if not ways:
            return frozenset()
        options = frozenset(acc | w for acc in options for w in ways)
    return options


def _nfa_accepting(state: frozenset) -> bool:
    return all(not strong for strong, _ in state)


def ltlf_to_dfa(f: Formula, state_cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Minimal DFA accepting exactly the finite traces satisfying `f`."""
    if logic.dialect(f) != "LTLf":
        raise TgrError("ltlf_to_dfa requires a future-dialect formula")
    nnf = logic.to_nnf(f)
    atoms = tuple(sorted(logic.atoms(f) | logic.atoms(nnf)))
    if len(atoms) > _MAX_ATOMS:
        raise AutomatonCapError(
            f"formula has {len(atoms)} atoms; the minterm alphabet cap is "
            f"{_MAX_ATOMS}")
    n_minterms = 1 << len(atoms)
    letters = [frozenset(a for i, a in enumerate(atoms) if m >> i & 1)
               for m in range(n_minterms)]
    memo: dict = {}

    # DFA states are frozensets of NFA states; index 0 is a distinguished
    # initial state whose successors come from expanding the formula itself.
    ids: dict[frozenset, int] = {}
    rows: list[list[int]] = []
    acc: set[int] = set()
    values: list[frozenset | None] = [None]
    rows.append([])
    if logic.evaluate(f, []):
        acc.add(0)

    def intern(value: frozenset) -> int:
        got = ids.get(value)
        if got is not None:
            return got
        idx = len(values)
        if idx > state_cap:
            raise AutomatonCapError(f"DFA exceeded {state_cap} states")
        ids[value] = idx
        values.append(value)
        rows.append([])
        if any(_nfa_accepting(s) for s in value):
            acc.add(idx)
        return idx

    frontier = 0
    while frontier < len(values):
        value = values[frontier]
        row = rows[frontier]
        for letter in letters:
            if value is None:
                targets = _expand(nnf, letter, memo)
            else:
                targets = frozenset()
                for nfa_state in value:
                    targets |= _nfa_step(nfa_state, letter, memo)
            row.append(intern(targets))
        frontier += 1

    return _finish(atoms, rows, acc)


# ---------------------------------------------------------------------------
# PLTLf: truth-vector construction

def pltlf_to_dfa(f: Formula, state_cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Minimal DFA accepting the traces whose final position satisfies `f`."""
    if logic.dialect(f) != "PLTLf":
        # A purely propositional formula is also fine here: read it as a
        # past formula evaluated at the last position.
        if not logic.is_propositional(f):
            raise TgrError("pltlf_to_dfa requires a past-dialect formula")
    subs = logic.subformulas(f)
    index = {g: i for i, g in enumerate(subs)}
    root = index[f]
    atoms = tuple(sorted(logic.atoms(f)))
    if len(atoms) > _MAX_ATOMS:
        raise AutomatonCapError(
            f"formula has {len(atoms)} atoms; the minterm alphabet cap is "
            f"{_MAX_ATOMS}")
    n_minterms = 1 << len(atoms)
    letters = [frozenset(a for i, a in enumerate(atoms) if m >> i & 1)
               for m in range(n_minterms)]

    def advance(prev: tuple[bool, ...] | None, val: frozenset[Atom]) -> tuple[bool, ...]:
        now: list[bool] = []
        for g in subs:
            k = g.kind
            if k == "atom":
                v = g.atom in val
            elif k == "true":
                v = True
            elif k == "false":
                v = False
            elif k == "not":
                v = not now[index[g.children[0]]]
            elif k == "and":
                v = now[index[g.children[0]]] and now[index[g.children[1]]]
            elif k == "or":
                v = now[index[g.children[0]]] or now[index[g.children[1]]]
            elif k == "yesterday":
                v = prev is not None and prev[index[g.children[0]]]
            elif k == "since":
                a, b = g.children
                v = now[index[b]] or (now[index[a]]
                                      and prev is not None and prev[index[g]])
            elif k == "once":
                v = now[index[g.children[0]]] or (prev is not None and prev[index[g]])
            elif k == "historically":
                v = now[index[g.children[0]]] and (prev is None or prev[index[g]])
            else:  # pragma: no cover
                raise TgrError(f"unexpected kind in past formula: {k!r}")
            now.append(v)
        return tuple(now)

    ids: dict[tuple[bool, ...], int] = {}
    values: list[tuple[bool, ...] | None] = [None]
    rows: list[list[int]] = [[]]
    acc: set[int] = set()
    if logic.evaluate(f, []):
        acc.add(0)

    def intern(vec: tuple[bool, ...]) -> int:
        got = ids.get(vec)
        if got is not None:
            return got
        idx = len(values)
        if idx > state_cap:
            raise AutomatonCapError(f"DFA exceeded {state_cap} states")
        ids[vec] = idx
        values.append(vec)
        rows.append([])
        if vec[root]:
            acc.add(idx)
        return idx

    frontier = 0
    while frontier < len(values):
        vec = values[frontier]
        row = rows[frontier]
        for letter in letters:
            row.append(intern(advance(vec, letter)))
        frontier += 1

    return _finish(atoms, rows, acc)


def formula_to_dfa(f: Formula, state_cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Dispatch on dialect; propositional formulas use the LTLf reading."""
    return (pltlf_to_dfa(f, state_cap) if logic.dialect(f) == "PLTLf"
            else ltlf_to_dfa(f, state_cap))


def accepts(dfa: Dfa, trace: Sequence[Iterable[Atom]]) -> bool:
    return dfa.accepts(trace)


# ---------------------------------------------------------------------------
# Minimization and guard synthesis

def _finish(atoms: tuple[Atom, ...], rows: list[list[int]],
            accepting: set[int]) -> Dfa:
    block_of = _hopcroft(len(rows), len(rows[0]), rows, accepting)

    # Renumber blocks in BFS discovery order from the initial state's block
    # so the result does not depend on partition bookkeeping.
    n_minterms = len(rows[0])
    order: dict[int, int] = {block_of[0]: 0}
    queue = [block_of[0]]
    reps = {block_of[0]: 0}
    for s, b in enumerate(block_of):
        reps.setdefault(b, s)
    qi = 0
    while qi < len(queue):
        b = queue[qi]
        qi += 1
        rep = reps[b]
        for m in range(n_minterms):
            tb = block_of[rows[rep][m]]
            if tb not in order:
                order[tb] = len(order)
                queue.append(tb)

    n_new = len(order)
    table = [[0] * n_minterms for _ in range(n_new)]
    new_accepting = set()
    for b, new_id in order.items():
        rep = reps[b]
        for m in range(n_minterms):
            table[new_id][m] = order[block_of[rows[rep][m]]]
        if rep in accepting:
            new_accepting.add(new_id)

    transitions = []
    for s in range(n_new):
        groups: dict[int, list[int]] = {}
        first_seen: list[int] = []
        for m in range(n_minterms):
            t = table[s][m]
            if t not in groups:
                groups[t] = []
                first_seen.append(t)
            groups[t].append(m)
        row = tuple((_minterms_to_formula(groups[t], atoms), t)
                    for t in first_seen)
        transitions.append(row)

    return Dfa(
        atoms=atoms,
        accepting=frozenset(new_accepting),
        table=tuple(tuple(r) for r in table),
        transitions=tuple(transitions),
    )


def _hopcroft(n: int, m: int, table: list[list[int]],
              accepting: set[int]) -> list[int]:
    """Hopcroft's partition refinement; returns block index per state.

    The coarsest congruence is unique, so internal ordering choices cannot
    affect the final automaton after BFS renumbering.
    """
    inverse: list[list[list[int]]] = [[[] for _ in range(m)] for _ in range(n)]
    for s in range(n):
        for c in range(m):
            inverse[table[s][c]][c].append(s)

    acc = frozenset(accepting)
    rej = frozenset(range(n)) - acc
    blocks: list[set[int]] = []
    for grp in (acc, rej):
        if grp:
            blocks.append(set(grp))
    block_of = [0] * n
    for i, blk in enumerate(blocks):
        for s in blk:
            block_of[s] = i

    from collections import deque
    work: deque[tuple[int, int]] = deque()
    in_work: set[tuple[int, int]] = set()
    smaller = min(range(len(blocks)), key=lambda i: len(blocks[i]))
    for c in range(m):
        work.append((smaller, c))
        in_work.add((smaller, c))

    while work:
        a_idx, c = work.popleft()
        in_work.discard((a_idx, c))
        a_block = blocks[a_idx]
        x = set()
        for t in a_block:
            x.update(inverse[t][c])
        touched: dict[int, set[int]] = {}
        for s in x:
            touched.setdefault(block_of[s], set()).add(s)
        for b_idx, inside in touched.items():
            b_block = blocks[b_idx]
            if len(inside) == len(b_block):
                continue
            outside = b_block - inside
            small, large = (inside, outside) if len(inside) <= len(outside) \
                else (outside, inside)
            blocks[b_idx] = large
            new_idx = len(blocks)
            blocks.append(small)
            for s in small:
                block_of[s] = new_idx
            for cc in range(m):
                if (b_idx, cc) in in_work:
                    work.append((new_idx, cc))
                    in_work.add((new_idx, cc))
                else:
                    pick = new_idx if len(small) <= len(large) else b_idx
                    work.append((pick, cc))
                    in_work.add((pick, cc))
    return block_of


# ---------------------------------------------------------------------------
# Quine-McCluskey guard simplification

def _prime_implicants(masks: list[int], nbits: int) -> list[tuple[int, int]]:
    current = {(v, 0) for v in masks}
    primes: set[tuple[int, int]] = set()
    while current:
        nxt: set[tuple[int, int]] = set()
        merged: set[tuple[int, int]] = set()
        items = sorted(current)
        for i, (v1, d1) in enumerate(items):
            for v2, d2 in items[i + 1:]:
                if d1 != d2:
                    continue
                diff = v1 ^ v2
                if diff and not diff & (diff - 1):
                    nxt.add((v1 & ~diff, d1 | diff))
                    merged.add((v1, d1))
                    merged.add((v2, d2))
        primes |= current - merged
        current = nxt
    return sorted(primes)


def _covers(term: tuple[int, int], minterm: int) -> bool:
    value, dontcare = term
    return (minterm & ~dontcare) == value


def _minterms_to_formula(masks: list[int], atoms: tuple[Atom, ...]) -> Formula:
    nbits = len(atoms)
    if len(masks) == 1 << nbits:
        return logic.TRUE
    if not masks:
        return logic.FALSE
    primes = _prime_implicants(masks, nbits)
    uncovered = set(masks)
    chosen: list[tuple[int, int]] = []
    while uncovered:
        best = None
        best_gain = -1
        for term in primes:
            gain = sum(1 for m in uncovered if _covers(term, m))
            if gain > best_gain:
                best, best_gain = term, gain
        assert best is not None
        chosen.append(best)
        uncovered -= {m for m in uncovered if _covers(best, m)}
        primes.remove(best)
    chosen.sort()
    terms = []
    for value, dontcare in chosen:
        literals = []
        for i, a in enumerate(atoms):
            if dontcare >> i & 1:
                continue
            lit = logic.from_atom(a)
            literals.append(lit if value >> i & 1 else logic.lnot(lit))
        terms.append(logic.conj(literals))
    return logic.disj(terms)


# ---------------------------------------------------------------------------
# Lifting and rendering

def lift(dfa: Dfa, objects: Sequence[str]) -> Pdfa:
    """Replace each object of interest with a fresh parameter throughout
    the DFA's atoms and guards. Objects must occur among the atom
    arguments and must be distinct."""
    if len(set(objects)) != len(objects):
        raise TgrError("lift: objects of interest must be distinct")
    seen = {arg for a in dfa.atoms for arg in a.args}
    for obj in objects:
        if obj not in seen:
            raise TgrError(f"lift: object {obj!r} does not occur in the DFA atoms")
    mapping = {obj: f"?x{i}" for i, obj in enumerate(objects)}
    sub = {a: Atom(a.predicate, tuple(mapping.get(x, x) for x in a.args))
           for a in dfa.atoms}
    return Pdfa(
        atoms=tuple(sub[a] for a in dfa.atoms),
        accepting=dfa.accepting,
        table=dfa.table,
        transitions=tuple(
            tuple((_substitute(guard, sub), tgt) for guard, tgt in row)
            for row in dfa.transitions),
        object_map=tuple((obj, mapping[obj]) for obj in objects),
    )


def to_dot(dfa: Dfa | Pdfa) -> str:
    """Graphviz rendering with guard-labelled edges."""
    lines = ["digraph dfa {", "  rankdir=LR;", '  hidden [shape=point, label=""];']
    for s in range(dfa.n_states):
        shape = "doublecircle" if s in dfa.accepting else "circle"
        lines.append(f"  q{s} [shape={shape}, label=\"q{s}\"];")
    lines.append("  hidden -> q0;")
    for s, row in enumerate(dfa.transitions):
        for guard, target in row:
            label = str(guard).replace('"', '\\"')
            lines.append(f"  q{s} -> q{target} [label=\"{label}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
