"""DFA construction: semantics, minimality, determinism, lifting."""

import pytest

from tgr import automata, logic
from tgr.errors import AutomatonCapError

from helpers import P, Q, ltlf_corpus, pltlf_corpus, trace_corpus

EMPTY = frozenset()
JUST_P = frozenset({P})
JUST_Q = frozenset({Q})


def test_eventually_dfa_shape():
    dfa = automata.ltlf_to_dfa(logic.parse_formula("F(p)"))
    assert dfa.n_states == 2
    assert not dfa.accepts([])
    assert dfa.accepts([EMPTY, JUST_P])
    assert dfa.accepts([JUST_P, EMPTY])
    assert not dfa.accepts([EMPTY, EMPTY])


def test_always_dfa_shape():
    dfa = automata.ltlf_to_dfa(logic.parse_formula("G(p)"))
    assert dfa.n_states == 2
    assert dfa.accepts([])
    assert dfa.accepts([JUST_P, JUST_P])
    assert not dfa.accepts([JUST_P, EMPTY])


def test_until_dfa_shape():
    dfa = automata.ltlf_to_dfa(logic.parse_formula("(p U q)"))
    assert dfa.n_states == 3
    assert dfa.accepts([JUST_P, JUST_Q])
    assert not dfa.accepts([JUST_P, EMPTY, JUST_Q])


def test_guard_rows_partition_the_alphabet():
    for text in ["F((p & X(q)))", "(p U q)", "G((p -> X(q)))"]:
        dfa = automata.ltlf_to_dfa(logic.parse_formula(text))
        n_minterms = 1 << len(dfa.atoms)
        for state, rows in enumerate(dfa.transitions):
            for m in range(n_minterms):
                val = {a for i, a in enumerate(dfa.atoms) if m & (1 << i)}
                hits = [t for guard, t in rows
                        if logic.evaluate(guard, [val])]
                # exactly one guard per minterm, agreeing with the table
                assert hits == [dfa.table[state][m]], (text, state, m)


def test_construction_is_canonical():
    a = automata.ltlf_to_dfa(logic.parse_formula("F((p | q))"))
    b = automata.ltlf_to_dfa(logic.parse_formula("F((q | p))"))
    assert a.table == b.table
    assert a.accepting == b.accepting
    assert a.atoms == b.atoms


def test_ltlf_corpus_matches_evaluate():
    corpus = ltlf_corpus()[:40]
    traces = trace_corpus(3)
    for f in corpus:
        dfa = automata.ltlf_to_dfa(f)
        for t in traces:
            assert dfa.accepts(t) == logic.evaluate(f, t), f"{f} on {t}"


def test_pltlf_corpus_matches_evaluate():
    corpus = pltlf_corpus()[:40]
    traces = trace_corpus(3)
    for f in corpus:
        dfa = automata.pltlf_to_dfa(f)
        for t in traces:
            want = logic.evaluate(f, t, as_dialect="PLTLf")
            assert dfa.accepts(t) == want, f"{f} on {t}"


def test_formula_to_dfa_dispatches_on_dialect():
    past = automata.formula_to_dfa(logic.parse_formula("O(p)"))
    future = automata.formula_to_dfa(logic.parse_formula("F(p)"))
    assert past.accepts([JUST_P, EMPTY])
    assert future.accepts([JUST_P, EMPTY])
    prop = automata.formula_to_dfa(logic.parse_formula("p"))
    assert prop.accepts([JUST_P])
    assert not prop.accepts([EMPTY, JUST_P])


def test_state_cap():
    f = logic.parse_formula("F((p & X((q & X(p)))))")
    with pytest.raises(AutomatonCapError):
        automata.ltlf_to_dfa(f, state_cap=2)


def test_atom_cap():
    wide = logic.disj([logic.atom(f"a{i}") for i in range(13)])
    with pytest.raises(AutomatonCapError):
        automata.ltlf_to_dfa(logic.eventually(wide))


def test_minimality_on_redundant_formula():
    # p | p and p must give identical automata after minimization
    a = automata.ltlf_to_dfa(logic.parse_formula("(p | p)"))
    b = automata.ltlf_to_dfa(logic.parse_formula("p"))
    assert a.table == b.table and a.accepting == b.accepting


def test_lift_and_instantiate_round_trip():
    f = logic.parse_formula("F(((vAt 22) & X(F((vAt 33)))))")
    dfa = automata.formula_to_dfa(f)
    pdfa = automata.lift(dfa, ("22", "33"))
    assert pdfa.object_map == (("22", "?x0"), ("33", "?x1"))
    for atom in pdfa.atoms:
        assert not any(arg in ("22", "33") for arg in atom.args)
    back = pdfa.instantiate()
    assert back.table == dfa.table
    assert back.accepting == dfa.accepting
    assert back.atoms == dfa.atoms
    swapped = pdfa.instantiate({"?x0": "33", "?x1": "22"})
    assert swapped.atoms != dfa.atoms


def test_lift_rejects_bad_objects():
    dfa = automata.formula_to_dfa(logic.parse_formula("F((vAt 22))"))
    with pytest.raises(Exception):
        automata.lift(dfa, ("99",))
    with pytest.raises(Exception):
        automata.lift(dfa, ("22", "22"))


def test_to_dot_renders_every_state():
    dfa = automata.ltlf_to_dfa(logic.parse_formula("(p U q)"))
    dot = automata.to_dot(dfa)
    assert dot.startswith("digraph")
    for s in range(dfa.n_states):
        assert f"q{s}" in dot
