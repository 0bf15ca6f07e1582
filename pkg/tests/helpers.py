"""Shared test corpora: systematic small formulas over two atoms, and
every trace of length 0..4 over their valuations."""

from tgr import logic

P = logic.Atom("p")
Q = logic.Atom("q")

_SEEDS = (logic.atom("p"), logic.atom("q"))


def _closure(unaries, binaries):
    """Seed atoms, one operator layer, and a bounded second layer.

    Every result has depth at most 3, which keeps the DFA corpus runs
    fast while still covering each operator under and over negation.
    """
    lvl0 = list(_SEEDS)
    lvl1 = [u(f) for u in unaries for f in lvl0]
    lvl1 += [b(f, g) for b in binaries for f in lvl0 for g in lvl0]
    lvl2 = [u(f) for u in unaries for f in lvl1]
    lvl2 += [b(f, g) for b in binaries for f in lvl1[:6] for g in lvl0]
    return lvl0 + lvl1 + lvl2


def ltlf_corpus():
    return _closure(
        [logic.lnot, logic.next_, logic.weak_next, logic.eventually,
         logic.always],
        [logic.land, logic.lor, logic.implies, logic.until])


def pltlf_corpus():
    return _closure(
        [logic.lnot, logic.yesterday, logic.once, logic.historically],
        [logic.land, logic.lor, logic.implies, logic.since])


def trace_corpus(max_len=4):
    vals = [frozenset(), frozenset({P}), frozenset({Q}), frozenset({P, Q})]
    out = [()]
    layer = [()]
    for _ in range(max_len):
        layer = [t + (v,) for t in layer for v in vals]
        out.extend(layer)
    return out
