"""Shared fixtures and slow cross-checkers used by the test modules."""

from __future__ import annotations

import random

import networkx as nx

from hdkit.automata import (Lasso, ParityAutomaton, coreachability,
                            lasso_member, make_automaton)
from hdkit.cli import GenSpec, generate
from hdkit.games import build_zielonka_token, make_game, solve_parity
from hdkit.hd import wins_g1_pairs
from hdkit.oracle import determinise
from hdkit.token_games import build_simulation, build_token_product

ORACLE_GUARD = 64


# ---------------------------------------------------------------------------
# hand-written automata


def build_a1() -> ParityAutomaton:
    """Nondeterministic coBuchi automaton over {a,b,c} accepting the words
    with finitely many b's or finitely many c's.  The nondeterminism at q0
    (commit to avoiding b or to avoiding c) is resolvable on the fly."""
    triples = []
    for x in "abc":
        triples += [("q0", x, 1, "qb"), ("q0", x, 1, "qc")]
    triples += [("qb", "a", 2, "qb"), ("qb", "c", 2, "qb"),
                ("qb", "b", 1, "q0"),
                ("qc", "a", 2, "qc"), ("qc", "b", 2, "qc"),
                ("qc", "c", 1, "q0")]
    return make_automaton("abc", ["q0", "qb", "qc"], "q0", (1, 2), triples)


def build_a2() -> ParityAutomaton:
    """Two-state [1,3] automaton with universal language that defeats every
    on-the-fly resolver even though the 1-token game is won everywhere."""
    triples = [("p", "a", 3, "p"), ("p", "b", 2, "p"), ("p", "a", 1, "q"),
               ("q", "b", 3, "q"), ("q", "a", 2, "q"), ("q", "b", 1, "p")]
    return make_automaton("ab", ["p", "q"], "p", (1, 3), triples)


def build_a3() -> ParityAutomaton:
    """The one-state automaton accepting everything."""
    return make_automaton("a", ["s"], "s", (0, 0), [("s", "a", 0, "s")])


def safety_prunable() -> ParityAutomaton:
    """Safety automaton with two a-successors from the start; one of them
    dies on every continuation, so pruning it leaves a deterministic part."""
    triples = [("q0", "a", 2, "good"), ("q0", "a", 2, "bad"),
               ("q0", "b", 2, "q0"),
               ("good", "a", 2, "good"), ("good", "b", 2, "good"),
               ("bad", "a", 1, "sink"), ("bad", "b", 1, "sink"),
               ("sink", "a", 1, "sink"), ("sink", "b", 1, "sink")]
    return make_automaton("ab", ["q0", "good", "bad", "sink"], "q0", (1, 2),
                          triples)


def reach_guess() -> ParityAutomaton:
    """Reachability automaton accepting the words containing an 'a', where
    hitting the accepting sink requires predicting the letter after that
    'a'.  No on-the-fly resolver can commit correctly."""
    triples = [("q0", "a", 1, "ga"), ("q0", "a", 1, "gb"),
               ("q0", "b", 1, "q0"),
               ("ga", "a", 2, "acc"), ("ga", "b", 1, "rej"),
               ("gb", "b", 2, "acc"), ("gb", "a", 1, "rej"),
               ("acc", "a", 2, "acc"), ("acc", "b", 2, "acc"),
               ("rej", "a", 1, "rej"), ("rej", "b", 1, "rej")]
    return make_automaton("ab", ["q0", "ga", "gb", "acc", "rej"], "q0",
                          (1, 2), triples)


def rooted(a: ParityAutomaton, q: int) -> ParityAutomaton:
    """The same automaton started at q."""
    return make_automaton(a.letters, a.state_names, q,
                          (a.index_low, a.index_high),
                          [(t.src, t.letter, t.priority, t.dst)
                           for t in a.transitions])


def gen(seed: int, states: int, letters: int, lo: int, hi: int,
        density: float = 0.3) -> ParityAutomaton:
    return generate(GenSpec(seed, states, letters, (lo, hi), density))[0]


def gen_deterministic(seed: int, states: int, letters,
                      lo: int, hi: int) -> ParityAutomaton:
    """Random deterministic complete automaton over the given letters."""
    if isinstance(letters, int):
        letters = [chr(ord("a") + i) for i in range(letters)]
    rng = random.Random(seed)
    names = [f"q{i}" for i in range(states)]
    triples = [(names[q], x, rng.randint(lo, hi), names[rng.randrange(states)])
               for q in range(states) for x in letters]
    return make_automaton(letters, names, names[0], (lo, hi), triples)


# ---------------------------------------------------------------------------
# structural lasso membership, independent of the library's product search


def nx_lasso_member(a: ParityAutomaton, w: Lasso) -> bool:
    """Accept iff, after unrolling the prefix, some product cycle with an
    even minimal priority is reachable; component analysis via networkx."""
    starts = {a.initial}
    for x in w.prefix:
        starts = {t.dst for q in starts for t in a.rows[(q, x)]}
    m = len(w.cycle)
    g = nx.MultiDiGraph()
    for q in range(a.n_states):
        for i in range(m):
            for t in a.rows[(q, w.cycle[i])]:
                g.add_edge((q, i), (t.dst, (i + 1) % m), priority=t.priority)
    reach = set()
    for s in starts:
        reach |= nx.descendants(g, (s, 0)) | {(s, 0)}
    for p in {t.priority for t in a.transitions if t.priority % 2 == 0}:
        sub = nx.MultiDiGraph()
        sub.add_nodes_from(g.nodes)
        fringe = [(u, v, d) for u, v, d in g.edges(data=True)
                  if d["priority"] >= p]
        sub.add_edges_from(fringe)
        for comp in nx.strongly_connected_components(sub):
            if not comp & reach:
                continue
            if any(u in comp and v in comp and d["priority"] == p
                   for u, v, d in fringe):
                return True
    return False


# ---------------------------------------------------------------------------
# token-game winning sets and the implication checks shared with acceptance


def g2_triples(a: ParityAutomaton) -> frozenset[tuple[int, int, int]]:
    """All weakly coreachable (q, p, r) from which Eve wins the 2-token
    game, via a single product solve."""
    cr = coreachability(a)
    seeds = [(q, (p, r), 0) for cls in cr.classes for q in sorted(cls)
             for p in sorted(cls) for r in sorted(cls)]
    prod = build_token_product(a, 2, seeds)
    regions = solve_parity(prod.game)
    return frozenset((q, ps[0], ps[1]) for q, ps, b in seeds
                     if prod.index[("pos", q, ps, b)] in regions.eve)


def token_implication_violations(a: ParityAutomaton,
                                 check_simulation: bool = True) -> list[str]:
    """Cross-implications between the 1- and 2-token winning sets: swapping
    Adam's tokens, dropping one of them, replacing a token by one it beats,
    and the simulation consequence of a 1-token win."""
    w1 = wins_g1_pairs(a)
    w2 = g2_triples(a)
    bad = []
    for q, p, r in w2:
        if (q, r, p) not in w2:
            bad.append(f"swap fails at {(q, p, r)}")
        if (q, p) not in w1 or (q, r) not in w1:
            bad.append(f"drop fails at {(q, p, r)}")
    states_of = {}
    cr = coreachability(a)
    for cls in cr.classes:
        for q in cls:
            states_of[q] = sorted(cls)
    for q, p, r in w2:
        for p2 in states_of[p]:
            if (p, p2) in w1 and (q, p2, r) not in w2:
                bad.append(f"adam swap-in fails at {(q, p, r)} -> {p2}")
    for q, p, r in w2:
        for q2 in states_of[q]:
            if (q2, q) in w1 and (q2, p, r) not in w2:
                bad.append(f"eve hand-off fails at {(q, p, r)} -> {q2}")
    if check_simulation:
        for q, p in sorted(w1):
            if not build_simulation(rooted(a, q), rooted(a, p)).eve_wins:
                bad.append(f"no simulation for winning pair {(q, p)}")
    return bad


# ---------------------------------------------------------------------------
# direct good-enough-realisability game, used to cross-check hd.ge_realisable


def ge_game_oracle(d: ParityAutomaton, split: dict) -> bool:
    """Solve the letter game 'whenever some output word would satisfy the
    specification, the chosen outputs must' directly: project to inputs,
    determinise the projection, and play outputs against the tracker."""
    inputs = sorted({i for i, _ in split.values()})
    in_id = {x: i for i, x in enumerate(inputs)}
    proj = make_automaton(
        inputs, d.state_names, d.initial, (d.index_low, d.index_high),
        [(t.src, in_id[split[d.letters[t.letter]][0]], t.priority, t.dst)
         for t in d.transitions])
    det = determinise(proj, guard=ORACLE_GUARD)
    k_max = max(d.index_high, det.index_high, 1)
    tree = build_zielonka_token(k_max, 1)
    neutral = tree.height + 1

    index: dict = {}
    owner: list[bool] = []

    def vid(key, is_eve: bool) -> int:
        got = index.get(key)
        if got is None:
            got = len(owner)
            index[key] = got
            owner.append(is_eve)
        return got

    start = vid((d.initial, det.initial, 0), False)
    quads: list[tuple[int, int, int]] = []
    frontier = [(d.initial, det.initial, 0)]
    seen = {(d.initial, det.initial, 0)}
    while frontier:
        key = frontier.pop()
        qd, qt, beta = key
        v = index[key]
        for i, x in enumerate(inputs):
            dt = det.rows[(qt, i)][0]
            mid = vid((key, x), True)
            quads.append((v, neutral, mid))
            for li, letter in enumerate(d.letters):
                if split[letter][0] != x:
                    continue
                t = d.rows[(qd, li)][0]
                nb, pri = tree.branch_successor(beta, (t.priority,
                                                       dt.priority))
                nxt = (t.dst, dt.dst, nb)
                quads.append((mid, pri, vid(nxt, False)))
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    game = make_game(owner, quads, initial=start)
    return start in solve_parity(game).eve


def assert_language_equal(a: ParityAutomaton, b: ParityAutomaton,
                          bound: int = 4):
    for w in _lassos(a.n_letters, bound):
        assert lasso_member(a, w) == lasso_member(b, w), \
            f"languages differ on {w}"


def _lassos(n_letters: int, bound: int):
    from hdkit.automata import iter_lassos
    return iter_lassos(n_letters, bound, bound)
