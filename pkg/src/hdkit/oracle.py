"""Slow, independent reference implementations.

Everything here deliberately avoids the token-game and normalisation modules:
the history-determinism reference decision goes through an explicit
determinisation (priority guessing to Büchi, then Safra-style trees), and the
game references use exhaustive strategy enumeration and game-tree search.
These are the ground truths the fast implementations are tested against.
"""

from __future__ import annotations

import itertools
import os

from .automata import (Lasso, ParityAutomaton, iter_lassos, lasso_member,
                       make_automaton, trim)
from .errors import (InternalError, ParseError, PreconditionError,
                     ResourceLimitError)
from .games import (MullerGame, ParityGame, build_zielonka_generic,
                    build_zielonka_token, make_game, solve_parity)
from .graphs import tarjan_scc

# When enabled (the test suite turns it on), every conversion re-checks
# lasso-language equality between its input and output up to LASSO_BOUND.
LASSO_CHECKS = False
LASSO_BOUND = 4

_DEFAULT_GUARD = 10
_STATE_CAP = 100_000


def effective_guard(default: int = _DEFAULT_GUARD) -> int:
    """Determinisation size guard; the HDKIT_GUARD env variable overrides."""
    raw = os.environ.get("HDKIT_GUARD")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(f"HDKIT_GUARD must be an integer, got {raw!r}") from None
    if value < 1:
        raise ParseError("HDKIT_GUARD must be positive")
    return value


def lasso_difference(a: ParityAutomaton, b: ParityAutomaton,
                     bound: int = LASSO_BOUND) -> Lasso | None:
    """First lasso (by enumeration order) the two automata disagree on."""
    if a.letters != b.letters:
        raise PreconditionError("alphabet mismatch")
    for w in iter_lassos(a.n_letters, bound, bound):
        if lasso_member(a, w) != lasso_member(b, w):
            return w
    return None


def _assert_lasso_equal(a: ParityAutomaton, b: ParityAutomaton, what: str):
    if not LASSO_CHECKS:
        return
    diff = lasso_difference(a, b)
    if diff is not None:
        raise InternalError(f"{what} changed the language on lasso {diff}")


# ---------------------------------------------------------------------------
# parity -> Büchi


def parity_to_buchi(a: ParityAutomaton) -> ParityAutomaton:
    """Language-preserving conversion to a [0,1] automaton.

    A run nondeterministically guesses the even priority c that will be the
    eventual minimum and jumps into a copy where priorities below c are
    forbidden and priority exactly c is accepting.  Already-Büchi inputs are
    returned unchanged (modulo the declared index).
    """
    if set(a.priorities_used) <= {0, 1}:
        out = a if (a.index_low, a.index_high) == (0, 1) else make_automaton(
            a.letters, a.state_names, a.initial, (0, 1),
            [(t.src, t.letter, t.priority, t.dst) for t in a.transitions])
        _assert_lasso_equal(a, out, "parity_to_buchi")
        return out

    evens = [c for c in range(a.index_low, a.index_high + 1) if c % 2 == 0]
    names: list[str] = []
    index: dict = {}
    used = set(a.state_names)

    def state(key, name: str) -> int:
        if key not in index:
            if key[0] != "base":
                while name in used:
                    name += "_"
            used.add(name)
            index[key] = len(names)
            names.append(name)
        return index[key]

    for q in range(a.n_states):
        state(("base", q), a.state_names[q])
    for q in range(a.n_states):
        for c in evens:
            state(("copy", q, c), f"{a.state_names[q]}@{c}")
    base = lambda q: index[("base", q)]
    copy = lambda q, c: index[("copy", q, c)]
    triples: set[tuple[int, int, int, int]] = set()
    need_sink = False
    for q in range(a.n_states):
        for x in range(a.n_letters):
            for t in a.rows[(q, x)]:
                triples.add((base(q), x, 1, base(t.dst)))
                for c in evens:
                    if t.priority >= c:
                        triples.add((base(q), x, 0 if t.priority == c else 1,
                                     copy(t.dst, c)))
            for c in evens:
                row = [t for t in a.rows[(q, x)] if t.priority >= c]
                if not row:
                    need_sink = True
                for t in row:
                    triples.add((copy(q, c), x, 0 if t.priority == c else 1,
                                 copy(t.dst, c)))
    if need_sink:
        sink = state(("sink",), "sink")
        for q in range(a.n_states):
            for x in range(a.n_letters):
                for c in evens:
                    if not any(t.priority >= c for t in a.rows[(q, x)]):
                        triples.add((copy(q, c), x, 1, sink))
        for x in range(a.n_letters):
            triples.add((sink, x, 1, sink))
    b = make_automaton(a.letters, names, index[("base", a.initial)], (0, 1),
                       sorted(triples))
    b, _ = trim(b)
    _assert_lasso_equal(a, b, "parity_to_buchi")
    return b


# ---------------------------------------------------------------------------
# Safra-style determinisation (compact trees, transition-based acceptance)
#
# A state of the output is an ordered tree of named nodes, each labelled by a
# set of input states; smaller names are older, children are younger than
# parents, and sibling order is name order.  Encoded as a name-sorted tuple
# of (name, parent name, label) with parent 0 for the root.

_Tree = tuple[tuple[int, int, frozenset], ...]


def _tree_successor(tree: _Tree, a: ParityAutomaton, letter: int,
                    no_event_priority: int) -> tuple[_Tree, int]:
    rows = a.rows
    # sprout an accepting-successor child for every node, then the powerset
    # update of the old labels; both read the pre-transition labels
    nodes: dict[int, tuple[int, frozenset]] = {}
    fresh = max(n for n, _, _ in tree) + 1
    for name, parent, label in tree:
        nodes[name] = (parent, frozenset(
            t.dst for q in label for t in rows[(q, letter)]))
    for name, parent, label in tree:
        acc = frozenset(t.dst for q in label for t in rows[(q, letter)]
                        if t.priority == 0)
        if acc:
            nodes[fresh] = (name, acc)
            fresh += 1
    # horizontal merge: in age order, shrink to the parent label and drop
    # states claimed by older siblings
    claimed: dict[int, set] = {}
    final: dict[int, tuple[int, frozenset]] = {}
    for name in sorted(nodes):
        parent, label = nodes[name]
        if parent != 0:
            label = label & final[parent][1]
        label = label - frozenset(claimed.get(parent, set()))
        claimed.setdefault(parent, set()).update(label)
        final[name] = (parent, label)
    # deaths
    dead = {n for n, (_, lb) in final.items() if not lb}
    e = min(dead) if dead else None
    for n in dead:
        del final[n]
    # green flashes: label equals the union of the remaining children labels
    kids: dict[int, list[int]] = {}
    for n, (parent, _) in final.items():
        kids.setdefault(parent, []).append(n)
    green = [n for n, (_, lb) in final.items()
             if kids.get(n) and lb == frozenset().union(
                 *(final[c][1] for c in kids[n]))]
    f = min(green) if green else None
    if green:
        doomed = set()
        stack = [c for g in green for c in kids.get(g, [])]
        while stack:
            n = stack.pop()
            if n in doomed:
                continue
            doomed.add(n)
            stack.extend(kids.get(n, []))
        for n in doomed:
            final.pop(n, None)
    if e is None and f is None:
        priority = no_event_priority
    elif e is None or (f is not None and f < e):
        priority = 2 * f
    else:
        priority = 2 * e - 1
    rename = {old: i + 1 for i, old in enumerate(sorted(final))}
    out = tuple(sorted((rename[n], rename.get(p, 0), lb)
                       for n, (p, lb) in final.items()))
    return out, priority


def _compress_map(priorities) -> dict[int, int]:
    """Dense order- and parity-preserving relabelling of a priority set."""
    ordered = sorted(set(priorities))
    out: dict[int, int] = {}
    prev = None
    for p in ordered:
        if prev is None:
            out[p] = p % 2
        else:
            out[p] = out[prev] + (0 if (p - prev) % 2 == 0 else 1)
        prev = p
    return out


def compress_priorities(a: ParityAutomaton) -> ParityAutomaton:
    """Collapse priorities to a dense [0|1, K] range, preserving acceptance."""
    m = _compress_map(a.priorities_used)
    lo = min(m.values())
    hi = max(m.values())
    out = make_automaton(a.letters, a.state_names, a.initial, (lo, hi),
                         [(t.src, t.letter, m[t.priority], t.dst)
                          for t in a.transitions])
    _assert_lasso_equal(a, out, "compress_priorities")
    return out


def determinise_buchi(b: ParityAutomaton,
                      guard: int | None = None) -> ParityAutomaton:
    """Deterministic parity automaton recognising the same language as the
    [0,1] automaton b, via compact Safra trees with transition-based
    acceptance.  The guard bounds the number of INPUT states (HDKIT_GUARD
    overrides the default); output growth is capped defensively.
    """
    if guard is None:
        guard = effective_guard()
    if set(b.priorities_used) - {0, 1}:
        raise PreconditionError("determinise_buchi needs a [0,1] automaton")
    if b.n_states > guard:
        raise ResourceLimitError(
            f"{b.n_states} states exceed the determinisation guard {guard}")
    no_event = 2 * b.n_states + 1
    initial: _Tree = ((1, 0, frozenset({b.initial})),)
    states: dict[_Tree, int] = {initial: 0}
    worklist = [initial]
    triples: list[tuple[int, int, int, int]] = []
    while worklist:
        tree = worklist.pop()
        src = states[tree]
        for x in range(b.n_letters):
            nxt, pri = _tree_successor(tree, b, x, no_event)
            if nxt not in states:
                if len(states) >= _STATE_CAP:
                    raise ResourceLimitError("determinisation grew too large")
                states[nxt] = len(states)
                worklist.append(nxt)
            triples.append((src, x, pri, states[nxt]))
    names = [""] * len(states)
    for tree, i in states.items():
        names[i] = "|".join(
            f"{n}<{p}:" + ",".join(sorted(b.state_names[q] for q in lb)) + ">"
        for n, p, lb in tree)
    d = make_automaton(b.letters, names, 0,
                       (min(p for _, _, p, _ in triples),
                        max(p for _, _, p, _ in triples)),
                       sorted(triples))
    d = compress_priorities(d)
    if not d.is_deterministic():
        raise InternalError("determinisation produced nondeterminism")
    _assert_lasso_equal(b, d, "determinise_buchi")
    return d


def determinise(a: ParityAutomaton, guard: int | None = None) -> ParityAutomaton:
    """Deterministic parity automaton for an arbitrary parity automaton."""
    return determinise_buchi(parity_to_buchi(a), guard)


# ---------------------------------------------------------------------------
# the reference HD decision


def decide_hd_reference(a: ParityAutomaton, guard: int | None = None):
    """Decide history-determinism by solving the letter game against an
    explicit determinisation of the language.

    Eve moves her token in a; the deterministic automaton tracks the word.
    Eve must produce an accepting run whenever the deterministic run accepts.
    The pair condition "Eve's minimum even or the tracker's minimum odd" is
    handled by the 1-opponent box tree over compressed priorities.
    """
    from .hd import HdVerdict

    d = determinise(a, guard)
    ca = _compress_map(a.priorities_used)
    k_max = max(max(ca.values()), d.index_high, 1)
    tree = build_zielonka_token(k_max, 1)
    neutral = tree.height + 1

    index: dict[tuple, int] = {}
    owner: list[bool] = []
    payload: list[tuple] = []

    def vid(key, is_eve: bool) -> int:
        got = index.get(key)
        if got is None:
            got = len(owner)
            index[key] = got
            owner.append(is_eve)
            payload.append(key)
        return got

    start = vid((a.initial, d.initial, 0), False)
    quads: list[tuple[int, int, int]] = []
    frontier = [start]
    seen = {start}
    while frontier:
        v = frontier.pop()
        qa, qd, beta = payload[v]
        for x in range(a.n_letters):
            dt = d.rows[(qd, x)][0]
            mid = vid((qa, x, qd, beta), True)
            fresh = mid not in seen
            quads.append((v, neutral, mid))
            if not fresh:
                continue
            seen.add(mid)
            for t in a.rows[(qa, x)]:
                nb, pri = tree.branch_successor(
                    beta, (ca[t.priority], dt.priority))
                tv = vid((t.dst, dt.dst, nb), False)
                quads.append((mid, pri, tv))
                if tv not in seen:
                    seen.add(tv)
                    frontier.append(tv)
    game = make_game(owner, quads, tuple(payload), start)
    regions = solve_parity(game)
    return HdVerdict(is_hd=start in regions.eve, method="oracle")


# ---------------------------------------------------------------------------
# brute-force game solving


def _one_player_adam_wins_from(edges, n: int) -> set[int]:
    """Vertices from which an odd-minimum cycle is reachable, in a graph
    where Adam alone moves (Eve's choices already fixed)."""
    bad: set[int] = set()
    odd_prios = sorted({e.priority for e in edges if e.priority % 2 == 1})
    for c in odd_prios:
        sub = [e for e in edges if e.priority >= c]
        verts = sorted({e.src for e in sub} | {e.dst for e in sub})
        vmap = {v: i for i, v in enumerate(verts)}
        adj: list[list[int]] = [[] for _ in verts]
        for e in sub:
            adj[vmap[e.src]].append(vmap[e.dst])
        comp_of = {}
        for ci, comp in enumerate(tarjan_scc(len(verts), lambda i: adj[i])):
            for i in comp:
                comp_of[i] = ci
        marked = {comp_of[vmap[e.src]] for e in sub if e.priority == c
                  and comp_of[vmap[e.src]] == comp_of[vmap[e.dst]]}
        bad.update(v for v in verts if comp_of[vmap[v]] in marked)
    # backward closure over all fixed edges
    radj: dict[int, list[int]] = {}
    for e in edges:
        radj.setdefault(e.dst, []).append(e.src)
    stack = list(bad)
    while stack:
        v = stack.pop()
        for u in radj.get(v, ()):
            if u not in bad:
                bad.add(u)
                stack.append(u)
    return bad


_STRATEGY_CAP = 1_000_000


def _brute_parity(g: ParityGame) -> tuple[frozenset[int], frozenset[int]]:
    eve_vs = [v for v in range(g.n_vertices) if g.owner[v]]
    combos = 1
    for v in eve_vs:
        combos *= len(g.out[v])
        if combos > _STRATEGY_CAP:
            raise ResourceLimitError("too many positional strategies")
    eve_won: set[int] = set()
    for choice in itertools.product(*(g.out[v] for v in eve_vs)):
        chosen = {e.src: e for e in choice}
        kept = []
        for v in range(g.n_vertices):
            if g.owner[v]:
                kept.append(chosen[v])
            else:
                kept.extend(g.out[v])
        bad = _one_player_adam_wins_from(kept, g.n_vertices)
        eve_won.update(v for v in range(g.n_vertices) if v not in bad)
    eve = frozenset(eve_won)
    return eve, frozenset(range(g.n_vertices)) - eve


def _closed_walk_colour_sets(edges, colours) -> dict[int, set[frozenset]]:
    """For each vertex: colour sets of cycles through its component, i.e.
    all D such that some closed walk from a reachable vertex uses exactly
    the colours D.  Returned per starting vertex after reachability."""
    sets_at: dict[int, set[frozenset]] = {}
    universe = sorted(set(colours), key=repr)
    for mask in range(1, 1 << len(universe)):
        d_set = frozenset(universe[i] for i in range(len(universe))
                          if mask >> i & 1)
        sub = [e for e in edges if e.colour in d_set]
        verts = sorted({e.src for e in sub} | {e.dst for e in sub})
        vmap = {v: i for i, v in enumerate(verts)}
        adj: list[list[int]] = [[] for _ in verts]
        for e in sub:
            adj[vmap[e.src]].append(vmap[e.dst])
        comp_of = {}
        for ci, comp in enumerate(tarjan_scc(len(verts), lambda i: adj[i])):
            for i in comp:
                comp_of[i] = ci
        per_comp: dict[int, set] = {}
        for e in sub:
            if comp_of[vmap[e.src]] == comp_of[vmap[e.dst]]:
                per_comp.setdefault(comp_of[vmap[e.src]], set()).add(e.colour)
        for v in verts:
            if per_comp.get(comp_of[vmap[v]], set()) == set(d_set):
                sets_at.setdefault(v, set()).add(d_set)
    return sets_at


def _brute_muller(m: MullerGame) -> tuple[frozenset[int], frozenset[int]]:
    tree = build_zielonka_generic(m.colours, m.accepting)
    n_b = len(tree.branches)
    # product positions (vertex, branch); Eve picks per position, memory is
    # the branch component
    positions = [(v, b) for v in range(m.n_vertices) for b in range(n_b)]
    pos_id = {p: i for i, p in enumerate(positions)}
    eve_positions = [p for p in positions if m.owner[p[0]]]
    combos = 1
    for v, _ in eve_positions:
        combos *= len(m.out[v])
        if combos > _STRATEGY_CAP:
            raise ResourceLimitError("too many finite-memory strategies")

    class _PE:
        __slots__ = ("src", "dst", "colour")

        def __init__(self, src, dst, colour):
            self.src, self.dst, self.colour = src, dst, colour

    def product_edge(p, e):
        nb, _ = tree.branch_successor(p[1], e.colour)
        return _PE(pos_id[p], pos_id[(e.dst, nb)], e.colour)

    eve_won: set[int] = set()
    for choice in itertools.product(*(m.out[v] for v, _ in eve_positions)):
        by_pos = dict(zip((pos_id[p] for p in eve_positions), choice))
        kept = []
        for p in positions:
            i = pos_id[p]
            if i in by_pos:
                kept.append(product_edge(p, by_pos[i]))
            else:
                kept.extend(product_edge(p, e) for e in m.out[p[0]])
        # Adam wins from i iff he can reach a closed walk whose exact colour
        # set is rejecting
        cycle_sets = _closed_walk_colour_sets(kept, m.colours)
        bad_seed = {v for v, ds in cycle_sets.items()
                    if any(not m.accepting(d) for d in ds)}
        radj: dict[int, list[int]] = {}
        for e in kept:
            radj.setdefault(e.dst, []).append(e.src)
        stack = list(bad_seed)
        bad = set(bad_seed)
        while stack:
            v = stack.pop()
            for u in radj.get(v, ()):
                if u not in bad:
                    bad.add(u)
                    stack.append(u)
        eve_won.update(v for v in range(m.n_vertices)
                       if pos_id[(v, 0)] not in bad)
    eve = frozenset(eve_won)
    return eve, frozenset(range(m.n_vertices)) - eve


def brute_solve_game(g) -> tuple[frozenset[int], frozenset[int]]:
    """Winner per vertex by exhaustive strategy enumeration.

    Parity games enumerate Eve's positional strategies; Muller games
    enumerate Eve's strategies with memory = branches of the generic
    Zielonka tree.  Adam's best response is a cycle search each time.
    """
    if g.n_vertices > 12:
        raise PreconditionError("brute force capped at 12 vertices")
    if isinstance(g, ParityGame):
        return _brute_parity(g)
    if isinstance(g, MullerGame):
        return _brute_muller(g)
    raise PreconditionError(f"unsupported game type {type(g).__name__}")


# ---------------------------------------------------------------------------
# brute-force ranks


def _counting_game(g: ParityGame, k: int) -> ParityGame:
    """Product of g with a 1-edge counter capped at k.

    Counting copies 0..k track priority-1 edges; the k+1-th one before any
    priority-0 edge falls into an Adam-won sink.  A priority-0 edge retires
    the counter by jumping into a plain copy of g where only the parity
    condition remains.  All edges keep their original priorities, so plays
    that never leave the counting copies are judged by the original
    condition as well.
    """
    n = g.n_vertices
    plain = (k + 1) * n
    sink = plain + n
    owner = [g.owner[u % n] for u in range(plain + n)] + [False]
    quads = []
    for c in range(k + 1):
        for e in g.edges:
            if e.priority == 0:
                quads.append((c * n + e.src, 0, plain + e.dst))
            elif e.priority == 1:
                dst = (c + 1) * n + e.dst if c < k else sink
                quads.append((c * n + e.src, 1, dst))
            else:
                quads.append((c * n + e.src, e.priority, c * n + e.dst))
    for e in g.edges:
        quads.append((plain + e.src, e.priority, plain + e.dst))
    quads.append((sink, 1, sink))
    return make_game(owner, quads, tuple(range(sink + 1)))


def brute_rank(g: ParityGame, v: int):
    """Exact rank of v: the least k such that Eve can win the parity game
    from v while conceding at most k priority-1 edges before the first
    priority-0 edge, or infinity when no finite k works.

    Decided by solving the explicit counter product for k = 0, 1, ... up to
    the vertex count; a winning strategy can never need more 1-edges than
    there are vertices, since a repeat between two of them would close a
    cycle with odd least priority that Adam could replay forever.
    """
    if g.n_vertices > 10:
        raise PreconditionError("brute rank capped at 10 vertices")
    for k in range(g.n_vertices + 1):
        counted = _counting_game(g, k)
        if v in solve_parity(counted).eve:
            return k
    if v not in solve_parity(g).adam:
        raise InternalError(
            "infinite rank at a vertex where Eve wins the parity game")
    return float("inf")
