"""Top-level history-determinism decisions.

The main decision is the 2-token route: Eve wins the 2-token game at the
initial configuration iff the automaton is history-deterministic.  The other
entry points cover pruning to a win-from-everywhere subautomaton, the
safety/reachability special case (1 token suffices there), semantic
determinism, and good-enough realisability of deterministic specifications.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import (ParityAutomaton, coreachability, is_reachability,
                       is_safety, make_automaton)
from .errors import InternalError, PreconditionError
from .games import solve_parity
from .token_games import (TokenConfig, build_simulation, build_token_product,
                          wins_everywhere, wins_gk)


@dataclass(frozen=True)
class HdVerdict:
    is_hd: bool
    method: str                      # two_token | one_token_safety_reach | oracle
    certificate: object | None = None


def verdict_json(v: HdVerdict, a: ParityAutomaton) -> dict:
    return {"verdict": "hd" if v.is_hd else "not-hd", "method": v.method,
            "states": a.n_states, "transitions": len(a.transitions)}


def decide_hd(a: ParityAutomaton) -> HdVerdict:
    """History-determinism via the 2-token game at (q0; q0, q0)."""
    res = wins_gk(a, TokenConfig(a.initial, (a.initial, a.initial)))
    return HdVerdict(res.eve_wins, "two_token", certificate=res)


def wins_g1_pairs(a: ParityAutomaton) -> frozenset[tuple[int, int]]:
    """All weakly coreachable pairs (q, p) from which Eve wins the 1-token
    game, computed with a single product solve."""
    cr = coreachability(a)
    seeds = [(q, (p,), 0) for cls in cr.classes
             for q in sorted(cls) for p in sorted(cls)]
    prod = build_token_product(a, 1, seeds)
    regions = solve_parity(prod.game)
    return frozenset((q, ps[0]) for q, ps, b in seeds
                     if prod.index[("pos", q, ps, b)] in regions.eve)


def prune_everywhere(a: ParityAutomaton) -> ParityAutomaton:
    """Shrink a 2-token-winning automaton to a simulation-equivalent
    subautomaton in which Eve wins the 2-token game from everywhere.

    Eve's winning 3-token strategy is replayed with Adam's third token
    mirroring Eve's moves; the transitions Eve's token can ever take in such
    play form the kept set.  The advertised postconditions (subautomaton,
    completeness on the reachable part, simulation equivalence both ways,
    2-token win everywhere) are re-checked before returning.
    """
    q0 = a.initial
    prod = build_token_product(a, 3, [(q0, (q0, q0, q0), 0)])
    regions = solve_parity(prod.game)
    start = prod.index[("pos", q0, (q0, q0, q0), 0)]
    if start not in regions.eve:
        raise PreconditionError(
            "pruning needs Eve to win the token game at the start")
    sigma = regions.eve_strategy
    game = prod.game
    kept_ids: set[int] = set()
    frontier = [start]
    seen = {start}
    while frontier:
        v = frontier.pop()
        kind = prod.payload[v][0]
        if kind == "pos":
            succs = [e.dst for e in game.out[v]]
        elif kind == "mid":
            eid = sigma.get(v)
            if eid is None:
                raise InternalError("Eve strategy missing inside her region")
            chosen = game.edges[eid]
            kept_ids.add(prod.edge_info[eid][1])
            succs = [chosen.dst]
        else:  # Adam moves his tokens; the third must mirror Eve's choice
            eve_t = prod.payload[v][1]
            succs = [e.dst for e in game.out[v]
                     if prod.edge_info[e.id][1][2] == eve_t]
            if not succs:
                raise InternalError("mirroring lost the third token")
        for w in succs:
            if w not in seen:
                seen.add(w)
                frontier.append(w)

    kept = [t for t in a.transitions if t.id in kept_ids]
    state_ids = sorted({q0} | {t.src for t in kept} | {t.dst for t in kept})
    remap = {old: i for i, old in enumerate(state_ids)}
    for q in state_ids:
        for x in range(a.n_letters):
            if not any(t.src == q and t.letter == x for t in kept):
                raise InternalError(
                    f"pruned automaton lost all '{a.letters[x]}' transitions "
                    f"from {a.state_names[q]}")
    b = make_automaton(a.letters, [a.state_names[q] for q in state_ids],
                       remap[q0], (a.index_low, a.index_high),
                       [(remap[t.src], t.letter, t.priority, remap[t.dst])
                        for t in kept])
    # postconditions
    a_rows = {(t.src, t.letter, t.priority, t.dst) for t in a.transitions}
    for t in b.transitions:
        back = (state_ids[t.src], t.letter, t.priority, state_ids[t.dst])
        if back not in a_rows:
            raise InternalError("pruned automaton is not a subautomaton")
    if not wins_everywhere(b, 2):
        raise InternalError("pruning broke the everywhere 2-token win")
    if not (build_simulation(b, a).eve_wins and build_simulation(a, b).eve_wins):
        raise InternalError("pruned automaton is not simulation-equivalent")
    return b


def dominant_choices(a: ParityAutomaton,
                     pairs: frozenset[tuple[int, int]]) -> dict:
    """Per (reachable state, letter), the least transition whose target wins
    the 1-token game against every sibling target.  Such a choice always
    exists when the automaton is determinisable by pruning."""
    chosen: dict[tuple[int, int], object] = {}
    frontier = [a.initial]
    seen = {a.initial}
    while frontier:
        q = frontier.pop()
        for x in range(a.n_letters):
            row = a.rows[(q, x)]
            pick = next((t for t in row
                         if all((t.dst, u.dst) in pairs for u in row)), None)
            if pick is None:
                raise InternalError(
                    f"no dominating choice at {a.state_names[q]} on "
                    f"'{a.letters[x]}' although the 1-token game is won")
            chosen[(q, x)] = pick
            if pick.dst not in seen:
                seen.add(pick.dst)
                frontier.append(pick.dst)
    return chosen


def decide_hd_safety_reach(a: ParityAutomaton
                           ) -> tuple[HdVerdict, ParityAutomaton | None]:
    """History-determinism for safety/reachability automata via the 1-token
    game; on success also returns the induced deterministic subautomaton."""
    if not (is_safety(a) or is_reachability(a)):
        raise PreconditionError(
            "automaton is neither safety- nor reachability-shaped")
    res = wins_gk(a, TokenConfig(a.initial, (a.initial,)))
    verdict = HdVerdict(res.eve_wins, "one_token_safety_reach",
                        certificate=res)
    if not res.eve_wins:
        return verdict, None
    chosen = dominant_choices(a, wins_g1_pairs(a))
    seen = {a.initial} | {t.dst for t in chosen.values()}
    state_ids = sorted(seen)
    remap = {old: i for i, old in enumerate(state_ids)}
    det = make_automaton(a.letters, [a.state_names[q] for q in state_ids],
                         remap[a.initial], (a.index_low, a.index_high),
                         [(remap[t.src], t.letter, t.priority, remap[t.dst])
                          for t in chosen.values()])
    if not det.is_deterministic():
        raise InternalError("pruned choice function is not deterministic")
    from .oracle import lasso_difference
    diff = lasso_difference(a, det)
    if diff is not None:
        raise InternalError(
            f"deterministic subautomaton differs on lasso {diff}")
    return verdict, det


def is_semantically_deterministic(a: ParityAutomaton):
    """True iff all same-letter successors are language-equivalent.

    Language equality is established through mutual simulation; if that
    fails but no differing lasso exists up to the bounded search, the answer
    is the string "unknown" rather than a guess.
    """
    from .oracle import lasso_difference

    def from_state(q: int) -> ParityAutomaton:
        return make_automaton(a.letters, a.state_names, q,
                              (a.index_low, a.index_high),
                              [(t.src, t.letter, t.priority, t.dst)
                               for t in a.transitions])

    sim_memo: dict[tuple[int, int], bool] = {}

    def mutually_similar(s: int, t: int) -> bool:
        for x, y in ((s, t), (t, s)):
            if (x, y) not in sim_memo:
                sim_memo[(x, y)] = build_simulation(
                    from_state(x), from_state(y)).eve_wins
            if not sim_memo[(x, y)]:
                return False
        return True

    unknown = False
    for (q, x), row in a.rows.items():
        dsts = sorted({t.dst for t in row})
        for i in range(len(dsts)):
            for j in range(i + 1, len(dsts)):
                if mutually_similar(dsts[i], dsts[j]):
                    continue
                if lasso_difference(from_state(dsts[i]),
                                    from_state(dsts[j])) is not None:
                    return False
                unknown = True
    return "unknown" if unknown else True


def ge_realisable(d: ParityAutomaton, letter_split: dict) -> bool:
    """Good-enough realisability of a deterministic specification.

    letter_split maps each letter of d to an (input, output) pair; the
    alphabet must be exactly the product of the input and output sets.  The
    specification is GE-realisable iff the input projection of d (one
    transition per output choice) is history-deterministic.
    """
    if not d.is_deterministic():
        raise PreconditionError("GE check needs a deterministic automaton")
    if set(letter_split) != set(d.letters):
        raise PreconditionError("letter_split must cover the alphabet exactly")
    inputs = sorted({i for i, _ in letter_split.values()})
    outputs = sorted({o for _, o in letter_split.values()})
    combos = {(i, o) for i, o in letter_split.values()}
    if len(combos) != len(d.letters) or len(inputs) * len(outputs) != len(combos):
        raise PreconditionError(
            "alphabet is not an input x output product under letter_split")
    by_letter = {d.letter_id(x): letter_split[x] for x in d.letters}
    triples = set()
    in_id = {i: k for k, i in enumerate(inputs)}
    for t in d.transitions:
        i, _ = by_letter[t.letter]
        triples.add((t.src, in_id[i], t.priority, t.dst))
    proj = make_automaton(inputs, d.state_names, d.initial,
                          (d.index_low, d.index_high), sorted(triples))
    return decide_hd(proj).is_hd
