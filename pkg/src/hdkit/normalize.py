"""Automaton-rewriting procedures.

Priority normalisation for coBüchi automata, 2-priority reduction, Büchi
rank-reduction, the full rank-based normalisation for [0,K] automata, and the
four coverage predicates that the strategy extractors rely on.  The rewriting
procedures only remove transitions or decrease priorities; each one re-checks
its advertised invariants (simulation equivalence to the input and the
token-game wins it is supposed to preserve) and raises InternalError when a
check fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import (ParityAutomaton, approximate, coreachability,
                       make_automaton, scc_above, trim)
from .errors import InternalError, PreconditionError
from .games import compute_ranks, solve_parity
from .token_games import (build_simulation, build_token_product,
                          build_g1_buchi, state_rank_info, wins_everywhere)


@dataclass(frozen=True)
class NormalisationReport:
    input: ParityAutomaton
    output: ParityAutomaton
    iterations: int
    steps: tuple[tuple[str, int, int], ...]  # (name, removed, relabelled)
    invariants_checked: dict[str, bool] = field(hash=False)


def _is_cobuchi(a: ParityAutomaton) -> bool:
    return a.index_low == 1 and all(p in (1, 2) for p in a.priorities_used)


def _is_buchi(a: ParityAutomaton) -> bool:
    return a.index_low <= 1 and all(p in (0, 1) for p in a.priorities_used)


def cobuchi_normalise(a: ParityAutomaton) -> ParityAutomaton:
    """Relabel priority-2 transitions that lie on no cycle of the priority-2
    graph to priority 1.  Run acceptance is unchanged: a run with finitely
    many 1s eventually stays inside one priority-2 SCC."""
    if not _is_cobuchi(a):
        raise PreconditionError("priority normalisation needs a [1,2] automaton")
    in_scc = {t for grp in scc_above(a, 2) for t in grp}
    triples = [(t.src, t.letter, 1 if t.priority == 2 and t.id not in in_scc
                else t.priority, t.dst) for t in a.transitions]
    return make_automaton(a.letters, a.state_names, a.initial,
                          (a.index_low, a.index_high), triples)


def two_priority_reduce(a: ParityAutomaton) -> ParityAutomaton:
    """Iteratively relabel until every priority->=2 transition lies in an SCC
    of the >=2 graph and every such SCC contains a priority-2 transition.

    Each pass relabels out-of-SCC transitions to 1, then shifts whole SCCs
    whose minimum priority exceeds 2 down by 2.  Acceptance of every run is
    preserved: runs with finitely many 1s settle into a single SCC, which is
    shifted uniformly."""
    if a.index_low != 1:
        raise PreconditionError("2-priority reduction needs index low 1")
    cur = a
    for _ in range(a.index_high * len(a.transitions) + 2):
        groups = scc_above(cur, 2)
        in_scc = {t for grp in groups for t in grp}
        pri = {t.id: t.priority for t in cur.transitions}
        changed = False
        for t in cur.transitions:
            if t.priority >= 2 and t.id not in in_scc:
                pri[t.id] = 1
                changed = True
        for grp in groups:
            if min(pri[i] for i in grp) > 2:
                for i in grp:
                    pri[i] -= 2
                changed = True
        if not changed:
            return cur
        cur = make_automaton(
            cur.letters, cur.state_names, cur.initial,
            (cur.index_low, cur.index_high),
            [(t.src, t.letter, pri[t.id], t.dst) for t in cur.transitions])
    raise InternalError("2-priority reduction failed to stabilise")


def _rebuild_gc(a: ParityAutomaton, triples: list[tuple[int, int, int, int]]
                ) -> ParityAutomaton:
    """Build the automaton given by kept/relabelled triples, dropping states
    that became unreachable.  A reachable state losing a whole letter row
    means the caller removed a transition it was not entitled to."""
    succs: dict[int, set[int]] = {}
    for s, _, _, d in triples:
        succs.setdefault(s, set()).add(d)
    seen = {a.initial}
    todo = [a.initial]
    while todo:
        q = todo.pop()
        for d in succs.get(q, ()):
            if d not in seen:
                seen.add(d)
                todo.append(d)
    rows = {(s, x) for s, x, _, _ in triples}
    for q in sorted(seen):
        for x in range(a.n_letters):
            if (q, x) not in rows:
                raise InternalError(
                    f"removal emptied the '{a.letters[x]}' row of reachable "
                    f"state {a.state_names[q]}")
    keep = sorted(seen)
    smap = {old: new for new, old in enumerate(keep)}
    return make_automaton(
        a.letters, [a.state_names[q] for q in keep], smap[a.initial],
        (a.index_low, a.index_high),
        [(smap[s], x, p, smap[d]) for s, x, p, d in triples if s in seen])


def _check_invariants(cur: ParityAutomaton, reference: ParityAutomaton,
                      k: int, step: str) -> None:
    if not (build_simulation(cur, reference).eve_wins
            and build_simulation(reference, cur).eve_wins):
        raise InternalError(f"{step} broke simulation equivalence")
    if not wins_everywhere(cur, k):
        raise InternalError(f"{step} broke the everywhere {k}-token win")


def _g1_opt(a: ParityAutomaton) -> dict[int, int]:
    """Optimal rank of each state in the explicit 1-token game: the minimum
    over weakly coreachable partners of the game rank of the pair."""
    game = build_g1_buchi(a)
    table, _ = compute_ranks(game)
    opt: dict[int, int] = {}
    for v, key in enumerate(game.labels):
        if key[0] == "pos":
            _, q, p = key
            opt[q] = min(opt.get(q, table[v]), table[v])
    return opt


def rank_reduce_buchi(a: ParityAutomaton) -> NormalisationReport:
    """Iterate the 1-token rank-reduction until every state has optimal rank
    0: remove priority-1 transitions into strictly larger opt, relabel
    priority-1 transitions into strictly smaller opt to 0.

    States unreachable from the initial state are dropped up front; weak
    coreachability classes are only meaningful on the reachable part, and
    the procedure keeps its output reachable anyway.
    """
    if not _is_buchi(a):
        raise PreconditionError("rank reduction needs a Büchi automaton")
    cur, _ = trim(a)
    if not wins_everywhere(cur, 1):
        raise PreconditionError(
            "rank reduction needs Eve to win the 1-token game everywhere")
    steps: list[tuple[str, int, int]] = []
    iterations = 0
    for _ in range(2 * len(a.transitions) + 2):
        iterations += 1
        opt = _g1_opt(cur)
        triples = []
        removed = relabelled = 0
        for t in cur.transitions:
            if t.priority == 1 and opt[t.src] < opt[t.dst]:
                removed += 1
                continue
            if t.priority == 1 and opt[t.src] > opt[t.dst]:
                relabelled += 1
                triples.append((t.src, t.letter, 0, t.dst))
            else:
                triples.append((t.src, t.letter, t.priority, t.dst))
        if not removed and not relabelled:
            iterations -= 1
            break
        before = len(cur.transitions)
        cur = _rebuild_gc(cur, triples)
        steps.append(("rank-reduction", before - len(cur.transitions),
                      relabelled))
        _check_invariants(cur, a, 1, "rank-reduction")
    else:
        raise InternalError("rank reduction failed to stabilise")
    if any(v != 0 for v in _g1_opt(cur).values()):
        raise InternalError("rank reduction left a state with positive rank")
    if not coverage(cur, "reach")[0]:
        raise InternalError("rank-reduced automaton lacks reach covering")
    return NormalisationReport(a, cur, iterations, tuple(steps),
                               {"I1": True, "I2": True})


def normalise_0K(a: ParityAutomaton) -> NormalisationReport:
    """Full normalisation of a [0,K] automaton: 2-token rank-reduction to
    all-opt-0, branch-separation, and priority-modification, repeated until
    stable.  The result has every state right with optimal rank 0, and
    0-reach covering.

    As in rank_reduce_buchi, unreachable states are dropped up front.
    """
    if a.index_low != 0:
        raise PreconditionError("normalisation needs index low 0")
    cur, _ = trim(a)
    if not wins_everywhere(cur, 2):
        raise PreconditionError(
            "normalisation needs Eve to win the 2-token game everywhere")
    steps: list[tuple[str, int, int]] = []
    iterations = 0
    bound = (a.index_high + 1) * len(a.transitions) + 2
    for _ in range(bound):
        outer_changed = False

        # rank-reduction on the 2-token product, to fixpoint
        for _ in range(bound):
            info = state_rank_info(cur)
            triples = []
            removed = relabelled = 0
            for t in cur.transitions:
                if t.priority > 0 and info.opt[t.src] < info.opt[t.dst]:
                    removed += 1
                    continue
                if t.priority > 0 and info.opt[t.src] > info.opt[t.dst]:
                    relabelled += 1
                    triples.append((t.src, t.letter, 0, t.dst))
                else:
                    triples.append((t.src, t.letter, t.priority, t.dst))
            if not removed and not relabelled:
                break
            outer_changed = True
            before = len(cur.transitions)
            cur = _rebuild_gc(cur, triples)
            steps.append(("rank-reduction", before - len(cur.transitions),
                          relabelled))
            _check_invariants(cur, a, 2, "rank-reduction")
        else:
            raise InternalError("2-token rank reduction failed to stabilise")

        # right/non-right labels are frozen here and reused below
        info = state_rank_info(cur)
        if any(v != 0 for v in info.opt.values()):
            raise InternalError("rank reduction left a positive optimal rank")
        right = info.right

        triples = []
        removed = 0
        for t in cur.transitions:
            if t.priority >= 1 and right[t.src] and not right[t.dst]:
                removed += 1
            elif t.priority == 1 and not right[t.src]:
                removed += 1
            else:
                triples.append((t.src, t.letter, t.priority, t.dst))
        if removed:
            outer_changed = True
            before = len(cur.transitions)
            old_names = cur.state_names
            cur = _rebuild_gc(cur, triples)
            right = {q: right[old_names.index(nm)]
                     for q, nm in enumerate(cur.state_names)}
            steps.append(("branch-separation",
                          before - len(cur.transitions), 0))
            _check_invariants(cur, a, 2, "branch-separation")

        relabelled = 0
        triples = []
        for t in cur.transitions:
            if not right[t.src] and t.priority >= 2:
                relabelled += 1
                triples.append((t.src, t.letter, t.priority - 2, t.dst))
            else:
                triples.append((t.src, t.letter, t.priority, t.dst))
        if relabelled:
            outer_changed = True
            cur = make_automaton(cur.letters, cur.state_names, cur.initial,
                                 (cur.index_low, cur.index_high), triples)
            steps.append(("priority-modification", 0, relabelled))
            _check_invariants(cur, a, 2, "priority-modification")

        if not outer_changed:
            break
        iterations += 1
    else:
        raise InternalError("normalisation failed to stabilise")

    final = state_rank_info(cur)
    if any(v != 0 for v in final.opt.values()) or not all(final.right.values()):
        raise InternalError("normalisation left a non-right state")
    if not coverage(cur, "zero_reach")[0]:
        raise InternalError("normalised automaton lacks 0-reach covering")
    return NormalisationReport(a, cur, iterations, tuple(steps),
                               {"I1": True, "I2": True})


_COVERAGE_KINDS = {
    # kind: (approximation, tokens, covered state plays Eve)
    "safe": ("safe", 1, False),
    "one_safe": ("above1", 2, False),
    "reach": ("above0", 1, True),
    "zero_reach": ("above0", 2, True),
}


def coverage(a: ParityAutomaton, kind: str
             ) -> tuple[bool, dict[int, tuple[int | None, int | None]]]:
    """Does every state have a token-game witness in its weak-coreachability
    class, on the kind's approximation?

    For "safe" the witness w covers s when Eve wins the 1-token game from
    (w; s) in the safety approximation; "one_safe" doubles Adam's token,
    "reach" and "zero_reach" swap the roles (covered state plays Eve).
    witnesses[s] is (witness, self_witness): the second also wins its own
    self-game, found through the witness-graph closure; either may be None.
    """
    if kind not in _COVERAGE_KINDS:
        raise PreconditionError(f"unknown coverage kind '{kind}'")
    approx_kind, k, covered_plays_eve = _COVERAGE_KINDS[kind]
    appr = approximate(a, approx_kind)
    cr = coreachability(a)
    seeds = []
    for cls in cr.classes:
        members = sorted(cls)
        for s in members:
            for w in members:
                e, ad = (s, w) if covered_plays_eve else (w, s)
                seeds.append((e, (ad,) * k, 0))
    prod = build_token_product(appr, k, seeds, restrict=False)
    regions = solve_parity(prod.game)

    def won(e: int, ad: int) -> bool:
        return prod.index[("pos", e, (ad,) * k, 0)] in regions.eve

    witnesses: dict[int, tuple[int | None, int | None]] = {}
    holds = True
    for cls in cr.classes:
        members = sorted(cls)
        covers = {s: [w for w in members
                      if (won(s, w) if covered_plays_eve else won(w, s))]
                  for s in members}
        # reachability in the witness graph; the game relations compose, so
        # any witness of a witness is again a witness
        for s in members:
            frontier = list(covers[s])
            closure = set(frontier)
            while frontier:
                w = frontier.pop()
                for w2 in covers[w]:
                    if w2 not in closure:
                        closure.add(w2)
                        frontier.append(w2)
            plain = covers[s][0] if covers[s] else None
            self_w = next((w for w in sorted(closure) if w in covers[w]),
                          None)
            witnesses[s] = (plain, self_w)
            if plain is None:
                holds = False
    return holds, witnesses
