"""Token game arenas over parity automata.

In the k-token game on an automaton, each round has Adam pick a letter, Eve
move her token along one transition, then Adam move his k tokens.  Eve wins
if her run is accepting or none of Adam's runs is.  The winning condition is
a Muller condition over priority tuples, handled by composing the arena with
the box-shaped Zielonka tree of that condition.

All arenas are restricted to weakly coreachable configurations (starting
from such a configuration, every reachable one is again weakly coreachable),
unless the debugging flag asks for the full product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import ParityAutomaton, coreachability
from .errors import InternalError, PreconditionError
from .games import (ParityGame, ZielonkaTree, build_zielonka_token,
                    compute_ranks, make_game, solve_parity)
from .graphs import reachable


@dataclass(frozen=True)
class TokenConfig:
    eve_state: int
    adam_states: tuple[int, ...]

    def __post_init__(self):
        if not (1 <= len(self.adam_states) <= 3):
            raise PreconditionError("token games support 1 to 3 Adam tokens")

    @property
    def k(self) -> int:
        return len(self.adam_states)


@dataclass(frozen=True)
class TokenGameResult:
    winner: str                       # "Eve" or "Adam"
    product_game: ParityGame
    payload: tuple                    # vertex id -> position key
    initial: int
    eve_strategy: dict | None = field(default=None, hash=False, compare=False)

    @property
    def eve_wins(self) -> bool:
        return self.winner == "Eve"


@dataclass(frozen=True)
class StateRankInfo:
    opt: dict[int, int] = field(hash=False)
    witness: dict[int, tuple] = field(hash=False)  # state -> (p, r, branch)
    right: dict[int, bool] = field(hash=False)


def _colour_base(a: ParityAutomaton) -> tuple[int, int]:
    """(shift, K): priorities are lowered by the even amount `shift` so they
    fit the [0,K] colour space of the box trees without changing acceptance."""
    shift = a.index_low - (a.index_low % 2)
    return shift, max(a.index_high - shift, 1)


@dataclass(frozen=True)
class TokenProduct:
    """A k-token arena composed with the branch automaton of Z([0,K], k).

    Vertex payloads are ("pos", q, adam_tuple, branch) for round starts
    (Adam picks a letter), ("mid", q, letter, adam_tuple, branch) for Eve's
    choice, and ("move", eve_transition_id, adam_tuple, letter, branch) for
    Adam's token moves.  edge_info[i] is ("letter", x), ("eve", t_id) or
    ("adam", (t_ids...)) for edge i.
    """
    game: ParityGame
    payload: tuple
    index: dict = field(hash=False)
    edge_info: tuple = ()
    tree: ZielonkaTree | None = None
    shift: int = 0


def build_token_product(a: ParityAutomaton, k: int,
                        seeds: list[tuple[int, tuple[int, ...], int]],
                        restrict: bool = True) -> TokenProduct:
    """Closure of the k-token arena from the given (q, adam_tuple, branch)
    seeds.  With restrict=False no coreachability check is applied to the
    seeds (full-product debugging)."""
    if not (1 <= k <= 3):
        raise PreconditionError("token games support 1 to 3 Adam tokens")
    shift, big_k = _colour_base(a)
    tree = build_zielonka_token(big_k, k)
    neutral = tree.height + 1
    if neutral <= tree.priorities[1]:
        raise InternalError("neutral priority does not dominate the tree")
    if restrict:
        cr = coreachability(a)
        for q, ps, _ in seeds:
            if any(not cr.weakly_coreachable(q, p) for p in ps) or any(
                    not cr.weakly_coreachable(ps[0], p) for p in ps):
                raise PreconditionError(
                    f"seed ({q}, {ps}) is not weakly coreachable")

    index: dict = {}
    payload: list = []
    owner: list[bool] = []

    def vid(key, is_eve: bool) -> int:
        got = index.get(key)
        if got is None:
            got = len(payload)
            index[key] = got
            payload.append(key)
            owner.append(is_eve)
        return got

    quads: list[tuple[int, int, int]] = []
    info: list[tuple] = []
    frontier = []
    for q, ps, b in seeds:
        key = ("pos", q, tuple(ps), b)
        if key not in index:
            frontier.append(vid(key, False))
    done: set[int] = set(frontier)
    while frontier:
        v = frontier.pop()
        _, q, ps, b = payload[v]
        for x in range(a.n_letters):
            mid = vid(("mid", q, x, ps, b), True)
            quads.append((v, neutral, mid))
            info.append(("letter", x))
            if mid in done:
                continue
            done.add(mid)
            for t in a.rows[(q, x)]:
                mv = vid(("move", t.id, ps, x, b), False)
                quads.append((mid, neutral, mv))
                info.append(("eve", t.id))
                if mv in done:
                    continue
                done.add(mv)
                combos = [()]
                for p in ps:
                    combos = [c + (u,) for c in combos for u in a.rows[(p, x)]]
                for adam_ts in combos:
                    colours = (t.priority - shift,) + tuple(
                        u.priority - shift for u in adam_ts)
                    nb, pri = tree.branch_successor(b, colours)
                    tv = vid(("pos", t.dst, tuple(u.dst for u in adam_ts), nb),
                             False)
                    quads.append((mv, pri, tv))
                    info.append(("adam", tuple(u.id for u in adam_ts)))
                    if tv not in done:
                        done.add(tv)
                        frontier.append(tv)
    game = make_game(owner, quads, tuple(payload))
    return TokenProduct(game, tuple(payload), index, tuple(info), tree, shift)


def wins_gk(a: ParityAutomaton, cfg: TokenConfig) -> TokenGameResult:
    """Solve the k-token game from the given configuration (leftmost branch;
    the winner does not depend on the starting branch)."""
    prod = build_token_product(a, cfg.k, [(cfg.eve_state, cfg.adam_states, 0)])
    regions = solve_parity(prod.game)
    start = prod.index[("pos", cfg.eve_state, tuple(cfg.adam_states), 0)]
    eve = start in regions.eve
    return TokenGameResult("Eve" if eve else "Adam", prod.game, prod.payload,
                           start, dict(regions.eve_strategy) if eve else None)


def wins_everywhere(a: ParityAutomaton, k: int) -> bool:
    """Does Eve win the k-token game from every configuration of weakly
    coreachable states?  One product solve covers all configurations."""
    if k not in (1, 2):
        raise PreconditionError("everywhere-checks support k in {1, 2}")
    cr = coreachability(a)
    seeds = []
    for cls in cr.classes:
        members = sorted(cls)
        tuples = [(q,) for q in members]
        for _ in range(k):
            tuples = [t + (p,) for t in tuples for p in members]
        seeds.extend((t[0], t[1:], 0) for t in tuples)
    prod = build_token_product(a, k, seeds)
    regions = solve_parity(prod.game)
    return all(prod.index[("pos", q, ps, b)] in regions.eve
               for q, ps, b in seeds)


def build_g1_buchi(a: ParityAutomaton) -> ParityGame:
    """The explicit [0,2] 1-token game on a Büchi automaton, restricted to
    weakly coreachable pairs.

    Rounds: at (q,p) Adam picks a letter (priority 2); at (q,letter,p) Eve
    picks her transition (priority 0 if it has priority 0, else 2); at
    (q',p,letter) Adam picks his transition (priority 1 if it has priority
    0, else 2).  Eve thus wins iff whenever Adam's token takes accepting
    transitions infinitely often, so does hers.
    """
    if any(p > 1 for p in a.priorities_used) or a.index_low > 1:
        raise PreconditionError("build_g1_buchi needs a [0,1] automaton")
    cr = coreachability(a)
    index: dict = {}
    payload: list = []
    owner: list[bool] = []

    def vid(key, is_eve: bool) -> int:
        got = index.get(key)
        if got is None:
            got = len(payload)
            index[key] = got
            payload.append(key)
            owner.append(is_eve)
        return got

    pairs = [(q, p) for cls in cr.classes for q in sorted(cls)
             for p in sorted(cls)]
    for q, p in pairs:
        vid(("pos", q, p), False)
    quads: list[tuple[int, int, int]] = []
    for q, p in pairs:
        v = index[("pos", q, p)]
        for x in range(a.n_letters):
            mid = vid(("mid", q, x, p), True)
            quads.append((v, 2, mid))
    for key, mid in [it for it in index.items() if it[0][0] == "mid"]:
        _, q, x, p = key
        for t in a.rows[(q, x)]:
            mv = vid(("move", t.dst, p, x), False)
            quads.append((mid, 0 if t.priority == 0 else 2, mv))
    for key, mv in [it for it in index.items() if it[0][0] == "move"]:
        _, q2, p, x = key
        for u in a.rows[(p, x)]:
            tv = index[("pos", q2, u.dst)]
            quads.append((mv, 1 if u.priority == 0 else 2, tv))
    return make_game(owner, quads, tuple(payload))


def build_g2_product(a: ParityAutomaton) -> TokenProduct:
    """The 2-token arena from every weakly coreachable triple and every
    branch of the box tree (so per-branch ranks are available)."""
    if a.index_low != 0:
        raise PreconditionError(
            "the 2-token product needs priorities starting at 0; shift first")
    _, big_k = _colour_base(a)
    n_branches = len(build_zielonka_token(big_k, 2).branches)
    cr = coreachability(a)
    seeds = []
    for cls in cr.classes:
        members = sorted(cls)
        for q in members:
            for p in members:
                for r in members:
                    for b in range(n_branches):
                        seeds.append((q, (p, r), b))
    return build_token_product(a, 2, seeds)


def build_simulation(a: ParityAutomaton, b: ParityAutomaton) -> TokenGameResult:
    """The simulation game of b by a: Adam picks the letter and his
    b-transition before Eve picks her a-transition.  Eve winning means a
    simulates b."""
    if a.letters != b.letters:
        raise PreconditionError("simulation needs a common alphabet")
    shift_a, ka = _colour_base(a)
    shift_b, kb = _colour_base(b)
    big_k = max(ka, kb)
    tree = build_zielonka_token(big_k, 1)
    neutral = tree.height + 1

    index: dict = {}
    payload: list = []
    owner: list[bool] = []

    def vid(key, is_eve: bool) -> int:
        got = index.get(key)
        if got is None:
            got = len(payload)
            index[key] = got
            payload.append(key)
            owner.append(is_eve)
        return got

    start = vid(("pos", a.initial, b.initial, 0), False)
    quads: list[tuple[int, int, int]] = []
    frontier = [start]
    done = {start}
    while frontier:
        v = frontier.pop()
        _, qa, qb, beta = payload[v]
        for x in range(a.n_letters):
            for u in b.rows[(qb, x)]:
                mid = vid(("mid", qa, x, u.id, beta), True)
                quads.append((v, neutral, mid))
                if mid in done:
                    continue
                done.add(mid)
                for t in a.rows[(qa, x)]:
                    nb, pri = tree.branch_successor(
                        beta, (t.priority - shift_a, u.priority - shift_b))
                    tv = vid(("pos", t.dst, u.dst, nb), False)
                    quads.append((mid, pri, tv))
                    if tv not in done:
                        done.add(tv)
                        frontier.append(tv)
    game = make_game(owner, quads, tuple(payload), start)
    regions = solve_parity(game)
    eve = start in regions.eve
    return TokenGameResult("Eve" if eve else "Adam", game, tuple(payload),
                           start, dict(regions.eve_strategy) if eve else None)


def simulates(a: ParityAutomaton, b: ParityAutomaton) -> bool:
    return build_simulation(a, b).eve_wins


def state_rank_info(a: ParityAutomaton) -> StateRankInfo:
    """Optimal ranks, witnesses and right/left classification per state.

    opt(q) is the minimum, over weakly coreachable (p, r) and branches β,
    of the rank of (q, (p,r), β) in the 2-token product; q is a right state
    iff some rank-0 witness sits on a branch through the all-ones box.
    Requires Eve to win the 2-token game everywhere and every state to be
    reachable: coreachability classes of unreachable states are degenerate,
    which would let the product wander into configurations Adam wins.
    """
    def succ(q: int):
        return [t.dst for x in range(a.n_letters) for t in a.rows[(q, x)]]

    if len(reachable(a.n_states, [a.initial], succ)) != a.n_states:
        raise PreconditionError(
            "state ranks need every state reachable from the initial state; "
            "trim first")
    if not wins_everywhere(a, 2):
        raise PreconditionError(
            "state ranks need Eve to win the 2-token game everywhere")
    prod = build_g2_product(a)
    table, _ = compute_ranks(prod.game)
    tree = prod.tree
    right_branches = {
        i for i, br in enumerate(tree.branches)
        if any(tree.nodes[n].box == (1, 1, 1) for n in br)}
    entries: dict[int, list[tuple]] = {}
    for v, key in enumerate(prod.payload):
        if key[0] == "pos":
            _, q, (p, r), beta = key
            entries.setdefault(q, []).append((table[v], beta, p, r))
    opt: dict[int, int] = {}
    witness: dict[int, tuple] = {}
    right: dict[int, bool] = {}
    for q, rows in entries.items():
        best = min(rank for rank, _, _, _ in rows)
        opt[q] = best
        right[q] = best == 0 and any(
            rank == 0 and beta in right_branches for rank, beta, _, _ in rows)
        # prefer a right-branch witness, then the smallest triple
        ranked = sorted(
            (not (beta in right_branches), p, r, beta)
            for rank, beta, p, r in rows if rank == best)
        _, p, r, beta = ranked[0]
        witness[q] = (p, r, beta)
    for q, flag in right.items():
        if flag and (opt[q] != 0 or witness[q][2] not in right_branches):
            raise InternalError("right-state bookkeeping is inconsistent")
    return StateRankInfo(opt, witness, right)
