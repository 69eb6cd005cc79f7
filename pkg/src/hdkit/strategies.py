"""Finite-memory strategies for history-deterministic automata.

A strategy machine resolves the automaton's nondeterminism: given its memory,
the current state, and the next letter, it names the transition to take and
the next memory element.  Extractors cover the safety/reachability, coBüchi,
and Büchi cases; extracted machines are checked by an exact product against
the determinisation oracle (with a bounded-lasso fallback when the oracle's
size guard trips).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .automata import (Lasso, ParityAutomaton, approximate, coreachability,
                       iter_lassos, lasso_member)
from .errors import (InternalError, ParseError, PreconditionError,
                     ResourceLimitError)
from .games import make_game, solve_parity
from .graphs import tarjan_scc
from .hd import decide_hd_safety_reach, dominant_choices, wins_g1_pairs
from .normalize import cobuchi_normalise, coverage
from .oracle import determinise
from .token_games import wins_everywhere


@dataclass(frozen=True)
class StrategyMachine:
    memory: tuple
    init: object
    step: dict = field(hash=False)  # (memory, state, letter) -> (t_id, memory)

    def __post_init__(self):
        if self.init not in self.memory:
            raise PreconditionError("initial memory element unknown")


def machine_to_json(s: StrategyMachine, a: ParityAutomaton) -> str:
    entries = [{"m": str(m), "q": a.state_names[q], "a": a.letters[x],
                "t": t, "m2": str(m2)}
               for (m, q, x), (t, m2) in sorted(
                   s.step.items(), key=lambda kv: (str(kv[0][0]), kv[0][1:]))]
    return json.dumps({"memory": [str(m) for m in s.memory],
                       "init": str(s.init), "step": entries}, indent=2)


def machine_from_json(text: str, a: ParityAutomaton) -> StrategyMachine:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict) or set(doc) != {"memory", "init", "step"}:
        raise ParseError("strategy must have fields memory, init, step")
    memory = doc["memory"]
    if (not isinstance(memory, list) or not memory
            or len(set(memory)) != len(memory)):
        raise ParseError("'memory' must be a nonempty list without duplicates")
    if doc["init"] not in memory:
        raise ParseError("'init' must be a memory element")
    if not isinstance(doc["step"], list):
        raise ParseError("'step' must be a list")
    step = {}
    for i, e in enumerate(doc["step"]):
        if not isinstance(e, dict) or set(e) != {"m", "q", "a", "t", "m2"}:
            raise ParseError(f"step {i} must have fields m, q, a, t, m2")
        if e["m"] not in memory or e["m2"] not in memory:
            raise ParseError(f"step {i} references unknown memory")
        q, x = a.state_id(e["q"]), a.letter_id(e["a"])
        t = e["t"]
        if (not isinstance(t, int) or not 0 <= t < len(a.transitions)
                or a.transitions[t].src != q or a.transitions[t].letter != x):
            raise ParseError(f"step {i}: transition {t} does not leave "
                             f"'{e['q']}' on '{e['a']}'")
        if (e["m"], q, x) in step:
            raise ParseError(f"step {i} duplicates an earlier entry")
        step[(e["m"], q, x)] = (t, e["m2"])
    return StrategyMachine(tuple(memory), doc["init"], step)


# ---------------------------------------------------------------------------
# positional token strategies from explicit pair games


def _pair_game(a: ParityAutomaton, eve_pri, adam_pri) -> tuple[frozenset, dict]:
    """Solve the 1-token game on ``a`` over all state pairs.

    Rounds are split into a letter edge (priority 2), Eve's move (priority
    ``eve_pri`` of her transition's priority) and the opponent's move
    (priority ``adam_pri`` of his).  Returns Eve's winning pairs and her
    positional transition choice per (state, letter, opponent state).
    """
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

    n = a.n_states
    for q in range(n):
        for p in range(n):
            vid(("pos", q, p), False)
    quads: list[tuple[int, int, int]] = []
    for q in range(n):
        for p in range(n):
            for x in range(a.n_letters):
                quads.append((index[("pos", q, p)], 2,
                              vid(("mid", q, x, p), True)))
    for key in [k for k in index if k[0] == "mid"]:
        _, q, x, p = key
        for t in a.rows[(q, x)]:
            quads.append((index[key], eve_pri(t.priority),
                          vid(("mv", t.id, p, x), False)))
    for key in [k for k in index if k[0] == "mv"]:
        _, tid, p, x = key
        dst = a.transitions[tid].dst
        for u in a.rows[(p, x)]:
            quads.append((index[key], adam_pri(u.priority),
                          index[("pos", dst, u.dst)]))
    game = make_game(owner, quads, tuple(payload))
    regions = solve_parity(game)
    pairs = frozenset((q, p) for q in range(n) for p in range(n)
                      if index[("pos", q, p)] in regions.eve)
    choices: dict[tuple[int, int, int], int] = {}
    for key, v in index.items():
        if key[0] == "mid" and v in regions.eve:
            eid = regions.eve_strategy.get(v)
            if eid is not None:
                _, q, x, p = key
                choices[(q, x, p)] = payload[game.edges[eid].dst][1]
    return pairs, choices


def _dominators(a: ParityAutomaton, pairs: frozenset, det: frozenset) -> dict:
    """Per (state, letter) the least transition whose destination wins the
    1-token game against every sibling destination.  Rows of ``det`` states
    must have one."""
    out: dict[tuple[int, int], object] = {}
    for p in range(a.n_states):
        for x in range(a.n_letters):
            row = a.rows[(p, x)]
            pick = next((t for t in row
                         if all((t.dst, u.dst) in pairs for u in row)), None)
            if pick is not None:
                out[(p, x)] = pick
            elif p in det:
                raise InternalError(
                    f"state {a.state_names[p]} resolves deterministically "
                    f"but has no dominating '{a.letters[x]}' choice")
    return out


# ---------------------------------------------------------------------------
# extraction


def extract_safety_reach(a: ParityAutomaton) -> StrategyMachine:
    """Memoryless strategy for a history-deterministic safety or
    reachability automaton: always take the per-row dominating transition."""
    verdict, _ = decide_hd_safety_reach(a)
    if not verdict.is_hd:
        raise PreconditionError("automaton is not history-deterministic")
    chosen = dominant_choices(a, wins_g1_pairs(a))
    step = {(0, q, x): (t.id, 0) for (q, x), t in chosen.items()}
    machine = StrategyMachine((0,), 0, step)
    ok, _ = verify_strategy_mode(a, machine)
    if not ok:
        raise InternalError("extracted safety/reachability strategy fails "
                            "verification")
    return machine


def extract_cobuchi(a: ParityAutomaton) -> StrategyMachine:
    """Strategy for a coBüchi automaton on which Eve wins the 1-token game
    from everywhere.

    The machine tracks a state whose safe run resolves deterministically and
    plays the positional 1-token-game choice against it.  The rest of the
    memory is an age-ordered list of such states, one per still-alive safe
    run; when the tracked run dies the machine resets to the state whose run
    has lived longest (ties by state id).
    """
    if a.index_low != 1 or any(p not in (1, 2) for p in a.priorities_used):
        raise PreconditionError("coBüchi extraction needs a [1, 2] automaton")
    if not wins_everywhere(a, 1):
        raise PreconditionError(
            "coBüchi extraction needs Eve to win the 1-token game everywhere")
    an = cobuchi_normalise(a)
    asafe = approximate(an, "safe")
    sink = an.n_states
    safe_pairs, _ = _pair_game(asafe,
                               lambda p: 1 if p == 1 else 2,
                               lambda p: 0 if p == 1 else 2)
    safe_det = frozenset(p for p in range(an.n_states)
                         if (p, p) in safe_pairs)
    sigma_safe = _dominators(asafe, safe_pairs, safe_det)
    _, g1_choices = _pair_game(an,
                               lambda p: 1 if p == 1 else 2,
                               lambda p: 0 if p == 1 else 2)
    cr = coreachability(an)

    def actives(cls_idx: int) -> list[int]:
        got = sorted(s for s in cr.classes[cls_idx] if s in safe_det)
        if not got:
            raise InternalError("a coreachability class has no state whose "
                                "safe run resolves deterministically")
        return got

    m0_order = actives(cr.class_index[an.initial])
    m0 = (m0_order[0], tuple(m0_order))
    step: dict = {}
    memory: list = [m0]
    frontier = [(m0, an.initial)]
    seen = {(m0, an.initial)}
    while frontier:
        m, q = frontier.pop()
        r, order = m
        for x in range(an.n_letters):
            t_id = g1_choices.get((q, x, r))
            if t_id is None:
                raise InternalError("1-token strategy undefined against the "
                                    "tracked state")
            q2 = an.transitions[t_id].dst
            acts = actives(cr.class_index[q2])
            acts_set = set(acts)
            age: dict[int, int] = {}
            for i, s in enumerate(order):
                ts = sigma_safe.get((s, x))
                if ts is not None and ts.dst != sink and ts.dst in acts_set:
                    age[ts.dst] = min(age.get(ts.dst, i), i)
            order2 = tuple(sorted(
                acts, key=lambda s2: (age.get(s2, an.n_states), s2)))
            tr = sigma_safe.get((r, x))
            if tr is not None and tr.dst != sink:
                r2 = tr.dst  # tracked safe run is still alive
                if r2 not in acts_set:
                    raise InternalError("tracked safe run left the "
                                        "coreachability class")
            else:
                r2 = order2[0]
            m2 = (r2, order2)
            if m2 not in memory:
                memory.append(m2)
            step[(m, q, x)] = (t_id, m2)
            if (m2, q2) not in seen:
                seen.add((m2, q2))
                frontier.append((m2, q2))
    machine = StrategyMachine(tuple(memory), m0, step)
    ok, _ = verify_strategy_mode(a, machine)
    if not ok:
        raise InternalError("extracted coBüchi strategy fails verification")
    return machine


def extract_buchi(a: ParityAutomaton) -> StrategyMachine:
    """Strategy for a Büchi automaton with reach covering on which Eve wins
    the 1-token game from everywhere (the shape rank reduction produces).

    The memory is a token in the positive approximation whose acceptance
    resolves deterministically; Eve plays the positional 1-token-game choice
    against it.  When that choice is one of the automaton's priority-0
    transitions (sink-bound in the approximation) she takes it and resets the
    memory token; otherwise the memory token advances by its own positional
    choice, possibly into the accepting sink.
    """
    if a.index_low != 0 or any(p not in (0, 1) for p in a.priorities_used):
        raise PreconditionError("Büchi extraction needs a [0, 1] automaton")
    if not wins_everywhere(a, 1):
        raise PreconditionError(
            "Büchi extraction needs Eve to win the 1-token game everywhere")
    if not coverage(a, "reach")[0]:
        raise PreconditionError("Büchi extraction needs reach covering "
                                "(rank-reduce first)")
    ab = approximate(a, "above0")
    sink = a.n_states
    pairs, choices = _pair_game(ab,
                                lambda p: 0 if p == 2 else 2,
                                lambda p: 1 if p == 2 else 2)
    reach_det = frozenset(p for p in range(ab.n_states) if (p, p) in pairs)
    sigma_reach = _dominators(ab, pairs, reach_det)
    cr = coreachability(a)

    def pick_memory(q: int) -> int:
        for p in sorted(cr.class_of(q)):
            if p in reach_det and (q, p) in pairs:
                return p
        raise InternalError("no deterministically-accepting tracking state "
                            f"for {a.state_names[q]}")

    m0 = pick_memory(a.initial)
    step: dict = {}
    memory: list = [m0]
    frontier = [(m0, a.initial)]
    seen = {(m0, a.initial)}
    while frontier:
        p, q = frontier.pop()
        for x in range(a.n_letters):
            t_id = choices.get((q, x, p))
            if t_id is None:
                raise InternalError("1-token strategy undefined against the "
                                    "memory token")
            q2 = a.transitions[t_id].dst
            if ab.transitions[t_id].dst != sink:
                ts = sigma_reach.get((p, x))
                if ts is None:
                    raise InternalError("memory token has no deterministic "
                                        "move")
                p2 = ts.dst
            else:
                if a.transitions[t_id].priority != 0:
                    raise InternalError("sink-bound move is not one of the "
                                        "priority-0 transitions")
                p2 = pick_memory(q2)
            if p2 not in memory:
                memory.append(p2)
            step[(p, q, x)] = (t_id, p2)
            if (p2, q2) not in seen:
                seen.add((p2, q2))
                frontier.append((p2, q2))
    machine = StrategyMachine(tuple(memory), m0, step)
    ok, _ = verify_strategy_mode(a, machine)
    if not ok:
        raise InternalError("extracted Büchi strategy fails verification")
    return machine


# ---------------------------------------------------------------------------
# simulation and verification


def simulate_play(a: ParityAutomaton, s: StrategyMachine, w: Lasso
                  ) -> tuple[dict, bool, bool]:
    """Run the machine on the lasso until the (memory, state, position)
    configuration repeats.  Reports the priorities along the way, whether the
    machine's run accepts, and whether that violates history-determinism
    (word accepted by the automaton but the machine's run rejecting)."""
    word = w.prefix + w.cycle
    loop_to = len(w.prefix)
    m, q = s.init, a.initial
    pos = 0
    first_seen: dict = {}
    trace: list[int] = []
    while (m, q, pos) not in first_seen:
        first_seen[(m, q, pos)] = len(trace)
        x = word[pos]
        if (m, q, x) not in s.step:
            raise PreconditionError(
                f"strategy undefined at ({m}, {a.state_names[q]}, "
                f"'{a.letters[x]}')")
        t_id, m2 = s.step[(m, q, x)]
        t = a.transitions[t_id]
        if t.src != q or t.letter != x:
            raise PreconditionError(f"strategy step returns transition "
                                    f"{t_id}, which is not legal here")
        trace.append(t.priority)
        m, q = m2, t.dst
        pos = pos + 1 if pos + 1 < len(word) else loop_to
    start = first_seen[(m, q, pos)]
    cycle = trace[start:]
    accepted = min(cycle) % 2 == 0
    violates = (not accepted) and lasso_member(a, w)
    return {"prefix": trace[:start], "cycle": cycle}, accepted, violates


def verify_strategy_mode(a: ParityAutomaton, s: StrategyMachine
                         ) -> tuple[bool, str]:
    """Exact verification against the determinisation oracle: explore the
    (memory, state, oracle state) product over all letter choices and search
    for a reachable cycle the oracle accepts but the machine's run does not.
    Falls back to a bounded lasso sweep when the oracle's size guard trips.
    """
    try:
        d = determinise(a)
    except ResourceLimitError:
        for w in iter_lassos(a.n_letters, 4, 4):
            _, _, violates = simulate_play(a, s, w)
            if violates:
                return False, "bounded-only"
        return True, "bounded-only"

    index: dict = {}
    edges: list[tuple[int, int, int, int]] = []  # src, dst, a-pri, d-pri

    def vid(cfg) -> int:
        got = index.get(cfg)
        if got is None:
            got = len(index)
            index[cfg] = got
        return got

    start_cfg = (s.init, a.initial, d.initial)
    vid(start_cfg)
    frontier = [start_cfg]
    seen = {start_cfg}
    while frontier:
        cfg = frontier.pop()
        m, q, dq = cfg
        v = index[cfg]
        for x in range(a.n_letters):
            if (m, q, x) not in s.step:
                raise PreconditionError(
                    f"strategy undefined at ({m}, {a.state_names[q]}, "
                    f"'{a.letters[x]}')")
            t_id, m2 = s.step[(m, q, x)]
            t = a.transitions[t_id]
            if t.src != q or t.letter != x:
                raise PreconditionError(f"strategy step returns transition "
                                        f"{t_id}, which is not legal here")
            u = d.rows[(dq, x)][0]
            nxt = (m2, t.dst, u.dst)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
            edges.append((v, vid(nxt), t.priority, u.priority))

    n = len(index)
    d_prios = sorted({pd for _, _, _, pd in edges})
    a_prios = sorted({pa for _, _, pa, _ in edges})
    for cd in (p for p in d_prios if p % 2 == 0):
        for ca in (p for p in a_prios if p % 2 == 1):
            sub = [e for e in edges if e[3] >= cd and e[2] >= ca]
            if not sub:
                continue
            adj: list[list[int]] = [[] for _ in range(n)]
            for u, v, _, _ in sub:
                adj[u].append(v)
            comp_of: dict[int, int] = {}
            for ci, comp in enumerate(tarjan_scc(n, lambda i: adj[i])):
                for i in comp:
                    comp_of[i] = ci
            hits_d = set()
            hits_a = set()
            for u, v, pa, pd in sub:
                if comp_of[u] == comp_of[v]:
                    if pd == cd:
                        hits_d.add(comp_of[u])
                    if pa == ca:
                        hits_a.add(comp_of[u])
            if hits_d & hits_a:
                return False, "exact"
    return True, "exact"


def verify_strategy(a: ParityAutomaton, s: StrategyMachine) -> bool:
    ok, _ = verify_strategy_mode(a, s)
    return ok
