"""Two-player games on graphs and the Zielonka-tree machinery.

Parity games here carry priorities on *edges* and use min-parity acceptance:
Eve wins a play iff the least priority occurring infinitely often along its
edges is even.  The solver returns positional strategies for both players and
always re-checks its own answer with an independent one-player analysis.

Muller games carry a hashable colour on each edge and an explicit acceptance
predicate on sets of colours.  They are solved by composing the game with the
deterministic branch automaton of a Zielonka tree of the condition.
"""

from __future__ import annotations

import bisect
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, NamedTuple, Sequence

from .errors import InternalError, PreconditionError, ResourceLimitError
from .graphs import tarjan_scc

EVE = True
ADAM = False


class Edge(NamedTuple):
    id: int
    src: int
    priority: int
    dst: int


class MEdge(NamedTuple):
    id: int
    src: int
    colour: Hashable
    dst: int


@dataclass(frozen=True)
class ParityGame:
    owner: tuple[bool, ...]          # True = Eve
    edges: tuple[Edge, ...]
    labels: tuple = ()               # optional per-vertex payloads
    initial: int | None = None

    def __post_init__(self):
        n = len(self.owner)
        if n == 0:
            raise PreconditionError("game needs at least one vertex")
        has_out = [False] * n
        for pos, e in enumerate(self.edges):
            if e.id != pos:
                raise PreconditionError("edge ids must be dense and in order")
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise PreconditionError(f"edge {pos} references unknown vertex")
            if e.priority < 0:
                raise PreconditionError("priorities must be nonnegative")
            has_out[e.src] = True
        if not all(has_out):
            v = has_out.index(False)
            raise PreconditionError(f"vertex {v} has no outgoing edge")
        if self.initial is not None and not (0 <= self.initial < n):
            raise PreconditionError("initial vertex out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.owner)

    @property
    def out(self) -> list[list[Edge]]:
        cached = self.__dict__.get("_out")
        if cached is None:
            cached = [[] for _ in range(self.n_vertices)]
            for e in self.edges:
                cached[e.src].append(e)
            self.__dict__["_out"] = cached
        return cached


@dataclass(frozen=True)
class WinRegions:
    eve: frozenset[int]
    adam: frozenset[int]
    eve_strategy: dict[int, int] = field(hash=False, compare=False)
    adam_strategy: dict[int, int] = field(hash=False, compare=False)


def make_game(owner: Sequence[bool], quads: Iterable[tuple[int, int, int]],
              labels: Sequence = (), initial: int | None = None) -> ParityGame:
    """Build a parity game from (src, priority, dst) triples, assigning ids."""
    es = tuple(Edge(i, s, p, d) for i, (s, p, d) in enumerate(quads))
    return ParityGame(tuple(owner), es, tuple(labels), initial)


# ---------------------------------------------------------------------------
# parity solving (recursive Zielonka on a subdivided graph)


def _attractor(player: int, target: set[int], sub: set[int],
               owner: Sequence[int], radj: list[list[int]],
               adj: list[list[int]]) -> tuple[set[int], dict[int, int]]:
    """Player's attractor to ``target`` within ``sub``.

    Returns the attractor and, for the player's vertices newly attracted, a
    successor choice moving one layer closer to the target.
    """
    attr = set(target)
    strat: dict[int, int] = {}
    # remaining escape edges for opponent vertices
    count = {}
    todo = list(target)
    while todo:
        v = todo.pop()
        for u in radj[v]:
            if u not in sub or u in attr:
                continue
            if owner[u] == player:
                attr.add(u)
                strat[u] = v
                todo.append(u)
            else:
                if u not in count:
                    count[u] = sum(1 for w in adj[u] if w in sub)
                count[u] -= 1
                if count[u] == 0:
                    attr.add(u)
                    todo.append(u)
    return attr, strat


def _zielonka(sub: set[int], owner: Sequence[int], prio: Sequence[int],
              adj: list[list[int]], radj: list[list[int]]):
    """Returns (eve_set, adam_set, strategy) for the subgame on ``sub``.

    ``strategy`` maps winning vertices of either player (that they own) to a
    chosen successor vertex.
    """
    if not sub:
        return set(), set(), {}
    d = min(prio[v] for v in sub)
    player = 0 if d % 2 == 0 else 1  # 0 = Eve
    n_set = {v for v in sub if prio[v] == d}
    a_set, a_strat = _attractor(player, n_set, sub, owner, radj, adj)
    w0, w1, strat = _zielonka(sub - a_set, owner, prio, adj, radj)
    w_opp = w1 if player == 0 else w0
    if not w_opp:
        # player wins everywhere in sub
        strat.update(a_strat)
        for v in n_set:
            if owner[v] == player and v not in strat:
                for w in adj[v]:
                    if w in sub:
                        strat[v] = w
                        break
        return (sub, set(), strat) if player == 0 else (set(), sub, strat)
    opp = 1 - player
    b_set, b_strat = _attractor(opp, w_opp, sub, owner, radj, adj)
    w0b, w1b, stratb = _zielonka(sub - b_set, owner, prio, adj, radj)
    # keep the opponent's strategy inside w_opp from the first recursion
    for v in w_opp:
        if owner[v] == opp and v in strat:
            stratb[v] = strat[v]
    stratb.update(b_strat)
    if opp == 0:
        return (w0b | b_set, w1b, stratb)
    return (w0b, w1b | b_set, stratb)


def solve_parity(g: ParityGame, verify: bool = True) -> WinRegions:
    """Solve an edge-priority min-parity game positionally for both players.

    When ``verify`` is set (the default) the regions and strategies are
    re-checked by fixing the winner's strategy and searching the resulting
    one-player game for cycles won by the opponent; failure raises
    InternalError.
    """
    n = g.n_vertices
    m = len(g.edges)
    maxp = max((e.priority for e in g.edges), default=0)
    # subdivision: vertex i < n original (neutral priority), n + e.id per edge
    owner = [0] * (n + m)
    prio = [maxp] * (n + m)
    adj: list[list[int]] = [[] for _ in range(n + m)]
    radj: list[list[int]] = [[] for _ in range(n + m)]
    for v in range(n):
        owner[v] = 0 if g.owner[v] else 1
    for e in g.edges:
        mid = n + e.id
        prio[mid] = e.priority
        adj[e.src].append(mid)
        radj[mid].append(e.src)
        adj[mid].append(e.dst)
        radj[e.dst].append(mid)

    result = {}

    def run():
        import sys
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * (n + m) + 1000))
        try:
            result["out"] = _zielonka(set(range(n + m)), owner, prio, adj, radj)
        except BaseException as exc:  # surface errors from the worker thread
            result["err"] = exc
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    try:
        threading.stack_size(256 * 1024 * 1024)
    except (ValueError, RuntimeError):
        pass
    t = threading.Thread(target=run)
    t.start()
    t.join()
    try:
        threading.stack_size(old_size)
    except (ValueError, RuntimeError):
        pass
    if "err" in result:
        raise result["err"]
    w0, w1, strat = result["out"]

    eve = frozenset(v for v in range(n) if v in w0)
    adam = frozenset(v for v in range(n) if v in w1)
    eve_strategy: dict[int, int] = {}
    adam_strategy: dict[int, int] = {}
    for v in range(n):
        if v in strat:
            eid = strat[v] - n  # strategies on original vertices pick a mid
            if g.owner[v] and v in eve:
                eve_strategy[v] = eid
            elif (not g.owner[v]) and v in adam:
                adam_strategy[v] = eid
    regions = WinRegions(eve, adam, eve_strategy, adam_strategy)
    if verify:
        _verify_regions(g, regions)
    return regions


def _verify_regions(g: ParityGame, r: WinRegions) -> None:
    n = g.n_vertices
    if r.eve | r.adam != frozenset(range(n)) or (r.eve & r.adam):
        raise InternalError("winning regions do not partition the vertices")
    for winner_is_eve, region, strategy in (
            (True, r.eve, r.eve_strategy), (False, r.adam, r.adam_strategy)):
        # closure and strategy well-formedness
        for v in region:
            if g.owner[v] == winner_is_eve:
                if v not in strategy:
                    raise InternalError(f"missing strategy at vertex {v}")
                e = g.edges[strategy[v]]
                if e.src != v or e.dst not in region:
                    raise InternalError(f"strategy at vertex {v} leaves the region")
            else:
                for e in g.out[v]:
                    if e.dst not in region:
                        raise InternalError(
                            f"opponent can escape the region from vertex {v}")
        # one-player check: the loser must have no good cycle left
        kept = []
        for v in region:
            if g.owner[v] == winner_is_eve:
                kept.append(g.edges[strategy[v]])
            else:
                kept.extend(g.out[v])
        loser_parity = 1 if winner_is_eve else 0
        if _has_cycle_with_parity(kept, loser_parity):
            raise InternalError("verification found a cycle won by the loser")


def _has_cycle_with_parity(edges: list[Edge], parity: int) -> bool:
    """Is there a cycle whose minimum priority has the given parity?"""
    if not edges:
        return False
    prios = sorted({e.priority for e in edges if e.priority % 2 == parity})
    for c in prios:
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
        for e in sub:
            if e.priority == c and comp_of[vmap[e.src]] == comp_of[vmap[e.dst]]:
                return True
    return False


# ---------------------------------------------------------------------------
# ranks


INF = float("inf")


@dataclass(frozen=True)
class RankTable:
    """Per-vertex least bound k such that Eve can win the parity game while
    seeing at most k priority-1 edges before the first priority-0 edge.

    Equivalently: the largest number of 1-edges Adam can force ahead of the
    first 0-edge when Eve is held to winning play.  Adam cannot buy extra
    1-edges by steering into a region Eve would never enter.
    """
    ranks: tuple

    def __getitem__(self, v: int):
        return self.ranks[v]


def _edge_value(e: Edge, ranks) -> float:
    if e.priority == 0:
        return 0
    if e.priority == 1:
        return 1 + ranks[e.dst]
    return ranks[e.dst]


def _measure_less(a, b) -> bool:
    """Lexicographic order on measures; None is the top element."""
    if b is None:
        return a is not None
    if a is None:
        return False
    return a < b


def _progress_measures(g: ParityGame) -> list:
    """Least progress measure per vertex; None marks an unbounded vertex.

    A measure is one counter per odd priority in use, most significant
    first.  A priority-p edge constrains the counters for odd priorities
    below p (even p: no increase; odd p: a strict lexicographic step on the
    prefix through p, zeroing everything after the bumped counter).  Eve
    picks the cheapest edge, Adam the dearest, and the least fixpoint is
    reached by lifting from all-zero.  Counters stay finite exactly on
    Eve's winning region: a play exceeding a cap would close a cycle whose
    least priority is odd, which Adam could repeat forever.
    """
    n = g.n_vertices
    odds = sorted({e.priority for e in g.edges if e.priority % 2})
    comps = len(odds)
    counts = {p: 0 for p in odds}
    for e in g.edges:
        if e.priority % 2:
            counts[e.priority] += 1
    caps = [min(n, counts[p]) for p in odds]
    below = {}
    for e in g.edges:
        if e.priority not in below:
            below[e.priority] = bisect.bisect_left(odds, e.priority)

    def lift(m, p: int):
        if m is None:
            return None
        i = below[p]
        if p % 2 == 0:
            return m[:i] + (0,) * (comps - i)
        for j in range(i, -1, -1):
            if m[j] < caps[j]:
                return m[:j] + (m[j] + 1,) + (0,) * (comps - j - 1)
        return None

    mu: list = [(0,) * comps] * n
    preds: list[set] = [set() for _ in range(n)]
    for e in g.edges:
        preds[e.dst].add(e.src)
    queue = deque(range(n))
    queued = [True] * n
    while queue:
        v = queue.popleft()
        queued[v] = False
        vals = [lift(mu[e.dst], e.priority) for e in g.out[v]]
        best = vals[0]
        for m in vals[1:]:
            if g.owner[v]:
                if _measure_less(m, best):
                    best = m
            elif _measure_less(best, m):
                best = m
        if best == mu[v]:
            continue
        if _measure_less(best, mu[v]):
            raise InternalError("progress measure decreased during lifting")
        mu[v] = best
        for u in preds[v]:
            if not queued[u]:
                queued[u] = True
                queue.append(u)
    return mu


def compute_ranks(g: ParityGame) -> tuple[RankTable, dict[int, int]]:
    """Progress-measure ranks plus a certified rank-optimal strategy.

    Requires Eve to win the parity game from every vertex (PreconditionError
    otherwise); this makes all ranks finite.  The rank of a vertex is the
    most significant component of its least progress measure: the tightest
    bound on priority-1 edges before the first priority-0 edge that some
    winning strategy of Eve can guarantee.  The full measure is needed
    rather than a scalar fixpoint because cycles through higher odd
    priorities are losing for Eve and must not be priced as free.

    The returned strategy restricts Eve to edges that do not increase the
    rank and re-solves the parity game; that it both wins and respects the
    rank bound is re-verified before returning (InternalError on failure, as
    either would be an implementation bug).  Monotonicity is asserted on
    every remaining edge: priority 0, or rank(src) >= rank(dst), strictly
    when the priority is 1.
    """
    n = g.n_vertices
    base = solve_parity(g)
    if base.adam:
        raise PreconditionError(
            f"Adam wins from vertices {sorted(base.adam)}; ranks need Eve "
            "to win everywhere")
    cap = n
    mu = _progress_measures(g)
    if any(m is None for m in mu):
        raise InternalError("infinite rank although Eve wins everywhere")
    # the rank is the priority-1 counter; other odd counters only certify
    # that the bound is achieved by winning play
    has_ones = any(e.priority == 1 for e in g.edges)
    ranks: list = [m[0] if has_ones else 0 for m in mu]

    kept_quads = []
    kept_ids = []
    for e in g.edges:
        if g.owner[e.src] and _edge_value(e, ranks) > ranks[e.src]:
            continue
        kept_quads.append((e.src, e.priority, e.dst))
        kept_ids.append(e.id)
        # monotonicity along every surviving edge
        if e.priority == 1 and not ranks[e.src] >= 1 + ranks[e.dst]:
            raise InternalError(f"rank not strictly decreasing on edge {e.id}")
        if e.priority >= 2 and not ranks[e.src] >= ranks[e.dst]:
            raise InternalError(f"rank increases along edge {e.id}")
    restricted = make_game(g.owner, kept_quads, g.labels)
    sub = solve_parity(restricted)
    if sub.adam:
        raise InternalError(
            "no strategy is simultaneously winning and rank-optimal")
    strategy = {v: kept_ids[eid] for v, eid in sub.eve_strategy.items()}

    # re-verify the count guarantee on the strategy-fixed graph
    fixed: list[list[Edge]] = [[] for _ in range(n)]
    for e in g.edges:
        if g.owner[e.src]:
            if strategy.get(e.src) == e.id:
                fixed[e.src].append(e)
        else:
            fixed[e.src].append(e)
    worst: list = [0] * n
    for _ in range((cap + 2) * (n + 2)):
        stable = True
        for v in range(n):
            best = max(_edge_value(e, worst) for e in fixed[v])
            if best > cap:
                best = INF
            if best != worst[v]:
                worst[v] = best
                stable = False
        if stable:
            break
    for v in range(n):
        if worst[v] > ranks[v]:
            raise InternalError(
                f"rank-optimal strategy exceeds the rank bound at vertex {v}")
    return RankTable(tuple(ranks)), strategy


# ---------------------------------------------------------------------------
# Zielonka trees


@dataclass(frozen=True)
class ZNode:
    label: frozenset
    box: tuple | None
    parent: int
    children: tuple[int, ...]
    depth: int
    prioritydepth: int
    accepting: bool


class ZielonkaTree:
    """An ordered Zielonka tree plus its branch ("leftmost path") structure.

    Branches are maximal root-to-leaf paths, numbered left to right in DFS
    order; branch 0 is the leftmost branch.  ``branch_successor`` implements
    the deterministic update of the branch automaton and returns the new
    branch index together with the emitted priority.
    """

    def __init__(self, nodes: list[ZNode], colours: frozenset):
        self.nodes = nodes
        self.colours = colours
        self.root = 0
        branches: list[tuple[int, ...]] = []
        path: list[int] = []

        def dfs(i: int):
            path.append(i)
            if not nodes[i].children:
                branches.append(tuple(path))
            else:
                for c in nodes[i].children:
                    dfs(c)
            path.pop()

        dfs(0)
        self.branches: tuple[tuple[int, ...], ...] = tuple(branches)
        self.leaf_branch = {b[-1]: i for i, b in enumerate(self.branches)}
        # leftmost branch through each node
        self.leftmost_through = [0] * len(nodes)
        for i in range(len(nodes) - 1, -1, -1):
            node = nodes[i]
            if not node.children:
                self.leftmost_through[i] = self.leaf_branch[i]
            else:
                self.leftmost_through[i] = self.leftmost_through[node.children[0]]
        self._succ_cache: dict[tuple[int, Hashable], tuple[int, int]] = {}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def height(self) -> int:
        """Edge-count depth of the deepest leaf."""
        return max(n.depth for n in self.nodes)

    @property
    def priorities(self) -> tuple[int, int]:
        ds = [n.prioritydepth for n in self.nodes]
        return min(ds), max(ds)

    def branch_successor(self, branch: int, colour: Hashable) -> tuple[int, int]:
        key = (branch, colour)
        hit = self._succ_cache.get(key)
        if hit is not None:
            return hit
        if colour not in self.colours:
            raise PreconditionError(f"colour {colour!r} not in the condition")
        path = self.branches[branch]
        support = None
        for i in reversed(path):
            if colour in self.nodes[i].label:
                support = i
                break
        if support is None:
            raise InternalError("root label must contain every colour")
        if support == path[-1]:
            out = (branch, self.nodes[support].prioritydepth)
        else:
            child = path[path.index(support) + 1]
            siblings = self.nodes[support].children
            nxt = siblings[(siblings.index(child) + 1) % len(siblings)]
            out = (self.leftmost_through[nxt], self.nodes[support].prioritydepth)
        self._succ_cache[key] = out
        return out


def branch_successor(tree: ZielonkaTree, branch: int,
                     colour: Hashable) -> tuple[int, int]:
    return tree.branch_successor(branch, colour)


_TREE_NODE_GUARD = 200_000


def _grow_tree(root_label: frozenset,
               accepting_of: Callable[[frozenset], bool],
               children_of: Callable[[frozenset, bool], list[frozenset]],
               box_of: Callable[[frozenset], tuple] | None,
               colours: frozenset) -> ZielonkaTree:
    nodes: list[ZNode] = []
    root_acc = accepting_of(root_label)

    def build(label: frozenset, parent: int, depth: int) -> int:
        if len(nodes) >= _TREE_NODE_GUARD:
            raise ResourceLimitError("Zielonka tree exceeds the node guard")
        acc = accepting_of(label)
        pd = depth + (0 if root_acc else 1)
        if (pd % 2 == 0) != acc:
            raise InternalError("prioritydepth parity does not match acceptance")
        idx = len(nodes)
        nodes.append(ZNode(label, box_of(label) if box_of else None,
                           parent, (), depth, pd, acc))
        kids = tuple(build(sub, idx, depth + 1)
                     for sub in children_of(label, acc))
        nodes[idx] = ZNode(nodes[idx].label, nodes[idx].box, parent,
                           kids, depth, pd, acc)
        return idx

    build(root_label, -1, 0)
    return ZielonkaTree(nodes, colours)


def build_zielonka_generic(colours: Sequence[Hashable],
                           accepting: Callable[[frozenset], bool],
                           max_colours: int = 12) -> ZielonkaTree:
    """Zielonka tree of an explicit Muller condition.

    Children of a node are its maximal nonempty proper sublabels with flipped
    acceptance, ordered by decreasing size and then ascending lexicographic
    order of the sorted label.
    """
    cl = list(dict.fromkeys(colours))
    if not cl:
        raise PreconditionError("condition needs at least one colour")
    if len(cl) > max_colours:
        raise ResourceLimitError(
            f"condition has {len(cl)} colours, above the guard {max_colours}")

    def sort_key(s: frozenset):
        try:
            body = tuple(sorted(s))
        except TypeError:
            body = tuple(sorted(s, key=repr))
        return (-len(s), body)

    def children_of(label: frozenset, acc: bool) -> list[frozenset]:
        items = list(label)
        flipped: list[frozenset] = []
        subsets = []
        for mask in range(1, 1 << len(items)):
            if mask == (1 << len(items)) - 1:
                continue
            subsets.append(frozenset(items[i] for i in range(len(items))
                                     if mask >> i & 1))
        subsets.sort(key=sort_key)
        for s in subsets:
            if accepting(s) == acc:
                continue
            if any(s <= t for t in flipped):
                continue
            flipped.append(s)
        return flipped

    return _grow_tree(frozenset(cl), accepting, children_of, None, frozenset(cl))


def token_condition_accepting(colour_set: frozenset) -> bool:
    """The k-token winning condition on colour tuples (eve, adam_1..adam_k):
    Eve's minimum is even, or every opponent minimum is odd."""
    mins = [min(vals) for vals in zip(*colour_set)]
    return mins[0] % 2 == 0 or all(m % 2 == 1 for m in mins[1:])


def build_zielonka_token(K: int, k: int) -> ZielonkaTree:
    """Zielonka tree of the k-token condition over priorities [0, K].

    All labels of this condition's Zielonka tree are boxes: products of upward
    intervals, identified by their lower-corner vector (x, y_1..y_k).  The
    box is accepting iff x is even or all y_i are odd.  Children follow the
    maximal-flip rule; for rejecting nodes the child raising x sits leftmost.
    """
    if K < 1:
        raise PreconditionError("token condition needs K >= 1")
    if not (1 <= k <= 3):
        raise PreconditionError("token trees support 1 <= k <= 3 opponents")

    def box_label(box: tuple) -> frozenset:
        x, ys = box[0], box[1:]
        out = []

        def rec(i: int, acc: tuple):
            if i == len(ys):
                out.append(acc)
                return
            for v in range(ys[i], K + 1):
                rec(i + 1, acc + (v,))

        for c in range(x, K + 1):
            rec(0, (c,))
        return frozenset(out)

    def box_accepting(box: tuple) -> bool:
        return box[0] % 2 == 0 or all(y % 2 == 1 for y in box[1:])

    def box_children(box: tuple) -> list[tuple]:
        x, ys = box[0], tuple(box[1:])
        kids: list[tuple] = []
        if box_accepting(box):
            if x % 2 == 0 and any(y % 2 == 0 for y in ys):
                kids.append((x + 1,) + ys)
            else:
                # all y_i odd (x even or odd): flip by making one y_i even
                nx = x + 1 if x % 2 == 0 else x
                for i in range(len(ys)):
                    kids.append((nx,) + ys[:i] + (ys[i] + 1,) + ys[i + 1:])
        else:
            # x odd, some y_i even: raise x (leftmost), or make all y_i odd
            kids.append((x + 1,) + ys)
            kids.append((x,) + tuple(y + 1 if y % 2 == 0 else y for y in ys))
        return [b for b in kids if all(v <= K for v in b)]

    label_to_box: dict[frozenset, tuple] = {}

    def accepting_of(label: frozenset) -> bool:
        return box_accepting(label_to_box[label])

    def children_of(label: frozenset, acc: bool) -> list[frozenset]:
        out = []
        for b in box_children(label_to_box[label]):
            lb = box_label(b)
            label_to_box[lb] = b
            out.append(lb)
        return out

    root = (0,) * (k + 1)
    root_label = box_label(root)
    label_to_box[root_label] = root
    colours = root_label
    tree = _grow_tree(root_label, accepting_of, children_of,
                      lambda lb: label_to_box[lb], colours)
    # gate the structural box rules against the exhaustive builder while the
    # colour space is small enough for it
    if (K, k) in ((1, 1), (1, 2), (2, 1)):
        explicit = build_zielonka_generic(sorted(colours),
                                          token_condition_accepting)
        if tree_canonical(tree) != tree_canonical(explicit):
            raise InternalError("box tree disagrees with the generic builder")
    return tree


def tree_canonical(tree: ZielonkaTree, node: int = 0):
    """Hashable form of a subtree ignoring sibling order: (sorted label,
    prioritydepth, sorted child forms).  Labels must be mutually sortable."""
    n = tree.nodes[node]
    kids = tuple(sorted(tree_canonical(tree, c) for c in n.children))
    return (tuple(sorted(n.label)), n.prioritydepth, kids)


# ---------------------------------------------------------------------------
# Muller games


@dataclass(frozen=True)
class MullerGame:
    owner: tuple[bool, ...]
    edges: tuple[MEdge, ...]
    colours: tuple
    accepting: Callable[[frozenset], bool] = field(hash=False, compare=False)
    labels: tuple = ()
    initial: int | None = None

    def __post_init__(self):
        n = len(self.owner)
        if n == 0:
            raise PreconditionError("game needs at least one vertex")
        has_out = [False] * n
        cset = set(self.colours)
        for pos, e in enumerate(self.edges):
            if e.id != pos:
                raise PreconditionError("edge ids must be dense and in order")
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise PreconditionError(f"edge {pos} references unknown vertex")
            if e.colour not in cset:
                raise PreconditionError(f"edge {pos} uses an undeclared colour")
            has_out[e.src] = True
        if not all(has_out):
            raise PreconditionError("every vertex needs an outgoing edge")

    @property
    def n_vertices(self) -> int:
        return len(self.owner)

    @property
    def out(self) -> list[list[MEdge]]:
        cached = self.__dict__.get("_out")
        if cached is None:
            cached = [[] for _ in range(self.n_vertices)]
            for e in self.edges:
                cached[e.src].append(e)
            self.__dict__["_out"] = cached
        return cached


def muller_to_parity(m: MullerGame, tree: ZielonkaTree | None = None
                     ) -> tuple[ParityGame, list[tuple[int, int]]]:
    """Compose a Muller game with the branch automaton of its Zielonka tree.

    Product vertices are (game vertex, branch); every original vertex is
    seeded with the leftmost branch, so the winner of vertex v can be read
    off the product vertex (v, 0).  Returns the parity game and the list of
    (vertex, branch) payloads indexed by product vertex id.
    """
    if tree is None:
        tree = build_zielonka_generic(m.colours, m.accepting)
    missing = {e.colour for e in m.edges} - tree.colours
    if missing:
        raise PreconditionError(
            f"tree does not cover edge colours {sorted(map(repr, missing))}")
    index: dict[tuple[int, int], int] = {}
    payload: list[tuple[int, int]] = []
    owner: list[bool] = []

    def vid(v: int, b: int) -> int:
        key = (v, b)
        got = index.get(key)
        if got is None:
            got = len(payload)
            index[key] = got
            payload.append(key)
            owner.append(m.owner[v])
        return got

    for v in range(m.n_vertices):
        vid(v, 0)
    quads: list[tuple[int, int, int]] = []
    frontier = list(range(len(payload)))
    while frontier:
        nxt = []
        for pv in frontier:
            v, b = payload[pv]
            for e in m.out[v]:
                nb, pr = tree.branch_successor(b, e.colour)
                before = len(payload)
                tv = vid(e.dst, nb)
                quads.append((pv, pr, tv))
                if tv >= before:
                    nxt.append(tv)
        frontier = nxt
    initial = None if m.initial is None else index[(m.initial, 0)]
    game = make_game(owner, quads, tuple(payload), initial)
    return game, payload


def solve_muller(m: MullerGame, tree: ZielonkaTree | None = None
                 ) -> tuple[frozenset[int], frozenset[int]]:
    """Winning regions of a Muller game, per original vertex."""
    game, payload = muller_to_parity(m, tree)
    regions = solve_parity(game)
    eve = frozenset(v for (v, b), pv in
                    zip(payload, range(len(payload)))
                    if b == 0 and pv in regions.eve)
    adam = frozenset(range(m.n_vertices)) - eve
    return eve, adam
