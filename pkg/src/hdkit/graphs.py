"""Small graph utilities used across the package.

Everything here works on graphs given as a vertex count plus an adjacency
callable, so automata, games and products can share the same routines without
converting representations.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable


def reachable(n: int, starts: Iterable[int], succ: Callable[[int], Iterable[int]]) -> set[int]:
    """Vertices reachable from ``starts`` (which are themselves included)."""
    seen = set()
    todo = deque()
    for s in starts:
        if s not in seen:
            seen.add(s)
            todo.append(s)
    while todo:
        v = todo.popleft()
        for w in succ(v):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def tarjan_scc(n: int, succ: Callable[[int], Iterable[int]]) -> list[list[int]]:
    """Strongly connected components of the graph on vertices 0..n-1.

    Iterative Tarjan; components are returned in reverse topological order
    (every edge leaving a component points to an earlier entry of the result).
    """
    index = [0] * n
    low = [0] * n
    state = [0] * n  # 0 unvisited, 1 on stack, 2 done
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 1

    for root in range(n):
        if state[root] != 0:
            continue
        # explicit DFS stack of (vertex, iterator over successors)
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        state[root] = 1
        stack.append(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if state[w] == 0:
                    index[w] = low[w] = counter
                    counter += 1
                    state[w] = 1
                    stack.append(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                elif state[w] == 1:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    state[w] = 2
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps
