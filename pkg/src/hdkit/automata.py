"""Nondeterministic parity automata: types, parsing, and basic analyses.

Conventions used throughout the package:

* Acceptance is min-parity on transitions: a run is accepting iff the least
  priority it sees infinitely often is even.
* State and transition ids are dense integers assigned in document order;
  every deterministic tie-break in the package uses these ids.
* Automata are complete by construction: every (state, letter) pair carries
  at least one transition.  Incomplete input documents are rejected unless
  completion with a rejecting sink is requested explicitly.

Two text formats are supported.  The native format is a strict JSON object::

    {"alphabet": ["a", "b"],
     "states": ["q0", "q1"],
     "initial": "q0",
     "index": [0, 3],
     "transitions": [{"from": "q0", "letter": "a", "priority": 0, "to": "q1"},
                     ...]}

Unknown fields are rejected.  The HOA subset uses one atomic proposition per
letter with an exactly-one encoding, quoted state names, transition-based
parity acceptance ("acc-name: parity min even n"), a single initial state,
and an optional tool header ``index: lo hi`` recording the declared priority
range (otherwise the range is inferred).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import ParseError, PreconditionError
from .graphs import reachable, tarjan_scc


class Transition(NamedTuple):
    id: int
    src: int
    letter: int
    priority: int
    dst: int


@dataclass(frozen=True)
class ParityAutomaton:
    letters: tuple[str, ...]
    state_names: tuple[str, ...]
    initial: int
    index_low: int
    index_high: int
    transitions: tuple[Transition, ...]

    def __post_init__(self):
        if not self.letters:
            raise PreconditionError("automaton needs a nonempty alphabet")
        if not self.state_names:
            raise PreconditionError("automaton needs a nonempty state set")
        if len(set(self.letters)) != len(self.letters):
            raise PreconditionError("duplicate letter names")
        if len(set(self.state_names)) != len(self.state_names):
            raise PreconditionError("duplicate state names")
        if not (0 <= self.index_low <= self.index_high):
            raise PreconditionError(
                "priority range must satisfy 0 <= low <= high, got "
                f"[{self.index_low}, {self.index_high}]")
        n, k = len(self.state_names), len(self.letters)
        if not (0 <= self.initial < n):
            raise PreconditionError("initial state out of range")
        seen_rows = set()
        for pos, t in enumerate(self.transitions):
            if t.id != pos:
                raise PreconditionError("transition ids must be dense and in order")
            if not (0 <= t.src < n and 0 <= t.dst < n and 0 <= t.letter < k):
                raise PreconditionError(f"transition {pos} references unknown state or letter")
            if not (self.index_low <= t.priority <= self.index_high):
                raise PreconditionError(
                    f"transition {pos} has priority {t.priority} outside "
                    f"[{self.index_low}, {self.index_high}]")
            seen_rows.add((t.src, t.letter))
        for q in range(n):
            for a in range(k):
                if (q, a) not in seen_rows:
                    raise PreconditionError(
                        f"automaton is incomplete: no transition from "
                        f"'{self.state_names[q]}' on '{self.letters[a]}'")

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_letters(self) -> int:
        return len(self.letters)

    @cached_property
    def rows(self) -> dict[tuple[int, int], tuple[Transition, ...]]:
        by_row: dict[tuple[int, int], list[Transition]] = {}
        for t in self.transitions:
            by_row.setdefault((t.src, t.letter), []).append(t)
        return {k: tuple(v) for k, v in by_row.items()}

    def transitions_from(self, q: int, a: int) -> tuple[Transition, ...]:
        return self.rows[(q, a)]

    def successors(self, q: int, a: int) -> tuple[int, ...]:
        return tuple(t.dst for t in self.rows[(q, a)])

    def state_id(self, name: str) -> int:
        try:
            return self.state_names.index(name)
        except ValueError:
            raise PreconditionError(f"unknown state '{name}'") from None

    def letter_id(self, name: str) -> int:
        try:
            return self.letters.index(name)
        except ValueError:
            raise PreconditionError(f"unknown letter '{name}'") from None

    @cached_property
    def priorities_used(self) -> tuple[int, ...]:
        return tuple(sorted({t.priority for t in self.transitions}))

    def is_deterministic(self) -> bool:
        return all(len(row) == 1 for row in self.rows.values())


def make_automaton(letters: Sequence[str], state_names: Sequence[str],
                   initial: int | str, index: tuple[int, int],
                   triples: Iterable[tuple]) -> ParityAutomaton:
    """Build an automaton from (src, letter, priority, dst) tuples, assigning ids.

    States and letters may be given by name or by position.
    """
    states = list(state_names)
    alpha = list(letters)

    def st(x):
        return states.index(x) if isinstance(x, str) else x

    def lt(x):
        return alpha.index(x) if isinstance(x, str) else x

    ts = tuple(Transition(i, st(s), lt(a), p, st(d))
               for i, (s, a, p, d) in enumerate(triples))
    return ParityAutomaton(tuple(alpha), tuple(states), st(initial),
                           index[0], index[1], ts)


def rebuild(a: ParityAutomaton, triples: Iterable[tuple[int, int, int, int]],
            index: tuple[int, int] | None = None) -> ParityAutomaton:
    """New automaton over the same states/alphabet with replaced transitions."""
    lo, hi = index if index is not None else (a.index_low, a.index_high)
    return make_automaton(a.letters, a.state_names, a.initial, (lo, hi), triples)


# ---------------------------------------------------------------------------
# parsing and serialisation


_NATIVE_KEYS = {"alphabet", "states", "initial", "index", "transitions"}
_TRANS_KEYS = {"from", "letter", "priority", "to"}


def parse_automaton(text: str, format: str = "native",
                    complete_with_sink: bool = False) -> ParityAutomaton:
    if format == "native":
        parts = _parse_native(text)
    elif format == "hoa":
        parts = _parse_hoa(text)
    else:
        raise ParseError(f"unknown format '{format}'")
    letters, names, initial, (lo, hi), triples = parts
    if complete_with_sink:
        letters, names, initial, (lo, hi), triples = _complete(
            letters, names, initial, (lo, hi), triples)
    try:
        return make_automaton(letters, names, initial, (lo, hi), triples)
    except PreconditionError as e:
        raise ParseError(str(e)) from None


def _complete(letters, names, initial, index, triples):
    lo, hi = index
    rows = {(t[0], t[1]) for t in triples}
    missing = [(q, a) for q in range(len(names)) for a in range(len(letters))
               if (q, a) not in rows]
    if not missing:
        return letters, names, initial, index, triples
    # rejecting sink; its priority is the least odd value in the declared
    # range, extending the range by one when it contains no odd value
    odd = next((c for c in range(lo, hi + 1) if c % 2 == 1), None)
    if odd is None:
        odd = hi + 1
        hi = odd
    sink_name = "sink"
    while sink_name in names:
        sink_name += "_"
    names = list(names) + [sink_name]
    sink = len(names) - 1
    triples = list(triples)
    for q, a in missing:
        triples.append((q, a, odd, sink))
    for a in range(len(letters)):
        triples.append((sink, a, odd, sink))
    return letters, names, initial, (lo, hi), triples


def _parse_native(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    unknown = set(doc) - _NATIVE_KEYS
    if unknown:
        raise ParseError(f"unknown fields: {sorted(unknown)}")
    missing = _NATIVE_KEYS - set(doc)
    if missing:
        raise ParseError(f"missing fields: {sorted(missing)}")
    letters = doc["alphabet"]
    names = doc["states"]
    if (not isinstance(letters, list) or not letters
            or not all(isinstance(x, str) for x in letters)):
        raise ParseError("'alphabet' must be a nonempty list of strings")
    if (not isinstance(names, list) or not names
            or not all(isinstance(x, str) for x in names)):
        raise ParseError("'states' must be a nonempty list of strings")
    if len(set(letters)) != len(letters):
        raise ParseError("duplicate letters in alphabet")
    if len(set(names)) != len(names):
        raise ParseError("duplicate state names")
    if doc["initial"] not in names:
        raise ParseError(f"initial state '{doc['initial']}' not in states")
    idx = doc["index"]
    if (not isinstance(idx, list) or len(idx) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in idx)):
        raise ParseError("'index' must be a pair of integers")
    lo, hi = idx
    if not (0 <= lo <= hi):
        raise ParseError(f"invalid priority range [{lo}, {hi}]")
    if not isinstance(doc["transitions"], list):
        raise ParseError("'transitions' must be a list")
    sid = {s: i for i, s in enumerate(names)}
    lid = {a: i for i, a in enumerate(letters)}
    triples = []
    for i, entry in enumerate(doc["transitions"]):
        if not isinstance(entry, dict):
            raise ParseError(f"transition {i} must be an object")
        if set(entry) != _TRANS_KEYS:
            raise ParseError(f"transition {i} must have exactly fields "
                             f"{sorted(_TRANS_KEYS)}")
        if entry["from"] not in sid:
            raise ParseError(f"transition {i}: unknown state '{entry['from']}'")
        if entry["to"] not in sid:
            raise ParseError(f"transition {i}: unknown state '{entry['to']}'")
        if entry["letter"] not in lid:
            raise ParseError(f"transition {i}: unknown letter '{entry['letter']}'")
        p = entry["priority"]
        if not isinstance(p, int) or isinstance(p, bool) or not (lo <= p <= hi):
            raise ParseError(f"transition {i}: priority must be an integer in "
                             f"[{lo}, {hi}]")
        triples.append((sid[entry["from"]], lid[entry["letter"]], p, sid[entry["to"]]))
    return letters, names, names.index(doc["initial"]), (lo, hi), triples


def to_native(a: ParityAutomaton) -> str:
    doc = {
        "alphabet": list(a.letters),
        "states": list(a.state_names),
        "initial": a.state_names[a.initial],
        "index": [a.index_low, a.index_high],
        "transitions": [
            {"from": a.state_names[t.src], "letter": a.letters[t.letter],
             "priority": t.priority, "to": a.state_names[t.dst]}
            for t in a.transitions],
    }
    return json.dumps(doc, indent=2)


def _parity_min_even_formula(n: int) -> str:
    # Inf(0) | (Fin(1) & (Inf(2) | (Fin(3) & ...)))
    if n <= 0:
        return "f"

    def rec(c: int) -> str:
        if c == n - 1:
            return (f"Inf({c})" if c % 2 == 0 else f"Fin({c})")
        if c % 2 == 0:
            return f"Inf({c}) | ({rec(c + 1)})"
        return f"Fin({c}) & ({rec(c + 1)})"

    return rec(0)


def to_hoa(a: ParityAutomaton) -> str:
    n_colours = a.index_high + 1
    lines = [
        "HOA: v1",
        f"States: {a.n_states}",
        f"Start: {a.initial}",
        "AP: {} {}".format(a.n_letters, " ".join(json.dumps(l) for l in a.letters)),
        f"acc-name: parity min even {n_colours}",
        f"Acceptance: {n_colours} {_parity_min_even_formula(n_colours)}",
        f"index: {a.index_low} {a.index_high}",
        "properties: trans-labels explicit-labels trans-acc complete",
        "--BODY--",
    ]
    for q in range(a.n_states):
        lines.append(f"State: {q} {json.dumps(a.state_names[q])}")
        for t in a.transitions:
            if t.src != q:
                continue
            lits = ["{}{}".format("" if j == t.letter else "!", j)
                    for j in range(a.n_letters)]
            lines.append("[{}] {} {{{}}}".format("&".join(lits), t.dst, t.priority))
    lines.append("--END--")
    return "\n".join(lines) + "\n"


class _LabelParser:
    """Boolean formulas over AP indices: !, &, |, parentheses, t, f."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def parse(self):
        expr = self._or()
        self._skip()
        if self.pos != len(self.text):
            raise ParseError(f"trailing characters in label '{self.text}'")
        return expr

    def _or(self):
        terms = [self._and()]
        while True:
            self._skip()
            if self.pos < len(self.text) and self.text[self.pos] == "|":
                self.pos += 1
                terms.append(self._and())
            else:
                return ("or", terms)

    def _and(self):
        terms = [self._atom()]
        while True:
            self._skip()
            if self.pos < len(self.text) and self.text[self.pos] == "&":
                self.pos += 1
                terms.append(self._atom())
            else:
                return ("and", terms)

    def _atom(self):
        self._skip()
        if self.pos >= len(self.text):
            raise ParseError(f"unexpected end of label '{self.text}'")
        c = self.text[self.pos]
        if c == "!":
            self.pos += 1
            return ("not", self._atom())
        if c == "(":
            self.pos += 1
            inner = self._or()
            self._skip()
            if self.pos >= len(self.text) or self.text[self.pos] != ")":
                raise ParseError(f"unbalanced parentheses in label '{self.text}'")
            self.pos += 1
            return inner
        if c == "t":
            self.pos += 1
            return ("true",)
        if c == "f":
            self.pos += 1
            return ("false",)
        if c.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return ("ap", int(self.text[start:self.pos]))
        raise ParseError(f"unexpected character '{c}' in label '{self.text}'")


def _eval_label(expr, true_ap: int) -> bool:
    tag = expr[0]
    if tag == "or":
        return any(_eval_label(e, true_ap) for e in expr[1])
    if tag == "and":
        return all(_eval_label(e, true_ap) for e in expr[1])
    if tag == "not":
        return not _eval_label(expr[1], true_ap)
    if tag == "true":
        return True
    if tag == "false":
        return False
    return expr[1] == true_ap


def _parse_hoa(text: str):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("/*")]
    if not lines or not lines[0].startswith("HOA:"):
        raise ParseError("missing HOA: header")
    try:
        body_at = lines.index("--BODY--")
    except ValueError:
        raise ParseError("missing --BODY-- marker") from None
    headers, body = lines[1:body_at], lines[body_at + 1:]
    if not body or body[-1] != "--END--":
        raise ParseError("missing --END-- marker")
    body = body[:-1]

    n_states = start = n_colours = None
    letters: list[str] | None = None
    declared_index = None
    for ln in headers:
        if ":" not in ln:
            raise ParseError(f"malformed header line '{ln}'")
        key, _, rest = ln.partition(":")
        rest = rest.strip()
        if key == "States":
            n_states = int(rest)
        elif key == "Start":
            if not rest.isdigit():
                raise ParseError("only a single initial state is supported")
            start = int(rest)
        elif key == "AP":
            parts = rest.split(None, 1)
            count = int(parts[0])
            names = json.loads("[" + (parts[1] if len(parts) > 1 else "")
                               .replace('" "', '", "') + "]") if count else []
            if len(names) != count:
                raise ParseError("AP count does not match names")
            letters = names
        elif key == "acc-name":
            parts = rest.split()
            if parts[:3] != ["parity", "min", "even"]:
                raise ParseError("only 'parity min even' acceptance is supported")
            n_colours = int(parts[3])
        elif key == "Acceptance":
            if n_colours is None:
                n_colours = int(rest.split()[0])
        elif key == "index":
            lo, hi = (int(x) for x in rest.split())
            declared_index = (lo, hi)
        # other headers (name:, properties:, tool:) are ignored
    if n_states is None or start is None or letters is None or n_colours is None:
        raise ParseError("HOA document lacks States:, Start:, AP: or acceptance")
    if not letters:
        raise ParseError("HOA subset requires at least one atomic proposition")

    names = [str(q) for q in range(n_states)]
    triples: list[tuple[int, int, int, int]] = []
    current = None
    for ln in body:
        if ln.startswith("State:"):
            rest = ln[len("State:"):].strip()
            parts = rest.split(None, 1)
            current = int(parts[0])
            if len(parts) > 1 and parts[1].startswith('"'):
                names[current] = json.loads(parts[1])
            continue
        if current is None:
            raise ParseError("transition line before any State: line")
        if not ln.startswith("["):
            raise ParseError(f"expected a labelled transition, got '{ln}'")
        close = ln.index("]")
        label = _LabelParser(ln[1:close]).parse()
        rest = ln[close + 1:].strip()
        if "{" not in rest:
            raise ParseError("HOA subset requires an acceptance set on each transition")
        dst_str, _, acc = rest.partition("{")
        dst = int(dst_str.strip())
        acc = acc.rstrip("}").strip()
        if not acc.isdigit():
            raise ParseError("exactly one acceptance set per transition is supported")
        priority = int(acc)
        for j in range(len(letters)):
            if _eval_label(label, j):
                triples.append((current, j, priority, dst))
    if len(set(names)) != len(names):
        names = [f"{nm}#{q}" if names.count(nm) > 1 else nm
                 for q, nm in enumerate(names)]
    if declared_index is not None:
        lo, hi = declared_index
    else:
        if not triples:
            raise ParseError("HOA document has no transitions")
        lo, hi = min(t[2] for t in triples), n_colours - 1
    return letters, names, start, (lo, hi), triples


# ---------------------------------------------------------------------------
# lassos


@dataclass(frozen=True)
class Lasso:
    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        if not self.cycle:
            raise PreconditionError("lasso cycle must be nonempty")


def parse_lasso(text: str, a: ParityAutomaton) -> Lasso:
    """Lasso text is ``u;v``: two space-separated letter sequences."""
    if text.count(";") != 1:
        raise ParseError("lasso must contain exactly one ';'")
    u_txt, v_txt = text.split(";")
    try:
        u = tuple(a.letter_id(x) for x in u_txt.split())
        v = tuple(a.letter_id(x) for x in v_txt.split())
    except PreconditionError as e:
        raise ParseError(str(e)) from None
    if not v:
        raise ParseError("lasso cycle must be nonempty")
    return Lasso(u, v)


def format_lasso(w: Lasso, a: ParityAutomaton) -> str:
    u = " ".join(a.letters[x] for x in w.prefix)
    v = " ".join(a.letters[x] for x in w.cycle)
    return f"{u};{v}"


def iter_lassos(n_letters: int, max_prefix: int, max_cycle: int) -> Iterator[Lasso]:
    """All lassos with |prefix| <= max_prefix and 1 <= |cycle| <= max_cycle."""
    def words(length: int):
        if length == 0:
            yield ()
            return
        for w in words(length - 1):
            for x in range(n_letters):
                yield w + (x,)

    for pl in range(max_prefix + 1):
        for u in words(pl):
            for cl in range(1, max_cycle + 1):
                for v in words(cl):
                    yield Lasso(u, v)


def lasso_member(a: ParityAutomaton, w: Lasso, start: int | None = None) -> bool:
    """Does the ultimately periodic word of ``w`` have an accepting run?"""
    if start is None:
        start = a.initial
    word = w.prefix + w.cycle
    total = len(word)
    loop_to = len(w.prefix)

    def vid(q: int, pos: int) -> int:
        return q * total + pos

    # reachable part of the (state, position) product
    edges: dict[int, list[tuple[int, int]]] = {}

    def succ(v: int):
        q, pos = divmod(v, total)
        nxt = pos + 1 if pos + 1 < total else loop_to
        out = []
        for t in a.rows[(q, word[pos])]:
            out.append(vid(t.dst, nxt))
            edges.setdefault(v, []).append((vid(t.dst, nxt), t.priority))
        return out

    seen = reachable(a.n_states * total, [vid(start, 0)], succ)
    all_edges = [(u, v, p) for u, outs in edges.items() for (v, p) in outs]

    for c in range(a.index_low + (a.index_low % 2), a.index_high + 1, 2):
        sub = [(u, v, p) for (u, v, p) in all_edges if p >= c]
        if not sub:
            continue
        verts = sorted({u for u, _, _ in sub} | {v for _, v, _ in sub})
        vmap = {v: i for i, v in enumerate(verts)}
        adj: list[list[int]] = [[] for _ in verts]
        for u, v, _ in sub:
            adj[vmap[u]].append(vmap[v])
        comp_of = {}
        for ci, comp in enumerate(tarjan_scc(len(verts), lambda i: adj[i])):
            for i in comp:
                comp_of[i] = ci
        for u, v, p in sub:
            if p == c and comp_of[vmap[u]] == comp_of[vmap[v]] and u in seen:
                return True
    return False


# ---------------------------------------------------------------------------
# structural analyses


def trim(a: ParityAutomaton) -> tuple[ParityAutomaton, dict[int, int]]:
    """Restrict to states reachable from the initial state.

    Returns the trimmed automaton and the old-id -> new-id state map.
    """
    def succ(q: int):
        return [t.dst for x in range(a.n_letters) for t in a.rows[(q, x)]]

    keep = sorted(reachable(a.n_states, [a.initial], succ))
    smap = {old: new for new, old in enumerate(keep)}
    names = [a.state_names[old] for old in keep]
    triples = [(smap[t.src], t.letter, t.priority, smap[t.dst])
               for t in a.transitions if t.src in smap]
    return (make_automaton(a.letters, names, smap[a.initial],
                           (a.index_low, a.index_high), triples), smap)


def scc_above(a: ParityAutomaton, threshold: int) -> tuple[frozenset[int], ...]:
    """SCCs of the subgraph of transitions with priority >= threshold.

    Each component is reported as its set of transition ids; components
    without any transition (single states with no qualifying self-loop) are
    omitted.  A transition is in some returned component exactly when it lies
    on a cycle of the subgraph.
    """
    adj: list[list[int]] = [[] for _ in range(a.n_states)]
    for t in a.transitions:
        if t.priority >= threshold:
            adj[t.src].append(t.dst)
    comp_of = {}
    for ci, comp in enumerate(tarjan_scc(a.n_states, lambda q: adj[q])):
        for q in comp:
            comp_of[q] = ci
    groups: dict[int, list[int]] = {}
    for t in a.transitions:
        if t.priority >= threshold and comp_of[t.src] == comp_of[t.dst]:
            groups.setdefault(comp_of[t.src], []).append(t.id)
    return tuple(frozenset(g) for g in
                 sorted(groups.values(), key=min))


@dataclass(frozen=True)
class CoreachabilityRelation:
    """Coreachable pairs and weak (transitive-closure) classes.

    ``pairs`` is the set of state pairs reachable on a common word from the
    initial state; it is symmetric and covers exactly the reachable states on
    the diagonal.  ``classes`` partition all states; states unreachable from
    the initial state sit in singleton classes.
    """
    pairs: frozenset[tuple[int, int]]
    classes: tuple[frozenset[int], ...]
    class_index: dict[int, int] = field(hash=False, compare=False)

    def coreachable(self, p: int, q: int) -> bool:
        return (p, q) in self.pairs

    def weakly_coreachable(self, p: int, q: int) -> bool:
        return self.class_index[p] == self.class_index[q]

    def class_of(self, q: int) -> frozenset[int]:
        return self.classes[self.class_index[q]]


def coreachability(a: ParityAutomaton) -> CoreachabilityRelation:
    start = (a.initial, a.initial)
    seen = {start}
    todo = [start]
    while todo:
        p, q = todo.pop()
        for x in range(a.n_letters):
            for tp in a.rows[(p, x)]:
                for tq in a.rows[(q, x)]:
                    np = (tp.dst, tq.dst)
                    if np not in seen:
                        seen.add(np)
                        todo.append(np)
    # weak coreachability: union-find closure of the pair relation,
    # restricted to reachable states (every reachable q has (q, q) in the
    # relation; unreachable states have no pairs and belong to no class)
    parent = list(range(a.n_states))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in seen:
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[max(rp, rq)] = min(rp, rq)
    groups: dict[int, list[int]] = {}
    for q in {s for pr in seen for s in pr}:
        groups.setdefault(find(q), []).append(q)
    classes = tuple(frozenset(g) for g in
                    sorted(groups.values(), key=min))
    cidx = {}
    for i, cls in enumerate(classes):
        for q in cls:
            cidx[q] = i
    return CoreachabilityRelation(frozenset(seen), classes, cidx)


def approximate(a: ParityAutomaton, kind: str) -> ParityAutomaton:
    """Safety/positive approximations of a parity automaton.

    * ``safe``: requires index low >= 1.  Priorities >= 2 become 2,
      1-transitions are redirected to a fresh rejecting sink (priority 1,
      sink self-loops 1).  Result range [1, 2].
    * ``above1``: requires index low >= 1.  Priorities >= 2 are kept,
      1-transitions are redirected to a fresh rejecting sink with priority 3
      (sink self-loops 3).  Result range [2, max(high, 3)].
    * ``above0``: requires index low == 0.  Priorities >= 1 are kept,
      0-transitions are redirected to a fresh accepting sink with priority 2
      (sink self-loops 2).  Result range [1, max(high, 2)].

    Transition ids of ``a`` are preserved (redirected transitions keep their
    id); the sink's self-loops are appended after them.
    """
    if kind in ("safe", "above1"):
        if a.index_low < 1:
            raise PreconditionError(f"'{kind}' approximation needs index low >= 1")
        redirect = 1
        if kind == "safe":
            keep_priority = lambda p: 2
            sink_priority = 1
            index = (1, 2)
        else:
            keep_priority = lambda p: p
            sink_priority = 3
            index = (2, max(a.index_high, 3))
    elif kind == "above0":
        if a.index_low != 0:
            raise PreconditionError("'above0' approximation needs index low == 0")
        redirect = 0
        keep_priority = lambda p: p
        sink_priority = 2
        index = (1, max(a.index_high, 2))
    else:
        raise PreconditionError(f"unknown approximation kind '{kind}'")

    sink_name = "sink"
    while sink_name in a.state_names:
        sink_name += "_"
    names = list(a.state_names) + [sink_name]
    sink = len(names) - 1
    triples = []
    for t in a.transitions:
        if t.priority == redirect:
            triples.append((t.src, t.letter, sink_priority, sink))
        else:
            triples.append((t.src, t.letter, keep_priority(t.priority), t.dst))
    for x in range(a.n_letters):
        triples.append((sink, x, sink_priority, sink))
    return make_automaton(a.letters, names, a.initial, index, triples)


def sink_state_of_approximation(a: ParityAutomaton, approx: ParityAutomaton) -> int:
    """The fresh sink appended by :func:`approximate`."""
    if approx.n_states != a.n_states + 1:
        raise PreconditionError("not an approximation of the given automaton")
    return approx.n_states - 1


def is_safety(a: ParityAutomaton) -> bool:
    """Safety shape: a [1, 2] automaton where every 1-transition enters a
    rejecting sink (all of whose own transitions are priority-1 self-loops)
    and all transitions between other states have priority 2."""
    if any(p not in (1, 2) for p in a.priorities_used):
        return False
    sinks = {t.dst for t in a.transitions if t.priority == 1}
    for s in sinks:
        for t in a.transitions:
            if t.src == s and not (t.priority == 1 and t.dst == s):
                return False
    # non-sink-bound 1-transitions would change acceptance
    for t in a.transitions:
        if t.priority == 1 and t.dst not in sinks:
            return False
    return len(sinks) <= 1


def is_reachability(a: ParityAutomaton) -> bool:
    """Reachability shape: a [1, 2] automaton with one accepting sink (all of
    whose transitions are priority-2 self-loops), where every 2-transition
    enters the sink and everything else has priority 1."""
    if any(p not in (1, 2) for p in a.priorities_used):
        return False
    sinks = {t.dst for t in a.transitions if t.priority == 2}
    for s in sinks:
        for t in a.transitions:
            if t.src == s and not (t.priority == 2 and t.dst == s):
                return False
    for t in a.transitions:
        if t.priority == 2 and t.dst not in sinks:
            return False
    return len(sinks) <= 1
