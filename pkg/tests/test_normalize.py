import pytest

from hdkit.automata import make_automaton, scc_above, trim
from hdkit.errors import PreconditionError
from hdkit.normalize import (NormalisationReport, cobuchi_normalise,
                             coverage, normalise_0K, rank_reduce_buchi,
                             two_priority_reduce)
from hdkit.token_games import simulates, state_rank_info, wins_everywhere
from helpers import assert_language_equal, gen, gen_deterministic


def bridge_cobuchi():
    rows = [("s0", "a", 2, "s1"), ("s0", "b", 2, "s0"),
            ("s1", "a", 2, "s1"), ("s1", "b", 1, "s1")]
    return make_automaton("ab", ["s0", "s1"], "s0", (1, 2), rows)


def hill():
    # a 2-cycle carrying {3, 4}; no run ever sees an even minimum
    rows = [("s0", "a", 3, "s1"), ("s1", "a", 4, "s0")]
    return make_automaton("a", ["s0", "s1"], "s0", (1, 4), rows)


def test_cobuchi_normalise_fixes_transient_accepting_edges(a1):
    out = cobuchi_normalise(bridge_cobuchi())
    got = {(out.state_names[t.src], out.letters[t.letter], t.priority,
            out.state_names[t.dst]) for t in out.transitions}
    assert got == {("s0", "a", 1, "s1"), ("s0", "b", 2, "s0"),
                   ("s1", "a", 2, "s1"), ("s1", "b", 1, "s1")}
    assert {t.priority for t in cobuchi_normalise(a1).transitions} == \
        {t.priority for t in a1.transitions}


def test_cobuchi_normalise_properties():
    for seed in range(15):
        a = gen(seed, 3, 2, 1, 2)
        out = cobuchi_normalise(a)
        assert_language_equal(a, out, bound=3)
        again = cobuchi_normalise(out)
        assert [t.priority for t in again.transitions] == \
            [t.priority for t in out.transitions]


def test_cobuchi_normalise_shape_precondition(a2):
    with pytest.raises(PreconditionError):
        cobuchi_normalise(a2)
    with pytest.raises(PreconditionError):
        cobuchi_normalise(gen(0, 3, 2, 0, 1))


def test_two_priority_reduce_flattens_odd_hill():
    out = two_priority_reduce(hill())
    assert {t.priority for t in out.transitions} == {1}
    assert_language_equal(hill(), out, bound=3)


def test_two_priority_reduce_properties():
    for seed in range(12):
        a = gen(seed, 3, 2, 1, 4 if seed % 2 else 3)
        out = two_priority_reduce(a)
        groups = scc_above(out, 2)
        pri = {t.id: t.priority for t in out.transitions}
        assert {t.id for t in out.transitions if t.priority >= 2} == \
            {i for grp in groups for i in grp}
        assert all(min(pri[i] for i in grp) == 2 for grp in groups)
        assert_language_equal(a, out, bound=3)
        again = two_priority_reduce(out)
        assert [t.priority for t in again.transitions] == \
            [t.priority for t in out.transitions]


def test_two_priority_reduce_needs_low_one():
    with pytest.raises(PreconditionError):
        two_priority_reduce(gen(0, 3, 2, 0, 2))


def test_rank_reduction_on_deterministic_buchi():
    for seed in range(8):
        a = gen_deterministic(seed, 3, 2, 0, 1)
        rep = rank_reduce_buchi(a)
        assert isinstance(rep, NormalisationReport)
        assert rep.invariants_checked == {"I1": True, "I2": True}
        assert rep.iterations == len(rep.steps)
        assert coverage(rep.output, "reach")[0]
        assert_language_equal(a, rep.output, bound=3)


def test_rank_reduction_postconditions():
    done = 0
    for seed in range(40):
        a = gen(seed, 3, 2, 0, 1)
        t, _ = trim(a)
        if not wins_everywhere(t, 1):
            continue
        rep = rank_reduce_buchi(a)
        out = rep.output
        assert simulates(out, t) and simulates(t, out)
        assert coverage(out, "reach")[0]
        assert all(s[0] == "rank-reduction" for s in rep.steps)
        fixpoint = rank_reduce_buchi(out)
        assert fixpoint.iterations == 0
        done += 1
        if done >= 8:
            break
    assert done >= 8


def test_rank_reduction_preconditions(a1):
    with pytest.raises(PreconditionError):
        rank_reduce_buchi(a1)
    for seed in range(40):
        a = gen(seed, 3, 2, 0, 1)
        t, _ = trim(a)
        if not wins_everywhere(t, 1):
            with pytest.raises(PreconditionError):
                rank_reduce_buchi(a)
            return
    raise AssertionError("no counterexample instance found")


def test_rank_reduction_drops_unreachable_states():
    a = make_automaton(
        "a", ["s", "island"], "s", (0, 1),
        [("s", "a", 0, "s"), ("island", "a", 1, "island")])
    rep = rank_reduce_buchi(a)
    assert rep.output.n_states == 1


def test_normalise_trivial_fixpoint(a3):
    rep = normalise_0K(a3)
    assert rep.iterations == 0 and rep.steps == ()
    assert rep.output.n_states == 1


def test_normalise_postconditions():
    done = 0
    for seed in range(60):
        a = gen(seed, 3, 2, 0, 3 if seed % 2 else 2)
        t, _ = trim(a)
        if not wins_everywhere(t, 2):
            continue
        rep = normalise_0K(a)
        out = rep.output
        info = state_rank_info(out)
        assert set(info.opt.values()) <= {0}
        assert all(info.right.values())
        assert coverage(out, "zero_reach")[0]
        assert simulates(out, t) and simulates(t, out)
        assert_language_equal(t, out, bound=3)
        assert {s[0] for s in rep.steps} <= {
            "rank-reduction", "branch-separation", "priority-modification"}
        done += 1
        if done >= 8:
            break
    assert done >= 8


def test_normalise_preconditions(a1):
    with pytest.raises(PreconditionError):
        normalise_0K(a1)
    for seed in range(40):
        a = gen(seed, 3, 2, 0, 2)
        t, _ = trim(a)
        if not wins_everywhere(t, 2):
            with pytest.raises(PreconditionError):
                normalise_0K(a)
            return
    raise AssertionError("no counterexample instance found")


def test_coverage_on_deterministic_automata():
    det = gen_deterministic(3, 3, 2, 1, 2)
    holds, witnesses = coverage(det, "safe")
    assert holds
    assert all(w == (q, q) for q, w in witnesses.items())
    det0 = gen_deterministic(4, 3, 2, 0, 1)
    for kind in ("reach", "zero_reach"):
        holds, witnesses = coverage(det0, kind)
        assert holds
        assert all(w == (q, q) for q, w in witnesses.items())


def test_coverage_validates_inputs(a1):
    with pytest.raises(PreconditionError):
        coverage(a1, "sideways")
    with pytest.raises(PreconditionError):
        coverage(a1, "reach")


def test_coverage_reports_gaps():
    # g must commit to one a-successor before Adam does, and each successor
    # survives a different future, so g has no witness in its own class
    rows = [("g", "a", 2, "pa"), ("g", "a", 2, "pb"), ("g", "b", 2, "g"),
            ("pa", "a", 2, "pa"), ("pa", "b", 1, "dead"),
            ("pb", "b", 2, "pb"), ("pb", "a", 1, "dead"),
            ("dead", "a", 1, "dead"), ("dead", "b", 1, "dead")]
    a = make_automaton("ab", ["g", "pa", "pb", "dead"], "g", (1, 2), rows)
    holds, witnesses = coverage(a, "safe")
    assert not holds
    g = a.state_names.index("g")
    assert witnesses[g] == (None, None)
    pa = a.state_names.index("pa")
    assert witnesses[pa][0] is not None
