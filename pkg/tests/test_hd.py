import pytest

from hdkit.automata import iter_lassos, lasso_member, make_automaton, trim
from hdkit.errors import PreconditionError
from hdkit.hd import (decide_hd, decide_hd_safety_reach, dominant_choices,
                      ge_realisable, is_semantically_deterministic,
                      prune_everywhere, verdict_json, wins_g1_pairs)
from hdkit.oracle import decide_hd_reference, lasso_difference
from hdkit.token_games import simulates, wins_everywhere
from helpers import (ORACLE_GUARD, gen, gen_deterministic, ge_game_oracle,
                     reach_guess, safety_prunable)

SPLIT4 = {"a": ("0", "0"), "b": ("0", "1"), "c": ("1", "0"), "d": ("1", "1")}


def input_tracker():
    """Deterministic spec whose acceptance ignores outputs entirely."""
    rows = []
    for src in ("s0", "s1"):
        for x, (i, _) in SPLIT4.items():
            dst = "s0" if i == "0" else "s1"
            rows.append((src, x, 0 if i == "0" else 1, dst))
    return make_automaton(sorted(SPLIT4), ["s0", "s1"], "s0", (0, 1), rows)


def output_predicts_input():
    """Deterministic spec accepting iff each output equals the next input."""
    rows = []
    for x, (i, o) in SPLIT4.items():
        rows.append(("st", x, 2, "s" + o))
        rows.append(("rej", x, 1, "rej"))
        for prev in ("0", "1"):
            dst = "s" + o if i == prev else "rej"
            rows.append(("s" + prev, x, 2 if i == prev else 1, dst))
    return make_automaton(sorted(SPLIT4), ["st", "s0", "s1", "rej"], "st",
                          (1, 2), rows)


def split_successors():
    """One nondeterministic split into two non-equivalent languages."""
    rows = [("q0", "a", 1, "pa"), ("q0", "a", 1, "pb"), ("q0", "b", 1, "dead"),
            ("pa", "a", 2, "pa"), ("pa", "b", 1, "dead"),
            ("pb", "b", 2, "pb"), ("pb", "a", 1, "dead"),
            ("dead", "a", 1, "dead"), ("dead", "b", 1, "dead")]
    return make_automaton("ab", ["q0", "pa", "pb", "dead"], "q0", (1, 2), rows)


def test_fixture_verdicts(a1, a2, a3):
    for a, expect in ((a1, True), (a2, False), (a3, True)):
        v = decide_hd(a)
        assert v.is_hd == expect
        assert v.method == "two_token"
        assert v.certificate is not None


def test_verdict_json_shape(a1):
    doc = verdict_json(decide_hd(a1), a1)
    assert doc == {"verdict": "hd", "method": "two_token",
                   "states": 3, "transitions": 12}


def test_agrees_with_reference_decider():
    for seed in range(25):
        a = gen(seed, 3, 2, 0, 2)
        assert (decide_hd(a).is_hd
                == decide_hd_reference(a, guard=ORACLE_GUARD).is_hd), seed


def test_prune_identity_on_singleton(a3):
    pruned = prune_everywhere(a3)
    assert pruned.n_states == 1
    assert len(pruned.transitions) == 1


def test_prune_drops_losing_branch():
    pruned = prune_everywhere(safety_prunable())
    assert set(pruned.state_names) == {"q0", "good"}
    assert wins_everywhere(pruned, 2)


def test_prune_postconditions(a1):
    cases = [a1] + [g for g in (gen(s, 3, 2, 0, 3) for s in range(14))
                    if decide_hd(g).is_hd][:6]
    assert len(cases) >= 4
    for a in cases:
        b = prune_everywhere(a)
        names = {(a.state_names[t.src], t.letter, t.priority,
                  a.state_names[t.dst]) for t in a.transitions}
        for t in b.transitions:
            key = (b.state_names[t.src], t.letter, t.priority,
                   b.state_names[t.dst])
            assert key in names
        trimmed, _ = trim(b)
        assert trimmed.n_states == b.n_states
        for q in range(b.n_states):
            for x in range(b.n_letters):
                assert b.rows[(q, x)], (q, x)
        assert simulates(b, a) and simulates(a, b)
        assert wins_everywhere(b, 2)


def test_prune_needs_winning_start(a2):
    with pytest.raises(PreconditionError):
        prune_everywhere(a2)


def test_dominant_choice_picks_sound_target():
    a = safety_prunable()
    chosen = dominant_choices(a, wins_g1_pairs(a))
    q0, good = a.state_names.index("q0"), a.state_names.index("good")
    assert chosen[(q0, a.letter_id("a"))].dst == good
    assert chosen[(q0, a.letter_id("b"))].dst == q0


def test_safety_prune_builds_deterministic_witness():
    verdict, det = decide_hd_safety_reach(safety_prunable())
    assert verdict.is_hd and verdict.method == "one_token_safety_reach"
    assert det is not None and det.is_deterministic()
    assert set(det.state_names) == {"q0", "good"}
    assert lasso_difference(safety_prunable(), det) is None


def test_reachability_guessing_is_rejected():
    verdict, det = decide_hd_safety_reach(reach_guess())
    assert not verdict.is_hd
    assert det is None


def test_safety_reach_shape_precondition(a1):
    with pytest.raises(PreconditionError):
        decide_hd_safety_reach(a1)


def test_semantic_determinism_answers(a2, a3):
    assert is_semantically_deterministic(a3) is True
    det = gen_deterministic(7, 3, 2, 0, 2)
    assert is_semantically_deterministic(det) is True
    assert is_semantically_deterministic(split_successors()) is False
    assert is_semantically_deterministic(a2) is not False


def test_one_token_wins_compose(a1, a2):
    for a in (a1, a2, gen(3, 3, 2, 0, 2), gen(11, 4, 2, 0, 2)):
        w = wins_g1_pairs(a)
        assert all((q, q) in w for q, _ in w)
        for q, p in w:
            for p2, r in w:
                if p2 == p:
                    assert (q, r) in w, (q, p, r)


def test_ge_output_free_spec_is_realisable():
    assert ge_realisable(input_tracker(), SPLIT4) is True
    assert ge_game_oracle(input_tracker(), SPLIT4) is True


def test_ge_prediction_spec_is_not_realisable():
    assert ge_realisable(output_predicts_input(), SPLIT4) is False
    assert ge_game_oracle(output_predicts_input(), SPLIT4) is False


def test_ge_agrees_with_game_oracle_on_random_specs():
    for seed in range(10):
        d = gen_deterministic(seed, 3, 4, 0, 2)
        assert ge_realisable(d, SPLIT4) == ge_game_oracle(d, SPLIT4), seed


def test_ge_input_validation(a2):
    with pytest.raises(PreconditionError):
        ge_realisable(gen(0, 3, 4, 0, 2), SPLIT4)   # nondeterministic
    d = input_tracker()
    with pytest.raises(PreconditionError):
        ge_realisable(d, {"a": ("0", "0")})
    bad = dict(SPLIT4, d=("1", "0"))                # not a full product
    with pytest.raises(PreconditionError):
        ge_realisable(d, bad)


def test_language_facts_behind_fixture_verdicts(a1, a2):
    # a1 accepts a lasso iff its cycle avoids b or avoids c
    b_id, c_id = a1.letter_id("b"), a1.letter_id("c")
    for w in iter_lassos(3, 2, 2):
        cyc = set(w.cycle)
        assert lasso_member(a1, w) == (not {b_id, c_id} <= cyc), w
    # a2 accepts everything
    for w in iter_lassos(2, 3, 3):
        assert lasso_member(a2, w), w
