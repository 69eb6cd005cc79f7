import pytest

from hdkit.automata import (coreachability, iter_lassos, lasso_member,
                            make_automaton, trim)
from hdkit.errors import PreconditionError
from hdkit.games import solve_parity
from hdkit.hd import wins_g1_pairs
from hdkit.token_games import (TokenConfig, build_g1_buchi, build_g2_product,
                               build_simulation, build_token_product,
                               simulates, state_rank_info, wins_everywhere,
                               wins_gk)
from helpers import (build_a1, build_a2, build_a3, gen, g2_triples, rooted,
                     token_implication_violations)


def test_fixed_verdicts(a1, a2, a3):
    assert wins_gk(a3, TokenConfig(0, (0,))).eve_wins
    assert wins_gk(a3, TokenConfig(0, (0, 0))).eve_wins
    assert wins_gk(a1, TokenConfig(0, (0, 0))).eve_wins
    res = wins_gk(a2, TokenConfig(0, (0, 0)))
    assert res.winner == "Adam" and not res.eve_wins
    assert wins_gk(a2, TokenConfig(0, (0,))).eve_wins


def test_result_carries_solved_product(a2):
    res = wins_gk(a2, TokenConfig(0, (0, 0)))
    assert res.payload[res.initial] == ("pos", 0, (0, 0), 0)
    regions = solve_parity(res.product_game)
    assert (res.initial in regions.eve) == res.eve_wins


def test_wins_everywhere_fixed(a1, a2, a3):
    assert wins_everywhere(a3, 1) and wins_everywhere(a3, 2)
    assert wins_everywhere(a1, 2)
    assert wins_everywhere(a2, 1)
    assert not wins_everywhere(a2, 2)


def test_two_tokens_decide_three():
    # one extra opposing token never changes the verdict
    for seed in range(20):
        a = gen(seed, 3, 2, 0, 2)
        two = wins_gk(a, TokenConfig(a.initial, (a.initial,) * 2)).eve_wins
        three = wins_gk(a, TokenConfig(a.initial, (a.initial,) * 3)).eve_wins
        assert two == three, seed
    for seed in range(8):
        a = gen(seed, 3, 2, 1, 3)
        two = wins_gk(a, TokenConfig(a.initial, (a.initial,) * 2)).eve_wins
        three = wins_gk(a, TokenConfig(a.initial, (a.initial,) * 3)).eve_wins
        assert two == three, seed


def test_token_winning_set_implications():
    for seed in range(12):
        a = gen(seed, 3, 2, 0, 2)
        assert token_implication_violations(a) == [], seed
    assert token_implication_violations(build_a1()) == []
    assert token_implication_violations(build_a2()) == []


def test_simulation_is_reflexive_and_bounds_language():
    for seed in range(10):
        a = gen(seed, 3, 2, 0, 2)
        assert simulates(a, a)
        b = gen(seed + 1000, 3, 2, 0, 2)
        if simulates(a, b):
            for w in iter_lassos(2, 3, 3):
                assert lasso_member(a, w) or not lasso_member(b, w), (seed, w)


def test_simulation_direction_is_meaningful():
    # the everything-automaton simulates the nothing-automaton, not back
    top = make_automaton("a", ["t"], "t", (0, 0), [("t", "a", 0, "t")])
    bot = make_automaton("a", ["b"], "b", (1, 1), [("b", "a", 1, "b")])
    assert simulates(top, bot)
    assert not simulates(bot, top)


def test_pair_game_on_buchi_matches_generic_product():
    for seed in range(25):
        a = gen(seed, 3, 2, 0, 1)
        game = build_g1_buchi(a)
        regions = solve_parity(game)
        won = {(q, p) for i, key in enumerate(game.labels)
               if key[0] == "pos" and i in regions.eve
               for q, p in [key[1:]]}
        assert won == set(wins_g1_pairs(a)), seed


def test_pair_game_needs_buchi_index():
    with pytest.raises(PreconditionError):
        build_g1_buchi(build_a2())


def test_g2_product_covers_coreachable_triples(a1):
    a = gen(2, 3, 2, 0, 2)
    prod = build_g2_product(a)
    cr = coreachability(a)
    assert any(len(cls) > 1 for cls in cr.classes)
    for cls in cr.classes:
        for q in cls:
            for p in cls:
                for r in cls:
                    assert ("pos", q, (p, r), 0) in prod.index
    with pytest.raises(PreconditionError):
        build_g2_product(a1)


def test_state_rank_info_trivial(a3):
    info = state_rank_info(a3)
    assert info.opt == {0: 0}
    assert info.right == {0: True}
    assert 0 in info.witness


def test_state_rank_info_preconditions():
    padded = make_automaton(
        "a", ["s", "island"], "s", (0, 1),
        [("s", "a", 0, "s"), ("island", "a", 1, "island")])
    with pytest.raises(PreconditionError, match="trim"):
        state_rank_info(padded)
    for seed in range(40):
        a, _ = trim(gen(seed, 3, 2, 0, 3))
        if not wins_everywhere(a, 2):
            with pytest.raises(PreconditionError):
                state_rank_info(a)
            break
    else:
        raise AssertionError("no counterexample instance found")


def test_token_product_seed_handling(a2):
    seeds = [(0, (1,), 0), (1, (0,), 0)]
    prod = build_token_product(a2, 1, seeds)
    for s in seeds:
        assert ("pos",) + (s[0], s[1], s[2]) in prod.index
    regions = solve_parity(prod.game)
    assert regions.eve | regions.adam == frozenset(
        range(len(prod.game.owner)))


def test_triple_set_is_symmetric_in_adam_tokens(a1):
    w2 = g2_triples(a1)
    assert all((q, r, p) in w2 for q, p, r in w2)
    assert (0, 0, 0) in w2
