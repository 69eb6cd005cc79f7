"""The slow reference implementations, pinned before anything that is
tested against them."""

import ast
import pathlib
import random

import pytest

from hdkit import oracle
from hdkit.automata import iter_lassos, lasso_member, make_automaton
from hdkit.errors import ParseError, PreconditionError, ResourceLimitError
from hdkit.games import make_game, solve_parity
from helpers import build_a1, build_a2, build_a3, gen, nx_lasso_member


@pytest.fixture(autouse=True, scope="module")
def lasso_checks_on():
    """Every conversion in this module re-checks its own language."""
    oracle.LASSO_CHECKS = True
    yield
    oracle.LASSO_CHECKS = False


def test_oracle_module_stays_independent():
    # the reference path must not lean on the code it is meant to check
    src = pathlib.Path(oracle.__file__).read_text(encoding="utf-8")
    imported = set()
    for node in ast.walk(ast.parse(src)):
        if isinstance(node, ast.Import):
            imported.update(alias.name for alias in node.names)
        elif isinstance(node, ast.ImportFrom):
            imported.add(node.module or "")
            imported.update(alias.name for alias in node.names)
    assert not imported & {"token_games", "normalize"}, imported


def test_reference_verdicts_on_fixed_automata():
    assert oracle.decide_hd_reference(build_a3()).is_hd
    assert oracle.decide_hd_reference(build_a1()).is_hd
    assert not oracle.decide_hd_reference(build_a2()).is_hd
    assert oracle.decide_hd_reference(build_a2()).method == "oracle"


def test_parity_to_buchi_preserves_language():
    for a in (build_a1(), build_a2(), build_a3()):
        b = oracle.parity_to_buchi(a)
        assert set(b.priorities_used) <= {0, 1}
        for w in iter_lassos(a.n_letters, 3, 3):
            assert lasso_member(b, w) == lasso_member(a, w), w
    # the universal [1,3] automaton stays universal
    b2 = oracle.parity_to_buchi(build_a2())
    assert all(lasso_member(b2, w) for w in iter_lassos(2, 3, 3))


def test_determinise_buchi_output_shape_and_language():
    a = oracle.parity_to_buchi(build_a1())
    d = oracle.determinise_buchi(a, guard=200)
    for q in range(d.n_states):
        for x in range(d.n_letters):
            assert len(d.rows[(q, x)]) == 1
    for w in iter_lassos(a.n_letters, 3, 3):
        assert lasso_member(d, w) == lasso_member(a, w), w


def test_determinise_fixed_automata():
    for a in (build_a1(), build_a2(), build_a3()):
        d = oracle.determinise(a, guard=200)
        assert all(len(d.rows[(q, x)]) == 1
                   for q in range(d.n_states) for x in range(d.n_letters))
        for w in iter_lassos(a.n_letters, 3, 3):
            assert lasso_member(d, w) == lasso_member(a, w), w


def test_determinise_random_instances():
    for seed in range(12):
        a = gen(seed, 3, 2, 0, 2)
        d = oracle.determinise(a, guard=200)
        for w in iter_lassos(2, 3, 3):
            assert lasso_member(d, w) == lasso_member(a, w), (seed, w)


def test_guard_env_parsing(monkeypatch):
    monkeypatch.delenv("HDKIT_GUARD", raising=False)
    assert oracle.effective_guard() == 10
    monkeypatch.setenv("HDKIT_GUARD", "25")
    assert oracle.effective_guard() == 25
    monkeypatch.setenv("HDKIT_GUARD", "many")
    with pytest.raises(ParseError):
        oracle.effective_guard()
    monkeypatch.setenv("HDKIT_GUARD", "0")
    with pytest.raises(ParseError):
        oracle.effective_guard()


def test_guard_trips_on_tiny_limit():
    with pytest.raises(ResourceLimitError):
        oracle.determinise(build_a1(), guard=1)


def test_brute_solve_game_matches_solver_on_enumerated_games():
    # all two-vertex one-owner-each games with <= 2 edges per vertex
    rng = random.Random(5)
    for trial in range(60):
        n = rng.randint(1, 4)
        owner = [rng.random() < 0.5 for _ in range(n)]
        quads = []
        for v in range(n):
            for _ in range(rng.randint(1, 2)):
                quads.append((v, rng.randint(0, 3), rng.randrange(n)))
        g = make_game(owner, quads)
        eve, adam = oracle.brute_solve_game(g)
        regions = solve_parity(g)
        assert eve == regions.eve and adam == regions.adam, trial


def test_brute_rank_small_shapes():
    g = make_game([True], [(0, 0, 0)])
    assert oracle.brute_rank(g, 0) == 0
    # Adam --1--> Eve --0--> Adam again: one forced reset per round
    g = make_game([False, True], [(0, 1, 1), (1, 0, 0)])
    assert oracle.brute_rank(g, 0) == 1
    assert oracle.brute_rank(g, 1) == 0
    # Adam's priority-1 self-loop never reaches a 0; the rank diverges
    g = make_game([False], [(0, 1, 0)])
    assert oracle.brute_rank(g, 0) == float("inf")


def test_brute_rank_rejects_large_games():
    g = make_game([True] * 11, [(v, 0, v) for v in range(11)])
    with pytest.raises(PreconditionError):
        oracle.brute_rank(g, 0)


def test_compress_priorities_keeps_language():
    a = make_automaton("ab", ["u", "v"], "u", (0, 5),
                       [("u", "a", 4, "v"), ("u", "b", 2, "u"),
                        ("v", "a", 5, "u"), ("v", "b", 3, "v")])
    c = oracle.compress_priorities(a)
    assert c.index_high <= a.index_high
    used = sorted(c.priorities_used)
    assert used == list(range(used[0], used[0] + len(used)))
    for w in iter_lassos(2, 3, 3):
        assert lasso_member(c, w) == lasso_member(a, w), w


def test_lasso_difference_spots_and_clears():
    a1, a3 = build_a1(), build_a3()
    assert oracle.lasso_difference(a1, a1) is None
    b = make_automaton("abc", ["z"], "z", (1, 2),
                       [("z", x, 2, "z") for x in "abc"])
    w = oracle.lasso_difference(a1, b)
    assert w is not None
    assert lasso_member(a1, w) != lasso_member(b, w)
    with pytest.raises(PreconditionError):
        oracle.lasso_difference(a1, a3)


def test_lasso_membership_against_structural_recomputation():
    for seed in range(10):
        a = gen(seed, 3, 2, 0, 2)
        for w in iter_lassos(2, 2, 3):
            assert lasso_member(a, w) == nx_lasso_member(a, w), (seed, w)
    for a in (build_a1(), build_a2()):
        for w in iter_lassos(a.n_letters, 2, 2):
            assert lasso_member(a, w) == nx_lasso_member(a, w), w
