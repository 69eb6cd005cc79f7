"""hdkit: history-determinism toolkit for parity automata.

Decides history-determinism of nondeterministic parity automata through the
2-token game, with explicit token-game arenas, Zielonka-tree reductions,
rank-based normalisation pipelines, finite-memory strategy extraction, and an
independent determinisation-based oracle for cross-checking.
"""

from .automata import (CoreachabilityRelation, Lasso, ParityAutomaton,
                       Transition, approximate, coreachability, format_lasso,
                       is_reachability, is_safety, iter_lassos, lasso_member,
                       make_automaton, parse_automaton, parse_lasso, to_hoa,
                       to_native, trim)
from .errors import (HdkitError, InternalError, ParseError, PreconditionError,
                     ResourceLimitError)
from .games import (Edge, MullerGame, ParityGame, RankTable, WinRegions,
                    ZielonkaTree, branch_successor, build_zielonka_generic,
                    build_zielonka_token, compute_ranks, make_game,
                    muller_to_parity, solve_muller, solve_parity)
from .hd import (HdVerdict, decide_hd, decide_hd_safety_reach, ge_realisable,
                 is_semantically_deterministic, prune_everywhere, verdict_json,
                 wins_g1_pairs)
from .normalize import (NormalisationReport, cobuchi_normalise, coverage,
                        normalise_0K, rank_reduce_buchi, two_priority_reduce)
from .strategies import (StrategyMachine, extract_buchi, extract_cobuchi,
                         extract_safety_reach, machine_from_json,
                         machine_to_json, simulate_play, verify_strategy,
                         verify_strategy_mode)
from .token_games import (StateRankInfo, TokenConfig, TokenGameResult,
                          build_g1_buchi, build_g2_product, build_simulation,
                          build_token_product, simulates, state_rank_info,
                          wins_everywhere, wins_gk)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
