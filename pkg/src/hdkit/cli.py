"""Command-line interface: decide, game, normalize, strategy, ge, gen, fuzz.

JSON goes to standard output, diagnostics to standard error.  Exit codes:
0 success (whatever the verdict), 2 malformed input, 3 precondition
violation, 4 resource limit.  Output is byte-identical for identical inputs,
flags, and seeds; wall-clock data appears only behind ``--timings``.
"""

from __future__ import annotations

import argparse
import json
import random
import string
import sys
import time
from dataclasses import dataclass

from . import hd, normalize, oracle, strategies
from .automata import (ParityAutomaton, is_reachability, is_safety,
                       make_automaton, parse_automaton, parse_lasso, to_native)
from .errors import ParseError, PreconditionError, ResourceLimitError
from .token_games import TokenConfig, wins_everywhere, wins_gk


@dataclass(frozen=True)
class GenSpec:
    seed: int
    states: int
    letters: int
    index: tuple[int, int]
    density: float = 0.3
    count: int = 1

    def __post_init__(self):
        if self.states < 1 or self.letters < 1:
            raise PreconditionError("need at least one state and one letter")
        if self.letters > len(string.ascii_lowercase):
            raise PreconditionError("at most 26 letters are supported")
        if not 0 < self.density <= 1:
            raise PreconditionError("density must be in (0, 1]")
        if self.index[0] > self.index[1] or self.index[0] < 0:
            raise PreconditionError(f"bad index {list(self.index)}")
        if self.count < 0:
            raise PreconditionError("count must not be negative")


def generate(spec: GenSpec) -> list[ParityAutomaton]:
    """Random complete automata, deterministic in the seed."""
    rng = random.Random(spec.seed)
    lo, hi = spec.index
    letters = list(string.ascii_lowercase[:spec.letters])
    names = [f"q{i}" for i in range(spec.states)]
    out = []
    for _ in range(spec.count):
        triples = []
        for q in range(spec.states):
            for x in range(spec.letters):
                row = {(rng.randrange(spec.states), rng.randint(lo, hi))}
                for _ in range(spec.states - 1):
                    if rng.random() < spec.density:
                        row.add((rng.randrange(spec.states),
                                 rng.randint(lo, hi)))
                for dst, pri in sorted(row):
                    triples.append((names[q], letters[x], pri, names[dst]))
        out.append(make_automaton(letters, names, names[0], (lo, hi), triples))
    return out


# ---------------------------------------------------------------------------
# plumbing


def _read_automaton(args) -> ParityAutomaton:
    if args.infile == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.infile, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ParseError(f"cannot read '{args.infile}': {e}") from None
    fmt = "hoa" if text.lstrip().startswith("HOA:") else "native"
    return parse_automaton(text, fmt,
                           complete_with_sink=getattr(args, "complete", False))


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read '{path}': {e}") from None


def _emit(doc: dict):
    print(json.dumps(doc, indent=2))


def _automaton_doc(a: ParityAutomaton) -> dict:
    return json.loads(to_native(a))


def _parse_index(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("index must be 'low,high'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError("index must be 'low,high'") from None


def _report_dict(rep: normalize.NormalisationReport) -> dict:
    return {
        "iterations": rep.iterations,
        "steps": [{"name": nm, "removed": rm, "relabelled": rl}
                  for nm, rm, rl in rep.steps],
        "invariants": dict(rep.invariants_checked),
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_decide(args) -> int:
    a = _read_automaton(args)
    if args.method == "oracle":
        v = oracle.decide_hd_reference(a)
    elif args.method == "auto" and (is_safety(a) or is_reachability(a)):
        v, _ = hd.decide_hd_safety_reach(a)
    else:
        v = hd.decide_hd(a)
    _emit(hd.verdict_json(v, a))
    return 0


def _cmd_game(args) -> int:
    a = _read_automaton(args)
    cfg = TokenConfig(a.initial, (a.initial,) * args.tokens)
    res = wins_gk(a, cfg)
    doc = {
        "tokens": args.tokens,
        "winner": res.winner,
        "eve_wins": res.eve_wins,
        "vertices": len(res.product_game.owner),
        "edges": len(res.product_game.edges),
    }
    if args.everywhere:
        doc["everywhere"] = wins_everywhere(a, args.tokens)
    _emit(doc)
    return 0


def _auto_normalize_mode(a: ParityAutomaton) -> str:
    if a.index_low == 0:
        return "rank-buchi" if all(
            p in (0, 1) for p in a.priorities_used) else "full-0K"
    if all(p in (1, 2) for p in a.priorities_used):
        return "cobuchi"
    if a.index_low == 1:
        return "two-priority"
    raise PreconditionError(
        f"no normalisation applies to index [{a.index_low}, {a.index_high}]")


def _cmd_normalize(args) -> int:
    a = _read_automaton(args)
    mode = args.mode if args.mode != "auto" else _auto_normalize_mode(a)
    if mode == "cobuchi":
        out, report = normalize.cobuchi_normalise(a), None
    elif mode == "two-priority":
        out, report = normalize.two_priority_reduce(a), None
    elif mode == "rank-buchi":
        rep = normalize.rank_reduce_buchi(a)
        out, report = rep.output, _report_dict(rep)
    else:
        rep = normalize.normalise_0K(a)
        out, report = rep.output, _report_dict(rep)
    doc = {"mode": mode, "states": out.n_states,
           "transitions": len(out.transitions),
           "index": [out.index_low, out.index_high]}
    if report is not None:
        doc["report"] = report
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(to_native(out))
        doc["written"] = args.out
    else:
        doc["automaton"] = _automaton_doc(out)
    _emit(doc)
    return 0


def _auto_strategy_kind(a: ParityAutomaton) -> str:
    if is_safety(a) or is_reachability(a):
        return "safety-reach"
    if a.index_low == 1 and all(p in (1, 2) for p in a.priorities_used):
        return "cobuchi"
    if a.index_low == 0 and all(p in (0, 1) for p in a.priorities_used):
        return "buchi"
    raise PreconditionError(
        f"no extractor applies to index [{a.index_low}, {a.index_high}]")


def _cmd_strategy(args) -> int:
    a = _read_automaton(args)
    if args.action == "extract":
        kind = args.kind if args.kind != "auto" else _auto_strategy_kind(a)
        extractor = {"safety-reach": strategies.extract_safety_reach,
                     "cobuchi": strategies.extract_cobuchi,
                     "buchi": strategies.extract_buchi}[kind]
        machine = extractor(a)
        ok, verify_mode = strategies.verify_strategy_mode(a, machine)
        doc = {"kind": kind, "memory": len(machine.memory),
               "steps": len(machine.step), "verified": ok,
               "mode": verify_mode}
        text = strategies.machine_to_json(machine, a)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(text)
            doc["written"] = args.out
        else:
            doc["machine"] = json.loads(text)
        _emit(doc)
    elif args.action == "verify":
        machine = strategies.machine_from_json(_read_text(args.strategy), a)
        ok, verify_mode = strategies.verify_strategy_mode(a, machine)
        _emit({"ok": ok, "mode": verify_mode})
    else:
        machine = strategies.machine_from_json(_read_text(args.strategy), a)
        w = parse_lasso(args.lasso, a)
        summary, accepted, violates = strategies.simulate_play(a, machine, w)
        _emit({"prefix": summary["prefix"], "cycle": summary["cycle"],
               "accepted": accepted, "violates": violates})
    return 0


def _cmd_ge(args) -> int:
    a = _read_automaton(args)
    split = {}
    for letter in a.letters:
        parts = letter.split(args.sep, 1)
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise PreconditionError(
                f"letter '{letter}' is not of the form input{args.sep}output")
        split[letter] = (parts[0], parts[1])
    _emit({"realisable": hd.ge_realisable(a, split)})
    return 0


def _cmd_gen(args) -> int:
    spec = GenSpec(args.seed, args.states, args.letters, args.index,
                   args.density, args.count)
    _emit({"automata": [_automaton_doc(a) for a in generate(spec)]})
    return 0


def _cmd_fuzz(args) -> int:
    spec = GenSpec(args.seed, args.states, args.letters, args.index,
                   args.density, args.count)
    started = time.monotonic()
    agree = disagree = skipped = 0
    disagreements = []
    for i, a in enumerate(generate(spec)):
        v = hd.decide_hd(a)
        try:
            r = oracle.decide_hd_reference(a)
        except ResourceLimitError:
            skipped += 1
            continue
        if v.is_hd == r.is_hd:
            agree += 1
        else:
            disagree += 1
            disagreements.append({"instance": i,
                                  "decide": v.is_hd, "oracle": r.is_hd,
                                  "automaton": _automaton_doc(a)})
    doc = {"count": spec.count, "agree": agree, "disagree": disagree,
           "skipped": skipped, "disagreements": disagreements}
    if args.timings:
        doc["seconds"] = round(time.monotonic() - started, 3)
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hdkit",
        description="History-determinism toolkit for parity automata")
    sub = top.add_subparsers(dest="command", required=True)

    def infile(p):
        p.add_argument("--in", dest="infile", required=True,
                       help="automaton file (native JSON or HOA), '-' for stdin")
        p.add_argument("--complete-with-sink", dest="complete",
                       action="store_true",
                       help="complete missing rows with a rejecting sink")

    p = sub.add_parser("decide", help="decide history-determinism")
    infile(p)
    p.add_argument("--method", choices=["two-token", "auto", "oracle"],
                   default="two-token")
    p.set_defaults(fn=_cmd_decide)

    p = sub.add_parser("game", help="solve the k-token game")
    infile(p)
    p.add_argument("--tokens", type=int, default=2, choices=[1, 2, 3])
    p.add_argument("--everywhere", action="store_true",
                   help="also check every weakly coreachable configuration")
    p.set_defaults(fn=_cmd_game)

    p = sub.add_parser("normalize", help="run a normalisation pipeline")
    infile(p)
    p.add_argument("--mode", default="auto",
                   choices=["auto", "cobuchi", "two-priority", "rank-buchi",
                            "full-0K"])
    p.add_argument("--out", help="write the resulting automaton here")
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("strategy", help="extract, verify, or run strategies")
    p.add_argument("action", choices=["extract", "verify", "simulate"])
    infile(p)
    p.add_argument("--kind", default="auto",
                   choices=["auto", "safety-reach", "cobuchi", "buchi"])
    p.add_argument("--out", help="write the extracted strategy here")
    p.add_argument("--strategy", help="strategy file (verify/simulate)")
    p.add_argument("--lasso", help="lasso 'u;v' with space-separated letters")
    p.set_defaults(fn=_cmd_strategy)

    p = sub.add_parser("ge", help="good-enough realisability of a "
                                  "deterministic specification")
    infile(p)
    p.add_argument("--sep", default=".",
                   help="separator splitting letters into input/output")
    p.set_defaults(fn=_cmd_ge)

    def genflags(p):
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--count", type=int, default=1)
        p.add_argument("--states", type=int, default=4)
        p.add_argument("--letters", type=int, default=2)
        p.add_argument("--index", type=_parse_index, default=(0, 1))
        p.add_argument("--density", type=float, default=0.3)

    p = sub.add_parser("gen", help="generate random complete automata")
    genflags(p)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("fuzz", help="cross-check decide against the oracle")
    genflags(p)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(fn=_cmd_fuzz)

    return top


def run(argv: list[str]) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "strategy":
        if args.action in ("verify", "simulate") and not args.strategy:
            _emit({"error": {"type": "parse",
                             "message": f"--strategy is required for "
                                        f"'{args.action}'"}})
            return 2
        if args.action == "simulate" and not args.lasso:
            _emit({"error": {"type": "parse",
                             "message": "--lasso is required for 'simulate'"}})
            return 2
    try:
        return args.fn(args)
    except ParseError as e:
        _emit({"error": {"type": "parse", "message": str(e)}})
        return 2
    except PreconditionError as e:
        _emit({"error": {"type": "precondition", "message": str(e)}})
        return 3
    except ResourceLimitError as e:
        _emit({"error": {"type": "resource-limit", "message": str(e)}})
        return 4


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
