"""Command-line front end.

One executable, five subcommands plus the UCI loop: `encode` dumps
input planes, `attribute` runs integrated-gradients channel reports,
`arena` plays round-robin matches, `netspec` prints or checks scaling
configs, `gen-random-net` writes a random weight file, and `uci` (the
default when no subcommand is given) speaks the engine protocol on
stdin/stdout.  Report-producing subcommands also render a matplotlib
figure next to their JSON when given --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arena as arena_mod
from . import attribution, chesscore as cc, fixtures, netspec, planes
from .inference import (NetworkFormatError, gen_random_network, load_network,
                        material_oracle, network_evaluator, save_network)
from .mcts import DEFAULT_C_PUCT
from .uci import uci_loop


def _position_from(text: str) -> cc.Position:
    if text.strip() == "startpos":
        return cc.startpos()
    return cc.parse_fen(text)


# -- encode -------------------------------------------------------------


def _cmd_encode(args) -> int:
    pos = _position_from(args.fen)
    stack = planes.encode(pos, args.version)
    if args.describe:
        print(planes.describe(stack))
    else:
        print(json.dumps(planes.to_json_dict(stack)))
    return 0


# -- attribute ----------------------------------------------------------


def _load_fen_lines(path) -> list:
    positions = []
    for number, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            positions.append(cc.parse_fen(line))
        except cc.FenError as err:
            raise cc.FenError(f"{path}: line {number}: {err}") from err
    return positions


def _attribution_table(report, args) -> str:
    lines = [f"target {args.target}  baseline {args.baseline}  "
             f"steps {args.steps}",
             f"{'idx':>4}  {'attribution':>14}  channel"]
    for idx, (name, mean) in enumerate(report):
        lines.append(f"{idx:>4}  {mean:+.6e}  {name}")
    return "\n".join(lines)


def _cmd_attribute(args) -> int:
    net = load_network(args.net)
    pos = _position_from(args.fen)
    stack = planes.encode(pos, net.version)
    if args.baseline == "zeros":
        base = attribution.zeros_baseline(net.version)
    else:
        if args.mean_fens:
            positions = _load_fen_lines(args.mean_fens)
        else:
            positions = [cc.parse_fen(f)
                         for f in fixtures.OPPOSITE_COLOR_BISHOP_FENS]
        base = attribution.mean_baseline(positions, net.version)
    kind = "zeros" if args.baseline == "zeros" else "dataset_mean"
    attr = attribution.integrated_gradients(
        net, stack, base, steps=args.steps, target=args.target,
        baseline_kind=kind)
    report = attribution.channel_report(attr, planes.plane_layout(net.version))
    print(_attribution_table(report, args))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        doc = {
            "fen": cc.emit_fen(pos),
            "version": net.version,
            "target": args.target,
            "baseline": kind,
            "steps": args.steps,
            "channels": [{"index": i, "name": name, "attribution": mean}
                         for i, (name, mean) in enumerate(report)],
        }
        (out / "attribution.json").write_text(json.dumps(doc, indent=2))
        from .plotting import channel_attribution_figure
        channel_attribution_figure(report, args.target,
                                   out / "attribution.png")
    return 0


# -- arena --------------------------------------------------------------


def _engine_from_config(doc: dict) -> arena_mod.EngineConfig:
    try:
        name = doc["name"]
        kind = doc["evaluator"]
        budget = int(doc["budget_nodes"])
    except (KeyError, TypeError) as err:
        raise ValueError(f"engine config needs name/evaluator/budget_nodes "
                         f"({err})") from err
    if kind == "material":
        evaluator = material_oracle
    else:
        evaluator = network_evaluator(load_network(kind))
    return arena_mod.EngineConfig(
        name=name, evaluator=evaluator, budget_nodes=budget,
        c_puct=float(doc.get("c_puct", DEFAULT_C_PUCT)),
        seed=int(doc.get("seed", 0)))


def _format_elo(estimate) -> str:
    if estimate is None:
        return "unrated"
    if estimate.saturated:
        sign = "+" if estimate.elo > 0 else "-"
        return f"{sign}{abs(estimate.elo):.0f} (saturated)"
    return f"{estimate.elo:+.1f} +/- {estimate.stderr:.1f}"


def _match_json(table, ratings, baseline: str) -> dict:
    pairs = [{"white": a, "black": b, "wins": c.wins, "draws": c.draws,
              "losses": c.losses}
             for (a, b), c in sorted(table.pair_results.items())]
    games = [{"white": r.white, "black": r.black, "opening": r.opening,
              "opening_index": r.opening_index, "result": r.result,
              "termination": r.termination, "plies": len(r.moves)}
             for r in table.records]
    rating_doc = {}
    for name, est in ratings.items():
        if est is None:
            rating_doc[name] = None
        else:
            rating_doc[name] = {"elo": est.elo, "stderr": est.stderr,
                                "saturated": est.saturated}
    return {"engines": list(table.engines), "baseline": baseline,
            "pairs": pairs, "ratings": rating_doc, "games": games}


def _cmd_arena(args) -> int:
    doc = json.loads(Path(args.engines).read_text())
    if not isinstance(doc, list):
        raise ValueError(f"{args.engines}: expected a JSON list of engines")
    engines = [_engine_from_config(entry) for entry in doc]
    openings = arena_mod.load_openings(args.openings)
    table = arena_mod.round_robin(
        engines, openings, games_per_pairing_per_opening=args.games,
        max_plies=args.max_plies)
    baseline = min(engines, key=lambda e: table.score(e.name)).name
    ratings = arena_mod.anchor_elo(table, baseline)
    width = max(len(e.name) for e in engines)
    print(f"{'engine':<{width}}  {'games':>5}  {'score':>6}  elo")
    for cfg in sorted(engines, key=lambda e: -table.score(e.name)):
        played = sum(table.games_between(cfg.name, other.name)
                     for other in engines if other.name != cfg.name)
        line = (f"{cfg.name:<{width}}  {played:>5}  "
                f"{table.score(cfg.name):>6.1f}  ")
        line += "baseline" if cfg.name == baseline \
            else _format_elo(ratings[cfg.name])
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        arena_mod.write_pgn(table.records, out / "games.pgn")
        (out / "match.json").write_text(
            json.dumps(_match_json(table, ratings, baseline), indent=2))
        from .plotting import elo_ladder_figure
        elo_ladder_figure(ratings, out / "elo.png")
    return 0


# -- netspec ------------------------------------------------------------


def _cmd_netspec(args) -> int:
    if args.name:
        spec = netspec.size_preset(args.name)
        print(json.dumps({
            "name": spec.name,
            "B": spec.stage2_blocks,
            "N1": spec.stage1_mcb,
            "N2": spec.stage2_mcb,
            "blocks": spec.total_blocks,
            "channels": spec.base_channels,
        }))
        return 0
    if args.alpha is None or args.beta is None:
        raise ValueError("pass --name, or both --alpha and --beta")
    params = netspec.ScalingParams(alpha=args.alpha, beta=args.beta,
                                   phi=args.phi)
    depth, channels = netspec.scaled_dimensions(params)
    print(json.dumps({
        "alpha": params.alpha,
        "beta": params.beta,
        "phi": params.phi,
        "depth": depth,
        "channels": channels,
        "original_criterion": netspec.check_original_criterion(params),
        "adjusted_criterion": netspec.check_adjusted_criterion(params),
    }))
    return 0


# -- gen-random-net -----------------------------------------------------


def _cmd_gen_random_net(args) -> int:
    net = gen_random_network(args.seed, spec_name=args.spec,
                             version=args.version)
    save_network(net, args.out)
    print(f"wrote {args.out} ({args.spec}, {args.version}, seed {args.seed})")
    return 0


def _cmd_uci(args) -> int:
    del args
    return uci_loop(sys.stdin, sys.stdout)


# -- dispatch -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridmate")
    sub = parser.add_subparsers(dest="command")

    enc = sub.add_parser("encode", help="dump input planes for a position")
    enc.add_argument("--fen", required=True,
                     help="FEN string, or 'startpos'")
    enc.add_argument("--version", type=str.upper,
                     choices=[planes.V1, planes.V2], default=planes.V2,
                     help="v1 or v2")
    enc.add_argument("--describe", action="store_true",
                     help="line-oriented text instead of JSON")
    enc.set_defaults(handler=_cmd_encode)

    att = sub.add_parser("attribute",
                         help="integrated-gradients channel report")
    att.add_argument("--fen", required=True)
    att.add_argument("--net", required=True, help="weight file path")
    att.add_argument("--baseline", choices=["zeros", "mean"],
                     default="zeros")
    att.add_argument("--steps", type=int, default=attribution.DEFAULT_STEPS)
    att.add_argument("--target", choices=list(attribution.TARGETS),
                     default="v")
    att.add_argument("--mean-fens",
                     help="FEN file for the mean baseline (defaults to the "
                          "bundled opposite-color-bishop suite)")
    att.add_argument("--out", help="directory for attribution.json + .png")
    att.set_defaults(handler=_cmd_attribute)

    arn = sub.add_parser("arena", help="round-robin engine match")
    arn.add_argument("--engines", required=True,
                     help="JSON list of engine configs")
    arn.add_argument("--openings", required=True, help="FEN/EPD file")
    arn.add_argument("--games", type=int, default=1,
                     help="games per pairing per opening")
    arn.add_argument("--max-plies", type=int,
                     default=arena_mod.DEFAULT_MAX_PLIES)
    arn.add_argument("--out",
                     help="directory for games.pgn + match.json + elo.png")
    arn.set_defaults(handler=_cmd_arena)

    nsp = sub.add_parser("netspec",
                         help="print a size preset or check a scaling triple")
    nsp.add_argument("--name", choices=netspec.size_names())
    nsp.add_argument("--alpha", type=float)
    nsp.add_argument("--beta", type=float)
    nsp.add_argument("--phi", type=float, default=1.0)
    nsp.set_defaults(handler=_cmd_netspec)

    gen = sub.add_parser("gen-random-net",
                         help="write a random well-formed weight file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--spec", default="tiny", choices=netspec.size_names())
    gen.add_argument("--version", type=str.upper,
                     choices=[planes.V1, planes.V2], default=planes.V2,
                     help="v1 or v2")
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=_cmd_gen_random_net)

    uci = sub.add_parser("uci", help="run the UCI engine loop")
    uci.set_defaults(handler=_cmd_uci)

    parser.set_defaults(handler=_cmd_uci)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (cc.FenError, cc.IllegalMoveError, NetworkFormatError,
            ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
