"""Command-line entry point: preprocess, run, baselines, report, oracle."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ..env.core import EpisodeConfig
from ..env.games import ChainWorld, chain_mdp, random_mdp
from ..features import FEATURE_KINDS
from ..planners.oracles import enumerate_plan, random_policy_moments, value_iteration
from .config import AGENTS, SPLITS, ExperimentConfig, load_config, parse_value
from .preprocess import build_preprocessing
from .report import make_report
from .runner import baseline_configs, load_records, run_experiment

OUT_DIR_ENV = "ARCADELAB_OUT_DIR"


def default_out_dir() -> str:
    return os.environ.get(OUT_DIR_ENV, "arcadelab-out")


def _overrides(pairs: list[str]) -> dict:
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise SystemExit(f"--set expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = parse_value(v)
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or ./arcadelab-out)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arcadelab", description="Agent evaluation on built-in arcade games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="build background / class / LSH models")
    _common(p)
    p.add_argument("--game", required=True)
    p.add_argument("--features", choices=FEATURE_KINDS + ("all",), default="all")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override (repeatable)")

    p = sub.add_parser("run", help="run one experiment")
    _common(p)
    p.add_argument("--config", help="key-value config file; flags override its fields")
    p.add_argument("--game")
    p.add_argument("--agent", choices=AGENTS)
    p.add_argument("--features", choices=FEATURE_KINDS)
    p.add_argument("--trials", type=int)
    p.add_argument("--split", choices=SPLITS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-auto-preprocess", action="store_true")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override (repeatable)")

    p = sub.add_parser("baselines", help="run the 37 baseline policies")
    _common(p)
    p.add_argument("--game", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--split", choices=SPLITS, default="training")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")

    p = sub.add_parser("report", help="build tables, aggregates and plots from stored runs")
    _common(p)
    p.add_argument("--allow-mixed-split", action="store_true")

    p = sub.add_parser("oracle", help="exact answers on ChainWorld MDPs")
    _common(p)
    p.add_argument("--game", default="chainworld", choices=["chainworld"])
    p.add_argument("--kind", choices=["value-iteration", "enumerate", "random-return"], default="value-iteration")
    p.add_argument("--layout", choices=["chain", "random"], default="chain")
    p.add_argument("--layout-seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--gamma", type=float, default=0.999)
    p.add_argument("--steps", type=int, default=3600)
    return parser


def _cmd_preprocess(args, out_dir) -> int:
    ov = _overrides(args.set)
    kinds = [k for k in FEATURE_KINDS if k in ("basic", "disco", "lsh")] if args.features == "all" else [args.features]
    cfg = ExperimentConfig(args.game, "sarsa", kinds[0], seed=args.seed, overrides=tuple(ov.items()))
    written = {}
    for kind in kinds:
        written.update(build_preprocessing(
            args.game, kind, out_dir, seed=args.seed, background_samples=cfg.param("background_samples"),
            class_samples=cfg.param("class_samples"), episode=cfg.episode_config(), env_kwargs=cfg.env_kwargs()))
    for k, p in sorted(written.items()):
        print(f"{k}\t{p}")
    return 0


def _cmd_run(args, out_dir) -> int:
    base = load_config(args.config).to_dict() if args.config else {"overrides": {}}
    for key in ("game", "agent", "features", "trials", "split"):
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    if args.seed or "seed" not in base:
        base["seed"] = args.seed
    base["overrides"] = {**base.get("overrides", {}), **_overrides(args.set)}
    if not base.get("game") or not base.get("agent"):
        raise SystemExit("run needs --game and --agent (or a config file)")
    cfg = ExperimentConfig.from_dict(base)
    rec = run_experiment(cfg, out_dir, workers=args.workers, auto_preprocess=not args.no_auto_preprocess)
    print(f"{cfg.label}\t{cfg.game}\t{rec.config_hash[:12]}\tmean={np.mean(rec.summaries):.4f}")
    return 0


def _cmd_baselines(args, out_dir) -> int:
    for cfg in baseline_configs(args.game, args.trials, args.seed, args.split, **_overrides(args.set)):
        rec = run_experiment(cfg, out_dir, workers=args.workers)
        print(f"{cfg.label}\t{cfg.game}\t{rec.config_hash[:12]}\tmean={np.mean(rec.summaries):.4f}")
    return 0


def _cmd_report(args, out_dir) -> int:
    summary = make_report(load_records(out_dir), out_dir, allow_mixed_split=args.allow_mixed_split)
    print(json.dumps({"times_best": summary["times_best"], "aggregates": summary["aggregates"]}, indent=1, sort_keys=True))
    return 0


def _cmd_oracle(args, out_dir) -> int:
    mdp = chain_mdp() if args.layout == "chain" else random_mdp(args.layout_seed)
    if args.kind == "value-iteration":
        V, Q = value_iteration(mdp, args.gamma)
        result = {"V": V.tolist(), "greedy_groups": Q.argmax(axis=1).tolist()}
    elif args.kind == "enumerate":
        env = ChainWorld(EpisodeConfig(), mdp=mdp)
        res = enumerate_plan(env, env.save_state(), args.depth, args.gamma)
        result = {"values": res.values.tolist(), "best": res.best_value, "action": res.action}
    else:
        mean, var = random_policy_moments(mdp, args.steps)
        result = {"mean": mean, "variance": var}
    print(json.dumps(result, indent=1))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir or default_out_dir())
    handler = {"preprocess": _cmd_preprocess, "run": _cmd_run, "baselines": _cmd_baselines,
               "report": _cmd_report, "oracle": _cmd_oracle}[args.command]
    try:
        return handler(args, out_dir)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
