# main.py
"""
Command-line pipeline for DQJL coordination: scenario generation, training,
passing-time evaluation, the all-HV baseline and decision latency
"""
import argparse
import os
import sys
import traceback
from dataclasses import replace

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from errors import CapacityError, ConfigurationError, DatasetParseError, FormatVersionError
from evaluation.latency import DECISION_BUDGET_MS, measure_decision_latency
from evaluation.report import aggregate, passing_time_savings, print_summary, report
from evaluation.runner import sweep
from model.ensemble import AgentEnsemble
from model.trainer import moving_average, train
from scenarios.dataset import load_dataset, save_dataset
from scenarios.generator import ScenarioSampler, generate_grouped_test_set

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_IO = 4


def banner(title):
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)


def load_ensemble(path):
    if not os.path.isfile(path):
        raise ConfigurationError(f"checkpoint not found: {path} (run `train` first)")
    return AgentEnsemble.load_model(path)


def cmd_gen(args, cfg):
    """
    Write the training scenarios and the grouped test set
    """
    banner("📥 SCENARIO GENERATION PHASE")
    sampler = ScenarioSampler(cfg.train.densities, road=cfg.road, features=cfg.features, seed=cfg.seed)
    train_specs = [sampler(k) for k in range(args.count)]
    n = save_dataset(train_specs, args.dataset)
    print(f"✓ {n} training scenarios saved to {args.dataset}")

    test_specs = generate_grouped_test_set(
        cfg.sweep.densities, cfg.sweep.penetrations, cfg.sweep.replications,
        road=cfg.road, seed=cfg.seed + 1, features=cfg.features,
    )
    test_path = os.path.join(args.out, os.path.basename(config.TEST_SET_PATH))
    n = save_dataset(test_specs, test_path)
    print(f"✓ {n} grouped test scenarios saved to {test_path}")
    return EXIT_OK


def cmd_train(args, cfg):
    banner("🎯 MODEL TRAINING PHASE")
    train_cfg = cfg.train if args.episodes is None else replace(cfg.train, episodes=args.episodes)
    if args.dataset and os.path.isfile(args.dataset):
        scenarios = load_dataset(args.dataset)
        print(f"✓ Loaded {len(scenarios)} scenarios from {args.dataset}")
    else:
        scenarios = ScenarioSampler(train_cfg.densities, road=cfg.road, features=cfg.features, seed=cfg.seed)
        print(f"Sampling scenarios on the fly (densities {train_cfg.densities})")

    ensemble = load_ensemble(args.checkpoint) if args.resume else None
    log_path = os.path.join(args.out, os.path.basename(config.EPISODE_LOG_PATH))
    ensemble, log = train(scenarios, train_cfg, ensemble=ensemble, idm=cfg.idm, behavior=cfg.behavior,
                          reward_cfg=cfg.reward, checkpoint_path=args.checkpoint, log_path=log_path)

    if not log.empty:
        window = min(200, len(log))
        smoothed = moving_average(log["return"], window)
        print(f"\nEpisodes: {len(log)}")
        print(f"First {window}-episode average return: {log['return'].iloc[:window].mean():.2f}")
        print(f"Final moving-average return:        {smoothed.iloc[-1]:.2f}")
        print(f"Collision rate (last {window}):       {log['collision'].iloc[-window:].mean():.2%}")
    return EXIT_OK


def _run_sweep(args, cfg, baseline):
    sweep_cfg = cfg.sweep if args.workers is None else replace(cfg.sweep, workers=args.workers)
    ensemble = None if baseline else load_ensemble(args.checkpoint)
    M = None if ensemble is not None else cfg.train.M
    results = sweep(sweep_cfg, ensemble, baseline=baseline, M=M, road=cfg.road, idm=cfg.idm,
                    behavior=cfg.behavior, features=cfg.features)
    out_dir = os.path.join(args.out, "baseline" if baseline else "policy")
    report(results, out_dir)
    summary = aggregate(results)
    print_summary(summary)
    return summary


def cmd_eval(args, cfg):
    banner("🚑 PASSING-TIME EVALUATION PHASE")
    summary = passing_time_savings(_run_sweep(args, cfg, baseline=False))
    full = summary[summary["penetration"] == summary["penetration"].max()]
    for _, row in full.iterrows():
        print(f"Density {int(row['density'])}: saving at penetration {row['penetration']:.2f} "
              f"= {row['saving']:.1%}")
    return EXIT_OK


def cmd_baseline(args, cfg):
    banner("🚗 ALL-HV BASELINE PHASE")
    _run_sweep(args, cfg, baseline=True)
    return EXIT_OK


def cmd_bench_latency(args, cfg):
    banner("⏱️  DECISION LATENCY PHASE")
    if os.path.isfile(args.checkpoint):
        ensemble = AgentEnsemble.load_model(args.checkpoint)
    else:
        print(f"No checkpoint at {args.checkpoint}; timing a randomly initialised ensemble")
        ensemble = AgentEnsemble(M=cfg.train.M, seed=cfg.seed)
    stats = measure_decision_latency(ensemble, args.trials, seed=cfg.seed)
    if stats.n == 0:
        print("No trials requested")
        return EXIT_OK
    mark = "✓" if stats.within_budget else "✗"
    print(f"{mark} {stats.n} decisions: mean {stats.mean_ms:.3f} ms, p95 {stats.p95_ms:.3f} ms, "
          f"max {stats.max_ms:.3f} ms (budget {DECISION_BUDGET_MS:.0f} ms)")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "bench-latency": cmd_bench_latency,
    "baseline": cmd_baseline,
}


def build_parser():
    parser = argparse.ArgumentParser(description="DQJL coordination with multi-agent actor-critic")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (overrides the config file)")
    common.add_argument("--config", default=None, help="versioned JSON configuration file")
    common.add_argument("--dataset", default=config.DATASET_PATH, help="scenario dataset (JSON lines)")
    common.add_argument("--checkpoint", default=config.CHECKPOINT_PATH, help="ensemble checkpoint")
    common.add_argument("--out", default=config.OUTPUT_DIR, help="output directory")

    sub = parser.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("gen", parents=[common], help="generate training and test scenarios")
    gen.add_argument("--count", type=int, default=1000, help="number of training scenarios")

    tr = sub.add_parser("train", parents=[common], help="train the agent ensemble")
    tr.add_argument("--episodes", type=int, default=None, help="override the configured episode count")
    tr.add_argument("--resume", action="store_true", help="continue from the checkpoint")

    for name, text in (("eval", "matched passing-time sweep of the trained policy"),
                       ("baseline", "all-HV passing-time sweep")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--workers", type=int, default=None, help="parallel sweep workers")

    bench = sub.add_parser("bench-latency", parents=[common], help="time single-agent decisions")
    bench.add_argument("--trials", type=int, default=1000)
    return parser


def resolve_config(args):
    cfg = config.load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed, train=replace(cfg.train, seed=args.seed),
                      sweep=replace(cfg.sweep, seed=args.seed))
    return cfg


def main(argv=None):
    """
    Main execution pipeline; returns the process exit code
    """
    args = build_parser().parse_args(argv)

    print("\n" + "🚑" * 30)
    print("DQJL - DYNAMIC QUEUE-JUMP LANE COORDINATION")
    print("=" * 30)

    try:
        cfg = resolve_config(args)
        os.makedirs(args.out, exist_ok=True)
        code = COMMANDS[args.command](args, cfg)
        print("\n" + "=" * 60)
        print(f"✅ {args.command.upper()} COMPLETED SUCCESSFULLY!")
        print("=" * 60)
        return code

    except (ConfigurationError, FormatVersionError, DatasetParseError) as e:
        print(f"\n❌ CONFIGURATION ERROR: {e}")
        return EXIT_CONFIG
    except CapacityError as e:
        print(f"\n❌ CAPACITY ERROR: {e}")
        return EXIT_CAPACITY
    except OSError as e:
        print(f"\n❌ I/O ERROR: {e}")
        return EXIT_IO
    except Exception as e:
        print(f"\n❌ ERROR: {e}")
        traceback.print_exc()
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
