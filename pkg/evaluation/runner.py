# evaluation/runner.py
"""
Greedy evaluation episodes and the matched passing-time sweep
"""
import multiprocessing as mp
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

import config
from errors import CapacityError, ConfigurationError, ContractViolation
from model.networks import PolicyNetwork
from model.trainer import select_actions
from scenarios.generator import FeatureDistributions, build_world, derive_seed, generate_scenario
from simulation.params import BehaviorParams, IdmParams, RoadConfig
from simulation.vehicles import VehicleKind
from simulation.world import DoneCause, step, with_kinds


@dataclass(frozen=True)
class SweepConfig:
    densities: list = field(default_factory=lambda: list(config.SWEEP_DENSITIES))
    penetrations: list = field(default_factory=lambda: list(config.SWEEP_PENETRATIONS))
    replications: int = config.SWEEP_REPLICATIONS
    seed: int = config.RANDOM_STATE
    checkpoint_path: str = config.CHECKPOINT_PATH
    output_path: str = config.OUTPUT_DIR
    workers: int = 1

    def __post_init__(self):
        if not self.densities or not self.penetrations:
            raise ConfigurationError("sweep needs non-empty densities and penetrations")
        if any(int(n) != n or n < 0 for n in self.densities):
            raise ConfigurationError(f"densities must be non-negative integers, got {self.densities}")
        if any(not 0.0 <= p <= 1.0 for p in self.penetrations):
            raise ConfigurationError(f"penetrations must lie in [0, 1], got {self.penetrations}")
        if self.replications < 1:
            raise ConfigurationError("replications must be at least 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")


@dataclass(frozen=True)
class EpisodeResult:
    density: int
    penetration: float
    replication: int
    seed: int
    passing_time: Optional[float]   # None unless the EMV cleared the segment
    collided: bool
    timed_out: bool
    steps: int
    error: Optional[str] = None

    def to_dict(self):
        return asdict(self)


def run_episode_greedy(world, ensemble=None, baseline=False, rng=None, density=None, penetration=None,
                       replication=0, seed=0):
    """
    Roll a world to the end with eps = 0 and argmax CV actions.

    In baseline mode every real vehicle is relabelled HV and no ensemble is
    needed. The world passed in is left untouched.
    """
    real = world.real_indices()
    if density is None:
        density = len(real)
    if penetration is None:
        n_cv = sum(world.non_emvs[i].kind == VehicleKind.CV for i in real)
        penetration = n_cv / len(real) if real else 0.0

    if baseline:
        world = with_kinds(world, [VehicleKind.HV] * world.M)
    else:
        if ensemble is None:
            raise ConfigurationError("policy evaluation needs a trained checkpoint; use baseline mode otherwise")
        if ensemble.M != world.M:
            raise ContractViolation(f"ensemble has {ensemble.M} slots but the world has {world.M}")
        world = with_kinds(world, [veh.kind for veh in world.non_emvs])

    carries = PolicyNetwork.initial_carry(world.M)
    events = None
    while events is None or not events.done:
        if baseline:
            actions = np.zeros(world.M, dtype=int)
        else:
            actions, carries = select_actions(ensemble, world, carries, 0.0, None, greedy=True)
        world, events = step(world, actions, rng)

    cleared = events.cause == DoneCause.CLEARED
    return EpisodeResult(
        density=int(density),
        penetration=float(penetration),
        replication=int(replication),
        seed=int(seed),
        passing_time=world.step * world.road.dt if cleared else None,
        collided=events.cause == DoneCause.COLLISION,
        timed_out=events.cause == DoneCause.TIMEOUT,
        steps=world.step,
    )


def _cell_tasks(cfg):
    return [(density, rep) for density in cfg.densities for rep in range(cfg.replications)]


def run_cell(density, replication, cfg, ensemble=None, baseline=False, M=config.AGENT_SLOTS,
             road=None, idm=None, behavior=None, features=None):
    """
    One (density, replication) group: the same vehicles at every penetration
    rate, each run greedily
    """
    cell_seed = derive_seed(cfg.seed, density, replication)
    results = []
    for penetration in cfg.penetrations:
        try:
            spec = generate_scenario(density, penetration, road, cell_seed, features)
            world = build_world(spec, M, idm, behavior)
        except CapacityError as exc:
            results.append(EpisodeResult(density=int(density), penetration=float(penetration),
                                         replication=replication, seed=cell_seed, passing_time=None,
                                         collided=False, timed_out=False, steps=0, error=str(exc)))
            continue
        results.append(run_episode_greedy(world, ensemble, baseline, density=density,
                                          penetration=penetration, replication=replication,
                                          seed=cell_seed))
    return results


# worker-process globals, set once per worker by _init_worker
_WORKER = {}


def _init_worker(cfg, ensemble, baseline, M, road, idm, behavior, features):
    _WORKER.update(cfg=cfg, ensemble=ensemble, baseline=baseline, M=M, road=road, idm=idm,
                   behavior=behavior, features=features)


def _run_cell_in_worker(task):
    density, replication = task
    return run_cell(density, replication, **_WORKER)


def sort_results(results):
    return sorted(results, key=lambda r: (r.density, r.penetration, r.replication))


def sweep(cfg, ensemble=None, baseline=False, M=None, road=None, idm=None, behavior=None, features=None,
          verbose=True):
    """
    Matched passing-time sweep over densities x penetrations x replications.
    Returns the EpisodeResult list sorted by (density, penetration, replication).
    """
    if ensemble is None and not baseline:
        raise ConfigurationError("policy sweep needs a trained checkpoint; run the baseline otherwise")
    M = M or (ensemble.M if ensemble is not None else config.AGENT_SLOTS)
    road = road or RoadConfig()
    idm = idm or IdmParams()
    behavior = behavior or BehaviorParams()
    features = features or FeatureDistributions.from_behavior(behavior)

    tasks = _cell_tasks(cfg)
    mode = "all-HV baseline" if baseline else "policy"
    if verbose:
        print(f"\n🚑 Running {mode} sweep: {len(tasks)} cells x {len(cfg.penetrations)} penetration rates")

    results = []
    shared = (cfg, ensemble, baseline, M, road, idm, behavior, features)
    if cfg.workers > 1 and len(tasks) > 1:
        with mp.get_context("spawn").Pool(processes=cfg.workers, initializer=_init_worker,
                                          initargs=shared) as pool:
            cells = pool.imap_unordered(_run_cell_in_worker, tasks)
            for cell in tqdm(cells, total=len(tasks), desc="Sweep cells", disable=not verbose):
                results.extend(cell)
    else:
        for density, rep in tqdm(tasks, desc="Sweep cells", disable=not verbose):
            results.extend(run_cell(density, rep, cfg, ensemble, baseline, M, road, idm, behavior, features))

    failed = [r for r in results if r.error]
    if verbose:
        if failed:
            print(f"✗ {len(failed)} infeasible episodes skipped (first: {failed[0].error})")
        print(f"✓ Sweep finished: {len(results) - len(failed)} episodes")
    return sort_results(results)
