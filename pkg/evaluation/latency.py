# evaluation/latency.py
"""
Wall-clock cost of one CV decision: observation assembly plus a greedy
policy forward pass
"""
import time
from dataclasses import dataclass

import numpy as np

import config
from features.observation import local_observation
from model.networks import PolicyNetwork
from scenarios.generator import build_world, generate_scenario
from simulation.vehicles import VehicleKind

# V2X message interval a decision has to fit in
DECISION_BUDGET_MS = 10.0


@dataclass(frozen=True)
class LatencyStats:
    n: int
    mean_ms: float
    p95_ms: float
    max_ms: float

    @property
    def within_budget(self):
        return self.n > 0 and self.mean_ms < DECISION_BUDGET_MS


def latency_stats(samples_ms):
    samples = np.asarray(samples_ms, dtype=float)
    if samples.size == 0:
        return LatencyStats(n=0, mean_ms=float("nan"), p95_ms=float("nan"), max_ms=float("nan"))
    return LatencyStats(
        n=int(samples.size),
        mean_ms=float(samples.mean()),
        p95_ms=float(np.percentile(samples, 95)),
        max_ms=float(samples.max()),
    )


def measure_decision_latency(ensemble, trials, world=None, seed=config.RANDOM_STATE, warmup=10):
    """
    Time `trials` single-agent decisions on a fully connected scenario,
    cycling over the CV slots. trials = 0 gives empty statistics.
    """
    if trials <= 0:
        return latency_stats([])
    if world is None:
        n_real = min(ensemble.M, max(config.SWEEP_DENSITIES))
        world = build_world(generate_scenario(n_real, 1.0, seed=seed), ensemble.M)
    slots = [i for i, veh in enumerate(world.non_emvs) if veh.kind == VehicleKind.CV] or [0]
    h, c = PolicyNetwork.initial_carry(1)

    def decide(i):
        obs = local_observation(world, i).reshape(-1)
        _, probs, _ = ensemble[i].actor.forward(obs, (h, c), record=False)
        return int(np.argmax(probs[0]))

    for k in range(warmup):
        decide(slots[k % len(slots)])

    samples = []
    for k in range(trials):
        i = slots[k % len(slots)]
        started = time.perf_counter()
        decide(i)
        samples.append((time.perf_counter() - started) * 1000.0)
    return latency_stats(samples)
