# evaluation/oracle.py
"""
Exhaustive search for the fastest EMV clearance on small deterministic instances.

Because yielding is absorbing, a CV's whole action sequence reduces to the
step at which it first yields (or never). Every combination of those start
steps is simulated and the smallest clearing step count is kept.
"""
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import ContractViolation
from scenarios.generator import build_world
from simulation.vehicles import VehicleKind
from simulation.world import DoneCause, step

NEVER = None


@dataclass(frozen=True)
class ClearingOptimum:
    steps: Optional[int]        # None when no schedule clears without collision
    schedule: tuple             # per-CV first yield step (None = never yields)
    cv_slots: tuple
    evaluated: int


def simulate_schedule(world, cv_slots, schedule, step_limit=None):
    """
    Roll a world where CV slot cv_slots[k] yields first at step schedule[k].
    Returns the clearing step count, or None on collision, timeout or when
    step_limit is exceeded.
    """
    while True:
        if step_limit is not None and world.step >= step_limit:
            return None
        actions = np.zeros(world.M, dtype=int)
        for slot, start in zip(cv_slots, schedule):
            if start is not NEVER and world.step >= start:
                actions[slot] = 1
        world, events = step(world, actions)
        if events.done:
            return world.step if events.cause == DoneCause.CLEARED else None


def optimal_clearing_steps(spec, M=None, idm=None, behavior=None, max_combinations=200_000):
    """
    Minimal clearing step count over every per-CV yield start step. The
    instance should be deterministic (zero noise, p = 1) for the result to
    be the optimum of the policy's problem rather than of one noise draw.
    """
    M = M or max(spec.n_real, 1)
    base = build_world(spec, M, idm, behavior)
    cv_slots = tuple(i for i, veh in enumerate(base.non_emvs) if veh.kind == VehicleKind.CV)
    choices = [NEVER, *range(base.road.max_steps)]
    total = len(choices) ** len(cv_slots)
    if total > max_combinations:
        raise ContractViolation(
            f"{len(cv_slots)} CVs over {base.road.max_steps} steps gives {total} schedules "
            f"(limit {max_combinations})"
        )

    best_steps, best_schedule, evaluated = None, (), 0
    for schedule in itertools.product(choices, repeat=len(cv_slots)):
        # each run builds its own world so every schedule sees the same random stream
        world = build_world(spec, M, idm, behavior)
        steps = simulate_schedule(world, cv_slots, schedule, best_steps)
        evaluated += 1
        if steps is not None and (best_steps is None or steps < best_steps):
            best_steps, best_schedule = steps, schedule
    return ClearingOptimum(steps=best_steps, schedule=best_schedule, cv_slots=cv_slots, evaluated=evaluated)
