# model/replay.py
"""
Experience replay: transitions of the whole team, one team reward each
"""
from dataclasses import dataclass, fields

import numpy as np

import config
from errors import ContractViolation


@dataclass
class Transition:
    state: np.ndarray              # (7M + 7,) critic state at t, EMV row last
    observations: np.ndarray       # (M, 42)
    actions: np.ndarray            # (M,) executed actions
    reward: float
    next_state: np.ndarray
    next_observations: np.ndarray
    done: bool
    carry_h: np.ndarray            # (M, 128) actor states before the step
    carry_c: np.ndarray
    next_carry_h: np.ndarray       # (M, 128) actor states after the step
    next_carry_c: np.ndarray
    kinds: np.ndarray              # (M,) kind codes
    next_positions: np.ndarray     # (M,) raw x at t + 1, for the HV rule
    next_emv_x: float


@dataclass
class TransitionBatch:
    """Field-wise stacked transitions; every array gains a leading batch axis"""
    state: np.ndarray
    observations: np.ndarray
    actions: np.ndarray
    reward: np.ndarray
    next_state: np.ndarray
    next_observations: np.ndarray
    done: np.ndarray
    carry_h: np.ndarray
    carry_c: np.ndarray
    next_carry_h: np.ndarray
    next_carry_c: np.ndarray
    kinds: np.ndarray
    next_positions: np.ndarray
    next_emv_x: np.ndarray

    @classmethod
    def stack(cls, transitions):
        return cls(**{
            f.name: np.stack([np.asarray(getattr(t, f.name)) for t in transitions])
            for f in fields(Transition)
        })

    def __len__(self):
        return len(self.reward)


class ReplayBuffer:
    """Ring buffer keeping the most recent `capacity` transitions"""

    def __init__(self, capacity=config.REPLAY_CAPACITY):
        if capacity < 1:
            raise ContractViolation(f"replay capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.storage = []
        self.cursor = 0

    def __len__(self):
        return len(self.storage)

    def __iter__(self):
        return iter(self.storage)

    def add(self, transition):
        if len(self.storage) < self.capacity:
            self.storage.append(transition)
        else:
            self.storage[self.cursor] = transition
        self.cursor = (self.cursor + 1) % self.capacity

    def sample(self, batch_size, rng):
        if len(self.storage) < batch_size:
            raise ContractViolation(
                f"cannot sample {batch_size} transitions from a buffer holding {len(self.storage)}"
            )
        idx = rng.choice(len(self.storage), size=batch_size, replace=False)
        return TransitionBatch.stack([self.storage[i] for i in idx])
