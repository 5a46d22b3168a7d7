# simulation/reward.py
"""
Team reward: collision penalty + elapsed-step penalty + priority penalty
"""
from dataclasses import dataclass

import config
from errors import ConfigurationError
from simulation.vehicles import PASSING_LANE
from simulation.world import collision_pairs


@dataclass(frozen=True)
class RewardConfig:
    p_collision: float = config.COLLISION_PENALTY
    p_priority: float = config.PRIORITY_PENALTY
    priority_epsilon: float = config.PRIORITY_EPSILON

    def __post_init__(self):
        if not self.p_collision < 0:
            raise ConfigurationError("RewardConfig.p_collision must be negative")
        if not self.p_priority > 0:
            raise ConfigurationError("RewardConfig.p_priority must be positive")
        if not self.priority_epsilon > 0:
            raise ConfigurationError("RewardConfig.priority_epsilon must be positive")


def reward_collision(world, cfg):
    # one penalty per step, however many pairs
    return cfg.p_collision if collision_pairs(world) else 0.0


def reward_elapsed(world):
    emv = world.emv
    return -1.0 if emv.x - emv.length < world.road.L else 0.0


def reward_priority(world, cfg):
    """Penalty for passing-lane vehicles downstream of the EMV, heavier when closer"""
    emv_x = world.emv.x
    total = 0.0
    for veh in world.non_emvs:
        if not veh.is_real or veh.y != PASSING_LANE:
            continue
        if emv_x < veh.x <= world.road.L:
            total -= cfg.p_priority / max(veh.x - emv_x, cfg.priority_epsilon)
    return total


def team_reward(world, cfg):
    """The single scalar every agent receives at this step"""
    return reward_collision(world, cfg) + reward_elapsed(world) + reward_priority(world, cfg)
