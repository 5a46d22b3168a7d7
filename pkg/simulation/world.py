# simulation/world.py
"""
World state of the two-lane segment and its stochastic one-step transition
"""
import copy
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional

import numpy as np

from errors import ContractViolation
from simulation.dynamics import (
    NO_LEADER_GAP,
    braking_deceleration,
    hv_action,
    idm_acceleration,
    lane_change_probability,
    lane_change_sample,
    yielding_update,
)
from simulation.params import BehaviorParams, IdmParams, RoadConfig
from simulation.vehicles import NEIGHBOR_LANE, PASSING_LANE, Vehicle, VehicleKind

EMV_INDEX = -1

# smallest gap handed to the IDM once vehicles already overlap
GAP_FLOOR = 1e-2


class DoneCause(Enum):
    NONE = "none"
    CLEARED = "cleared"
    TIMEOUT = "timeout"
    COLLISION = "collision"


@dataclass
class StepEvents:
    collisions: list
    done: bool
    cause: DoneCause
    actions: tuple
    merged: tuple = ()


@dataclass
class WorldState:
    emv: Vehicle
    non_emvs: List[Vehicle]
    rng: np.random.Generator
    road: RoadConfig = field(default_factory=RoadConfig)
    idm: IdmParams = field(default_factory=IdmParams)
    behavior: BehaviorParams = field(default_factory=BehaviorParams)
    step: int = 0

    @property
    def M(self):
        return len(self.non_emvs)

    def vehicle(self, index):
        return self.emv if index == EMV_INDEX else self.non_emvs[index]

    def real_indices(self):
        return [i for i, veh in enumerate(self.non_emvs) if veh.is_real]

    def copy(self):
        """Copy of every vehicle row; the generator is shared, not duplicated"""
        return replace(self, emv=self.emv.copy(), non_emvs=[veh.copy() for veh in self.non_emvs])


def with_kinds(world, kinds):
    """Independent copy of world with non-EMV kinds relabelled (TRIVIAL rows stay TRIVIAL)"""
    if len(kinds) != world.M:
        raise ContractViolation(f"with_kinds: expected {world.M} kinds, got {len(kinds)}")
    relabelled = replace(world, emv=world.emv.copy(), non_emvs=[veh.copy() for veh in world.non_emvs],
                         rng=copy.deepcopy(world.rng))
    for veh, kind in zip(relabelled.non_emvs, kinds):
        if veh.is_real:
            if VehicleKind(kind) not in (VehicleKind.CV, VehicleKind.HV):
                raise ContractViolation(f"real vehicles must be CV or HV, got {kind}")
            veh.kind = VehicleKind(kind)
    return relabelled


def _order_key(index, veh):
    return (veh.x, index)


def lane_order(world, lane):
    """(index, vehicle) pairs on a lane sorted upstream to downstream; the EMV counts on lane 0"""
    members = [(i, veh) for i, veh in enumerate(world.non_emvs) if veh.is_real and veh.y == lane]
    if lane == PASSING_LANE:
        members.append((EMV_INDEX, world.emv))
    members.sort(key=lambda item: _order_key(*item))
    return members


def _neighbors_on_lane(world, index, lane, include_emv):
    ego_key = _order_key(index, world.vehicle(index))
    leader = follower = None
    for j, veh in lane_order(world, lane):
        if j == index or (j == EMV_INDEX and not include_emv):
            continue
        key = _order_key(j, veh)
        if key > ego_key:
            if leader is None or key < _order_key(*leader):
                leader = (j, veh)
        elif follower is None or key > _order_key(*follower):
            follower = (j, veh)
    return leader, follower


def find_leader(world, index):
    """Nearest vehicle ahead on the ego's lane as (index, vehicle), or None"""
    ego = world.vehicle(index)
    leader, _ = _neighbors_on_lane(world, index, ego.y, include_emv=True)
    return leader


def nearest_neighbors(world, index):
    """
    Nearest non-EMV neighbours of a non-EMV: same-lane leader/follower and
    neighbour-lane leader/follower, each (index, vehicle) or None
    """
    ego = world.non_emvs[index]
    other = NEIGHBOR_LANE if ego.y == PASSING_LANE else PASSING_LANE
    leader, follower = _neighbors_on_lane(world, index, ego.y, include_emv=False)
    side_leader, side_follower = _neighbors_on_lane(world, index, other, include_emv=False)
    return leader, follower, side_leader, side_follower


def collision_pairs(world):
    """Consecutive same-lane (follower, leader) pairs closer than the safety gap d"""
    pairs = []
    d = world.road.d
    for lane in (PASSING_LANE, NEIGHBOR_LANE):
        ordered = lane_order(world, lane)
        for (i, follower), (j, leader) in zip(ordered, ordered[1:]):
            if leader.x - leader.length - follower.x < d:
                pairs.append((i, j))
    return pairs


def episode_done(world):
    """(done, cause) from the EMV clearing the segment or the step cap"""
    if world.emv.x - world.emv.length >= world.road.L:
        return True, DoneCause.CLEARED
    if world.step >= world.road.max_steps:
        return True, DoneCause.TIMEOUT
    return False, DoneCause.NONE


def _idm_for(world, index, idm):
    ego = world.vehicle(index)
    leader = find_leader(world, index)
    if leader is None:
        gap, leader_v = NO_LEADER_GAP, ego.v
    else:
        _, lead = leader
        gap, leader_v = max(lead.x - lead.length - ego.x, GAP_FLOOR), lead.v
    return idm_acceleration(ego.v, leader_v, gap, idm, world.road.d)


def _integrate(veh, u, dt, vmax):
    # second-order position update with 0 <= v <= vmax
    v_next = veh.v + u * dt
    if v_next < 0.0:
        u = -veh.v / dt
        v_next = 0.0
    elif v_next > vmax:
        u = (vmax - veh.v) / dt
        v_next = vmax
    return veh.x + veh.v * dt + 0.5 * u * dt * dt, v_next


def _merge_fits(world, index):
    """True when vehicle index, placed on the neighbour lane, keeps at least d to its new leader and follower"""
    ego = world.non_emvs[index]
    d = world.road.d
    lane = [veh for j, veh in lane_order(world, NEIGHBOR_LANE) if j != index]
    ahead = [veh for veh in lane if veh.x >= ego.x]
    behind = [veh for veh in lane if veh.x < ego.x]
    if ahead and ahead[0].x - ahead[0].length - ego.x < d:
        return False
    if behind and ego.x - ego.length - behind[-1].x < d:
        return False
    return True


def _resolve_actions(world, joint_action):
    actions = []
    for i, veh in enumerate(world.non_emvs):
        if veh.kind == VehicleKind.HV:
            actions.append(hv_action(veh, world.emv, world.road.L_HV))
        elif veh.kind == VehicleKind.CV:
            a = int(joint_action[i])
            if a not in (0, 1):
                raise ContractViolation(f"action for vehicle {i} must be 0 or 1, got {joint_action[i]}")
            actions.append(a)
        else:
            actions.append(0)
    return actions


def step(world, joint_action, rng=None):
    """
    Advance the world by one step under the joint action.

    All vehicles read the state at t and write the state at t + 1. HV actions
    are replaced by the distance rule, TRIVIAL actions ignored. Returns the
    new world and the step events (collisions, done flag, cause).
    """
    if len(joint_action) != world.M:
        raise ContractViolation(f"joint action has length {len(joint_action)}, expected {world.M}")
    rng = world.rng if rng is None else rng
    road, idm, behavior = world.road, world.idm, world.behavior
    dt = road.dt
    lane_change_probability(dt, behavior)

    actions = _resolve_actions(world, joint_action)
    nxt = world.copy()

    # pull-over attempts, sampled on the pre-step reaction counters
    merged = []
    for i in world.real_indices():
        src = world.non_emvs[i]
        if src.xi == 1 and src.y == PASSING_LANE:
            if lane_change_sample(nxt.non_emvs[i], dt, behavior, rng) == 1:
                merged.append(i)

    # the nearest neighbour-lane follower of each merging vehicle brakes for it
    for m in merged:
        side_follower = nearest_neighbors(world, m)[3]
        if side_follower is not None:
            nxt.non_emvs[side_follower[0]].cooperating_with = m

    for i in world.real_indices():
        src, dst = world.non_emvs[i], nxt.non_emvs[i]
        if src.xi == 1 and src.y == PASSING_LANE:
            u = -braking_deceleration(dst, behavior, rng, dt)
        else:
            u = _idm_for(world, i, idm)
            if dst.cooperating_with is not None:
                u = min(u, -idm.b0)
        dst.x, dst.v = _integrate(src, u, dt, road.vmax_nonemv)
        dst.xi = yielding_update(src.xi, actions[i])
        if dst.xi == 1 and src.xi == 0:
            dst.yield_issued_step = world.step

    emv_idm = replace(idm, v_star=road.vmax_emv)
    nxt.emv.x, nxt.emv.v = _integrate(world.emv, _idm_for(world, EMV_INDEX, emv_idm), dt, road.vmax_emv)

    # a pull-over lands only into a gap of at least d; otherwise it is retried next step
    landed = []
    for m in merged:
        if _merge_fits(nxt, m):
            nxt.non_emvs[m].y = NEIGHBOR_LANE
            landed.append(m)
    merged = landed
    for veh in nxt.non_emvs:
        if veh.cooperating_with is not None and nxt.non_emvs[veh.cooperating_with].x > veh.x:
            veh.cooperating_with = None

    nxt.step = world.step + 1

    collisions = collision_pairs(nxt)
    done, cause = episode_done(nxt)
    if collisions:
        done, cause = True, DoneCause.COLLISION
    return nxt, StepEvents(collisions=collisions, done=done, cause=cause,
                           actions=tuple(actions), merged=tuple(merged))
