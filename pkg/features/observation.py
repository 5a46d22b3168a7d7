# features/observation.py
"""
Feature pipeline for the learning agents.

Every vehicle row is encoded as 7 bounded features
(x/L, y, v/vmax_emv, xi, l/10, b*/5, kind/3); TRIVIAL rows are all zeros.
Local observations stack 6 rows: EMV, ego, same-lane leader/follower,
neighbour-lane leader/follower.
"""
import numpy as np

from errors import ContractViolation
from simulation.vehicles import VehicleKind
from simulation.world import nearest_neighbors

N_FEATURES = 7
N_OBS_ROWS = 6
OBS_SIZE = N_FEATURES * N_OBS_ROWS

LENGTH_SCALE = 10.0
DECEL_SCALE = 5.0
KIND_SCALE = float(VehicleKind.EMV)

TRIVIAL_ROW = np.zeros(N_FEATURES)


def encode_row(vehicle, road):
    """Normalized 7-feature row of one vehicle"""
    if vehicle is None or vehicle.kind == VehicleKind.TRIVIAL:
        return TRIVIAL_ROW.copy()
    return np.array([
        vehicle.x / road.L,
        float(vehicle.y),
        vehicle.v / road.vmax_emv,
        float(vehicle.xi),
        vehicle.length / LENGTH_SCALE,
        vehicle.b_star / DECEL_SCALE,
        float(vehicle.kind) / KIND_SCALE,
    ])


def emv_row(world):
    return encode_row(world.emv, world.road)


def local_observation(world, i):
    """6x7 observation matrix of non-EMV i"""
    if not 0 <= i < world.M:
        raise ContractViolation(f"observation index {i} out of range for M = {world.M}")

    ego = world.non_emvs[i]
    rows = np.zeros((N_OBS_ROWS, N_FEATURES))
    rows[0] = emv_row(world)
    if not ego.is_real:
        return rows

    rows[1] = encode_row(ego, world.road)
    for r, neighbor in enumerate(nearest_neighbors(world, i), start=2):
        if neighbor is not None:
            rows[r] = encode_row(neighbor[1], world.road)
    return rows


def all_observations(world):
    """Flattened observations of every slot, shape (M, 42)"""
    return np.stack([local_observation(world, i).reshape(-1) for i in range(world.M)])


def joint_state(world):
    """Concatenated non-EMV rows, length 7*M"""
    return np.concatenate([encode_row(veh, world.road) for veh in world.non_emvs])


def critic_state(world):
    """Critic state input: the joint state followed by the EMV row, length 7*M + 7"""
    return np.concatenate([joint_state(world), emv_row(world)])
