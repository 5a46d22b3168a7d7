"""Shared builders for hand-made worlds"""
import numpy as np
import pytest

from simulation.params import BehaviorParams, IdmParams, RoadConfig
from simulation.vehicles import PASSING_LANE, Vehicle, VehicleKind, trivial_vehicle
from simulation.world import WorldState


def make_vehicle(x, y=PASSING_LANE, v=4.5, kind=VehicleKind.HV, length=4.5, b_star=2.0, xi=0,
                 reaction_steps_left=0):
    return Vehicle(x=float(x), y=y, v=float(v), xi=xi, length=length, b_star=b_star, kind=kind,
                   reaction_steps_left=reaction_steps_left)


def make_world(vehicles, M=None, emv_x=0.0, emv_v=8.0, road=None, idm=None, behavior=None, seed=0):
    """World with the given real vehicles, padded with TRIVIAL rows up to M"""
    M = M or max(len(vehicles), 1)
    non_emvs = list(vehicles) + [trivial_vehicle() for _ in range(M - len(vehicles))]
    road = road or RoadConfig()
    emv = Vehicle(x=float(emv_x), y=PASSING_LANE, v=float(emv_v), xi=0, length=road.emv_length,
                  b_star=2.0, kind=VehicleKind.EMV)
    return WorldState(emv=emv, non_emvs=non_emvs, rng=np.random.default_rng(seed), road=road,
                      idm=idm or IdmParams(), behavior=behavior or BehaviorParams())


@pytest.fixture
def road():
    return RoadConfig()


@pytest.fixture
def idm():
    return IdmParams()


@pytest.fixture
def quiet_behavior(road):
    """No reaction delay, no braking noise, pull-over completes in one step"""
    return BehaviorParams(tr_mean=0.5, tr_std=0.0, decel_noise_std=0.0, t_lc=road.dt)
