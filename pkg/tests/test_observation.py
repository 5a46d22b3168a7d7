"""Observation matrices and joint state vectors"""
import numpy as np
import pytest

from errors import ContractViolation
from features.observation import (
    N_FEATURES,
    OBS_SIZE,
    all_observations,
    critic_state,
    emv_row,
    encode_row,
    joint_state,
    local_observation,
)
from scenarios.generator import build_world, generate_scenario
from simulation.vehicles import NEIGHBOR_LANE, VehicleKind, trivial_vehicle
from tests.conftest import make_vehicle, make_world


class TestEncodeRow:

    def test_normalized_features(self, road):
        veh = make_vehicle(100.0, y=NEIGHBOR_LANE, v=6.0, kind=VehicleKind.CV, length=5.0, b_star=2.5, xi=1)
        row = encode_row(veh, road)
        np.testing.assert_allclose(row, [0.5, 1.0, 0.5, 1.0, 0.5, 0.5, 2.0 / 3.0])

    def test_trivial_row_is_zero(self, road):
        assert not encode_row(trivial_vehicle(), road).any()


class TestLocalObservation:

    def test_single_vehicle_has_only_emv_and_ego_rows(self):
        world = make_world([make_vehicle(80.0)], emv_x=10.0)
        obs = local_observation(world, 0)
        assert obs.shape == (6, 7)
        np.testing.assert_array_equal(obs[0], emv_row(world))
        assert obs[1].any()
        assert not obs[2:].any()

    def test_same_lane_leader_found(self, road):
        a, b = make_vehicle(50.0), make_vehicle(80.0)
        world = make_world([a, b], emv_x=0.0)
        obs = local_observation(world, 0)
        np.testing.assert_array_equal(obs[2], encode_row(b, road))
        assert not obs[3].any()

    def test_neighbor_lane_rows(self, road):
        ego = make_vehicle(100.0)
        side_ahead = make_vehicle(120.0, y=NEIGHBOR_LANE)
        side_behind = make_vehicle(70.0, y=NEIGHBOR_LANE)
        world = make_world([ego, side_ahead, side_behind])
        obs = local_observation(world, 0)
        np.testing.assert_array_equal(obs[4], encode_row(side_ahead, road))
        np.testing.assert_array_equal(obs[5], encode_row(side_behind, road))

    def test_trivial_ego_sees_only_the_emv(self):
        world = make_world([make_vehicle(80.0)], M=3, emv_x=10.0)
        obs = local_observation(world, 2)
        assert obs[0].any()
        assert not obs[1:].any()

    def test_shape_and_finiteness_in_a_busy_world(self):
        world = build_world(generate_scenario(10, 0.5, seed=1), 12)
        for i in range(world.M):
            obs = local_observation(world, i)
            assert obs.shape == (6, N_FEATURES)
            assert np.all(np.isfinite(obs))

    @pytest.mark.parametrize("index", [-1, 3])
    def test_index_out_of_range(self, index):
        world = make_world([make_vehicle(80.0)], M=3)
        with pytest.raises(ContractViolation):
            local_observation(world, index)


class TestJointVectors:

    def test_all_observations_shape(self):
        world = make_world([make_vehicle(80.0), make_vehicle(120.0)], M=5)
        assert all_observations(world).shape == (5, OBS_SIZE)

    def test_joint_state_pads_with_zero_rows(self):
        world = make_world([make_vehicle(80.0)], M=4)
        state = joint_state(world)
        assert state.shape == (4 * N_FEATURES,)
        assert state[:N_FEATURES].any()
        assert not state[N_FEATURES:].any()

    def test_critic_state_ends_with_the_emv_row(self):
        world = make_world([make_vehicle(80.0)], M=4, emv_x=30.0, emv_v=9.0)
        state = critic_state(world)
        assert state.shape == (5 * N_FEATURES,)
        np.testing.assert_array_equal(state[:4 * N_FEATURES], joint_state(world))
        np.testing.assert_array_equal(state[4 * N_FEATURES:], emv_row(world))
        assert state[4 * N_FEATURES] == pytest.approx(30.0 / world.road.L)
