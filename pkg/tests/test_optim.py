"""Adam and soft target updates"""
import numpy as np
import pytest

from errors import ContractViolation
from model.optim import Adam, soft_update


class TestAdam:

    def test_first_step_moves_by_learning_rate(self):
        # bias correction makes the first step lr * sign(g)
        params = {"w": np.array([1.0, -2.0, 0.5])}
        Adam(0.01).step(params, {"w": np.array([3.0, -0.2, 1e-3])})
        np.testing.assert_allclose(params["w"], [0.99, -1.99, 0.49], atol=1e-6)

    def test_updates_in_place(self):
        w = np.zeros(2)
        params = {"w": w}
        Adam(0.1).step(params, {"w": np.ones(2)})
        assert params["w"] is w
        assert np.all(w < 0)

    def test_minimizes_quadratic(self):
        params = {"w": np.array([5.0, -3.0])}
        opt = Adam(0.1)
        for _ in range(500):
            opt.step(params, {"w": 2.0 * params["w"]})
        assert np.all(np.abs(params["w"]) < 0.05)

    def test_state_dict_round_trip_continues_identically(self):
        a_params = {"w": np.array([1.0, 2.0])}
        opt = Adam(0.05)
        for _ in range(3):
            opt.step(a_params, {"w": a_params["w"].copy()})
        b_params = {"w": a_params["w"].copy()}
        restored = Adam.from_state_dict(opt.state_dict())
        opt.step(a_params, {"w": np.array([0.3, -0.7])})
        restored.step(b_params, {"w": np.array([0.3, -0.7])})
        np.testing.assert_array_equal(a_params["w"], b_params["w"])

    def test_rejects_mismatched_keys(self):
        with pytest.raises(ContractViolation):
            Adam(0.1).step({"w": np.zeros(2)}, {"v": np.zeros(2)})

    def test_rejects_mismatched_shapes(self):
        with pytest.raises(ContractViolation):
            Adam(0.1).step({"w": np.zeros(2)}, {"w": np.zeros(3)})


class TestSoftUpdate:

    def test_convex_combination(self):
        target = {"w": np.array([0.0, 10.0])}
        soft_update(target, {"w": np.array([1.0, 0.0])}, 0.01)
        np.testing.assert_allclose(target["w"], [0.01, 9.9], rtol=0, atol=1e-12)

    def test_tau_one_copies(self):
        target = {"w": np.zeros(3)}
        online = {"w": np.array([1.0, 2.0, 3.0])}
        soft_update(target, online, 1.0)
        np.testing.assert_array_equal(target["w"], online["w"])
        assert target["w"] is not online["w"]

    def test_tau_zero_leaves_target(self):
        target = {"w": np.array([4.0])}
        soft_update(target, {"w": np.array([9.0])}, 0.0)
        assert target["w"][0] == 4.0

    @pytest.mark.parametrize("tau", [-0.1, 1.5])
    def test_rejects_tau_outside_unit_interval(self, tau):
        with pytest.raises(ContractViolation):
            soft_update({"w": np.zeros(1)}, {"w": np.zeros(1)}, tau)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            soft_update({"w": np.zeros(1)}, {"w": np.zeros(2)}, 0.5)
