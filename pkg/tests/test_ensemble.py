"""Agent ensemble construction and checkpoints"""
import pickle

import numpy as np
import pytest

from errors import ContractViolation, FormatVersionError
from model.ensemble import AgentEnsemble
from simulation.vehicles import VehicleKind


class TestAgentEnsemble:

    def test_no_parameter_sharing(self):
        ensemble = AgentEnsemble(M=3, seed=0)
        w = [agent.actor.params["W1"] for agent in ensemble.agents]
        assert not np.array_equal(w[0], w[1])
        assert w[0] is not w[1]

    def test_targets_start_as_copies(self):
        agent = AgentEnsemble(M=2, seed=0)[0]
        for k, v in agent.actor.params.items():
            np.testing.assert_array_equal(agent.target_actor.params[k], v)
            assert agent.target_actor.params[k] is not v

    def test_same_seed_same_weights(self):
        a, b = AgentEnsemble(M=2, seed=5), AgentEnsemble(M=2, seed=5)
        np.testing.assert_array_equal(a[1].critic.params["W1"], b[1].critic.params["W1"])

    def test_rejects_empty_ensemble(self):
        with pytest.raises(ContractViolation):
            AgentEnsemble(M=0)

    def test_assign_kinds_checks_length(self):
        ensemble = AgentEnsemble(M=2, seed=0)
        ensemble.assign_kinds([VehicleKind.CV, VehicleKind.TRIVIAL])
        assert ensemble.kinds == [VehicleKind.CV, VehicleKind.TRIVIAL]
        with pytest.raises(ContractViolation):
            ensemble.assign_kinds([VehicleKind.CV])


class TestCheckpoint:

    def test_round_trip(self, tmp_path):
        ensemble = AgentEnsemble(M=2, seed=1)
        ensemble.train_step = 17
        ensemble.episodes_trained = 3
        params = ensemble[0].actor.params
        ensemble[0].actor_opt.step(params, {k: np.ones_like(v) for k, v in params.items()})
        path = tmp_path / "ckpt" / "ensemble.pkl"
        ensemble.save_model(str(path), verbose=False)

        loaded = AgentEnsemble.load_model(str(path), verbose=False)
        assert loaded.M == 2
        assert (loaded.train_step, loaded.episodes_trained) == (17, 3)
        for a, b in zip(ensemble.agents, loaded.agents):
            for net in ("actor", "critic", "target_actor", "target_critic"):
                for k, v in getattr(a, net).params.items():
                    np.testing.assert_array_equal(getattr(b, net).params[k], v)
        assert loaded[0].actor_opt.t == 1

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "old.pkl"
        with open(path, "wb") as f:
            pickle.dump({"version": 0, "M": 1}, f)
        with pytest.raises(FormatVersionError):
            AgentEnsemble.load_model(str(path), verbose=False)
