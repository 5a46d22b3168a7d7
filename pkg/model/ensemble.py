# model/ensemble.py
"""
M actor/critic pairs with delayed target copies, one pair per vehicle slot.
No parameter sharing between slots.
"""
import os
import pickle

import numpy as np

import config
from errors import ContractViolation, FormatVersionError
from model.networks import PolicyNetwork, ValueNetwork
from model.optim import Adam
from simulation.vehicles import VehicleKind

CHECKPOINT_VERSION = 2


class Agent:
    """Actor, critic, their target copies and optimizers for one slot"""

    def __init__(self, M, rng, actor_lr=config.ACTOR_LR, critic_lr=config.CRITIC_LR):
        self.actor = PolicyNetwork(rng)
        self.critic = ValueNetwork(M, rng)
        self.target_actor = self.actor.copy()
        self.target_critic = self.critic.copy()
        self.actor_opt = Adam(actor_lr)
        self.critic_opt = Adam(critic_lr)


class AgentEnsemble:
    def __init__(self, M=config.AGENT_SLOTS, seed=config.RANDOM_STATE,
                 actor_lr=config.ACTOR_LR, critic_lr=config.CRITIC_LR):
        if M < 1:
            raise ContractViolation(f"ensemble needs at least one slot, got M = {M}")
        self.M = M
        rng = np.random.default_rng(seed)
        self.agents = [Agent(M, rng, actor_lr, critic_lr) for _ in range(M)]
        # slot kinds of the episode currently being trained on
        self.kinds = [VehicleKind.TRIVIAL] * M
        self.train_step = 0
        self.episodes_trained = 0

    def __len__(self):
        return self.M

    def __getitem__(self, i):
        return self.agents[i]

    def assign_kinds(self, kinds):
        if len(kinds) != self.M:
            raise ContractViolation(f"expected {self.M} slot kinds, got {len(kinds)}")
        self.kinds = [VehicleKind(k) for k in kinds]

    def save_model(self, filepath, verbose=True):
        """
        Save every parameter set, target copy and optimizer state
        """
        directory = os.path.dirname(filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)

        model_data = {
            "version": CHECKPOINT_VERSION,
            "M": self.M,
            "train_step": self.train_step,
            "episodes_trained": self.episodes_trained,
            "agents": [
                {
                    "actor": agent.actor.params,
                    "critic": agent.critic.params,
                    "target_actor": agent.target_actor.params,
                    "target_critic": agent.target_critic.params,
                    "actor_opt": agent.actor_opt.state_dict(),
                    "critic_opt": agent.critic_opt.state_dict(),
                }
                for agent in self.agents
            ],
        }

        with open(filepath, "wb") as f:
            pickle.dump(model_data, f)

        if verbose:
            print(f"✓ Model saved to {filepath}")

    @classmethod
    def load_model(cls, filepath, verbose=True):
        """
        Load an ensemble written by save_model
        """
        with open(filepath, "rb") as f:
            model_data = pickle.load(f)

        if not isinstance(model_data, dict) or model_data.get("version") != CHECKPOINT_VERSION:
            found = model_data.get("version") if isinstance(model_data, dict) else None
            raise FormatVersionError(
                f"checkpoint version {found!r} in {filepath}, expected {CHECKPOINT_VERSION}"
            )

        ensemble = cls(M=model_data["M"], seed=0)
        ensemble.train_step = model_data["train_step"]
        ensemble.episodes_trained = model_data["episodes_trained"]
        for agent, saved in zip(ensemble.agents, model_data["agents"]):
            agent.actor.load_params(saved["actor"])
            agent.critic.load_params(saved["critic"])
            agent.target_actor.load_params(saved["target_actor"])
            agent.target_critic.load_params(saved["target_critic"])
            agent.actor_opt = Adam.from_state_dict(saved["actor_opt"])
            agent.critic_opt = Adam.from_state_dict(saved["critic_opt"])

        if verbose:
            print(f"✓ Model loaded from {filepath}")
        return ensemble
