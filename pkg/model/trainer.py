# model/trainer.py
"""
Multi-agent actor-critic training with centralized critics and
decentralized actors.

Every step, each non-trivial slot draws its own minibatch and updates its
critic; CV slots also update their actor through a soft Gumbel-softmax
sample. HV slots act by the distance rule and never update an actor.
"""
import os
import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tqdm import tqdm

import config
from errors import ConfigurationError, ContractViolation
from features.observation import all_observations, critic_state
from model.ensemble import AgentEnsemble
from model.gumbel import gumbel_softmax, gumbel_softmax_backward, gumbel_softmax_sample, sample_gumbel
from model.networks import PolicyNetwork
from model.optim import soft_update
from model.replay import ReplayBuffer, Transition
from scenarios.generator import build_world
from simulation.dynamics import hv_action
from simulation.reward import RewardConfig, team_reward
from simulation.vehicles import VehicleKind
from simulation.world import DoneCause, step

YIELD = 1

EPISODE_LOG_COLUMNS = [
    "episode", "return", "steps", "eps", "collision", "passing_time",
    "cause", "n_real", "penetration", "seconds",
]


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = config.DISCOUNT
    lr_actor: float = config.ACTOR_LR
    lr_critic: float = config.CRITIC_LR
    minibatch: int = config.MINIBATCH_SIZE
    tau: float = config.SOFT_UPDATE_TAU
    eps0: float = config.INITIAL_EPSILON
    eps_decay: float = config.EPSILON_DECAY
    eps_floor: float = config.EPSILON_FLOOR
    M: int = config.AGENT_SLOTS
    episodes: int = config.TRAIN_EPISODES
    gumbel_temperature: float = config.GUMBEL_TEMPERATURE
    replay_capacity: int = config.REPLAY_CAPACITY
    densities: list = field(default_factory=lambda: list(config.TRAIN_DENSITIES))
    log_every: int = 100
    checkpoint_every: int = 500
    seed: int = config.RANDOM_STATE

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ConfigurationError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not (self.lr_actor > 0 and self.lr_critic > 0):
            raise ConfigurationError("learning rates must be positive")
        if not 0 < self.tau <= 1:
            raise ConfigurationError(f"tau must lie in (0, 1], got {self.tau}")
        for name in ("eps0", "eps_floor"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigurationError(f"{name} must lie in [0, 1]")
        if self.eps_decay < 0:
            raise ConfigurationError("eps_decay must be non-negative")
        if self.minibatch < 1 or self.replay_capacity < self.minibatch:
            raise ConfigurationError("need 1 <= minibatch <= replay_capacity")
        if self.M < 1 or self.episodes < 0:
            raise ConfigurationError("M must be positive and episodes non-negative")
        if not self.gumbel_temperature > 0:
            raise ConfigurationError("gumbel_temperature must be positive")


def epsilon_at(cfg, episode):
    """Additive per-episode decay down to the floor"""
    return max(cfg.eps0 - cfg.eps_decay * episode, cfg.eps_floor)


def fixed_rule_actions(kinds, positions, emv_x, L_HV):
    """
    Actions of the non-learning slots: HVs yield once the EMV is within
    L_HV, TRIVIAL and CV slots get 0. Works on (B, M) arrays.
    """
    kinds = np.asarray(kinds)
    gap = np.asarray(positions) - np.asarray(emv_x)[..., None]
    hv_yields = (kinds == VehicleKind.HV) & (gap < L_HV)
    return hv_yields.astype(float)


def select_actions(ensemble, world, carries, eps, rng, temperature=config.GUMBEL_TEMPERATURE,
                   greedy=False, observations=None):
    """
    Joint action for the current world.

    CVs: uniform random action with probability eps, otherwise a hard
    Gumbel-softmax sample of their actor (argmax of the actor when greedy).
    HVs follow the distance rule; TRIVIAL slots take 0. Each CV actor reads
    only its own observation and recurrent state.
    """
    obs = all_observations(world) if observations is None else observations
    h, c = carries
    next_h, next_c = h.copy(), c.copy()
    actions = np.zeros(world.M, dtype=int)
    for i, veh in enumerate(world.non_emvs):
        if veh.kind == VehicleKind.HV:
            actions[i] = hv_action(veh, world.emv, world.road.L_HV)
        elif veh.kind == VehicleKind.CV:
            actor = ensemble[i].actor
            logits, probs, (hi, ci) = actor.forward(obs[i], (h[i:i + 1], c[i:i + 1]), record=False)
            next_h[i], next_c[i] = hi[0], ci[0]
            if greedy:
                actions[i] = int(np.argmax(probs[0]))
                continue
            explore = rng.random() < eps
            random_action = int(rng.integers(2))
            sample = gumbel_softmax(logits[0], temperature, rng, hard=True)
            actions[i] = random_action if explore else int(np.argmax(sample))
    return actions, (next_h, next_c)


def td_target(ensemble, batch, i, gamma, L_HV=config.HV_REACTION_DISTANCE):
    """
    y = R + gamma * Q'_i(s', a') with a' from every CV slot's target actor
    (greedy), the HV rule for HV slots and 0 for TRIVIAL slots; y = R when done.
    """
    next_actions = fixed_rule_actions(batch.kinds, batch.next_positions, batch.next_emv_x,
                                      L_HV)
    for j in range(ensemble.M):
        rows = np.flatnonzero(batch.kinds[:, j] == VehicleKind.CV)
        if rows.size == 0:
            continue
        _, probs, _ = ensemble[j].target_actor.forward(
            batch.next_observations[rows, j],
            (batch.next_carry_h[rows, j], batch.next_carry_c[rows, j]),
            record=False,
        )
        next_actions[rows, j] = np.argmax(probs, axis=1)
    q_next = ensemble[i].target_critic.forward(batch.next_state, next_actions, record=False)
    return batch.reward + gamma * (1.0 - batch.done.astype(float)) * q_next


def critic_update(ensemble, batch, i, cfg, L_HV=config.HV_REACTION_DISTANCE):
    """One Adam step on 0.5 * mean((Q_i - y)^2); returns the pre-step loss"""
    if ensemble.kinds[i] == VehicleKind.TRIVIAL:
        raise ContractViolation(f"critic update requested for TRIVIAL slot {i}")
    agent = ensemble[i]
    y = td_target(ensemble, batch, i, cfg.gamma, L_HV)
    q = agent.critic.forward(batch.state, batch.actions)
    diff = q - y
    loss = 0.5 * float(np.mean(diff ** 2))
    grads, _, _ = agent.critic.backward(diff / len(batch))
    agent.critic_opt.step(agent.critic.params, grads)
    return loss


def actor_objective_gradient(ensemble, batch, i, temperature, noise):
    """
    Mean centralized Q with slot i's action replaced by a soft Gumbel-softmax
    sample of its actor, and the gradient of that mean w.r.t. the actor.

    Only rows in which slot i held a CV enter the mean; returns None when
    the batch has no such row.
    """
    rows = np.flatnonzero(batch.kinds[:, i] == VehicleKind.CV)
    if rows.size == 0:
        return None
    agent = ensemble[i]
    logits, _, _ = agent.actor.forward(batch.observations[rows, i], (batch.carry_h[rows, i], batch.carry_c[rows, i]))
    _, soft = gumbel_softmax_sample(logits, temperature, noise=noise[rows])

    actions = batch.actions[rows].astype(float)
    actions[:, i] = soft[:, YIELD]
    q = agent.critic.forward(batch.state[rows], actions)
    B = rows.size
    _, _, d_action = agent.critic.backward(np.full(B, 1.0 / B))

    dsoft = np.zeros_like(soft)
    dsoft[:, YIELD] = d_action[:, i]
    grads, _ = agent.actor.backward(gumbel_softmax_backward(dsoft, soft, temperature))
    return float(np.mean(q)), grads


def actor_update(ensemble, batch, i, cfg, rng=None, noise=None):
    """One Adam ascent step on slot i's actor; returns the pre-step mean Q, or None if skipped"""
    if ensemble.kinds[i] != VehicleKind.CV:
        raise ContractViolation(f"actor update requested for {ensemble.kinds[i].name} slot {i}")
    if noise is None:
        if rng is None:
            raise ContractViolation("actor_update needs an rng or frozen noise")
        noise = sample_gumbel(rng, (len(batch), 2))
    result = actor_objective_gradient(ensemble, batch, i, cfg.gumbel_temperature, noise)
    if result is None:
        return None
    objective, grads = result
    agent = ensemble[i]
    agent.actor_opt.step(agent.actor.params, {k: -g for k, g in grads.items()})
    return objective


def update_agents(ensemble, buffer, cfg, rng, L_HV=config.HV_REACTION_DISTANCE):
    """Per-slot minibatch updates, then target tracking"""
    losses = []
    actors_moved = set()
    for i, kind in enumerate(ensemble.kinds):
        if kind == VehicleKind.TRIVIAL:
            continue
        batch = buffer.sample(cfg.minibatch, rng)
        losses.append(critic_update(ensemble, batch, i, cfg, L_HV))
        if kind == VehicleKind.CV and actor_update(ensemble, batch, i, cfg, rng) is not None:
            actors_moved.add(i)

    # only networks that moved track their targets
    for i, kind in enumerate(ensemble.kinds):
        agent = ensemble[i]
        if kind != VehicleKind.TRIVIAL:
            soft_update(agent.target_critic.params, agent.critic.params, cfg.tau)
        if i in actors_moved:
            soft_update(agent.target_actor.params, agent.actor.params, cfg.tau)
    ensemble.train_step += 1
    return losses


def moving_average(returns, window):
    """Trailing moving average used for training curves"""
    return pd.Series(returns, dtype=float).rolling(window=window, min_periods=1).mean()


def _scenario_for(scenarios, episode, rng):
    if callable(scenarios):
        return scenarios(episode)
    if len(scenarios) == 0:
        raise ConfigurationError("training needs at least one scenario")
    return scenarios[int(rng.integers(len(scenarios)))]


def run_training_episode(ensemble, world, buffer, cfg, eps, rng, reward_cfg):
    """Roll one episode, storing transitions and updating after every step"""
    ensemble.assign_kinds([veh.kind for veh in world.non_emvs])
    kinds = np.array([int(veh.kind) for veh in world.non_emvs])
    carries = PolicyNetwork.initial_carry(world.M)
    obs, state = all_observations(world), critic_state(world)
    total = 0.0

    while True:
        actions, next_carries = select_actions(ensemble, world, carries, eps, rng,
                                               cfg.gumbel_temperature, observations=obs)
        next_world, events = step(world, actions)
        reward = team_reward(next_world, reward_cfg)
        next_obs, next_state = all_observations(next_world), critic_state(next_world)

        buffer.add(Transition(
            state=state, observations=obs,
            actions=np.asarray(events.actions, dtype=float), reward=reward,
            next_state=next_state, next_observations=next_obs,
            done=events.done, carry_h=carries[0], carry_c=carries[1],
            next_carry_h=next_carries[0], next_carry_c=next_carries[1], kinds=kinds,
            next_positions=np.array([veh.x for veh in next_world.non_emvs]),
            next_emv_x=next_world.emv.x,
        ))
        total += reward

        if len(buffer) >= cfg.minibatch:
            update_agents(ensemble, buffer, cfg, rng, world.road.L_HV)

        world, carries = next_world, next_carries
        obs, state = next_obs, next_state
        if events.done:
            return world, events, total


def train(scenarios, cfg=None, rng=None, ensemble=None, idm=None, behavior=None, reward_cfg=None,
          checkpoint_path=None, log_path=None, verbose=True):
    """
    Train an ensemble on scenarios (a list of ScenarioSpec or a callable
    episode -> ScenarioSpec). Returns (ensemble, episode log DataFrame).
    """
    cfg = cfg or TrainConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    reward_cfg = reward_cfg or RewardConfig()
    if ensemble is None:
        ensemble = AgentEnsemble(M=cfg.M, seed=cfg.seed, actor_lr=cfg.lr_actor, critic_lr=cfg.lr_critic)
    elif ensemble.M != cfg.M:
        raise ConfigurationError(f"ensemble has {ensemble.M} slots, config asks for {cfg.M}")
    buffer = ReplayBuffer(cfg.replay_capacity)

    rows = []
    if cfg.episodes == 0:
        return ensemble, pd.DataFrame(rows, columns=EPISODE_LOG_COLUMNS)

    if verbose:
        print(f"\n🤖 Training {cfg.M} agent slots for {cfg.episodes} episodes...")

    first_episode = ensemble.episodes_trained
    progress = tqdm(range(cfg.episodes), desc="Training episodes", disable=not verbose)
    for k in progress:
        episode = first_episode + k
        eps = epsilon_at(cfg, episode)
        spec = _scenario_for(scenarios, episode, rng)
        world = build_world(spec, cfg.M, idm, behavior)

        started = time.perf_counter()
        world, events, total = run_training_episode(ensemble, world, buffer, cfg, eps, rng, reward_cfg)
        cleared = events.cause == DoneCause.CLEARED
        rows.append({
            "episode": episode,
            "return": total,
            "steps": world.step,
            "eps": eps,
            "collision": events.cause == DoneCause.COLLISION,
            "passing_time": world.step * world.road.dt if cleared else np.nan,
            "cause": events.cause.value,
            "n_real": spec.n_real,
            "penetration": spec.penetration,
            "seconds": time.perf_counter() - started,
        })
        ensemble.episodes_trained += 1

        if verbose and (k + 1) % cfg.log_every == 0:
            recent = rows[-cfg.log_every:]
            avg_return = np.mean([r["return"] for r in recent])
            collision_rate = np.mean([r["collision"] for r in recent])
            progress.write(f"  episode {episode + 1}: avg return {avg_return:.2f}, "
                           f"eps {eps:.3f}, collision rate {collision_rate:.2%}")
        if checkpoint_path and (k + 1) % cfg.checkpoint_every == 0:
            ensemble.save_model(checkpoint_path, verbose=verbose)

    log = pd.DataFrame(rows, columns=EPISODE_LOG_COLUMNS)
    if checkpoint_path:
        ensemble.save_model(checkpoint_path, verbose=verbose)
    if log_path:
        save_episode_log(log, log_path)
        if verbose:
            print(f"✓ Episode log saved to {log_path}")
    if verbose:
        print("✓ Training finished")
    return ensemble, log


def save_episode_log(log, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    log.to_csv(path, index=False)
    return path
