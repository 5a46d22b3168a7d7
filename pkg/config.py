# config.py
"""
Configuration file for the DQJL coordination project
Defaults for the road, IDM, vehicle features, reward and training.
Override any of them with a versioned JSON file (see load_config).
"""
import json
import os
from dataclasses import asdict, dataclass, fields

from errors import ConfigurationError, FormatVersionError

CONFIG_VERSION = 1

# Road environment
STEP_LENGTH = 0.5            # s
SEGMENT_LENGTH = 200.0       # m
MIN_SAFETY_GAP = 0.5         # m
HV_REACTION_DISTANCE = 75.0  # m
NON_EMV_START_SPEED = 4.5    # m/s
EMV_START_SPEED = 8.0        # m/s
EMV_MAX_SPEED = 12.0         # m/s
NON_EMV_MAX_SPEED = 11.0     # m/s
EMV_LENGTH = 4.5             # m
MAX_STEPS = 240              # 120 s simulated

# IDM (magnitudes, signs applied in the formulas)
IDM_ACCELERATION = 3.0       # u0, m/s^2
IDM_DECELERATION = 2.0       # b0, m/s^2
IDM_DESIRED_SPEED = 10.0     # v*, m/s
IDM_HEADWAY = 1.5            # T0, s
IDM_BRAKING_LIMIT = 9.0      # clamp on IDM deceleration, m/s^2

# Stochastic driver behaviour
REACTION_TIME_MEAN = 2.25    # s
REACTION_TIME_STD = 0.5      # s
REACTION_TIME_BOUNDS = (0.5, 4.0)
DECEL_NOISE_STD = 0.5        # m/s^2
LANE_CHANGE_TIME = 3.0       # s, p = dt / t_lc

# Randomly generated vehicle features
LENGTH_MEAN = 4.5
LENGTH_STD = 1.0
LENGTH_BOUNDS = (2.5, 8.0)
BASELINE_DECEL_MEAN = 2.0
BASELINE_DECEL_STD = 1.0
BASELINE_DECEL_BOUNDS = (0.5, 4.0)
PLACEMENT_MARGIN = 2.0       # extra clearance on top of d at t = 0
PLACEMENT_RETRIES = 1000

# Reward
PRIORITY_PENALTY = 0.5
COLLISION_PENALTY = -1000.0
PRIORITY_EPSILON = 1.0       # m

# RL training
DISCOUNT = 0.99
ACTOR_LR = 1e-4
CRITIC_LR = 1e-3
MINIBATCH_SIZE = 64
REPLAY_CAPACITY = 10000
INITIAL_EPSILON = 0.99
EPSILON_DECAY = 1e-3
EPSILON_FLOOR = 0.05
SOFT_UPDATE_TAU = 0.01
AGENT_SLOTS = 12
GUMBEL_TEMPERATURE = 1.0
TRAIN_EPISODES = 5000
TRAIN_DENSITIES = [2, 3, 4, 5, 6, 8, 10]

# Evaluation sweep
SWEEP_DENSITIES = [4, 6, 8, 10]
SWEEP_PENETRATIONS = [0.0, 0.33, 0.67, 1.0]
SWEEP_REPLICATIONS = 30
RANDOM_STATE = 42

# Paths
OUTPUT_DIR = "outputs/"
DATASET_PATH = "outputs/scenarios.jsonl"
TEST_SET_PATH = "outputs/test_scenarios.jsonl"
CHECKPOINT_PATH = "outputs/ensemble.pkl"
EPISODE_LOG_PATH = "outputs/episode_log.csv"


@dataclass
class ExperimentConfig:
    """Every tunable value of a run, grouped the way the JSON file is"""
    road: object = None
    idm: object = None
    behavior: object = None
    features: object = None
    reward: object = None
    train: object = None
    sweep: object = None
    seed: int = RANDOM_STATE


def _section_types():
    # imported lazily: the packages read their defaults from this module
    from evaluation.runner import SweepConfig
    from model.trainer import TrainConfig
    from scenarios.generator import FeatureDistributions
    from simulation.params import BehaviorParams, IdmParams, RoadConfig
    from simulation.reward import RewardConfig

    return {
        "road": RoadConfig,
        "idm": IdmParams,
        "behavior": BehaviorParams,
        "features": FeatureDistributions,
        "reward": RewardConfig,
        "train": TrainConfig,
        "sweep": SweepConfig,
    }


def _build_section(name, cls, values):
    if not isinstance(values, dict):
        raise ConfigurationError(f"section '{name}' must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigurationError(f"unknown keys in '{name}': {', '.join(unknown)}")
    kwargs = {}
    for key, value in values.items():
        # JSON has no tuples; bounds are stored as tuples
        kwargs[key] = tuple(value) if key.endswith("_bounds") else value
    return cls(**kwargs)


def default_config():
    """Configuration with every table value at its default"""
    types = _section_types()
    return ExperimentConfig(**{name: cls() for name, cls in types.items()})


def load_config(path=None):
    """
    Load a versioned JSON configuration; missing sections/keys keep defaults
    """
    if path is None:
        return default_config()

    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except FileNotFoundError as e:
        raise ConfigurationError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config file {path} is not valid JSON: {e}") from e

    if not isinstance(document, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")

    version = document.get("version")
    if version != CONFIG_VERSION:
        raise FormatVersionError(
            f"config version {version!r} in {path}, expected {CONFIG_VERSION}"
        )

    types = _section_types()
    unknown = sorted(set(document) - set(types) - {"version", "seed"})
    if unknown:
        raise ConfigurationError(f"unknown config sections: {', '.join(unknown)}")

    sections = {
        name: _build_section(name, cls, document.get(name, {}))
        for name, cls in types.items()
    }
    seed = document.get("seed", RANDOM_STATE)
    if not isinstance(seed, int):
        raise ConfigurationError("seed must be an integer")
    return ExperimentConfig(seed=seed, **sections)


def dump_config(cfg, path):
    """Write cfg in the same versioned format load_config reads"""
    document = {"version": CONFIG_VERSION, "seed": cfg.seed}
    for name in _section_types():
        document[name] = asdict(getattr(cfg, name))
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
        f.write("\n")
    return path
