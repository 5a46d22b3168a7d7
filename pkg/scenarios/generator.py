# scenarios/generator.py
"""
Randomized starting conditions and world construction.

Kinematic features (positions, lengths, braking, reaction times) and kind
labels come from two independent generator streams of the same seed, so a
scenario regenerated at another penetration rate keeps every vehicle where
it was and only changes who is connected.
"""
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import truncnorm

import config
from errors import CapacityError, ConfigurationError, ContractViolation
from simulation.params import BehaviorParams, IdmParams, RoadConfig
from simulation.vehicles import PASSING_LANE, Vehicle, VehicleKind, trivial_vehicle
from simulation.world import WorldState


def stream_rng(seed, name, *extra):
    """Generator for a named stream of a seed"""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode("utf-8")), *extra])


def derive_seed(*keys):
    """64-bit seed derived from integer keys"""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class FeatureDistributions:
    """Truncated-normal vehicle feature distributions and placement rules"""
    length_mean: float = config.LENGTH_MEAN
    length_std: float = config.LENGTH_STD
    length_bounds: tuple = config.LENGTH_BOUNDS
    b_star_mean: float = config.BASELINE_DECEL_MEAN
    b_star_std: float = config.BASELINE_DECEL_STD
    b_star_bounds: tuple = config.BASELINE_DECEL_BOUNDS
    t_r_mean: float = config.REACTION_TIME_MEAN
    t_r_std: float = config.REACTION_TIME_STD
    t_r_bounds: tuple = config.REACTION_TIME_BOUNDS
    placement_margin: float = config.PLACEMENT_MARGIN
    placement_retries: int = config.PLACEMENT_RETRIES

    def __post_init__(self):
        for name in ("length", "b_star", "t_r"):
            low, high = getattr(self, f"{name}_bounds")
            if getattr(self, f"{name}_std") < 0 or not low <= high:
                raise ConfigurationError(f"FeatureDistributions: bad {name} distribution")
        if self.length_bounds[0] <= 0 or self.b_star_bounds[0] <= 0:
            raise ConfigurationError("FeatureDistributions: lengths and b* must stay positive")
        if self.placement_margin < 0 or self.placement_retries < 1:
            raise ConfigurationError("FeatureDistributions: bad placement settings")

    @classmethod
    def from_behavior(cls, behavior, **overrides):
        """Reaction-time distribution taken from the behaviour parameters"""
        return cls(t_r_mean=behavior.tr_mean, t_r_std=behavior.tr_std,
                   t_r_bounds=tuple(behavior.tr_bounds), **overrides)


@dataclass(frozen=True)
class VehicleSpec:
    x0: float
    lane0: int
    length: float
    b_star: float
    kind: VehicleKind
    t_r: float


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    n_real: int
    penetration: float
    vehicles: tuple = ()
    road: RoadConfig = field(default_factory=RoadConfig)


def truncated_normal(rng, mean, std, bounds, size):
    """Normal draws restricted to bounds (constant when std is 0)"""
    low, high = bounds
    if std == 0:
        return np.full(size, min(max(mean, low), high), dtype=float)
    a, b = (low - mean) / std, (high - mean) / std
    return truncnorm.rvs(a, b, loc=mean, scale=std, size=size, random_state=rng)


def truncated_normal_mean(mean, std, bounds):
    """Expected value of truncated_normal draws"""
    low, high = bounds
    if std == 0:
        return min(max(mean, low), high)
    return float(truncnorm.mean((low - mean) / std, (high - mean) / std, loc=mean, scale=std))


def connected_count(n_real, penetration):
    """Number of CVs: penetration * n_real rounded half up"""
    return int(np.floor(penetration * n_real + 0.5))


def _fits(x0, length, lane, placed, clearance):
    # the EMV's front bump sits at 0 on the passing lane; keep every rear clear of it
    if x0 - length < clearance:
        return False
    for other in placed:
        if other[1] != lane:
            continue
        ox, _, olength = other
        if ox >= x0:
            if ox - olength - x0 < clearance:
                return False
        elif x0 - length - ox < clearance:
            return False
    return True


def generate_scenario(n_real, penetration, road=None, seed=0, features=None):
    """
    Sample a starting condition with n_real vehicles, round(penetration * n_real) of them CVs.
    Vehicles are ordered downstream first; that order is the agent slot order.
    """
    road = road or RoadConfig()
    features = features or FeatureDistributions()
    if not 0.0 <= penetration <= 1.0:
        raise ContractViolation(f"penetration must lie in [0, 1], got {penetration}")
    if n_real < 0:
        raise ContractViolation(f"n_real must be non-negative, got {n_real}")

    rng = stream_rng(seed, "kinematics")
    lengths = truncated_normal(rng, features.length_mean, features.length_std, features.length_bounds, n_real)
    b_stars = truncated_normal(rng, features.b_star_mean, features.b_star_std, features.b_star_bounds, n_real)
    t_rs = truncated_normal(rng, features.t_r_mean, features.t_r_std, features.t_r_bounds, n_real)

    clearance = road.d + features.placement_margin
    placed = []
    for k in range(n_real):
        for _ in range(features.placement_retries):
            lane = int(rng.integers(2))
            x0 = float(rng.uniform(0.0, road.L))
            if _fits(x0, lengths[k], lane, placed, clearance):
                placed.append((x0, lane, float(lengths[k])))
                break
        else:
            raise CapacityError(
                f"could not place vehicle {k + 1} of {n_real} on a {road.L} m segment "
                f"after {features.placement_retries} tries"
            )

    order = sorted(range(n_real), key=lambda k: -placed[k][0])

    kinds = [VehicleKind.HV] * n_real
    kind_rng = stream_rng(seed, "kind")
    for slot in kind_rng.permutation(n_real)[:connected_count(n_real, penetration)]:
        kinds[slot] = VehicleKind.CV

    vehicles = tuple(
        VehicleSpec(x0=placed[k][0], lane0=placed[k][1], length=float(lengths[k]),
                    b_star=float(b_stars[k]), kind=kinds[slot], t_r=float(t_rs[k]))
        for slot, k in enumerate(order)
    )
    return ScenarioSpec(seed=int(seed), n_real=n_real, penetration=float(penetration),
                        vehicles=vehicles, road=road)


def build_world(spec, M, idm=None, behavior=None):
    """
    World at t = 0: real vehicles at their start speed, EMV at x = 0 on the
    passing lane, TRIVIAL rows appended up to M.
    """
    if spec.n_real > M:
        raise CapacityError(f"scenario has {spec.n_real} vehicles but only {M} agent slots")
    road = spec.road
    idm = idm or IdmParams()
    behavior = behavior or BehaviorParams()

    non_emvs = [
        Vehicle(x=vs.x0, y=vs.lane0, v=road.v0_nonemv, xi=0, length=vs.length,
                b_star=vs.b_star, kind=VehicleKind(vs.kind),
                reaction_steps_left=int(round(vs.t_r / road.dt)))
        for vs in spec.vehicles
    ]
    non_emvs.extend(trivial_vehicle() for _ in range(M - len(non_emvs)))
    emv = Vehicle(x=0.0, y=PASSING_LANE, v=road.v0_emv, xi=0, length=road.emv_length,
                  b_star=idm.b0, kind=VehicleKind.EMV)
    return WorldState(emv=emv, non_emvs=non_emvs, rng=stream_rng(spec.seed, "dynamics"),
                      road=road, idm=idm, behavior=behavior)


class ScenarioSampler:
    """Endless source of random training scenarios"""

    def __init__(self, densities, penetrations=None, road=None, features=None, seed=config.RANDOM_STATE):
        if not densities:
            raise ConfigurationError("ScenarioSampler needs at least one density")
        self.densities = list(densities)
        self.penetrations = list(penetrations) if penetrations else None
        self.road = road or RoadConfig()
        self.features = features or FeatureDistributions()
        self.seed = seed

    def sample(self, episode):
        rng = stream_rng(self.seed, "sampler", episode)
        n_real = int(rng.choice(self.densities))
        if self.penetrations is None:
            penetration = float(rng.uniform(0.0, 1.0))
        else:
            penetration = float(rng.choice(self.penetrations))
        return generate_scenario(n_real, penetration, self.road, derive_seed(self.seed, episode),
                                 self.features)

    def __call__(self, episode):
        return self.sample(episode)


def generate_grouped_test_set(densities, penetrations, replications, road=None, seed=config.RANDOM_STATE,
                              features=None):
    """
    Matched test groups: for every (density, replication) the same vehicles
    at each penetration rate
    """
    specs = []
    for density in densities:
        for rep in range(replications):
            cell_seed = derive_seed(seed, density, rep)
            for penetration in penetrations:
                specs.append(generate_scenario(density, penetration, road, cell_seed, features))
    return specs
