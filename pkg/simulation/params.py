# simulation/params.py
"""
Road, IDM and driver-behaviour parameter records
"""
import math
from dataclasses import dataclass

import config
from errors import ConfigurationError


def _require_positive(owner, **values):
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ConfigurationError(f"{owner}.{name} must be a positive number, got {value!r}")


@dataclass(frozen=True)
class RoadConfig:
    L: float = config.SEGMENT_LENGTH
    d: float = config.MIN_SAFETY_GAP
    dt: float = config.STEP_LENGTH
    L_HV: float = config.HV_REACTION_DISTANCE
    v0_nonemv: float = config.NON_EMV_START_SPEED
    v0_emv: float = config.EMV_START_SPEED
    vmax_emv: float = config.EMV_MAX_SPEED
    vmax_nonemv: float = config.NON_EMV_MAX_SPEED
    emv_length: float = config.EMV_LENGTH
    max_steps: int = config.MAX_STEPS

    def __post_init__(self):
        _require_positive(
            "RoadConfig", L=self.L, d=self.d, dt=self.dt, L_HV=self.L_HV,
            v0_nonemv=self.v0_nonemv, v0_emv=self.v0_emv, vmax_emv=self.vmax_emv,
            vmax_nonemv=self.vmax_nonemv, emv_length=self.emv_length,
            max_steps=self.max_steps,
        )
        if not isinstance(self.max_steps, int):
            raise ConfigurationError("RoadConfig.max_steps must be an integer")


@dataclass(frozen=True)
class IdmParams:
    u0: float = config.IDM_ACCELERATION
    b0: float = config.IDM_DECELERATION
    v_star: float = config.IDM_DESIRED_SPEED
    T0: float = config.IDM_HEADWAY
    b_max: float = config.IDM_BRAKING_LIMIT

    def __post_init__(self):
        _require_positive("IdmParams", u0=self.u0, b0=self.b0, v_star=self.v_star,
                          T0=self.T0, b_max=self.b_max)


@dataclass(frozen=True)
class BehaviorParams:
    tr_mean: float = config.REACTION_TIME_MEAN
    tr_std: float = config.REACTION_TIME_STD
    tr_bounds: tuple = config.REACTION_TIME_BOUNDS
    decel_noise_std: float = config.DECEL_NOISE_STD
    t_lc: float = config.LANE_CHANGE_TIME

    def __post_init__(self):
        _require_positive("BehaviorParams", tr_mean=self.tr_mean, t_lc=self.t_lc)
        if self.tr_std < 0 or self.decel_noise_std < 0:
            raise ConfigurationError("BehaviorParams standard deviations must be >= 0")
        low, high = self.tr_bounds
        if not 0 <= low <= high:
            raise ConfigurationError(f"BehaviorParams.tr_bounds invalid: {self.tr_bounds}")
