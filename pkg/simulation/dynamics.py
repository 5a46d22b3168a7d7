# simulation/dynamics.py
"""
Per-vehicle driving laws of the road model:
discrete IDM, yielding deceleration with reaction delay, the HV yielding rule,
the yielding-status tracker and the geometric pull-over model.
"""
import math

from errors import ConfigurationError, ContractViolation
from simulation.vehicles import PASSING_LANE, VehicleKind

# gap used when a vehicle has nobody ahead; the interaction term vanishes
NO_LEADER_GAP = 1e6


def idm_acceleration(ego_v, leader_v, gap, idm, d):
    """
    IDM acceleration u = u0 [1 - (v/v*)^4 - (s*/gap)^2], clamped to [-b_max, u0]
    """
    for name, value in (("ego_v", ego_v), ("leader_v", leader_v), ("gap", gap), ("d", d)):
        if not math.isfinite(value):
            raise ContractViolation(f"idm_acceleration: {name} is not finite ({value})")
    if gap <= 0:
        raise ContractViolation(f"idm_acceleration: gap must be positive, got {gap}")
    if ego_v < 0:
        raise ContractViolation(f"idm_acceleration: negative speed {ego_v}")

    # closing speed ego_v - leader_v widens the desired gap
    s_star = d + max(0.0, ego_v * idm.T0 + ego_v * (ego_v - leader_v) / (2.0 * math.sqrt(idm.u0 * idm.b0)))
    u = idm.u0 * (1.0 - (ego_v / idm.v_star) ** 4 - (s_star / gap) ** 2)
    return min(max(u, -idm.b_max), idm.u0)


def braking_deceleration(vehicle, behavior, rng, dt=None):
    """
    Deceleration magnitude of a yielding vehicle.

    Zero while the perception-reaction window is open (the counter is
    decremented), afterwards b* plus white noise. With dt given the magnitude
    is capped so the speed cannot go negative.
    """
    if vehicle.xi != 1:
        raise ContractViolation("braking_deceleration called on a non-yielding vehicle")

    if vehicle.reaction_steps_left > 0:
        vehicle.reaction_steps_left -= 1
        return 0.0

    noise = rng.normal(0.0, behavior.decel_noise_std) if behavior.decel_noise_std > 0 else 0.0
    b = max(vehicle.b_star + noise, 0.0)
    if dt is not None:
        b = min(b, vehicle.v / dt)
    return b


def hv_action(hv, emv, L_HV):
    """Human drivers keep driving (0) until the EMV is closer than L_HV, then yield (1)"""
    if hv.kind != VehicleKind.HV:
        raise ContractViolation(f"hv_action needs an HV, got {hv.kind.name}")
    return 0 if hv.x - emv.x >= L_HV else 1


def yielding_update(xi, action):
    """Absorbing yielding status: once yielding, always yielding"""
    if xi not in (0, 1) or action not in (0, 1):
        raise ContractViolation(f"yielding_update expects binary inputs, got ({xi}, {action})")
    return 1 if action == 1 or xi == 1 else 0


def lane_change_probability(dt, behavior):
    """Per-step pull-over success probability p = dt / t_lc"""
    p = dt / behavior.t_lc
    if not 0 < p <= 1:
        raise ConfigurationError(
            f"lane-change probability dt/t_lc = {p} outside (0, 1]; need t_lc >= dt"
        )
    return p


def lane_change_sample(vehicle, dt, behavior, rng):
    """
    Lane index of a pulling-over vehicle for the next step: 1 with
    probability p once the reaction window has elapsed, 0 before.
    """
    p = lane_change_probability(dt, behavior)
    if vehicle.xi != 1 or vehicle.y != PASSING_LANE:
        raise ContractViolation("lane_change_sample needs a yielding vehicle on the passing lane")
    if vehicle.reaction_steps_left > 0:
        return 0
    return 1 if rng.random() < p else 0
