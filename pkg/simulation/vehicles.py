# simulation/vehicles.py
"""
Vehicle records: kinematics plus identity (kind, length, braking ability)
"""
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional


class VehicleKind(IntEnum):
    """Vehicle category; the integer value is the observation code"""
    TRIVIAL = 0
    HV = 1
    CV = 2
    EMV = 3


PASSING_LANE = 0
NEIGHBOR_LANE = 1


@dataclass
class Vehicle:
    """
    One row of the world state. x is the front-bump position, the vehicle
    occupies [x - length, x] on lane y.
    """
    x: float
    y: int
    v: float
    xi: int
    length: float
    b_star: float
    kind: VehicleKind
    reaction_steps_left: int = 0
    yield_issued_step: Optional[int] = None
    # index of the merging vehicle this one is braking for, if any
    cooperating_with: Optional[int] = None

    @property
    def rear(self):
        return self.x - self.length

    @property
    def is_real(self):
        return self.kind != VehicleKind.TRIVIAL

    def copy(self):
        return replace(self)


def trivial_vehicle():
    """Canonical inert padding record"""
    return Vehicle(x=0.0, y=PASSING_LANE, v=0.0, xi=0, length=0.0, b_star=0.0,
                   kind=VehicleKind.TRIVIAL)
