"""Ground-truth kinematics of the UAV and the ground objects.

Everything lives in one vertical plane: the UAV at altitude ``h`` above
horizontal position ``x_u`` and objects on the ground axis. The polar
convention is ``d sin(theta) = h`` and ``d cos(theta) = x_o - x_u``, so an
angle above 90 degrees places the object behind the UAV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


class InvalidScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class UavState:
    h: float
    x_u: float
    v_u: float
    theta_u: float  # heading of the velocity vector above horizontal, rad

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidScenarioError(f"UAV altitude must be positive, got {self.h}")
        if self.v_u < 0:
            raise InvalidScenarioError(f"UAV speed must be non-negative, got {self.v_u}")


@dataclass(frozen=True)
class ObjectTruth:
    x_o: float
    v: float
    a: float = 0.0


@dataclass(frozen=True)
class PolarState:
    theta: float
    d: float
    v: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.d, self.v])

    @classmethod
    def from_array(cls, e) -> "PolarState":
        return cls(float(e[0]), float(e[1]), float(e[2]))


@dataclass(frozen=True)
class WorldState:
    uav: UavState
    objects: tuple[ObjectTruth, ...]
    n: int = 0
    dT: float = 0.01


def propagate_uav(uav: UavState, dT: float) -> UavState:
    return replace(
        uav,
        x_u=uav.x_u + uav.v_u * math.cos(uav.theta_u) * dT,
        h=uav.h + uav.v_u * math.sin(uav.theta_u) * dT,
    )


def propagate_truth(world: WorldState) -> WorldState:
    """Advance the world by one slot with exact constant-acceleration kinematics."""
    dT = world.dT
    objects = tuple(
        ObjectTruth(o.x_o + o.v * dT + 0.5 * o.a * dT**2, o.v + o.a * dT, o.a)
        for o in world.objects
    )
    return WorldState(propagate_uav(world.uav, dT), objects, world.n + 1, dT)


def true_polar(world: WorldState, k: int) -> PolarState:
    obj = world.objects[k]
    h = world.uav.h
    gap = obj.x_o - world.uav.x_u
    return PolarState(math.atan2(h, gap), math.hypot(h, gap), obj.v)


def scenario_from_caption(theta0: float, v0: float, a: float, uav: UavState) -> ObjectTruth:
    """Place an object on the ground so that it is seen at ``theta0`` from the UAV."""
    if not 0 < theta0 < math.pi:
        raise InvalidScenarioError(f"initial angle must lie in (0, pi), got {theta0}")
    # cos/sin instead of 1/tan keeps theta0 = pi/2 exact
    return ObjectTruth(uav.x_u + uav.h * math.cos(theta0) / math.sin(theta0), v0, a)


def initial_world(config) -> WorldState:
    uav = UavState(config.h, config.x_u, config.v_u, config.theta_u)
    objects = tuple(
        scenario_from_caption(math.radians(o.theta0_deg), o.v0, o.a, uav) for o in config.objects
    )
    return WorldState(uav, objects, 0, config.dT)
