"""GTOC5-style mission model: resources, leg optimization, scoring.

A mission services asteroids in two moves. A rendezvous leg matches the
target's position and velocity and leaves a 40 kg payload; a self-fly-by
leg immediately departs, turns around, and re-hits the same asteroid at a
minimum encounter speed to deliver a 1 kg penetrator. Each fully serviced
asteroid scores one point. Propellant follows the rocket equation against
a 3500 kg usable budget and the clock runs against a 15 year cap.
"""

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from . import _kernels
from .ephemeris import DAY, MU_SUN, Ephemeris

G0 = 9.80665  # m/s^2
YEAR_DAYS = 365.25


@dataclass(frozen=True)
class MissionConfig:
    initial_mass: float = 4000.0  # kg
    usable_budget: float = 3500.0  # kg, propellant + deployed hardware
    payload_mass: float = 40.0  # kg left at each rendezvous
    penetrator_mass: float = 1.0  # kg delivered per fly-by
    max_mission_time: float = 15.0  # years
    launch_window: float = 11.0  # years, informational
    max_thrust: float = 0.3  # N
    specific_impulse: float = 3000.0  # s
    accel_safety_fraction: float = 0.9
    leg_time_window: tuple[float, float] = (60.0, 500.0)  # days
    leg_grid_points: int = 50
    flyby_min_speed: float = 400.0  # m/s relative speed at penetrator release
    max_revs: int = 1
    mu: float = MU_SUN

    def __post_init__(self):
        if min(self.initial_mass, self.usable_budget, self.payload_mass, self.max_mission_time) <= 0:
            raise ValueError("masses and times must be positive")
        if not 0.0 < self.accel_safety_fraction <= 1.0:
            raise ValueError("acceleration safety fraction must be in (0, 1]")
        if self.leg_time_window[0] <= 0 or self.leg_time_window[1] <= self.leg_time_window[0]:
            raise ValueError("leg time window must be an increasing positive interval")
        if self.leg_grid_points < 1:
            raise ValueError("need at least one grid point")

    def transfer_grid(self) -> np.ndarray:
        """Candidate transfer durations in days, evenly spaced."""
        lo, hi = self.leg_time_window
        return np.linspace(lo, hi, self.leg_grid_points)


@dataclass(frozen=True)
class Leg:
    """One trajectory arc, either a rendezvous or a self-fly-by."""

    kind: Literal["rendezvous", "self_flyby"]
    from_id: int
    to_id: int
    depart_epoch: float  # MJD
    arrive_epoch: float  # MJD
    dv: float  # m/s
    mass_cost: float  # kg, propellant plus deployed hardware


@dataclass(frozen=True)
class MissionState:
    """Immutable snapshot of the spacecraft and its itinerary so far."""

    current_asteroid: int
    epoch: float  # MJD
    mass: float  # kg
    mass_used: float  # kg since launch
    time_used: float  # days since launch
    score: int  # fully serviced asteroids
    visited: tuple[int, ...]
    legs: tuple[Leg, ...] = field(default=())

    def objectives(self) -> tuple[int, float, float]:
        """(score, mass used in kg, time used in years); score is maximized,
        the costs are minimized."""
        return self.score, self.mass_used, self.time_used / YEAR_DAYS


def evaluate_objectives(state: MissionState) -> tuple[int, float, float]:
    """Objective triple used by Pareto ranking."""
    return state.objectives()


def propellant_for(dv: float, mass: float, config: MissionConfig) -> float:
    """Rocket-equation propellant to apply ``dv`` starting from ``mass``."""
    return mass * (1.0 - math.exp(-dv / (G0 * config.specific_impulse)))


def optimize_rendezvous_leg(
    state: MissionState,
    target: int,
    config: MissionConfig,
    eph: Ephemeris,
) -> Optional[Leg]:
    """Best rendezvous leg from the current asteroid to ``target``, or None.

    Each duration on the transfer grid is screened against the parabolic
    time-of-flight bound, solved as a boundary value problem (cheapest arc
    per duration), and dropped when the implied constant acceleration
    dv/dt exceeds the spacecraft's safe acceleration at its current mass.
    The greedy winner is the surviving arc with the lowest dv.
    """
    if target == state.current_asteroid or target in state.visited:
        raise ValueError(f"asteroid {target} already visited; revisits are forbidden")
    if not 0 <= target < eph.n:
        raise ValueError(f"target {target} outside catalog of {eph.n}")

    t0 = state.epoch
    r1, v1 = eph.state_of(state.current_asteroid, t0)
    grid_days = config.transfer_grid()
    r2s, v2s = eph.states_of(target, t0 + grid_days)
    tofs = grid_days * DAY

    accel_bound = config.accel_safety_fraction * config.max_thrust / state.mass
    idx, dv, _v_dep, _v_arr, _rev, _branch = _kernels.rendezvous_grid(
        r1, v1, r2s, v2s, tofs, config.mu, config.max_revs, accel_bound
    )
    if idx < 0:
        return None

    mass_cost = propellant_for(dv, state.mass, config) + config.payload_mass
    return Leg(
        kind="rendezvous",
        from_id=state.current_asteroid,
        to_id=target,
        depart_epoch=t0,
        arrive_epoch=t0 + float(grid_days[idx]),
        dv=float(dv),
        mass_cost=mass_cost,
    )


def self_flyby_leg(state: MissionState, config: MissionConfig) -> Optional[Leg]:
    """Fly-by of the just-rendezvoused asteroid under a linear thrust model.

    The spacecraft holds the safe constant acceleration a throughout: it
    burns away from the asteroid for a time t1, then reverses thrust until
    it falls back onto it. The return leg lasts (1 + sqrt(2)) t1 and the
    re-encounter speed is sqrt(2) a t1, so hitting the required minimum
    encounter speed v gives

        dv = (1 + sqrt(2)) v        duration = (1 + sqrt(2)) v / a

    mass cost is that propellant plus the penetrator. Infeasible when the
    spacecraft cannot afford the propellant and penetrator, either
    physically or within the usable budget.
    """
    accel = config.accel_safety_fraction * config.max_thrust / state.mass
    dv = (1.0 + math.sqrt(2.0)) * config.flyby_min_speed
    duration_days = dv / accel / DAY

    mass_cost = propellant_for(dv, state.mass, config) + config.penetrator_mass
    if mass_cost > state.mass:
        return None
    if state.mass_used + mass_cost > config.usable_budget:
        return None
    return Leg(
        kind="self_flyby",
        from_id=state.current_asteroid,
        to_id=state.current_asteroid,
        depart_epoch=state.epoch,
        arrive_epoch=state.epoch + duration_days,
        dv=dv,
        mass_cost=mass_cost,
    )


def extend(state: MissionState, leg: Leg, config: MissionConfig) -> Optional[MissionState]:
    """Apply a leg to a state; None marks a pruned (over-budget) extension."""
    duration = leg.arrive_epoch - leg.depart_epoch
    new_state = MissionState(
        current_asteroid=leg.to_id,
        epoch=leg.arrive_epoch,
        mass=state.mass - leg.mass_cost,
        mass_used=state.mass_used + leg.mass_cost,
        time_used=state.time_used + duration,
        score=state.score + (1 if leg.kind == "self_flyby" else 0),
        visited=state.visited if leg.kind == "self_flyby" else state.visited + (leg.to_id,),
        legs=state.legs + (leg,),
    )
    if new_state.mass_used > config.usable_budget:
        return None
    if new_state.time_used > config.max_mission_time * YEAR_DAYS:
        return None
    return new_state


def initial_state(
    body: int,
    epoch: float,
    mass_used: float = 0.0,
    time_used: float = 0.0,
    score: int = 1,
    config: MissionConfig = MissionConfig(),
) -> MissionState:
    """Root state: parked at ``body``, that asteroid already fully serviced."""
    return MissionState(
        current_asteroid=body,
        epoch=epoch,
        mass=config.initial_mass - mass_used,
        mass_used=mass_used,
        time_used=time_used,
        score=score,
        visited=(body,),
    )


# Root conditions of the reference GTOC5 catalog run: parked at asteroid
# 2001 GP2 (id 1712) with one point scored and the launch leg already paid.
GTOC5_ROOT = dict(body=1712, epoch=59325.360, mass_used=253.518, time_used=198.155, score=1)


def gtoc5_root_state(config: MissionConfig = MissionConfig()) -> MissionState:
    return initial_state(**GTOC5_ROOT, config=config)
