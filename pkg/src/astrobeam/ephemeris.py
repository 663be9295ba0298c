"""Keplerian two-body mechanics: element storage and state propagation.

Internal units are SI (m, s, kg, rad); epochs are Modified Julian Dates in
days and converted at the boundary. Only elliptic orbits are supported,
which matches the asteroid catalogs this library targets; transfer conics
are handled separately by the Lambert module.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

MU_SUN = 1.32712440018e20  # m^3/s^2
AU = 1.495978707e11  # m
DAY = 86400.0  # s
TWO_PI = 2.0 * math.pi


class UnsupportedOrbitError(ValueError):
    """Raised when a parabolic or hyperbolic orbit reaches the propagator."""


def _normalize_angle(angle: float) -> float:
    return angle % TWO_PI


@dataclass(frozen=True)
class OrbitalElements:
    """Classical elements of an elliptic heliocentric orbit.

    Angles are stored normalized to [0, 2pi). ``mean_anomaly_ref`` is the
    mean anomaly at ``epoch_ref`` (MJD, days).
    """

    semi_major_axis: float  # m
    eccentricity: float
    inclination: float  # rad
    raan: float  # rad
    arg_periapsis: float  # rad
    mean_anomaly_ref: float  # rad
    epoch_ref: float  # MJD
    body_id: int = 0

    def __post_init__(self):
        vals = (
            self.semi_major_axis,
            self.eccentricity,
            self.inclination,
            self.raan,
            self.arg_periapsis,
            self.mean_anomaly_ref,
            self.epoch_ref,
        )
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("orbital elements must be finite")
        if self.semi_major_axis <= 0.0:
            raise ValueError(f"semi-major axis must be positive, got {self.semi_major_axis}")
        if self.eccentricity < 0.0:
            raise ValueError(f"eccentricity must be non-negative, got {self.eccentricity}")
        object.__setattr__(self, "inclination", _normalize_angle(self.inclination))
        object.__setattr__(self, "raan", _normalize_angle(self.raan))
        object.__setattr__(self, "arg_periapsis", _normalize_angle(self.arg_periapsis))
        object.__setattr__(self, "mean_anomaly_ref", _normalize_angle(self.mean_anomaly_ref))

    @property
    def period(self) -> float:
        """Orbital period in seconds."""
        return TWO_PI * math.sqrt(self.semi_major_axis**3 / MU_SUN)


@dataclass(frozen=True)
class StateVector:
    """Cartesian heliocentric state at an epoch (m, m/s, MJD)."""

    position: np.ndarray
    velocity: np.ndarray
    epoch: float

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64)
        vel = np.asarray(self.velocity, dtype=np.float64)
        if pos.shape != (3,) or vel.shape != (3,):
            raise ValueError("position and velocity must be 3-vectors")
        if not (np.isfinite(pos).all() and np.isfinite(vel).all() and math.isfinite(self.epoch)):
            raise ValueError("state vector components must be finite")
        if not np.any(pos):
            raise ValueError("position must be non-zero")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)


def solve_kepler(mean_anomaly: float, eccentricity: float) -> float:
    """Solve Kepler's equation E - e sin(E) = M for the eccentric anomaly.

    Newton iteration started from M (e < 0.8) or pi (e >= 0.8), with a
    bisection fallback; the residual is driven below 1e-12 rad.
    """
    if not (math.isfinite(mean_anomaly) and math.isfinite(eccentricity)):
        raise ValueError("mean anomaly and eccentricity must be finite")
    if not 0.0 <= eccentricity < 1.0:
        raise ValueError(f"eccentricity must be in [0, 1), got {eccentricity}")
    return float(_kernels.kepler_scalar(mean_anomaly, eccentricity))


def mean_anomaly_at(elements: OrbitalElements, epoch: float, mu: float = MU_SUN) -> float:
    """Mean anomaly at ``epoch`` (MJD), normalized to [0, 2pi)."""
    dt = (epoch - elements.epoch_ref) * DAY
    n = math.sqrt(mu / elements.semi_major_axis**3)
    return (elements.mean_anomaly_ref + n * dt) % TWO_PI


def propagate(elements: OrbitalElements, epoch: float, mu: float = MU_SUN) -> StateVector:
    """Two-body propagation of elliptic elements to an arbitrary epoch."""
    if not math.isfinite(epoch):
        raise ValueError("epoch must be finite")
    if elements.eccentricity >= 1.0:
        raise UnsupportedOrbitError(
            f"only elliptic orbits are supported (e = {elements.eccentricity})"
        )
    m = mean_anomaly_at(elements, epoch, mu)
    r, v = _kernels.elements_to_rv(
        np.array([elements.semi_major_axis]),
        np.array([elements.eccentricity]),
        np.array([elements.inclination]),
        np.array([elements.raan]),
        np.array([elements.arg_periapsis]),
        np.array([m]),
        mu,
    )
    return StateVector(position=r[0], velocity=v[0], epoch=epoch)


def elements_from_state(state: StateVector, mu: float = MU_SUN, body_id: int = 0) -> OrbitalElements:
    """Recover classical elements from a Cartesian state (elliptic only)."""
    r = state.position
    v = state.velocity
    r_mag = float(np.linalg.norm(r))
    v_mag = float(np.linalg.norm(v))

    h = np.cross(r, v)
    h_mag = float(np.linalg.norm(h))
    node = np.cross([0.0, 0.0, 1.0], h)
    node_mag = float(np.linalg.norm(node))

    e_vec = np.cross(v, h) / mu - r / r_mag
    ecc = float(np.linalg.norm(e_vec))
    energy = 0.5 * v_mag**2 - mu / r_mag
    if energy >= 0.0 or ecc >= 1.0:
        raise UnsupportedOrbitError("state does not describe an elliptic orbit")
    a = -mu / (2.0 * energy)

    inc = math.acos(min(1.0, max(-1.0, h[2] / h_mag)))
    raan = math.atan2(node[1], node[0]) % TWO_PI if node_mag > 1e-12 else 0.0

    if ecc > 1e-12 and node_mag > 1e-12:
        argp = math.acos(min(1.0, max(-1.0, float(np.dot(node, e_vec)) / (node_mag * ecc))))
        if e_vec[2] < 0.0:
            argp = TWO_PI - argp
    elif ecc > 1e-12:
        argp = math.atan2(e_vec[1], e_vec[0]) % TWO_PI
    else:
        argp = 0.0

    if ecc > 1e-12:
        nu = math.acos(min(1.0, max(-1.0, float(np.dot(e_vec, r)) / (ecc * r_mag))))
        if float(np.dot(r, v)) < 0.0:
            nu = TWO_PI - nu
    elif node_mag > 1e-12:
        nu = math.acos(min(1.0, max(-1.0, float(np.dot(node, r)) / (node_mag * r_mag))))
        if r[2] < 0.0:
            nu = TWO_PI - nu
    else:
        nu = math.atan2(r[1], r[0]) % TWO_PI

    ecc_anom = 2.0 * math.atan2(
        math.sqrt(1.0 - ecc) * math.sin(nu / 2.0), math.sqrt(1.0 + ecc) * math.cos(nu / 2.0)
    )
    mean_anom = (ecc_anom - ecc * math.sin(ecc_anom)) % TWO_PI

    return OrbitalElements(
        semi_major_axis=a,
        eccentricity=ecc,
        inclination=inc,
        raan=raan,
        arg_periapsis=argp,
        mean_anomaly_ref=mean_anom,
        epoch_ref=state.epoch,
        body_id=body_id,
    )


class Ephemeris:
    """Structure-of-arrays catalog of elliptic orbits for fast batch queries.

    The per-epoch sweep over all bodies is the inner loop of the phasing
    heuristic, so states come back as (n, 3) arrays rather than objects.
    """

    def __init__(self, elements: list[OrbitalElements], mu: float = MU_SUN):
        if not elements:
            raise ValueError("ephemeris needs at least one body")
        self.mu = mu
        self.n = len(elements)
        self.a = np.array([el.semi_major_axis for el in elements])
        self.e = np.array([el.eccentricity for el in elements])
        self.inc = np.array([el.inclination for el in elements])
        self.raan = np.array([el.raan for el in elements])
        self.argp = np.array([el.arg_periapsis for el in elements])
        self.m0 = np.array([el.mean_anomaly_ref for el in elements])
        self.epoch0 = np.array([el.epoch_ref for el in elements])
        self.mean_motion = np.sqrt(mu / self.a**3)
        if np.any(self.e >= 1.0):
            raise UnsupportedOrbitError("ephemeris bodies must all be elliptic")

    def states_at(self, epoch: float) -> tuple[np.ndarray, np.ndarray]:
        """Positions and velocities of every body at ``epoch`` (MJD)."""
        m = (self.m0 + self.mean_motion * ((epoch - self.epoch0) * DAY)) % TWO_PI
        return _kernels.elements_to_rv(self.a, self.e, self.inc, self.raan, self.argp, m, self.mu)

    def state_of(self, body: int, epoch: float) -> tuple[np.ndarray, np.ndarray]:
        """Position and velocity of one body at ``epoch`` (MJD)."""
        m = (self.m0[body] + self.mean_motion[body] * ((epoch - self.epoch0[body]) * DAY)) % TWO_PI
        r, v = _kernels.elements_to_rv(
            self.a[body : body + 1],
            self.e[body : body + 1],
            self.inc[body : body + 1],
            self.raan[body : body + 1],
            self.argp[body : body + 1],
            np.array([m]),
            self.mu,
        )
        return r[0], v[0]

    def states_of(self, body: int, epochs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """States of one body at several epochs (used on the transfer grid)."""
        epochs = np.asarray(epochs, dtype=np.float64)
        m = (self.m0[body] + self.mean_motion[body] * ((epochs - self.epoch0[body]) * DAY)) % TWO_PI
        k = epochs.shape[0]
        return _kernels.elements_to_rv(
            np.full(k, self.a[body]),
            np.full(k, self.e[body]),
            np.full(k, self.inc[body]),
            np.full(k, self.raan[body]),
            np.full(k, self.argp[body]),
            m,
            self.mu,
        )

    def elements_of(self, body: int) -> OrbitalElements:
        return OrbitalElements(
            semi_major_axis=float(self.a[body]),
            eccentricity=float(self.e[body]),
            inclination=float(self.inc[body]),
            raan=float(self.raan[body]),
            arg_periapsis=float(self.argp[body]),
            mean_anomaly_ref=float(self.m0[body]),
            epoch_ref=float(self.epoch0[body]),
            body_id=body,
        )
