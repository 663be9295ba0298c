import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from astrobeam import (
    AU,
    DAY,
    MU_SUN,
    OrbitalElements,
    StateVector,
    UnsupportedOrbitError,
    elements_from_state,
    propagate,
    solve_kepler,
)

from conftest import random_elliptic_elements


def kepler_residual(E, M, e):
    return E - e * math.sin(E) - M


def bisection_oracle(M, e, iters=200):
    """Independent root finder for Kepler's equation on [0, 2pi]."""
    lo, hi = 0.0, 2 * math.pi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if kepler_residual(mid, M, e) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestSolveKepler:
    def test_zero_anomaly_fixed_point(self):
        assert solve_kepler(0.0, 0.5) == 0.0

    def test_circular_orbit_identity(self):
        assert solve_kepler(1.0, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_against_bisection_oracle(self):
        # frozen from the oracle below: E* solving E - 0.7 sin E = 2.0
        expected = 2.447683214615955
        assert abs(bisection_oracle(2.0, 0.7) - expected) < 1e-12
        assert solve_kepler(2.0, 0.7) == pytest.approx(expected, abs=1e-12)

    def test_residual_property(self, rng):
        for _ in range(2000):
            M = rng.uniform(0.0, 2 * math.pi)
            e = rng.uniform(0.0, 0.99)
            E = solve_kepler(M, e)
            assert abs(kepler_residual(E, M, e)) <= 1e-12

    def test_high_eccentricity_corners(self):
        for M in (1e-8, 1e-3, math.pi, 2 * math.pi - 1e-3):
            E = solve_kepler(M, 0.99)
            assert abs(kepler_residual(E, M, 0.99)) <= 1e-12

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            solve_kepler(float("nan"), 0.5)
        with pytest.raises(ValueError):
            solve_kepler(1.0, 1.0)
        with pytest.raises(ValueError):
            solve_kepler(1.0, -0.1)


class TestPropagate:
    def test_circular_radius(self):
        el = OrbitalElements(AU, 0.0, 0.2, 1.0, 2.0, 3.0, 59000.0)
        for epoch in (59000.0, 59123.456, 61000.0):
            state = propagate(el, epoch)
            assert np.linalg.norm(state.position) == pytest.approx(AU, rel=1e-9)

    def test_periodicity(self, rng):
        for _ in range(20):
            el = random_elliptic_elements(rng)
            ref = propagate(el, el.epoch_ref)
            one_period = propagate(el, el.epoch_ref + el.period / DAY)
            assert np.allclose(one_period.position, ref.position, rtol=1e-8, atol=1e-8 * AU)
            assert np.allclose(one_period.velocity, ref.velocity, rtol=1e-8, atol=1e-4)

    def test_against_numerical_integration(self, rng):
        # oracle: adaptive high-order integration of the two-body equations
        def two_body(_t, y):
            r = y[:3]
            rn = np.linalg.norm(r)
            return np.concatenate([y[3:], -MU_SUN * r / rn**3])

        for _ in range(5):
            el = random_elliptic_elements(rng)
            start = propagate(el, 59100.0)
            dt_days = 37.5
            end = propagate(el, 59100.0 + dt_days)

            sol = solve_ivp(
                two_body,
                (0.0, dt_days * DAY),
                np.concatenate([start.position, start.velocity]),
                method="DOP853",
                rtol=1e-12,
                atol=1e-3,
            )
            r_num = sol.y[:3, -1]
            v_num = sol.y[3:, -1]
            assert np.allclose(end.position, r_num, rtol=1e-8)
            assert np.allclose(end.velocity, v_num, rtol=1e-8)

    def test_energy_and_momentum_conservation(self, rng):
        for _ in range(200):
            el = random_elliptic_elements(rng)
            epoch = 59000.0 + rng.uniform(-2000.0, 2000.0)
            state = propagate(el, epoch)
            r = np.linalg.norm(state.position)
            v = np.linalg.norm(state.velocity)

            energy = 0.5 * v * v - MU_SUN / r
            energy_expected = -MU_SUN / (2 * el.semi_major_axis)
            assert energy == pytest.approx(energy_expected, rel=1e-9)

            h = np.linalg.norm(np.cross(state.position, state.velocity))
            h_expected = math.sqrt(
                MU_SUN * el.semi_major_axis * (1 - el.eccentricity**2)
            )
            assert h == pytest.approx(h_expected, rel=1e-9)

    def test_vis_viva(self, rng):
        for _ in range(50):
            el = random_elliptic_elements(rng)
            state = propagate(el, 59500.0)
            r = np.linalg.norm(state.position)
            v = np.linalg.norm(state.velocity)
            assert v**2 == pytest.approx(MU_SUN * (2 / r - 1 / el.semi_major_axis), rel=1e-9)

    def test_elements_round_trip(self, rng):
        for _ in range(50):
            el = random_elliptic_elements(rng)
            state = propagate(el, 59321.0)
            back = elements_from_state(state)
            assert back.semi_major_axis == pytest.approx(el.semi_major_axis, rel=1e-9)
            assert back.eccentricity == pytest.approx(el.eccentricity, abs=1e-9)
            assert back.inclination == pytest.approx(el.inclination, abs=1e-9)
            rebuilt = propagate(back, 59321.0)
            # relative to the state magnitude: the RAAN/argp split is
            # ill-conditioned for near-equatorial orbits but their effect
            # on the state is not
            assert np.linalg.norm(rebuilt.position - state.position) <= 1e-9 * np.linalg.norm(
                state.position
            )
            assert np.linalg.norm(rebuilt.velocity - state.velocity) <= 1e-9 * np.linalg.norm(
                state.velocity
            )

    def test_unsupported_orbit(self):
        hyper = OrbitalElements(AU, 1.3, 0.0, 0.0, 0.0, 0.0, 59000.0)
        with pytest.raises(UnsupportedOrbitError):
            propagate(hyper, 59100.0)
        propagate(OrbitalElements(AU, 0.5, 0.0, 0.0, 0.0, 0.0, 59000.0), 59100.0)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            OrbitalElements(-AU, 0.1, 0.0, 0.0, 0.0, 0.0, 59000.0)
        with pytest.raises(ValueError):
            OrbitalElements(AU, float("inf"), 0.0, 0.0, 0.0, 0.0, 59000.0)
        el = OrbitalElements(AU, 0.1, 0.0, 0.0, 0.0, 0.0, 59000.0)
        with pytest.raises(ValueError):
            propagate(el, float("nan"))

    def test_angle_normalization(self):
        el = OrbitalElements(AU, 0.1, -0.5, 7.0, -1.0, 9.0, 59000.0)
        for angle in (el.inclination, el.raan, el.arg_periapsis, el.mean_anomaly_ref):
            assert 0.0 <= angle < 2 * math.pi


class TestStateVector:
    def test_rejects_zero_position(self):
        with pytest.raises(ValueError):
            StateVector(np.zeros(3), np.ones(3), 59000.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            StateVector(np.array([np.inf, 0, 0]), np.zeros(3), 59000.0)
