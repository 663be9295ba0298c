import math

import numpy as np
import pytest

from astrobeam import (
    AU,
    DAY,
    MU_SUN,
    Ephemeris,
    Leg,
    MissionConfig,
    OrbitalElements,
    barker_parabolic_tof,
    cheapest_transfer,
    evaluate_objectives,
    extend,
    gtoc5_root_state,
    initial_state,
    optimize_rendezvous_leg,
    propellant_for,
    self_flyby_leg,
)
from astrobeam.mission import G0, YEAR_DAYS


def co_orbital_pair(phase_offset=0.12):
    """Two near-identical orbits separated in phase: cheap transfers exist."""
    base = dict(
        semi_major_axis=2.9 * AU,
        eccentricity=0.05,
        inclination=0.01,
        raan=1.0,
        arg_periapsis=2.0,
        epoch_ref=59000.0,
    )
    return Ephemeris(
        [
            OrbitalElements(mean_anomaly_ref=1.0, body_id=0, **base),
            OrbitalElements(mean_anomaly_ref=1.0 + phase_offset, body_id=1, **base),
        ]
    )


def retrograde_pair():
    """Target orbiting backwards: every transfer needs a huge velocity flip."""
    common = dict(
        semi_major_axis=2.9 * AU,
        eccentricity=0.05,
        raan=1.0,
        arg_periapsis=2.0,
        mean_anomaly_ref=1.0,
        epoch_ref=59000.0,
    )
    return Ephemeris(
        [
            OrbitalElements(inclination=0.01, body_id=0, **common),
            OrbitalElements(inclination=math.pi - 0.01, body_id=1, **common),
        ]
    )


class TestOptimizeRendezvousLeg:
    def test_revisit_forbidden(self, mission_config):
        eph = co_orbital_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        with pytest.raises(ValueError):
            optimize_rendezvous_leg(state, 0, mission_config, eph)

    def test_retrograde_target_infeasible(self, mission_config):
        eph = retrograde_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        assert optimize_rendezvous_leg(state, 1, mission_config, eph) is None

    def test_matches_explicit_grid_enumeration(self, mission_config):
        # oracle: walk the public transfer grid by hand with the same
        # screens (per-direction parabolic bound, cheapest arc,
        # acceleration cap) and take the lowest-cost survivor
        eph = co_orbital_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        leg = optimize_rendezvous_leg(state, 1, mission_config, eph)
        assert leg is not None

        r1, v1 = eph.state_of(0, state.epoch)
        accel_bound = mission_config.accel_safety_fraction * mission_config.max_thrust / state.mass
        best = None
        for dt_days in mission_config.transfer_grid():
            tof = dt_days * DAY
            r2, v2 = eph.state_of(1, state.epoch + dt_days)
            candidates = []
            for long_way in (False, True):
                if tof <= barker_parabolic_tof(r1, r2, MU_SUN, long_way):
                    continue
                from astrobeam import solve_lambert

                for sol in solve_lambert(r1, r2, tof, MU_SUN, mission_config.max_revs, long_way):
                    dv = np.linalg.norm(sol.departure_velocity - v1) + np.linalg.norm(
                        v2 - sol.arrival_velocity
                    )
                    candidates.append((dv, sol.revolutions))
            if not candidates:
                continue
            dv = min(candidates)[0]
            if dv / tof > accel_bound:
                continue
            if best is None or dv < best[0]:
                best = (dv, dt_days)

        assert best is not None
        oracle_dv, oracle_dt = best
        assert leg.dv == oracle_dv
        assert leg.arrive_epoch - leg.depart_epoch == oracle_dt
        assert leg.mass_cost == pytest.approx(
            propellant_for(oracle_dv, state.mass, mission_config) + mission_config.payload_mass
        )

    def test_leg_satisfies_stored_constraints(self, mission_config):
        # the accepted leg re-checks against the parabolic bound and the
        # acceleration cap using only its stored fields
        eph = co_orbital_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        leg = optimize_rendezvous_leg(state, 1, mission_config, eph)
        tof = (leg.arrive_epoch - leg.depart_epoch) * DAY
        r1, _ = eph.state_of(leg.from_id, leg.depart_epoch)
        r2, _ = eph.state_of(leg.to_id, leg.arrive_epoch)
        assert tof > barker_parabolic_tof(r1, r2, MU_SUN)
        accel_bound = mission_config.accel_safety_fraction * mission_config.max_thrust / state.mass
        assert leg.dv / tof <= accel_bound

    def test_target_out_of_range(self, mission_config):
        eph = co_orbital_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        with pytest.raises(ValueError):
            optimize_rendezvous_leg(state, 5, mission_config, eph)


class TestSelfFlyby:
    def test_closed_form_kinematics(self, mission_config):
        # oracle: out-and-back bang-bang at constant acceleration a; burn
        # away for t1, reverse until re-encounter at t1 (1 + sqrt(2)); the
        # encounter speed is sqrt(2) a t1 and total dv = a (t1 + t2)
        state = initial_state(0, 59000.0, config=mission_config)
        leg = self_flyby_leg(state, mission_config)
        assert leg is not None

        accel = mission_config.accel_safety_fraction * mission_config.max_thrust / state.mass
        t1 = mission_config.flyby_min_speed / (math.sqrt(2.0) * accel)
        t2 = (1.0 + math.sqrt(2.0)) * t1
        dv_expected = accel * (t1 + t2)
        assert leg.dv == pytest.approx(dv_expected, rel=1e-12)
        assert leg.dv == pytest.approx((1 + math.sqrt(2)) * mission_config.flyby_min_speed, rel=1e-12)
        assert (leg.arrive_epoch - leg.depart_epoch) * DAY == pytest.approx(t1 + t2, rel=1e-12)
        assert leg.mass_cost == pytest.approx(
            propellant_for(dv_expected, state.mass, mission_config)
            + mission_config.penetrator_mass
        )
        # displacement closes: 0.5 a t1^2 + (a t1) t2 - 0.5 a t2^2 == 0
        assert 0.5 * accel * t1**2 + accel * t1 * t2 - 0.5 * accel * t2**2 == pytest.approx(
            0.0, abs=1e-3
        )
        # encounter speed meets the requirement
        assert math.sqrt(2.0) * accel * t1 == pytest.approx(
            mission_config.flyby_min_speed, rel=1e-12
        )

    def test_zero_minimum_speed_degenerates(self):
        config = MissionConfig(flyby_min_speed=0.0)
        state = initial_state(0, 59000.0, config=config)
        leg = self_flyby_leg(state, config)
        assert leg.dv == 0.0
        assert leg.arrive_epoch == leg.depart_epoch
        assert leg.mass_cost == config.penetrator_mass

    def test_insufficient_mass_infeasible(self, mission_config):
        state = initial_state(0, 59000.0, mass_used=3999.5, config=mission_config)
        assert state.mass == pytest.approx(0.5)
        assert self_flyby_leg(state, mission_config) is None

    def test_budget_exhausted_infeasible(self, mission_config):
        state = initial_state(0, 59000.0, mass_used=3499.9, config=mission_config)
        assert self_flyby_leg(state, mission_config) is None


class TestExtend:
    def _leg(self, kind="rendezvous", mass_cost=100.0, duration=200.0):
        return Leg(
            kind=kind,
            from_id=0,
            to_id=1 if kind == "rendezvous" else 0,
            depart_epoch=59000.0,
            arrive_epoch=59000.0 + duration,
            dv=500.0,
            mass_cost=mass_cost,
        )

    def test_resources_move_one_way(self, mission_config):
        state = initial_state(0, 59000.0, config=mission_config)
        nxt = extend(state, self._leg(), mission_config)
        assert nxt.mass_used > state.mass_used
        assert nxt.time_used > state.time_used
        assert nxt.mass < state.mass
        assert nxt.score == state.score
        assert nxt.visited == (0, 1)
        assert nxt.current_asteroid == 1

    def test_flyby_increments_score(self, mission_config):
        state = initial_state(0, 59000.0, config=mission_config)
        nxt = extend(state, self._leg(kind="self_flyby"), mission_config)
        assert nxt.score == state.score + 1
        assert nxt.visited == state.visited

    def test_mass_budget_pruned(self, mission_config):
        state = initial_state(0, 59000.0, mass_used=3450.0, config=mission_config)
        assert extend(state, self._leg(mass_cost=51.0), mission_config) is None
        assert extend(state, self._leg(mass_cost=49.0), mission_config) is not None

    def test_time_budget_pruned(self, mission_config):
        limit_days = mission_config.max_mission_time * YEAR_DAYS
        state = initial_state(0, 59000.0, time_used=limit_days - 100.0, config=mission_config)
        assert extend(state, self._leg(duration=101.0), mission_config) is None
        assert extend(state, self._leg(duration=99.0), mission_config) is not None


class TestObjectives:
    def test_reference_root_state(self, mission_config):
        root = gtoc5_root_state(mission_config)
        score, mass_used, time_used = evaluate_objectives(root)
        assert score == 1
        assert mass_used == pytest.approx(253.518)
        assert time_used == pytest.approx(198.155 / 365.25)
        assert root.current_asteroid == 1712
        assert root.epoch == pytest.approx(59325.360)
        assert root.mass == pytest.approx(4000.0 - 253.518)

    def test_full_service_scores_two(self, mission_config):
        eph = co_orbital_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        leg = optimize_rendezvous_leg(state, 1, mission_config, eph)
        arrived = extend(state, leg, mission_config)
        assert arrived.score == 1
        flyby = self_flyby_leg(arrived, mission_config)
        serviced = extend(arrived, flyby, mission_config)
        assert serviced.score == 2
        assert evaluate_objectives(serviced)[0] == 2

    def test_determinism(self, mission_config):
        eph = co_orbital_pair()
        state = initial_state(0, 59000.0, config=mission_config)
        a = optimize_rendezvous_leg(state, 1, mission_config, eph)
        b = optimize_rendezvous_leg(state, 1, mission_config, eph)
        assert a == b


class TestPropellant:
    def test_rocket_equation(self, mission_config):
        dv = 1000.0
        mass = 4000.0
        expected = mass * (1 - math.exp(-dv / (G0 * mission_config.specific_impulse)))
        assert propellant_for(dv, mass, mission_config) == pytest.approx(expected, rel=1e-15)

    def test_zero_dv_zero_propellant(self, mission_config):
        assert propellant_for(0.0, 4000.0, mission_config) == 0.0


class TestMissionConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            MissionConfig(accel_safety_fraction=0.0)
        with pytest.raises(ValueError):
            MissionConfig(leg_time_window=(100.0, 50.0))
        with pytest.raises(ValueError):
            MissionConfig(initial_mass=-1.0)

    def test_transfer_grid_shape(self, mission_config):
        grid = mission_config.transfer_grid()
        assert len(grid) == 50
        assert grid[0] == 60.0 and grid[-1] == 500.0
        steps = np.diff(grid)
        assert np.allclose(steps, steps[0])
        assert steps[0] == pytest.approx(440.0 / 49.0)
