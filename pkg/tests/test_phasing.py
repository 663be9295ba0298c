import math

import numpy as np
import pytest

from astrobeam import (
    AU,
    DAY,
    PhasingConfig,
    StateVector,
    improved_indicator,
    indicator_costs,
    orbital_indicator,
    propagate,
    rank_heuristic,
    rank_weights,
)

from conftest import random_elliptic_elements


def make_state(rng, epoch=59000.0):
    el = random_elliptic_elements(rng)
    return propagate(el, epoch)


def definition_six_vector(state, dt_seconds, backward=False):
    sign = -1.0 if backward else 1.0
    return np.concatenate(
        [state.position / dt_seconds + sign * state.velocity, state.position / dt_seconds]
    )


class TestOrbitalIndicator:
    def test_identical_bodies(self, rng):
        s = make_state(rng)
        assert orbital_indicator(s, s, 125.0) == 0.0

    def test_symmetry(self, rng):
        a, b = make_state(rng), make_state(rng)
        assert orbital_indicator(a, b, 125.0) == orbital_indicator(b, a, 125.0)

    def test_direct_definition(self, rng):
        # oracle: literal evaluation of |x_dst - x_src| on the 6-vectors
        for _ in range(10):
            a, b = make_state(rng), make_state(rng)
            dt = 125.0 * DAY
            expected = np.linalg.norm(
                definition_six_vector(b, dt) - definition_six_vector(a, dt)
            )
            assert orbital_indicator(a, b, 125.0) == pytest.approx(expected, rel=1e-12)

    def test_rejects_bad_dt(self, rng):
        a, b = make_state(rng), make_state(rng)
        for dt in (0.0, -5.0, float("nan")):
            with pytest.raises(ValueError):
                orbital_indicator(a, b, dt)


class TestImprovedIndicator:
    def test_identical_bodies_zero(self, rng):
        s1, s2 = make_state(rng), make_state(rng, epoch=59250.0)
        assert improved_indicator(s1, s1, s2, s2, 125.0) == 0.0

    def test_concatenated_norm_identity(self, rng):
        for _ in range(10):
            a, b = make_state(rng), make_state(rng)
            a2, b2 = make_state(rng, 59250.0), make_state(rng, 59250.0)
            d_fwd = orbital_indicator(a, b, 125.0)
            dt = 125.0 * DAY
            d_bwd = np.linalg.norm(
                definition_six_vector(b2, dt, backward=True)
                - definition_six_vector(a2, dt, backward=True)
            )
            combined = improved_indicator(a, b, a2, b2, 125.0)
            assert combined == pytest.approx(math.hypot(d_fwd, d_bwd), rel=1e-12)

    def test_mean_variant(self, rng):
        a, b = make_state(rng), make_state(rng)
        a2, b2 = make_state(rng, 59250.0), make_state(rng, 59250.0)
        dt = 125.0 * DAY
        d_fwd = orbital_indicator(a, b, 125.0)
        d_bwd = np.linalg.norm(
            definition_six_vector(b2, dt, backward=True)
            - definition_six_vector(a2, dt, backward=True)
        )
        got = improved_indicator(a, b, a2, b2, 125.0, combine="mean")
        assert got == pytest.approx(0.5 * (d_fwd + d_bwd), rel=1e-12)

    def test_direct_definition_co_orbital(self, belt200):
        # full 12-vector oracle for one co-orbital-ish pair at the default dt
        eph = belt200.eph
        epoch = 59000.0
        dt = 125.0 * DAY
        r_f, v_f = eph.states_at(epoch)
        r_b, v_b = eph.states_at(epoch + 250.0)

        def twelve(idx):
            return np.concatenate(
                [
                    r_f[idx] / dt + v_f[idx],
                    r_f[idx] / dt,
                    r_b[idx] / dt - v_b[idx],
                    r_b[idx] / dt,
                ]
            )

        costs = indicator_costs(0, epoch, PhasingConfig(), eph)
        for j in (1, 17, 101):
            assert costs[j] == pytest.approx(np.linalg.norm(twelve(j) - twelve(0)), rel=1e-12)


class TestRankHeuristic:
    def test_rank_zero_weight_is_one(self, rng):
        costs = rng.uniform(0.0, 10.0, 50)
        weights = rank_weights(costs, 50.0)
        assert weights[np.argmin(costs)] == 1.0

    def test_monotone_in_rank(self, rng):
        costs = rng.uniform(0.0, 10.0, 200)
        weights = rank_weights(costs, 50.0)
        order = np.argsort(costs, kind="stable")
        assert np.all(np.diff(weights[order]) <= 0)

    def test_ties_break_by_ascending_id(self):
        costs = np.array([3.0, 1.0, 1.0, 5.0])
        weights = rank_weights(costs, 2.0)
        # ids 1 and 2 tie on cost; id 1 gets the better rank
        assert weights[1] > weights[2] > weights[0] > weights[3]

    def test_visited_masked_after_ranking(self, belt200, phasing_config):
        eph = belt200.eph
        bare = rank_heuristic(3, 59000.0, (3,), phasing_config, eph)
        masked = rank_heuristic(3, 59000.0, (3, 7, 11), phasing_config, eph)
        assert masked[7] == 0.0 and masked[11] == 0.0 and masked[3] == 0.0
        untouched = np.setdiff1d(np.arange(eph.n), [3, 7, 11])
        # ranks are visit-independent: unvisited weights are unchanged
        assert np.array_equal(bare[untouched], masked[untouched])

    def test_all_visited_except_one(self, belt40, phasing_config):
        eph = belt40.eph
        visited = tuple(i for i in range(eph.n) if i != 23)
        weights = rank_heuristic(5, 59000.0, visited, phasing_config, eph)
        assert weights[23] > 0.0
        assert np.count_nonzero(weights) == 1

    def test_all_visited_gives_zero_vector(self, belt40, phasing_config):
        eph = belt40.eph
        weights = rank_heuristic(5, 59000.0, tuple(range(eph.n)), phasing_config, eph)
        assert not np.any(weights)

    def test_paper_scale_selection_shares(self):
        # n = 7075 bodies and decay 50: the top-50 ranks hold about 30% of
        # the total selection weight and the top-250 about 84%, by direct
        # summation of the weight series
        n, gamma = 7075, 50.0
        weights = (1.0 - np.arange(n) / n) ** gamma
        total = weights.sum()
        top50 = weights[:50].sum() / total
        top250 = weights[:250].sum() / total
        assert abs(top50 - 0.30) < 0.01
        assert abs(top250 - 0.84) < 0.01

    def test_current_body_outside_catalog(self, belt40, phasing_config):
        with pytest.raises(ValueError):
            rank_heuristic(400, 59000.0, (), phasing_config, belt40.eph)


class TestPhasingConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            PhasingConfig(reference_transfer_time=0.0)
        with pytest.raises(ValueError):
            PhasingConfig(gamma=-1.0)
        with pytest.raises(ValueError):
            PhasingConfig(combine="geometric")
