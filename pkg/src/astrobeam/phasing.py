"""Orbital phasing indicators and the rank-based branching heuristic.

Optimizing a transfer leg to every candidate asteroid is far too expensive
to do while ranking successors, so candidates are ordered by a cheap
geometric proxy instead: a zero-order motion model predicts which bodies
are reachable with little velocity change over a reference transfer time,
and a steep rank-decay curve turns that ordering into selection weights.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ephemeris import DAY, Ephemeris, StateVector


@dataclass(frozen=True)
class PhasingConfig:
    """Knobs of the successor-ranking heuristic.

    ``reference_transfer_time`` (days) is the horizon of the zero-order
    motion model; ``gamma`` sets how fast selection weights decay with rank.
    ``combine`` selects how forward and backward indicator halves merge:
    'concat' takes the norm of the stacked 12-component difference vector,
    'mean' averages the two 6-component norms.
    """

    reference_transfer_time: float = 125.0
    gamma: float = 50.0
    combine: str = "concat"

    def __post_init__(self):
        if self.reference_transfer_time <= 0.0:
            raise ValueError("reference transfer time must be positive")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.combine not in ("concat", "mean"):
            raise ValueError(f"combine must be 'concat' or 'mean', got {self.combine!r}")


def _indicator_components(position, velocity, dt_seconds, backward):
    # Zero-order phasing coordinates: [r/dt +/- v, r/dt]. The backward half
    # runs the model in reversed time, so the velocity sign flips.
    sign = -1.0 if backward else 1.0
    return position / dt_seconds + sign * velocity, position / dt_seconds


def orbital_indicator(state_src: StateVector, state_dst: StateVector, dt_days: float) -> float:
    """Forward phasing distance between two bodies observed at one epoch.

    Euclidean norm of the difference of the 6-component vectors
    [r/dt + v, r/dt]; small values flag cheap prospective transfers.
    """
    if dt_days <= 0.0 or not math.isfinite(dt_days):
        raise ValueError(f"transfer time must be positive, got {dt_days}")
    dt = dt_days * DAY
    a_src, b_src = _indicator_components(state_src.position, state_src.velocity, dt, False)
    a_dst, b_dst = _indicator_components(state_dst.position, state_dst.velocity, dt, False)
    return float(math.sqrt(np.sum((a_dst - a_src) ** 2) + np.sum((b_dst - b_src) ** 2)))


def improved_indicator(
    src_at_ts: StateVector,
    dst_at_ts: StateVector,
    src_at_tb: StateVector,
    dst_at_tb: StateVector,
    dt_days: float,
    combine: str = "concat",
) -> float:
    """Two-sided phasing distance using departure-epoch and arrival-side states.

    The forward half compares [r/dt + v, r/dt] at the departure epoch; the
    backward half compares [r/dt - v, r/dt] evaluated after the prospective
    arrival, catching targets that drift away during the transfer. With
    'concat' the result is the norm of the concatenated difference, i.e.
    sqrt(d_forward^2 + d_backward^2); 'mean' averages the two norms.
    """
    if dt_days <= 0.0 or not math.isfinite(dt_days):
        raise ValueError(f"transfer time must be positive, got {dt_days}")
    dt = dt_days * DAY
    fa_src, fb_src = _indicator_components(src_at_ts.position, src_at_ts.velocity, dt, False)
    fa_dst, fb_dst = _indicator_components(dst_at_ts.position, dst_at_ts.velocity, dt, False)
    ba_src, bb_src = _indicator_components(src_at_tb.position, src_at_tb.velocity, dt, True)
    ba_dst, bb_dst = _indicator_components(dst_at_tb.position, dst_at_tb.velocity, dt, True)
    d_fwd_sq = float(np.sum((fa_dst - fa_src) ** 2) + np.sum((fb_dst - fb_src) ** 2))
    d_bwd_sq = float(np.sum((ba_dst - ba_src) ** 2) + np.sum((bb_dst - bb_src) ** 2))
    if combine == "mean":
        return 0.5 * (math.sqrt(d_fwd_sq) + math.sqrt(d_bwd_sq))
    return math.sqrt(d_fwd_sq + d_bwd_sq)


def indicator_costs(
    current: int,
    epoch: float,
    config: PhasingConfig,
    eph: Ephemeris,
    arrival_epoch: float | None = None,
    two_sided: bool = True,
) -> np.ndarray:
    """Phasing distance from ``current`` to every cataloged body.

    Two-sided by default; ``two_sided=False`` gives the forward-only
    indicator. The backward half is evaluated at ``arrival_epoch + dt``;
    when no arrival epoch is known yet (the usual case while ranking
    successors) it defaults to ``epoch + dt``, i.e. the backward states
    sit at ``epoch + 2 dt``.
    """
    dt_days = config.reference_transfer_time
    dt = dt_days * DAY

    r_f, v_f = eph.states_at(epoch)
    fa = r_f / dt + v_f
    fb = r_f / dt
    d_fwd_sq = np.sum((fa - fa[current]) ** 2, axis=1) + np.sum((fb - fb[current]) ** 2, axis=1)
    if not two_sided:
        return np.sqrt(d_fwd_sq)

    t_arr = (arrival_epoch if arrival_epoch is not None else epoch + dt_days) + dt_days
    r_b, v_b = eph.states_at(t_arr)
    ba = r_b / dt - v_b
    bb = r_b / dt
    d_bwd_sq = np.sum((ba - ba[current]) ** 2, axis=1) + np.sum((bb - bb[current]) ** 2, axis=1)
    if config.combine == "mean":
        return 0.5 * (np.sqrt(d_fwd_sq) + np.sqrt(d_bwd_sq))
    return np.sqrt(d_fwd_sq + d_bwd_sq)


def rank_weights(costs: np.ndarray, gamma: float) -> np.ndarray:
    """Turn indicator costs into selection weights (1 - rank/n)^gamma.

    Ranks run over every body, ties broken by ascending id, so weight 1.0
    sits on the rank-0 body and decays geometrically from there.
    """
    n = costs.shape[0]
    order = np.argsort(costs, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    return (1.0 - ranks / n) ** gamma


def rank_heuristic(
    current: int,
    epoch: float,
    visited,
    config: PhasingConfig,
    eph: Ephemeris,
) -> np.ndarray:
    """Selection weights over all bodies for branching away from ``current``.

    Ranking covers all n bodies (visited included, so rank positions depend
    only on the epoch); the visited mask is applied afterwards, zeroing
    every already-visited id. An all-zero result means the node is terminal.
    """
    if not 0 <= current < eph.n:
        raise ValueError(f"current body {current} outside catalog of {eph.n}")
    costs = indicator_costs(current, epoch, config, eph)
    weights = rank_weights(costs, config.gamma)
    idx = np.fromiter(visited, dtype=np.int64) if not isinstance(visited, np.ndarray) else visited
    if idx.size:
        weights[idx] = 0.0
    weights[current] = 0.0
    return weights
