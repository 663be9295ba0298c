"""Multi-objective machinery: dominance sorting, selection, hypervolume, archive.

Mass and time costs are only comparable between trajectories of equal
score, so ranking always bins by score first and applies Pareto dominance
(both objectives minimized) within each bin. The archive keeps the mutually
non-dominated trajectories of the best score reached so far.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .mission import MissionState


class ObjectivePoint(NamedTuple):
    mass_used: float  # kg
    time_used: float  # years


def dominates(p: Sequence[float], q: Sequence[float]) -> bool:
    """Weak Pareto dominance: no worse in both objectives, better in one."""
    return p[0] <= q[0] and p[1] <= q[1] and (p[0] < q[0] or p[1] < q[1])


def non_dominated_sort(points: Sequence[Sequence[float]]) -> list[list[int]]:
    """Partition point indices into successive non-dominated fronts.

    Front 0 is the non-dominated set of the input; front k is the
    non-dominated set once fronts 0..k-1 are removed.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = pts.shape[0]
    if n == 0:
        return []
    le = (pts[:, None, :] <= pts[None, :, :]).all(axis=2)
    lt = (pts[:, None, :] < pts[None, :, :]).any(axis=2)
    dom = le & lt  # dom[i, j]: i dominates j

    dom_count = dom.sum(axis=0).astype(np.int64)
    fronts: list[list[int]] = []
    current = np.nonzero(dom_count == 0)[0]
    while current.size:
        fronts.append([int(i) for i in current])
        dom_count = dom_count - dom[current].sum(axis=0)
        dom_count[current] = -1
        current = np.nonzero(dom_count == 0)[0]
    return fronts


def _cost_pair(traj: MissionState) -> tuple[float, float]:
    _, mass, time_yr = traj.objectives()
    return mass, time_yr


def rank_and_select(trajectories: Sequence[MissionState], count: int) -> list[MissionState]:
    """Pick the ``count`` best trajectories: score bins descending, Pareto
    fronts within each bin, lowest mass first when a front must be cut."""
    if count <= 0 or not trajectories:
        return []

    bins: dict[int, list[int]] = {}
    for idx, traj in enumerate(trajectories):
        bins.setdefault(traj.score, []).append(idx)

    selected: list[MissionState] = []
    for score in sorted(bins, reverse=True):
        members = bins[score]
        pts = [_cost_pair(trajectories[i]) for i in members]
        for front in non_dominated_sort(pts):
            # mass, then time, then discovery order: a total order that makes
            # both the overflow cut and the output sequence deterministic
            ordered = sorted(front, key=lambda k: (pts[k][0], pts[k][1], members[k]))
            room = count - len(selected)
            for k in ordered[:room]:
                selected.append(trajectories[members[k]])
            if len(selected) >= count:
                return selected
    return selected


def hypervolume_2d(front: Sequence[Sequence[float]], reference: Sequence[float]) -> float:
    """Area (kg * years) dominated by ``front`` up to the reference point.

    Union of the rectangles spanned by each point and the reference,
    computed by a sorted sweep; points at or beyond the reference add
    nothing and duplicates count once.
    """
    ref_m, ref_t = float(reference[0]), float(reference[1])
    pts = sorted(
        (float(p[0]), float(p[1])) for p in front if p[0] < ref_m and p[1] < ref_t
    )
    if not pts:
        return 0.0

    # staircase: strictly increasing mass, strictly decreasing time (the
    # (mass, time) sort already puts the best time first within equal mass)
    stair: list[tuple[float, float]] = []
    for m, t in pts:
        if not stair or t < stair[-1][1]:
            stair.append((m, t))

    area = 0.0
    for i, (m, t) in enumerate(stair):
        next_m = stair[i + 1][0] if i + 1 < len(stair) else ref_m
        area += (next_m - m) * (ref_t - t)
    return area


@dataclass(frozen=True)
class Archive:
    """Non-dominated trajectories sharing the best score reached so far."""

    best_score: int = -1
    front: tuple[MissionState, ...] = ()

    def front_points(self) -> list[tuple[float, float]]:
        return [_cost_pair(t) for t in self.front]

    def hypervolume(self, reference: Sequence[float]) -> float:
        return hypervolume_2d(self.front_points(), reference)


def archive_merge(archive: Archive, candidates: Sequence[MissionState]) -> Archive:
    """Merge candidate trajectories into the archive.

    A candidate beating the best score resets the archive to the new
    score's non-dominated set; equal-score candidates join the front with
    dominated members dropped; lower scores are ignored. Entries are
    deduplicated by asteroid sequence.
    """
    best = archive.best_score
    for cand in candidates:
        best = max(best, cand.score)
    if best == archive.best_score:
        pool = list(archive.front)
    else:
        pool = []
    pool.extend(c for c in candidates if c.score == best)
    if not pool:
        return archive

    unique: dict[tuple[int, ...], MissionState] = {}
    for traj in pool:
        unique.setdefault(traj.visited, traj)
    members = list(unique.values())

    costs = [_cost_pair(t) for t in members]
    keep = [
        i
        for i in range(len(members))
        if not any(j != i and dominates(costs[j], costs[i]) for j in range(len(members)))
    ]
    front = sorted(
        (members[i] for i in keep), key=lambda t: (_cost_pair(t), t.visited)
    )
    return Archive(best_score=best, front=tuple(front))
