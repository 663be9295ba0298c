"""Multi-revolution Lambert arcs and the parabolic time-of-flight screen."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


class DegenerateGeometryError(ValueError):
    """Transfer angle within 1e-6 rad of 0 or pi: the orbit plane is undefined."""


@dataclass(frozen=True)
class LambertSolution:
    """One conic arc connecting two position vectors in a fixed time.

    ``branch`` tags the multi-revolution family: 'left' / 'right' for the
    two arcs that exist per revolution count, 'single' for the zero-rev
    arc. ``long_way`` records whether the arc sweeps the transfer angle
    above pi (in the plane spanned by the two positions).
    """

    departure_velocity: np.ndarray  # m/s
    arrival_velocity: np.ndarray  # m/s
    revolutions: int
    branch: str
    long_way: bool = False


_BRANCH_NAMES = {-1: "left", 0: "single", 1: "right"}


def _validated(r1, r2, tof, max_revs):
    r1 = np.asarray(r1, dtype=np.float64)
    r2 = np.asarray(r2, dtype=np.float64)
    if tof is not None and (tof <= 0.0 or not math.isfinite(tof)):
        raise ValueError(f"time of flight must be positive, got {tof}")
    if not (np.isfinite(r1).all() and np.isfinite(r2).all()):
        raise ValueError("position vectors must be finite")
    if not (np.any(r1) and np.any(r2)):
        raise ValueError("position vectors must be non-zero")
    if max_revs is not None and max_revs < 0:
        raise ValueError("max_revs must be non-negative")
    return r1, r2


def solve_lambert(
    r1: np.ndarray,
    r2: np.ndarray,
    tof: float,
    mu: float,
    max_revs: int = 1,
    long_way: bool = False,
) -> list[LambertSolution]:
    """All conic arcs from r1 to r2 (m) taking exactly ``tof`` seconds.

    The sweep plane and direction are intrinsic to the positions (normal
    r1 x r2, angle below pi unless ``long_way``), so solutions rotate with
    their inputs. The zero-revolution arc always exists; each feasible
    revolution count up to ``max_revs`` contributes a left and a right
    branch. Revolution counts whose minimum time exceeds ``tof`` are simply
    absent from the result.
    """
    r1, r2 = _validated(r1, r2, tof, max_revs)
    status, count, v1, v2, revs, branch = _kernels.lambert_raw(
        r1, r2, float(tof), float(mu), int(max_revs), bool(long_way)
    )
    if status != 0:
        raise DegenerateGeometryError(
            "transfer angle within 1e-6 rad of 0 or pi; orbit plane undefined"
        )
    return [
        LambertSolution(
            departure_velocity=v1[i].copy(),
            arrival_velocity=v2[i].copy(),
            revolutions=int(revs[i]),
            branch=_BRANCH_NAMES[int(branch[i])],
            long_way=bool(long_way),
        )
        for i in range(count)
    ]


def barker_parabolic_tof(
    r1: np.ndarray, r2: np.ndarray, mu: float, long_way: bool = False
) -> float:
    """Parabolic time of flight between two positions, in seconds.

    This is the minimum time any ballistic arc needs for the geometry;
    transfers requested faster than this would have to be hyperbolic.
    With s the semiperimeter and c the chord,

        t_p = (sqrt(2)/3) / sqrt(mu) * (s^1.5 - sigma (s - c)^1.5)

    where sigma is +1 for transfer angles below pi and -1 above (the long
    way around takes longer). Shares its kernel with the transfer-grid
    scan so the feasibility screen and this query cannot disagree.
    """
    r1, r2 = _validated(r1, r2, None, None)
    return float(_kernels.barker_tof(r1, r2, float(mu), bool(long_way)))


def cheapest_transfer(
    r1: np.ndarray,
    v1_current: np.ndarray,
    r2: np.ndarray,
    v2_target: np.ndarray,
    tof: float,
    mu: float,
    max_revs: int = 1,
) -> tuple[float, LambertSolution] | None:
    """Lowest-cost rendezvous arc between two moving bodies, or None.

    Cost is |v_dep - v1_current| + |v2_target - v_arr|: the impulse to leave
    the departure body's velocity plus the impulse to match the target's.
    Both sweep directions and every revolution branch are enumerated; ties
    go to the arc with fewest revolutions. Degenerate geometry and an empty
    solution set both come back as None (infeasible).
    """
    solutions: list[LambertSolution] = []
    try:
        solutions += solve_lambert(r1, r2, tof, mu, max_revs, long_way=False)
        solutions += solve_lambert(r1, r2, tof, mu, max_revs, long_way=True)
    except DegenerateGeometryError:
        return None
    if not solutions:
        return None

    v1_current = np.asarray(v1_current, dtype=np.float64)
    v2_target = np.asarray(v2_target, dtype=np.float64)
    best = None
    best_key = None
    for sol in solutions:
        dv = float(
            np.linalg.norm(sol.departure_velocity - v1_current)
            + np.linalg.norm(v2_target - sol.arrival_velocity)
        )
        key = (dv, sol.revolutions)
        if best_key is None or key < best_key:
            best_key = key
            best = (dv, sol)
    return best
