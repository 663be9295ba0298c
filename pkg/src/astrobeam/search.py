"""Unified tree search: deterministic beam, stochastic beam, and beam P-ACO.

One level-wise procedure covers the whole family. Every partial solution in
the beam branches toward up to ``bf`` successors (greedy with probability
``q0``, otherwise weighted sampling without replacement), each branch pays
for a rendezvous leg optimization plus the follow-up fly-by, and the best
``bw`` survivors form the next beam. The variants differ only in parameter
values: deterministic search is q0=1 with a single generation, stochastic
beam chains independent generations, and P-ACO feeds pheromones deposited
by archived solutions back into the branching weights. Pure ant-colony
search is the bw=1, bf=1 corner of the same procedure.
"""

import json
from collections import Counter, deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Literal, Optional

import numpy as np

from .ephemeris import Ephemeris
from .mission import MissionConfig, MissionState, extend, optimize_rendezvous_leg, self_flyby_leg
from .pareto import Archive, archive_merge, rank_and_select
from .phasing import PhasingConfig, rank_heuristic

SearchMode = Literal["deterministic", "stochastic", "paco"]


@dataclass(frozen=True)
class SearchParams:
    """Parameters of the search family.

    ``q0`` is the probability of branching greedily; ``alpha`` and ``beta``
    weigh pheromone against heuristic in the branching weights (alpha=0
    ignores pheromones entirely); ``population_size`` caps how many
    archived solutions can reinforce any single node.
    """

    beam_width: int
    branching_factor: int
    q0: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0
    population_size: int = 3
    leg_budget: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.beam_width < 1 or self.branching_factor < 1:
            raise ValueError("beam width and branching factor must be at least 1")
        if not 0.0 <= self.q0 <= 1.0:
            raise ValueError(f"q0 must lie in [0, 1], got {self.q0}")
        if self.population_size < 1:
            raise ValueError("population size must be at least 1")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("alpha and beta must be non-negative")
        if self.leg_budget < 1:
            raise ValueError("leg budget must be positive")


class PheromoneStore:
    """Per-node FIFO populations and the pheromone values they imply.

    Each of the n nodes owns a queue of at most k successor ids. The
    pheromone on edge (i, j) is tau_init + l * tau_delta where l counts j
    in queue i, tau_init = 1/(n-1), tau_max = 1, and
    tau_delta = (tau_max - tau_init) / k, so an undeposited row sums to
    exactly 1 and a fully reinforced edge reaches exactly tau_max (both in
    exact arithmetic; see ``tau_exact``). Self-edges carry no pheromone.
    """

    def __init__(self, n: int, k: int):
        if n < 2:
            raise ValueError("need at least two nodes")
        if k < 1:
            raise ValueError("population size k must be at least 1")
        self.n = n
        self.k = k
        self.tau_init = 1.0 / (n - 1)
        self.tau_delta = (1.0 - self.tau_init) / k
        self._queues: dict[int, deque[int]] = {}

    def clear(self) -> None:
        self._queues.clear()

    def deposit(self, i: int, j: int) -> None:
        """Append j to node i's queue, evicting the oldest entry at capacity."""
        if i == j:
            raise ValueError("self-edges carry no pheromone")
        self._queues.setdefault(i, deque(maxlen=self.k)).append(j)

    def queue(self, i: int) -> tuple[int, ...]:
        return tuple(self._queues.get(i, ()))

    def tau_row(self, i: int) -> np.ndarray:
        row = np.full(self.n, self.tau_init)
        q = self._queues.get(i)
        if q:
            for j, count in Counter(q).items():
                row[j] = self.tau_init + count * self.tau_delta
        row[i] = 0.0
        return row

    def tau(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        count = self._queues.get(i, ()).count(j) if i in self._queues else 0
        return self.tau_init + count * self.tau_delta

    def tau_exact(self, i: int, j: int) -> Fraction:
        """Pheromone value in exact rational arithmetic (the float API is a
        rounded projection of this lattice)."""
        if i == j:
            return Fraction(0)
        count = self._queues.get(i, ()).count(j) if i in self._queues else 0
        tau_init = Fraction(1, self.n - 1)
        tau_delta = (1 - tau_init) / self.k
        return tau_init + count * tau_delta

    def row_sum_exact(self, i: int) -> Fraction:
        return sum((self.tau_exact(i, j) for j in range(self.n) if j != i), Fraction(0))


def combined_heuristic(
    node: int,
    tau: Optional[PheromoneStore],
    heuristic: np.ndarray,
    alpha: float,
    beta: float,
) -> Optional[np.ndarray]:
    """Normalized branching weights tau^alpha * h^beta over all successors.

    Candidates whose heuristic weight is zero (already visited, or the node
    itself) stay at zero regardless of beta. Returns None when every weight
    vanishes, which marks the node as terminal.
    """
    if alpha == 0.0 or tau is None:
        w = heuristic**beta
    else:
        w = tau.tau_row(node) ** alpha * heuristic**beta
    w = np.where(heuristic == 0.0, 0.0, w)
    total = w.sum()
    if total <= 0.0 or not np.isfinite(total):
        return None
    return w / total


def branch(weights: np.ndarray, bf: int, q0: float, rng: np.random.Generator) -> list[int]:
    """Choose up to ``bf`` distinct successor ids from a weight vector.

    With probability q0 the top-bf by weight (ties to the lower id); else
    biased sampling without replacement via iterative renormalized draws.
    """
    nonzero = int(np.count_nonzero(weights))
    if nonzero == 0:
        return []
    take = min(bf, nonzero)
    if rng.random() < q0:
        order = np.argsort(-weights, kind="stable")
        return [int(i) for i in order[:take]]

    w = weights.astype(np.float64, copy=True)
    chosen: list[int] = []
    for _ in range(take):
        cum = np.cumsum(w)
        total = cum[-1]
        r = rng.random() * total
        j = int(np.searchsorted(cum, r, side="right"))
        if j >= w.shape[0] or w[j] == 0.0:
            # floating point edge: fall back to the largest remaining weight
            j = int(np.argmax(w))
        chosen.append(j)
        w[j] = 0.0
    return chosen


class RunLog:
    """Ordered event stream of one search run.

    Three event kinds, each stamped with the cumulative count of optimized
    legs: ``leg_optimized`` (one per rendezvous-leg optimization, feasible
    or not), ``solution_found`` (a trajectory entering the archive), and
    ``generation_end``. Events are plain dicts so logs serialize to JSON
    lines and compare exactly.
    """

    def __init__(self):
        self.events: list[dict] = []
        self.leg_count = 0

    def record_leg(self, from_id: int, to_id: int, leg) -> None:
        self.leg_count += 1
        self.events.append(
            {
                "kind": "leg_optimized",
                "legs": self.leg_count,
                "from": int(from_id),
                "to": int(to_id),
                "feasible": leg is not None,
                "dv": None if leg is None else leg.dv,
            }
        )

    def record_solution(self, state: MissionState) -> None:
        score, mass, time_yr = state.objectives()
        self.events.append(
            {
                "kind": "solution_found",
                "legs": self.leg_count,
                "sequence": list(state.visited),
                "score": int(score),
                "mass": mass,
                "time": time_yr,
            }
        )

    def record_generation_end(self, generation: int, beam_size: int, archive: Archive) -> None:
        self.events.append(
            {
                "kind": "generation_end",
                "legs": self.leg_count,
                "generation": generation,
                "beam": beam_size,
                "best_score": int(archive.best_score),
                "archive_size": len(archive.front),
            }
        )

    def __eq__(self, other):
        return isinstance(other, RunLog) and self.events == other.events

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for event in self.events:
                fh.write(json.dumps(event) + "\n")

    @classmethod
    def load(cls, path) -> "RunLog":
        log = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    log.events.append(json.loads(line))
        for event in reversed(log.events):
            if event["kind"] == "leg_optimized":
                log.leg_count = event["legs"]
                break
        return log


def run_generation(
    root: MissionState,
    params: SearchParams,
    tau: Optional[PheromoneStore],
    rng: np.random.Generator,
    log: RunLog,
    config: MissionConfig,
    phasing_cfg: PhasingConfig,
    eph: Ephemeris,
) -> list[MissionState]:
    """One tree search from the root; returns its final (last non-empty) beam.

    Levels repeat {branch each beam member, optimize each rendezvous leg,
    apply the immediate fly-by, prune over-budget states, select the bw
    best} until the extension pool empties or the leg budget runs out. The
    budget is checked between levels only, so a level in flight may
    overshoot by at most bw * bf legs.
    """
    beam = [root]
    while True:
        if log.leg_count >= params.leg_budget:
            return beam
        pool: list[MissionState] = []
        for member in beam:
            heuristic = rank_heuristic(
                member.current_asteroid, member.epoch, member.visited, phasing_cfg, eph
            )
            weights = combined_heuristic(
                member.current_asteroid, tau, heuristic, params.alpha, params.beta
            )
            if weights is None:
                continue
            for target in branch(weights, params.branching_factor, params.q0, rng):
                leg = optimize_rendezvous_leg(member, target, config, eph)
                log.record_leg(member.current_asteroid, target, leg)
                if leg is None:
                    continue
                arrived = extend(member, leg, config)
                if arrived is None:
                    continue
                flyby = self_flyby_leg(arrived, config)
                if flyby is None:
                    continue
                serviced = extend(arrived, flyby, config)
                if serviced is None:
                    continue
                pool.append(serviced)
        if not pool:
            return beam
        beam = rank_and_select(pool, params.beam_width)


def pheromone_reset(
    archive: Archive, tau: PheromoneStore, rng: np.random.Generator
) -> PheromoneStore:
    """Rebuild the pheromone population from the archive.

    All queues are emptied; archived solutions are deposited one by one in
    shuffled order, each directed edge (i, j) appending j to queue i. Only
    the traversal direction receives pheromone: the underlying problem is
    asymmetric, so an (i, j) edge says nothing about (j, i). The FIFO
    capacity keeps the most recent k contributions per node, which lets
    many more than k solutions contribute somewhere when solutions only
    visit a small slice of the nodes.
    """
    tau.clear()
    order = rng.permutation(len(archive.front))
    for idx in order:
        seq = archive.front[int(idx)].visited
        for a, b in zip(seq, seq[1:]):
            tau.deposit(a, b)
    return tau


def run_search(
    root: MissionState,
    params: SearchParams,
    mode: SearchMode,
    config: MissionConfig,
    phasing_cfg: PhasingConfig,
    eph: Ephemeris,
) -> tuple[Archive, RunLog]:
    """Run one full search and return its archive and event log.

    deterministic: a single generation with q0 forced to 1 and alpha to 0.
    stochastic:    generations chained from the same root, alpha forced to
                   0, no feedback between generations.
    paco:          generations chained with archive merge + pheromone reset
                   after each, biasing later generations toward archived
                   edge choices.

    Runs are reproducible: the seed feeds a PCG64 SeedSequence that is
    split into independent streams for branching decisions and for the
    pheromone-reset shuffle, so ignoring pheromones (alpha=0) cannot
    perturb the branching stream.
    """
    if mode not in ("deterministic", "stochastic", "paco"):
        raise ValueError(f"unknown search mode {mode!r}")
    effective = params
    if mode == "deterministic":
        effective = replace(params, q0=1.0, alpha=0.0)
    elif mode == "stochastic":
        effective = replace(params, alpha=0.0)

    branch_ss, pheromone_ss = np.random.SeedSequence(params.seed).spawn(2)
    branch_rng = np.random.default_rng(branch_ss)
    pheromone_rng = np.random.default_rng(pheromone_ss)

    tau = PheromoneStore(eph.n, effective.population_size)
    archive = Archive()
    log = RunLog()

    generation = 0
    while True:
        generation += 1
        beam = run_generation(root, effective, tau, branch_rng, log, config, phasing_cfg, eph)
        known = {t.visited for t in archive.front}
        prev_best = archive.best_score
        archive = archive_merge(archive, beam)
        if archive.best_score > prev_best:
            known = set()
        for traj in archive.front:
            if traj.visited not in known:
                log.record_solution(traj)
        log.record_generation_end(generation, len(beam), archive)

        if mode == "deterministic":
            break
        if log.leg_count >= effective.leg_budget:
            break
        if mode == "paco":
            pheromone_reset(archive, tau, pheromone_rng)
    return archive, log
