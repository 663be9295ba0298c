"""Dataset ingestion, synthetic belts, and run-log metrics.

The dataset format is delimited text, one body per line::

    id  name  epoch_mjd  a_au  e  i_deg  raan_deg  argp_deg  mean_anom_deg

Fields are whitespace separated (names may contain internal spaces) or
comma separated. Lines starting with '#' are comments. Ids must cover
0..n-1 exactly, in any order, and every orbit must be elliptic. Metric
operations replay the line-delimited event logs written by search runs and
emit step series keyed by the cumulative optimized-leg count, which is the
cost measure all experiments are compared on.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .ephemeris import AU, MU_SUN, Ephemeris, OrbitalElements
from .mission import MissionConfig, MissionState, initial_state, optimize_rendezvous_leg
from .pareto import hypervolume_2d
from .phasing import PhasingConfig, indicator_costs
from .search import RunLog

GTOC5_BODY_COUNT = 7075


class DatasetError(ValueError):
    """Malformed or inconsistent asteroid dataset."""


@dataclass(frozen=True)
class AsteroidDataset:
    """Asteroid catalog: names plus a batch-query ephemeris, ids 0..n-1."""

    names: tuple[str, ...]
    eph: Ephemeris

    @property
    def n(self) -> int:
        return self.eph.n

    def id_of(self, name: str) -> int | None:
        wanted = name.strip().lower()
        for i, existing in enumerate(self.names):
            if existing.strip().lower() == wanted:
                return i
        return None


_FIELDS = ("epoch", "a", "e", "i", "raan", "argp", "mean_anomaly")


def _parse_row(line: str, lineno: int) -> tuple[int, str, list[float]]:
    if "," in line:
        tokens = [t.strip() for t in line.split(",")]
    else:
        tokens = line.split()
    if len(tokens) < 9:
        raise DatasetError(f"line {lineno}: expected 9 fields, got {len(tokens)}")
    try:
        body_id = int(tokens[0])
    except ValueError:
        raise DatasetError(f"line {lineno}: field 'id' is not an integer: {tokens[0]!r}") from None
    name = " ".join(tokens[1:-7])
    values = []
    for field_name, token in zip(_FIELDS, tokens[-7:]):
        try:
            value = float(token)
        except ValueError:
            raise DatasetError(
                f"line {lineno}: field {field_name!r} is not a number: {token!r}"
            ) from None
        if not math.isfinite(value):
            raise DatasetError(f"line {lineno}: field {field_name!r} is not finite")
        values.append(value)
    return body_id, name, values


def load_dataset(path, mu: float = MU_SUN) -> AsteroidDataset:
    """Load and validate a delimited-text asteroid catalog."""
    path = Path(path)
    rows: dict[int, tuple[str, OrbitalElements]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            body_id, name, (epoch, a_au, ecc, inc, raan, argp, mean_anom) = _parse_row(
                line, lineno
            )
            if body_id in rows:
                raise DatasetError(f"line {lineno}: duplicate id {body_id}")
            if ecc >= 1.0:
                raise DatasetError(
                    f"line {lineno}: body {body_id} rejected, eccentricity {ecc} is not elliptic"
                )
            if ecc < 0.0:
                raise DatasetError(f"line {lineno}: field 'e' must be non-negative")
            if a_au <= 0.0:
                raise DatasetError(f"line {lineno}: field 'a' must be positive")
            rows[body_id] = (
                name,
                OrbitalElements(
                    semi_major_axis=a_au * AU,
                    eccentricity=ecc,
                    inclination=math.radians(inc),
                    raan=math.radians(raan),
                    arg_periapsis=math.radians(argp),
                    mean_anomaly_ref=math.radians(mean_anom),
                    epoch_ref=epoch,
                    body_id=body_id,
                ),
            )
    if not rows:
        raise DatasetError(f"{path}: no bodies found")
    n = len(rows)
    missing = set(range(n)) - set(rows)
    if missing:
        raise DatasetError(
            f"{path}: ids must cover 0..{n - 1} exactly; missing {sorted(missing)[:5]}"
        )
    names = tuple(rows[i][0] for i in range(n))
    elements = [rows[i][1] for i in range(n)]
    return AsteroidDataset(names=names, eph=Ephemeris(elements, mu=mu))


def save_dataset(dataset: AsteroidDataset, path) -> None:
    """Write a catalog back out in the dataset text format."""
    eph = dataset.eph
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("# id name epoch_mjd a_au e i_deg raan_deg argp_deg mean_anom_deg\n")
        for i in range(dataset.n):
            fh.write(
                f"{i} {dataset.names[i]} {eph.epoch0[i]:.6f} {eph.a[i] / AU:.12f} "
                f"{eph.e[i]:.12f} {math.degrees(eph.inc[i]):.10f} "
                f"{math.degrees(eph.raan[i]):.10f} {math.degrees(eph.argp[i]):.10f} "
                f"{math.degrees(eph.m0[i]):.10f}\n"
            )


def generate_synthetic_belt(
    count: int,
    seed: int,
    a_range_au: tuple[float, float] = (2.0, 3.5),
    e_range: tuple[float, float] = (0.0, 0.3),
    i_range_deg: tuple[float, float] = (0.0, 10.0),
    epoch: float = 59000.0,
    mu: float = MU_SUN,
) -> AsteroidDataset:
    """Reproducible random belt with main-belt-like element ranges."""
    if count < 2:
        raise ValueError("a belt needs at least two bodies")
    for lo, hi, label in (
        (*a_range_au, "a"),
        (*e_range, "e"),
        (*i_range_deg, "i"),
    ):
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValueError(f"degenerate range for {label}: ({lo}, {hi})")
    if a_range_au[0] <= 0.0:
        raise ValueError("semi-major axes must be positive")
    if not 0.0 <= e_range[0] <= e_range[1] < 1.0:
        raise ValueError("eccentricity range must stay inside [0, 1)")

    rng = np.random.default_rng(seed)
    elements = [
        OrbitalElements(
            semi_major_axis=rng.uniform(*a_range_au) * AU,
            eccentricity=rng.uniform(*e_range),
            inclination=math.radians(rng.uniform(*i_range_deg)),
            raan=rng.uniform(0.0, 2.0 * math.pi),
            arg_periapsis=rng.uniform(0.0, 2.0 * math.pi),
            mean_anomaly_ref=rng.uniform(0.0, 2.0 * math.pi),
            epoch_ref=epoch,
            body_id=i,
        )
        for i in range(count)
    ]
    names = tuple(f"SYN-{i:04d}" for i in range(count))
    return AsteroidDataset(names=names, eph=Ephemeris(elements, mu=mu))


def default_root_state(
    dataset: AsteroidDataset,
    config: MissionConfig,
    body: int | None = None,
    epoch: float | None = None,
) -> MissionState:
    """Root for a search run.

    The full 7075-body catalog defaults to the reference root (asteroid
    2001 GP2 with the launch leg already expended); anything else starts
    fresh at the requested body (default 0) at the catalog epoch.
    """
    if body is None and dataset.n == GTOC5_BODY_COUNT:
        gp2 = dataset.id_of("2001 GP2")
        from .mission import GTOC5_ROOT

        root = dict(GTOC5_ROOT)
        if gp2 is not None:
            root["body"] = gp2
        if epoch is not None:
            root["epoch"] = epoch
        return initial_state(**root, config=config)
    body = 0 if body is None else body
    if not 0 <= body < dataset.n:
        raise DatasetError(f"root body {body} outside catalog of {dataset.n}")
    if epoch is None:
        epoch = float(dataset.eph.epoch0[body])
    return initial_state(body, epoch, config=config)


# --------------------------------------------------------------------------
# Run-log metrics
# --------------------------------------------------------------------------

def _solution_events(log: RunLog):
    return (e for e in log.events if e["kind"] == "solution_found")


def count_distinct_solutions(log: RunLog, min_score: int) -> list[tuple[int, int]]:
    """Cumulative count of distinct sequences scoring at least ``min_score``.

    Two trajectories are the same solution only when their asteroid
    sequences match exactly; a permuted visit order is a different solution.
    """
    seen: set[tuple[int, ...]] = set()
    series: list[tuple[int, int]] = []
    for event in _solution_events(log):
        if event["score"] < min_score:
            continue
        seq = tuple(event["sequence"])
        if seq not in seen:
            seen.add(seq)
            series.append((event["legs"], len(seen)))
    return series


def hypervolume_series(
    log: RunLog, score: int, reference: tuple[float, float]
) -> list[tuple[int, float]]:
    """Dominated-area growth for solutions of exactly ``score``.

    Step series of the hypervolume of the (mass, time) front assembled from
    the log's solutions so far; starts at 0.0 and never decreases.
    """
    series: list[tuple[int, float]] = [(0, 0.0)]
    front: list[tuple[float, float]] = []
    for event in _solution_events(log):
        if event["score"] != score:
            continue
        front.append((event["mass"], event["time"]))
        series.append((event["legs"], hypervolume_2d(front, reference)))
    return series


def feasible_leg_fraction(log: RunLog) -> float:
    """Share of optimized legs that had a feasible solution."""
    total = 0
    feasible = 0
    for event in log.events:
        if event["kind"] == "leg_optimized":
            total += 1
            feasible += bool(event["feasible"])
    return feasible / total if total else 0.0


def attainment_function(
    final_fronts: list[list[tuple[float, float]]], grid: np.ndarray
) -> np.ndarray:
    """Empirical attainment: per grid point, the fraction of runs whose
    front weakly dominates (or matches) it."""
    if not final_fronts:
        raise ValueError("need at least one run's front")
    grid = np.asarray(grid, dtype=np.float64).reshape(-1, 2)
    attained = np.zeros(grid.shape[0])
    for front in final_fronts:
        if front:
            pts = np.asarray(front, dtype=np.float64).reshape(-1, 2)
            attained += (pts[:, None, :] <= grid[None, :, :]).all(axis=2).any(axis=0)
    return attained / len(final_fronts)


def attainment_surface(
    final_fronts: list[list[tuple[float, float]]],
    mass_axis: np.ndarray,
    time_axis: np.ndarray,
    level: float,
) -> np.ndarray:
    """For each mass, the smallest grid time attained with probability >=
    ``level`` (NaN where never attained)."""
    mass_axis = np.asarray(mass_axis, dtype=np.float64)
    time_axis = np.sort(np.asarray(time_axis, dtype=np.float64))
    mm, tt = np.meshgrid(mass_axis, time_axis)
    grid = np.column_stack([mm.ravel(), tt.ravel()])
    att = attainment_function(final_fronts, grid).reshape(len(time_axis), len(mass_axis))
    surface = np.full(len(mass_axis), np.nan)
    for j in range(len(mass_axis)):
        hit = np.nonzero(att[:, j] >= level)[0]
        if hit.size:
            surface[j] = time_axis[hit[0]]
    return surface


@dataclass(frozen=True)
class CorrelationReport:
    """Rank correlation of the phasing indicators against optimized leg cost."""

    source: int
    epoch: float
    n_sampled: int
    n_feasible: int
    spearman_two_sided: float
    spearman_forward: float


def indicator_correlation_report(
    dataset: AsteroidDataset,
    epoch: float,
    sample_size: int,
    seed: int,
    source: int | None = None,
    config: MissionConfig = MissionConfig(),
    phasing_cfg: PhasingConfig = PhasingConfig(),
) -> CorrelationReport:
    """Spearman correlation between indicator cost and true minimum leg cost.

    Samples targets, optimizes the actual rendezvous leg to each (the
    ground truth the indicator tries to predict cheaply), and reports the
    tie-aware rank correlation for the two-sided indicator with the
    forward-only variant alongside. Reported, not asserted: the indicator
    is a heuristic, not a guarantee.
    """
    if sample_size > dataset.n - 1:
        raise ValueError("sample size exceeds available targets")
    rng = np.random.default_rng(seed)
    if source is None:
        source = int(rng.integers(dataset.n))
    candidates = np.setdiff1d(np.arange(dataset.n), [source])
    targets = rng.choice(candidates, size=sample_size, replace=False)

    costs_two = indicator_costs(source, epoch, phasing_cfg, dataset.eph, two_sided=True)
    costs_fwd = indicator_costs(source, epoch, phasing_cfg, dataset.eph, two_sided=False)

    root = initial_state(source, epoch, config=config)
    truth = []
    kept_two = []
    kept_fwd = []
    for target in targets:
        leg = optimize_rendezvous_leg(root, int(target), config, dataset.eph)
        if leg is None:
            continue
        truth.append(leg.dv)
        kept_two.append(costs_two[target])
        kept_fwd.append(costs_fwd[target])

    if len(truth) >= 2:
        rho_two = float(stats.spearmanr(kept_two, truth).statistic)
        rho_fwd = float(stats.spearmanr(kept_fwd, truth).statistic)
    else:
        rho_two = math.nan
        rho_fwd = math.nan
    return CorrelationReport(
        source=source,
        epoch=epoch,
        n_sampled=int(sample_size),
        n_feasible=len(truth),
        spearman_two_sided=rho_two,
        spearman_forward=rho_fwd,
    )
