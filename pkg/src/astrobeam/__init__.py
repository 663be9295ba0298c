"""Multi-rendezvous spacecraft mission design.

Bilevel optimization of asteroid tour missions: an upper-level tree search
(deterministic beam, stochastic beam, or beam P-ACO, all one parameterized
algorithm) chooses the asteroid sequence while a lower-level grid of
Lambert-arc solves prices each transfer leg under GTOC5-style resource
accounting.
"""

from ._kernels import NO_NUMBA_ENV, jit_enabled
from .ephemeris import (
    AU,
    DAY,
    MU_SUN,
    Ephemeris,
    OrbitalElements,
    StateVector,
    UnsupportedOrbitError,
    elements_from_state,
    propagate,
    solve_kepler,
)
from .harness import (
    AsteroidDataset,
    CorrelationReport,
    DatasetError,
    attainment_function,
    attainment_surface,
    count_distinct_solutions,
    default_root_state,
    feasible_leg_fraction,
    generate_synthetic_belt,
    hypervolume_series,
    indicator_correlation_report,
    load_dataset,
    save_dataset,
)
from .lambert import (
    DegenerateGeometryError,
    LambertSolution,
    barker_parabolic_tof,
    cheapest_transfer,
    solve_lambert,
)
from .mission import (
    GTOC5_ROOT,
    Leg,
    MissionConfig,
    MissionState,
    evaluate_objectives,
    extend,
    gtoc5_root_state,
    initial_state,
    optimize_rendezvous_leg,
    propellant_for,
    self_flyby_leg,
)
from .pareto import (
    Archive,
    ObjectivePoint,
    archive_merge,
    dominates,
    hypervolume_2d,
    non_dominated_sort,
    rank_and_select,
)
from .phasing import (
    PhasingConfig,
    improved_indicator,
    indicator_costs,
    orbital_indicator,
    rank_heuristic,
    rank_weights,
)
from .search import (
    PheromoneStore,
    RunLog,
    SearchParams,
    branch,
    combined_heuristic,
    pheromone_reset,
    run_generation,
    run_search,
)

__version__ = "0.1.0"
