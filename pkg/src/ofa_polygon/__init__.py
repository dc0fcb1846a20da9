"""Expected cost of greedy online facility assignment on regular polygons."""

__version__ = "0.1.0"

from ofa_polygon.geometry import (
    Segment,
    cost_profile,
    cycle_distance,
    edge_walk_distance,
    nearest_free,
)
from ofa_polygon.dihedral import (
    Symmetry,
    apply_symmetry,
    canonicalize,
    enumerate_canonical_states,
)
from ofa_polygon.exact_dp import (
    TransitionRow,
    ValueTable,
    edge_integral,
    load_table,
    per_arrival_expectations,
    save_table,
    transition_kernel,
    value_function,
)
from ofa_polygon.montecarlo import (
    Estimate,
    RunTrace,
    SeedSpec,
    estimate_per_arrival,
    estimate_total,
    mc_state_dp,
    simulate_run,
)

__all__ = [
    "Estimate",
    "RunTrace",
    "SeedSpec",
    "Segment",
    "Symmetry",
    "TransitionRow",
    "ValueTable",
    "apply_symmetry",
    "canonicalize",
    "cost_profile",
    "cycle_distance",
    "edge_integral",
    "edge_walk_distance",
    "enumerate_canonical_states",
    "estimate_per_arrival",
    "estimate_total",
    "load_table",
    "mc_state_dp",
    "nearest_free",
    "per_arrival_expectations",
    "save_table",
    "simulate_run",
    "transition_kernel",
    "value_function",
]
