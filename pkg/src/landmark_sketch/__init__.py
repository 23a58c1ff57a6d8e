"""Landmark-based distance labelings for unweighted graphs."""

from .baselines import DasSarmaConfig, TZConfig, build_das_sarma, build_tz
from .estimators import (
    ApproximatePruning,
    DasSarmaSketch,
    PrunedLandmarkLabeling,
    ThorupZwickSketch,
    check_graph,
    check_pairs,
)
from .evaluation import EvalReport, QueryPairs, SoundnessError, evaluate, sample_pairs, verify_two_hop_cover
from .generators import (
    WeightSequence,
    chung_lu_power_law,
    generate_chung_lu,
    generate_er,
    sample_power_law_weights,
    x_min_for_mean,
)
from .graph import (
    BACKWARD,
    FORWARD,
    UNREACHABLE,
    Graph,
    bfs,
    bounded_bfs,
    degree_ordering,
    edge_boundary_count,
    load_edge_list,
    write_edge_list,
)
from .labeling import (
    EXHAUSTED,
    BallVolume,
    BuildConfig,
    EdgeBoundary,
    Fixed,
    TheoreticalParams,
    build,
    build_approx,
    build_pruned,
    radius_from_ball_volume,
    radius_from_edge_boundary,
    theoretical_params,
)
from .labels import (
    LandmarkLabels,
    deserialize_labels,
    query_distance,
    query_distances,
    query_lookup_count,
    serialize_labels,
)

__version__ = "0.1.0"
