"""mdskit: metric MDS / force-directed graph layout toolkit.

Embeds finite metric spaces (notably shortest-path metrics of
unweighted graphs) into low-dimensional Euclidean space by minimizing
the relative-distortion stress objective. Ships a net-discretized
greedy solver with an additive error guarantee, gradient-descent and
spectral baselines, closed-form structural diagnostics, and a
desk-scale lab for the clique-gadget hardness reduction.
"""

from .baselines import (
    GdParams,
    gradient_descent,
    gradient_descent_restarts,
    greedy_then_grad,
    spectral_embed,
)
from .csp import CspInstance, brute_force_csp, csp_value, greedy_csp, random_instance
from .estimators import (
    GradientStressEmbedding,
    GreedyStressEmbedding,
    HybridStressEmbedding,
    LaplacianEmbedding,
    as_distance_matrix,
)
from .exceptions import InvariantViolation, ParseError, ResourceGuardError
from .graphs import (
    DistanceMatrix,
    Graph,
    apsp,
    clique_path_integer_layout,
    davis_southern_women,
    format_edge_list,
    gen_clique_path,
    gen_sbm,
    gen_watts_strogatz,
    parse_distance_csv,
    parse_edge_list,
)
from .hardness import (
    GadgetParams,
    SatInstance,
    all_equal_count,
    assignment_to_layout,
    build_reduction_graph,
    gap_probe,
    parse_sat,
    regularize,
)
from .nets import EpsNet, build_net, snap
from .scheme import SchemeParams, kk_scheme, net_restricted_optimum, run_with_restarts
from .stress import (
    normalized_stress,
    stress,
    stress_cross,
    stress_gradient,
    stress_subset,
    weighted_stress,
)
from .structural import (
    StructuralReport,
    clique_optimal,
    concentration_profile,
    diameter_upper_bound,
    energy_lower_bound,
    layout_diameter,
    structural_report,
)

__version__ = "0.1.0"
