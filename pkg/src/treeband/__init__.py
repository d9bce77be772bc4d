"""treeband: tree-layouts and the treebandwidth parameter.

Exact computation via the configuration-window search, structure-theorem
approximation via decomposition folding, fan/dipole obstruction detection,
SPQR-based characterisations, p-centered colourings and the occupation-time
searching game, all verified against brute-force oracles at desk scale.
"""

from .exceptions import (
    BudgetExceededError,
    FormatError,
    InvalidLayoutError,
    ParameterError,
    PreconditionError,
    SizeLimitError,
    StructureError,
    TreebandError,
)
from .graphs import (
    BlockCutTree,
    FamilySpec,
    Graph,
    biconnected_components,
    connected_components,
    generate_family,
    menger_cut,
    menger_mu,
    parse_graph,
    serialize_graph,
)
from .layouts import (
    LinearLayout,
    TreeLayout,
    TreePartition,
    bandwidth_of_layout,
    edge_treewidth_of_layout,
    extend_layout_to_subdivision,
    layout_from_tree_partition,
    linear_bandwidth,
    parse_layout,
    proper_chordal_completion,
    serialize_layout,
    treespan_of_layout,
    validate_layout,
)
from .decompositions import (
    TreeDecomposition,
    TreeQueryIndex,
    build_query_index,
    check_dipole_conditions,
    check_fan_conditions,
    enforce_wellformed,
    exact_tree_decomposition,
    heuristic_tree_decomposition,
    layout_from_decomposition,
    measure_dipole_parameters,
    measure_fan_parameters,
    neighbourhood_trees,
    overlap_number,
    parse_decomposition,
    serialize_decomposition,
    validate_decomposition,
    weight_w,
)
from .folding import fold_dipole, fold_fan, fan_fold_diameter_bound, vertex_subtree_diameters
from .obstructions import (
    EliminationForest,
    dipole_number,
    exact_parameter,
    fan_number,
    internally_disjoint_paths,
    neighbourhood_treedepth,
    rooted_path_minor,
    rooted_treedepth,
)
from .spqr import (
    SpqrTree,
    build_spqr,
    gem_free_check,
    planar_fan_conditions,
    planar_layout_construct,
    serialize_spqr,
    tree_partition_construct,
)
from .solver import (
    Configuration,
    approximate_treebandwidth,
    decide_treebandwidth,
    exact_treebandwidth,
    overlap_treewidth_pipeline,
)
from .coloring import Colouring, pcentered_from_layout, verify_pcentered
from .searchgame import SearchTrace, layout_from_strategy, strategy_from_layout
