__version__ = "0.1.0"

from .community import Clustering, Clusterer, cluster_greedy_modularity, modularity
from .config import SearchConfig, load_config
from .discovery import (
    DiscoveryReport,
    PairTableRow,
    enumerate_pairs,
    find_unexpected,
    select_distant_set,
    unexpected_objective,
)
from .errors import MultiEdgeError
from .metaclustering import (
    Ensemble,
    MetaClusteringReport,
    analyze_ensemble,
    build_meta_graph,
    cspa_consensus,
    invariant_groups,
    metacluster,
    order_representatives,
    sample_alphas,
    sample_clustering_space,
    seriate,
)
from .metrics import entropy, mutual_information, setwise_information, vi_distance, vi_matrix
from .multigraph import (
    Graph,
    MultiGraph,
    WeightVector,
    aggregate_linear,
    aggregate_product,
    aggregate_union,
    load_multigraph,
    normalize_edge_types,
)
from .optimizer import multistart, pattern_search
from .recovery import (
    HoldingReport,
    ParetoPoint,
    arctan_objective,
    correlation_sweep,
    cut_objective,
    holding_power,
    inverse_objective,
    pareto_sweep,
    pull,
    recover_weights,
)
from .synth import GridSpec, PlantedSpec, generate_grid, generate_planted, perturb

__all__ = [
    "Clustering",
    "Clusterer",
    "DiscoveryReport",
    "Ensemble",
    "Graph",
    "GridSpec",
    "HoldingReport",
    "MetaClusteringReport",
    "MultiEdgeError",
    "MultiGraph",
    "PairTableRow",
    "ParetoPoint",
    "PlantedSpec",
    "SearchConfig",
    "WeightVector",
    "aggregate_linear",
    "aggregate_product",
    "aggregate_union",
    "analyze_ensemble",
    "arctan_objective",
    "build_meta_graph",
    "cluster_greedy_modularity",
    "correlation_sweep",
    "cspa_consensus",
    "cut_objective",
    "entropy",
    "enumerate_pairs",
    "find_unexpected",
    "generate_grid",
    "generate_planted",
    "holding_power",
    "invariant_groups",
    "inverse_objective",
    "load_config",
    "load_multigraph",
    "metacluster",
    "modularity",
    "multistart",
    "mutual_information",
    "normalize_edge_types",
    "order_representatives",
    "pareto_sweep",
    "pattern_search",
    "perturb",
    "pull",
    "recover_weights",
    "sample_alphas",
    "sample_clustering_space",
    "select_distant_set",
    "seriate",
    "setwise_information",
    "unexpected_objective",
    "vi_distance",
    "vi_matrix",
]
