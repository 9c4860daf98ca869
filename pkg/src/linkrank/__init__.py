"""Link analysis on sparse web graphs: HITS, degree-weighted HITS and PageRank."""

from .graph import (
    EdgeListFormat,
    GraphParseError,
    GraphStats,
    WebGraph,
    back_button_transform,
    compute_stats,
    dangling_nodes,
    load_edge_list,
    load_graph,
    write_edge_list,
)
from .metrics import SimilarityReport, cosine, l1_distance, spearman, topk_overlap
from .ranking import (
    AlgorithmKind,
    ConvergenceTrace,
    DegenerateGraphError,
    HitsResult,
    RankVector,
    SolverConfig,
    TerminationReason,
    count_costs,
    run_accelerated_hits,
    run_accelerated_hits_positive,
    run_hits,
    run_pagerank,
)
from .synth import SynthSpec, generate
from .weights import WeightDiagonals, compute_weights

__version__ = "0.1.0"
