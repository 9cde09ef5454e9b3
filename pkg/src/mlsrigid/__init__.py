"""Exact marked length spectrum rigidity for finite metric graphs."""
from .metric_graph import (
    CoreGraph,
    GraphFormatError,
    GraphPoint,
    HalfEdge,
    MetricGraph,
    compute_core,
    distance,
    graph_from_json,
    graph_to_json,
    is_branch_point,
    minimizer_edges,
    to_dot,
)
from .paths_words import (
    ContractError,
    EdgePath,
    concat,
    concatenate_reduced,
    cyclically_reduce,
    extend_to_geodesic_loop,
    inverse,
    is_cyclically_reduced,
    is_reduced,
    make_path,
    parse_path,
    path_length,
    reduce,
    reduced_loop_through,
)
from .reconstruct import (
    DistinguishingPair,
    NotApplicable,
    ReconstructionResult,
    SpectrumInconsistent,
    all_distinguishing_pairs,
    build_distinguishing_pair,
    certify_isometry,
    check_alpha_equals_beta,
    check_incidence,
    isometric,
    reconstruct_core,
    recover_length,
    replay_certificate,
)
from .rtree import (
    ActionType,
    CoverBall,
    InsufficientRadius,
    build_cover_ball,
    classify_action,
    translation_length,
)
from .spectrum import (
    INFINITE,
    Marking,
    RankZeroError,
    SpectrumOracle,
    build_marking,
    format_word,
    loop_to_word,
    make_oracle,
    mls,
    parse_word,
    spectrum_dump,
    word_to_loop,
)
