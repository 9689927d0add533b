"""Sparse hypergraph toolkit.

Claim indices and cluster partitions of r-uniform hypergraphs, exact
rational pair-weighting certificates, lower-bound constructions with
verifiers, and small exact extremal searches.
"""

from .errors import (
    BeslabError,
    DuplicateEdge,
    NoOrder,
    NotFree,
    TooLarge,
    Unknown,
    VertexOutOfRange,
    WrongArity,
    WrongStage,
)
from .hypergraphs import (
    ABOVE_CAP,
    NOT_TREE,
    ClaimProfile,
    ClaimSet,
    ConfigQuery,
    FreenessResult,
    Hypergraph,
    Pair,
    TreeClass,
    build,
    claim_profile,
    claim_set,
    claimed_pairs,
    classify_tree,
    defect,
    family_queries,
    family_violation_containing,
    find_configuration,
    find_configuration_containing,
    from_text,
    girth,
    graph_doc,
    is_family_free,
    one_bar_two,
    pairs_claimed_upto,
    shadow,
    to_text,
)
from .merging import (
    RULE_11,
    RULE_12,
    RULE_2PLUS,
    RULE_3PLUS,
    Cluster,
    Composition,
    MergeEvent,
    MergeRule,
    Partition,
    composition,
    m11,
    m12,
    m2plus,
    m3plus,
    merge,
    partition_report,
    replay_trace,
    rule_doc,
    tp_pair_set,
    trimming_order,
    trivial_partition,
    two_plus_claims,
)
from .weights import (
    WeightReport,
    WeightRule,
    bound_coefficient,
    certify,
    cluster_weight,
    h_value,
    lambda_value,
    limit_table,
    pair_weight,
    report_doc,
    rule_for,
)
from .constructions import (
    ConstructionReport,
    PackingPairGraph,
    RandomParams,
    check_peel_order,
    conflict_family_ids,
    construction_doc,
    diamond_peel_order,
    diamond_star,
    enumerate_S,
    enumerate_conflicts,
    f63,
    gr_limit,
    gr_linear_bounds,
    lower_bound_ratio,
    random_packing_construction,
    single_edge,
)
from .turan import (
    SweepReport,
    SweepRow,
    TuranResult,
    consistency_sweep,
    exact_turan,
    exact_turan_family,
    size_cap,
    sweep_doc,
    turan_doc,
)

__version__ = "0.1.0"

__all__ = [
    "ABOVE_CAP",
    "BeslabError",
    "ClaimProfile",
    "ClaimSet",
    "Cluster",
    "Composition",
    "ConfigQuery",
    "ConstructionReport",
    "DuplicateEdge",
    "FreenessResult",
    "Hypergraph",
    "MergeEvent",
    "MergeRule",
    "NOT_TREE",
    "NoOrder",
    "NotFree",
    "PackingPairGraph",
    "Pair",
    "Partition",
    "RandomParams",
    "RULE_11",
    "RULE_12",
    "RULE_2PLUS",
    "RULE_3PLUS",
    "SweepReport",
    "SweepRow",
    "TooLarge",
    "TreeClass",
    "TuranResult",
    "Unknown",
    "VertexOutOfRange",
    "WeightReport",
    "WeightRule",
    "WrongArity",
    "WrongStage",
    "bound_coefficient",
    "build",
    "certify",
    "check_peel_order",
    "claim_profile",
    "claim_set",
    "claimed_pairs",
    "classify_tree",
    "cluster_weight",
    "composition",
    "conflict_family_ids",
    "consistency_sweep",
    "construction_doc",
    "defect",
    "diamond_peel_order",
    "diamond_star",
    "enumerate_S",
    "enumerate_conflicts",
    "exact_turan",
    "exact_turan_family",
    "f63",
    "family_queries",
    "family_violation_containing",
    "find_configuration",
    "find_configuration_containing",
    "from_text",
    "girth",
    "gr_limit",
    "gr_linear_bounds",
    "graph_doc",
    "h_value",
    "is_family_free",
    "lambda_value",
    "limit_table",
    "lower_bound_ratio",
    "m11",
    "m12",
    "m2plus",
    "m3plus",
    "merge",
    "one_bar_two",
    "pair_weight",
    "pairs_claimed_upto",
    "partition_report",
    "random_packing_construction",
    "replay_trace",
    "report_doc",
    "rule_doc",
    "rule_for",
    "shadow",
    "single_edge",
    "size_cap",
    "sweep_doc",
    "to_text",
    "tp_pair_set",
    "trimming_order",
    "trivial_partition",
    "turan_doc",
    "two_plus_claims",
]
