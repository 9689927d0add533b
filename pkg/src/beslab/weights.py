"""Exact rational pair weightings over cluster partitions.

Each rule assigns fractions to vertex pairs of a cluster so that the total
weight is large against the edge count (slack ``lambda >= 0``) while every
pair collects total weight at most 1 across the partition.  Together these
certify an edge bound of ``coefficient * n*(n-1)/2`` for the ambient graph.
All arithmetic uses :class:`fractions.Fraction`; nothing is floated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NotFree, Unknown, WrongStage
from .hypergraphs import (
    Hypergraph,
    Pair,
    claim_profile,
    claim_set,
    classify_tree,
    is_family_free,
    one_bar_two,
    shadow,
)
from .merging import (
    Cluster,
    Partition,
    composition,
    m11,
    m12,
    m2plus,
    m3plus,
    tp_pair_set,
)

# Base weight function on claim-index sets for the (3,6) rule.  h is the
# maximum of f over subsets, making it monotone; h(A) > 0 exactly when A
# meets {1, 2, 3}.
_F_TABLE: dict[frozenset[int], Fraction] = {
    frozenset({1}): Fraction(55, 61),
    frozenset({1, 2}): Fraction(1),
    frozenset({1, 3}): Fraction(1),
    frozenset({1, 4}): Fraction(55, 61),
    frozenset({1, 5}): Fraction(55, 61),
    frozenset({2}): Fraction(25, 61),
    frozenset({2, 3}): Fraction(36, 61),
    frozenset({2, 3, 4}): Fraction(1),
    frozenset({2, 4}): Fraction(1, 2),
    frozenset({3}): Fraction(6, 61),
    frozenset({3, 5}): Fraction(11, 61),
    frozenset({3, 4}): Fraction(1),
}

_H_TABLE: dict[frozenset[int], Fraction] = {}
for _bits in range(32):
    _A = frozenset(i + 1 for i in range(5) if _bits >> i & 1)
    _best = Fraction(0)
    for _size in range(len(_A) + 1):
        for _sub in itertools.combinations(sorted(_A), _size):
            _val = _F_TABLE.get(frozenset(_sub))
            if _val is not None and _val > _best:
                _best = _val
    _H_TABLE[_A] = _best


def h_value(A) -> Fraction:
    """Monotone weight of a set of claim indices ``A`` (subset of 1..5)."""
    fa = frozenset(A)
    if not fa <= {1, 2, 3, 4, 5}:
        raise ValueError(f"claim indices must lie in 1..5, got {sorted(fa)}")
    return _H_TABLE[fa]


_CASES = {
    "K5R3": {"k": 5, "stage": "m11", "r_check": lambda r: r == 3},
    "K5High": {"k": 5, "stage": "m2plus", "r_check": lambda r: r >= 4},
    "K7": {"k": 7, "stage": "m2plus", "r_check": lambda r: r >= 3},
    "K6High": {"k": 6, "stage": "m12", "r_check": lambda r: r >= 4},
    "K63": {"k": 6, "stage": "m3plus", "r_check": lambda r: r == 3},
}


@dataclass(frozen=True)
class WeightRule:
    """One of the five weighting cases, pinned to a uniformity and k."""

    case: str
    r: int
    k: int

    def __post_init__(self) -> None:
        info = _CASES.get(self.case)
        if info is None:
            raise ValueError(f"unknown weighting case {self.case!r}")
        if self.k != info["k"]:
            raise ValueError(f"{self.case} certifies k={info['k']}, not k={self.k}")
        if not info["r_check"](self.r):
            raise ValueError(f"{self.case} does not apply at uniformity r={self.r}")

    @staticmethod
    def for_case(case: str, r: int) -> "WeightRule":
        info = _CASES.get(case)
        if info is None:
            raise ValueError(f"unknown weighting case {case!r}")
        return WeightRule(case, r, info["k"])

    @property
    def stage(self) -> str:
        return _CASES[self.case]["stage"]


def rule_for(r: int, k: int) -> WeightRule:
    """The weighting rule that certifies parameter ``k`` at uniformity ``r``."""
    if k == 5:
        return WeightRule("K5R3", 3, 5) if r == 3 else WeightRule("K5High", r, 5)
    if k == 6:
        return WeightRule("K63", 3, 6) if r == 3 else WeightRule("K6High", r, 6)
    if k == 7:
        return WeightRule("K7", r, 7)
    raise Unknown(f"no weighting rule for (r, k) = ({r}, {k})")


def _check_cluster(F: Cluster, rule: WeightRule) -> None:
    if F.stage != rule.stage:
        raise WrongStage(
            f"{rule.case} weights apply to {rule.stage} clusters, got {F.stage!r}"
        )
    if F.part.r != rule.r:
        raise WrongStage(
            f"{rule.case} is pinned to uniformity r={rule.r}, cluster has r={F.part.r}"
        )


def _deficit_pair(F: Cluster) -> Optional[Pair]:
    """Extra unit-weight pair for 3- and 4-edge tree clusters (r = 3).

    The lexicographically smallest 2-not-1-claimed pair of the cluster whose
    claim set against the rest of the ambient graph misses both 1 and 2.
    Returns ``None`` when no pair qualifies.
    """
    part = F.part
    if len(part.edges) not in (3, 4):
        return None
    if not classify_tree(part).is_tree:
        return None
    candidates = sorted(one_bar_two(part))
    if not candidates:
        return None
    own = set(F.edge_indices)
    rest = F.ambient.subgraph(i for i in range(len(F.ambient.edges)) if i not in own)
    for p in candidates:
        cs = claim_set(rest, p, 2)
        if 1 not in cs.members and 2 not in cs.members:
            return p
    return None


def _pair_weight_map(F: Cluster, rule: WeightRule) -> dict[Pair, Fraction]:
    """Nonzero pair weights of a cluster (support lies inside V(F))."""
    _check_cluster(F, rule)
    part = F.part
    case = rule.case
    if case == "K5R3":
        out = {p: Fraction(1) for p in shadow(part)}
        extra = _deficit_pair(F)
        if extra is not None:
            out[extra] = Fraction(1)
        return out
    if case in ("K5High", "K7"):
        p1 = shadow(part)
        out = {p: Fraction(1) for p in p1}
        late = Fraction(1) if case == "K5High" else Fraction(1, 2)
        for p in tp_pair_set(part) - p1:
            out[p] = late
        return out
    if case == "K6High":
        p1 = shadow(part)
        out = {p: Fraction(1) for p in p1}
        late = (
            Fraction(1)
            if composition(F).sizes == (2, 1, 1, 1)
            else Fraction(1, 2)
        )
        for p in one_bar_two(part):
            out[p] = late
        return out
    # K63: h of the claim set, over all pairs inside V(F)
    prof = claim_profile(part, 5)
    out = {}
    for u, v in itertools.combinations(part.vertices(), 2):
        members = frozenset(i for i in range(1, 6) if prof.bits(u, v) >> i & 1)
        val = _H_TABLE[members]
        if val:
            out[Pair(u, v)] = val
    return out


def pair_weight(F: Cluster, p: Pair, rule: WeightRule) -> Fraction:
    """Weight the rule assigns to pair ``p`` within cluster ``F``."""
    return _pair_weight_map(F, rule).get(p, Fraction(0))


def cluster_weight(F: Cluster, rule: WeightRule) -> Fraction:
    """Total weight of ``F``: sum of pair weights over pairs inside V(F)."""
    return sum(_pair_weight_map(F, rule).values(), Fraction(0))


def _lambda_from_weight(w: Fraction, edge_count: int, rule: WeightRule) -> Fraction:
    r = rule.r
    if rule.case == "K5R3":
        return 2 * w - 5 * edge_count
    if rule.case in ("K5High", "K7"):
        return 2 * w - (r * r - r - 1) * edge_count
    if rule.case == "K6High":
        return 2 * w - r * (r - 1) * edge_count
    return w - Fraction(165, 61) * edge_count


def lambda_value(F: Cluster, rule: WeightRule) -> Fraction:
    """Slack of the cluster: weight against its edge count (>= 0 when free)."""
    return _lambda_from_weight(cluster_weight(F, rule), len(F.part.edges), rule)


def bound_coefficient(rule: WeightRule) -> Fraction:
    r = rule.r
    if rule.case == "K5R3":
        return Fraction(2, 5)
    if rule.case in ("K5High", "K7"):
        return Fraction(2, r * r - r - 1)
    if rule.case == "K6High":
        return Fraction(2, r * (r - 1))
    return Fraction(61, 165)


_PARTITION_FOR = {
    "K5R3": m11,
    "K5High": m2plus,
    "K7": m2plus,
    "K6High": m12,
    "K63": m3plus,
}


@dataclass(frozen=True)
class WeightReport:
    """Outcome of :func:`certify`.

    ``per_cluster`` maps cluster id to (weight, lambda); ``per_pair`` holds
    the accumulated totals of all nonzero pairs.  ``certified`` holds iff
    every lambda is non-negative, every pair total is at most 1, and the
    edge count obeys ``edge_bound = bound_coefficient * n*(n-1)/2``.
    """

    rule: WeightRule
    per_cluster: dict[int, tuple[Fraction, Fraction]]
    per_pair: dict[Pair, Fraction]
    bound_coefficient: Fraction
    edge_bound: Fraction
    certified: bool
    partition: Partition


def certify(G: Hypergraph, rule: WeightRule) -> WeightReport:
    """Run the full pipeline: freeness, partition, weights, bound.

    Raises :class:`NotFree` (with witness) when ``G`` contains a forbidden
    configuration; the weighting is only meaningful on free graphs.
    """
    if G.r != rule.r:
        raise ValueError(f"rule {rule.case} is for r={rule.r}, graph has r={G.r}")
    res = is_family_free(G, rule.k)
    if not res.free:
        raise NotFree(
            f"graph contains {res.query.edge_count} edges on at most "
            f"{res.query.max_vertices} vertices",
            res.witness,
            res.query,
        )
    part = _PARTITION_FOR[rule.case](G)
    per_cluster: dict[int, tuple[Fraction, Fraction]] = {}
    per_pair: dict[Pair, Fraction] = {}
    for c in part.clusters:
        pw = _pair_weight_map(c, rule)
        w = sum(pw.values(), Fraction(0))
        lam = _lambda_from_weight(w, len(c.part.edges), rule)
        per_cluster[c.id] = (w, lam)
        for p, val in pw.items():
            per_pair[p] = per_pair.get(p, Fraction(0)) + val
    coeff = bound_coefficient(rule)
    edge_bound = coeff * Fraction(G.n * (G.n - 1), 2)
    certified = (
        all(lam >= 0 for _, lam in per_cluster.values())
        and all(total <= 1 for total in per_pair.values())
        and len(G.edges) <= edge_bound
    )
    return WeightReport(
        rule=rule,
        per_cluster=per_cluster,
        per_pair=per_pair,
        bound_coefficient=coeff,
        edge_bound=edge_bound,
        certified=certified,
        partition=part,
    )


def limit_table(r: int, k: int) -> Fraction:
    """Exact limiting edge densities, normalized by ``n^2``.

    Raises :class:`Unknown` outside the table.
    """
    if r < 3 or k < 2:
        raise Unknown(f"no known limit for (r, k) = ({r}, {k})")
    if k == 2:
        return Fraction(1, r * r - r)
    if k == 5 or k == 7:
        return Fraction(1, r * r - r - 1)
    if r == 3:
        if k == 3:
            return Fraction(1, 5)
        if k == 4:
            return Fraction(7, 36)
        if k == 6:
            return Fraction(61, 330)
    if r >= 4 and k == 6:
        return Fraction(1, r * r - r)
    raise Unknown(f"no known limit for (r, k) = ({r}, {k})")


def report_doc(report: WeightReport) -> dict:
    """Serialize a weight report with reduced-fraction strings."""
    return {
        "rule": {"case": report.rule.case, "r": report.rule.r, "k": report.rule.k},
        "stage": report.partition.stage,
        "edge_count": len(report.partition.ambient.edges),
        "n": report.partition.ambient.n,
        "bound_coefficient": str(report.bound_coefficient),
        "edge_bound": str(report.edge_bound),
        "certified": report.certified,
        "clusters": [
            {
                "id": cid,
                "edges": list(
                    next(
                        c.edge_indices
                        for c in report.partition.clusters
                        if c.id == cid
                    )
                ),
                "weight": str(w),
                "lambda": str(lam),
            }
            for cid, (w, lam) in sorted(report.per_cluster.items())
        ],
        "pair_totals": [
            {"pair": [p.u, p.v], "total": str(total)}
            for p, total in sorted(report.per_pair.items())
        ],
    }
