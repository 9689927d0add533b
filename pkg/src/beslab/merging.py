"""Edge-set partitions refined by claim-based merging.

A partition of a graph's edge set is coarsened by repeatedly uniting two
parts that both claim a common vertex pair strongly enough for the active
rule.  Claims only grow under union, so the fixpoint is independent of the
merge order; the default schedule is deterministic so traces reproduce.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

from .errors import NoOrder
from .hypergraphs import (
    ClaimProfile,
    Hypergraph,
    Pair,
    claim_profile,
    classify_tree,
)


@dataclass(frozen=True)
class MergeRule:
    """One merging criterion.

    ``sets(A, B)``: unite parts P, Q when some pair is A-claimed by one and
    B-claimed by the other (either orientation).  ``two_plus()``: one side
    1-claims the pair, the other has a 3-edge subtree 2-claiming it.
    ``three_plus()``: the pair is {1}|{3,4}- or {1,2}|{3}-claimed across the
    two sides (either orientation of either variant).
    """

    kind: str  # "sets" | "two_plus" | "three_plus"
    A: frozenset[int] = frozenset()
    B: frozenset[int] = frozenset()

    @staticmethod
    def sets(A: Iterable[int], B: Iterable[int]) -> "MergeRule":
        fa, fb = frozenset(A), frozenset(B)
        if not fa or not fb:
            raise ValueError("claim sets A and B must be non-empty")
        if min(fa) < 1 or min(fb) < 1:
            raise ValueError("claim indices in A and B must be positive")
        return MergeRule("sets", fa, fb)

    @staticmethod
    def two_plus() -> "MergeRule":
        return MergeRule("two_plus")

    @staticmethod
    def three_plus() -> "MergeRule":
        return MergeRule("three_plus")

    @property
    def claim_cap(self) -> int:
        if self.kind == "sets":
            return max(max(self.A), max(self.B))
        if self.kind == "two_plus":
            return 1  # the 2+ side uses subtree evidence, not the profile
        return 4


RULE_11 = MergeRule.sets({1}, {1})
RULE_12 = MergeRule.sets({1}, {2})
RULE_2PLUS = MergeRule.two_plus()
RULE_3PLUS = MergeRule.three_plus()

_STAGE_NAMES: dict[tuple[MergeRule, ...], str] = {
    (): "trivial",
    (RULE_11,): "m11",
    (RULE_11, RULE_12): "m12",
    (RULE_11, RULE_2PLUS): "m2plus",
    (RULE_11, RULE_12, RULE_3PLUS): "m3plus",
}


class MergeEvent(NamedTuple):
    """One merge step: parts ``left`` and ``right`` became ``new_id``.

    ``pair`` is the witnessing vertex pair and ``direction`` records which
    side supplied which half of the rule (e.g. ``left_A`` means the left
    part A-claims the pair and the right part B-claims it).
    """

    new_id: int
    left: int
    right: int
    pair: Pair
    direction: str


@dataclass(frozen=True)
class Cluster:
    """One part of a partition, with the trace of merges that built it."""

    id: int
    edge_indices: tuple[int, ...]
    part: Hypergraph
    trace: tuple[MergeEvent, ...]
    stage: str
    ambient: Hypergraph


@dataclass(frozen=True)
class Partition:
    """A partition of the ambient graph's edge set into clusters."""

    ambient: Hypergraph
    clusters: tuple[Cluster, ...]
    rule_stack: tuple[MergeRule, ...]
    stage: str

    def cluster_of_edge(self, edge_index: int) -> Cluster:
        for c in self.clusters:
            if edge_index in c.edge_indices:
                return c
        raise KeyError(f"edge index {edge_index} not in any cluster")

    def edge_sets(self) -> set[frozenset[int]]:
        """The partition as a plain set of frozensets (order-free identity)."""
        return {frozenset(c.edge_indices) for c in self.clusters}


@dataclass(frozen=True)
class Composition:
    """Sizes of a cluster's pair-connected components, non-increasing."""

    sizes: tuple[int, ...]


def trivial_partition(G: Hypergraph) -> Partition:
    """Every edge in its own cluster; cluster id = edge index."""
    clusters = tuple(
        Cluster(
            id=i,
            edge_indices=(i,),
            part=G.subgraph([i]),
            trace=(),
            stage="trivial",
            ambient=G,
        )
        for i in range(len(G.edges))
    )
    return Partition(G, clusters, (), "trivial")


def tp_pair_set(F: Hypergraph) -> frozenset[Pair]:
    """Pairs 2-claimed by some 3-edge subtree of ``F``.

    Inside a valid 3-edge tree, 2-claims come exactly from its diamonds
    (edge pairs sharing two vertices), covering the pairs in their span.
    """
    m = len(F.edges)
    if m < 3:
        return frozenset()
    masks = F.edge_masks
    r = F.r
    want_vertices = 3 * (r - 2) + 2
    out: set[Pair] = set()
    for combo in itertools.combinations(range(m), 3):
        union = masks[combo[0]] | masks[combo[1]] | masks[combo[2]]
        if union.bit_count() != want_vertices:
            continue
        sub = F.subgraph(combo)
        if not classify_tree(sub).is_tree:
            continue
        for a, b in itertools.combinations(combo, 2):
            inter = masks[a] & masks[b]
            if inter.bit_count() == 2:
                span = masks[a] | masks[b]
                vs = []
                mm = span
                while mm:
                    low = mm & -mm
                    vs.append(low.bit_length() - 1)
                    mm ^= low
                for x, y in itertools.combinations(vs, 2):
                    out.add(Pair(x, y))
    return frozenset(out)


def two_plus_claims(F: Hypergraph, p: Pair) -> bool:
    """True iff some 3-edge subtree of ``F`` 2-claims the pair ``p``."""
    return p in tp_pair_set(F)


@dataclass
class _PartState:
    edges: tuple[int, ...]
    trace: tuple[MergeEvent, ...]
    profile: ClaimProfile
    one_pairs: frozenset[Pair]
    tp_pairs: Optional[frozenset[Pair]]


def _make_state(
    G: Hypergraph,
    edges: tuple[int, ...],
    trace: tuple[MergeEvent, ...],
    rule: MergeRule,
) -> _PartState:
    part = G.subgraph(edges)
    prof = claim_profile(part, rule.claim_cap)
    one = frozenset(p for p, b in prof.pair_bits.items() if b & 2)
    tp = tp_pair_set(part) if rule.kind == "two_plus" else None
    return _PartState(
        edges=tuple(sorted(edges)), trace=trace, profile=prof, one_pairs=one, tp_pairs=tp
    )


def _sets_witness(
    sp: _PartState, sq: _PartState, a_bits: int, b_bits: int, n: int, tags: tuple[str, str]
) -> Optional[tuple[Pair, str]]:
    """Smallest (pair, direction) making the two parts mergeable, if any."""
    best: Optional[tuple[Pair, str]] = None
    left_tag, right_tag = tags
    pp, qp = sp.profile, sq.profile
    if not (pp.has_wide_evidence or qp.has_wide_evidence):
        small, big = (pp, qp) if len(pp.pair_bits) <= len(qp.pair_bits) else (qp, pp)
        small_is_p = small is pp
        for pair, sb in small.pair_bits.items():
            bb = big.pair_bits.get(pair)
            if bb is None:
                continue
            bits_p, bits_q = (sb, bb) if small_is_p else (bb, sb)
            if bits_p & a_bits == a_bits and bits_q & b_bits == b_bits:
                cand = (pair, left_tag)
                if best is None or cand < best:
                    best = cand
            if bits_p & b_bits == b_bits and bits_q & a_bits == a_bits:
                cand = (pair, right_tag)
                if best is None or cand < best:
                    best = cand
    else:
        for u, v in itertools.combinations(range(n), 2):
            bits_p = pp.bits(u, v)
            bits_q = qp.bits(u, v)
            pair = Pair(u, v)
            if bits_p & a_bits == a_bits and bits_q & b_bits == b_bits:
                cand = (pair, left_tag)
                if best is None or cand < best:
                    best = cand
            if bits_p & b_bits == b_bits and bits_q & a_bits == a_bits:
                cand = (pair, right_tag)
                if best is None or cand < best:
                    best = cand
    return best


def _claim_bits(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def _mergeable(
    sp: _PartState, sq: _PartState, rule: MergeRule, n: int
) -> Optional[tuple[Pair, str]]:
    """Witness (pair, direction) if the two parts merge under ``rule``."""
    if rule.kind == "sets":
        return _sets_witness(
            sp, sq, _claim_bits(rule.A), _claim_bits(rule.B), n, ("left_A", "right_A")
        )
    if rule.kind == "two_plus":
        best: Optional[tuple[Pair, str]] = None
        assert sp.tp_pairs is not None and sq.tp_pairs is not None
        for pair in sp.one_pairs & sq.tp_pairs:
            cand = (pair, "left_1")
            if best is None or cand < best:
                best = cand
        for pair in sq.one_pairs & sp.tp_pairs:
            cand = (pair, "right_1")
            if best is None or cand < best:
                best = cand
        return best
    # three_plus: {1}|{3,4} or {1,2}|{3}, either orientation
    w1 = _sets_witness(
        sp, sq, _claim_bits({1}), _claim_bits({3, 4}), n, ("left_1_34", "right_1_34")
    )
    w2 = _sets_witness(
        sp, sq, _claim_bits({1, 2}), _claim_bits({3}), n, ("left_12_3", "right_12_3")
    )
    if w1 is None:
        return w2
    if w2 is None:
        return w1
    return min(w1, w2)


def merge(
    G: Hypergraph,
    start: Partition,
    rule: MergeRule,
    rng: Optional[random.Random] = None,
) -> Partition:
    """Coarsen ``start`` under ``rule`` until no two parts are mergeable.

    The default schedule always merges the candidate minimizing
    (smaller id, larger id, pair, direction); passing ``rng`` picks a random
    candidate instead (the fixpoint partition is the same either way).
    """
    if start.ambient != G:
        raise ValueError("start partition does not belong to this graph")
    states: dict[int, _PartState] = {
        c.id: _make_state(G, c.edge_indices, c.trace, rule) for c in start.clusters
    }
    next_id = max(states, default=-1) + 1
    cands: dict[tuple[int, int], tuple[Pair, str]] = {}
    ids = sorted(states)
    for pos, i in enumerate(ids):
        for j in ids[pos + 1 :]:
            w = _mergeable(states[i], states[j], rule, G.n)
            if w is not None:
                cands[(i, j)] = w
    while cands:
        if rng is None:
            key = min(cands, key=lambda k: (k[0], k[1], cands[k][0], cands[k][1]))
        else:
            keys = sorted(cands)
            key = keys[rng.randrange(len(keys))]
        i, j = key
        pair, direction = cands[key]
        si, sj = states.pop(i), states.pop(j)
        for other_key in [k for k in cands if i in k or j in k]:
            del cands[other_key]
        event = MergeEvent(next_id, i, j, pair, direction)
        merged = _make_state(
            G,
            tuple(sorted(si.edges + sj.edges)),
            si.trace + sj.trace + (event,),
            rule,
        )
        states[next_id] = merged
        for other in sorted(states):
            if other == next_id:
                continue
            w = _mergeable(states[other], merged, rule, G.n)
            if w is not None:
                cands[(other, next_id)] = w
        next_id += 1
    rule_stack = start.rule_stack + (rule,)
    stage = _STAGE_NAMES.get(rule_stack, "custom")
    ordered = sorted(states.items(), key=lambda kv: kv[1].edges[0] if kv[1].edges else -1)
    clusters = tuple(
        Cluster(
            id=cid,
            edge_indices=st.edges,
            part=G.subgraph(st.edges),
            trace=st.trace,
            stage=stage,
            ambient=G,
        )
        for cid, st in ordered
    )
    return Partition(G, clusters, rule_stack, stage)


def m11(G: Hypergraph, rng: Optional[random.Random] = None) -> Partition:
    """Maximal parts connected through shared pairs: {1}|{1}-merging of edges."""
    return merge(G, trivial_partition(G), RULE_11, rng=rng)


def m12(G: Hypergraph, rng: Optional[random.Random] = None) -> Partition:
    """{1}|{2}-merging on top of :func:`m11`."""
    return merge(G, m11(G), RULE_12, rng=rng)


def m2plus(G: Hypergraph, rng: Optional[random.Random] = None) -> Partition:
    """{1}|2+-merging (subtree 2-claims) on top of :func:`m11`."""
    return merge(G, m11(G), RULE_2PLUS, rng=rng)


def m3plus(G: Hypergraph, rng: Optional[random.Random] = None) -> Partition:
    """{1}|{3,4}- and {1,2}|{3}-merging on top of :func:`m12`."""
    return merge(G, m12(G), RULE_3PLUS, rng=rng)


def composition(c: Cluster) -> Composition:
    """Sizes of the cluster's pair-connected components, largest first.

    For clusters built over an m11 base these components are exactly the
    original m11 constituents (edges in different constituents never share
    two vertices).
    """
    edges = c.edge_indices
    masks = [c.ambient.edge_masks[i] for i in edges]
    parent = list(range(len(edges)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(len(edges)):
        for b in range(a + 1, len(edges)):
            if (masks[a] & masks[b]).bit_count() >= 2:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    counts: dict[int, int] = {}
    for a in range(len(edges)):
        root = find(a)
        counts[root] = counts.get(root, 0) + 1
    return Composition(tuple(sorted(counts.values(), reverse=True)))


def _pair_components(F: Hypergraph) -> list[tuple[int, ...]]:
    """Index sets of F's pair-connected components (indices into F.edges)."""
    m = len(F.edges)
    masks = F.edge_masks
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(m):
        for b in range(a + 1, m):
            if (masks[a] & masks[b]).bit_count() >= 2:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for a in range(m):
        groups.setdefault(find(a), []).append(a)
    return [tuple(sorted(g)) for g in sorted(groups.values())]


def _base_parts(F: Cluster, rule: MergeRule) -> list[tuple[int, ...]]:
    """Ambient edge-index tuples of F's base parts under ``rule``.

    The base partition is the one the rule merges: single edges for
    {1}|{1}; m11 components for {1}|{2} and 2+; m12 clusters for 3+.
    Computed on the cluster's own part, which is sound because merging
    only ever unites parts inside the cluster.
    """
    part = F.part
    idx_map = list(F.edge_indices)  # position in part -> ambient index
    if rule == RULE_11:
        return [(i,) for i in idx_map]
    if rule.kind == "sets" or rule.kind == "two_plus":
        comps = _pair_components(part)
        return [tuple(idx_map[i] for i in comp) for comp in comps]
    # three_plus: base is the m12 partition of the part
    sub = m12(part)
    out = []
    for c in sub.clusters:
        out.append(tuple(sorted(idx_map[i] for i in c.edge_indices)))
    return sorted(out)


def trimming_order(
    F0: Union[Hypergraph, Iterable[int]],
    F: Cluster,
    rule: MergeRule,
    base_parts: Optional[list[tuple[int, ...]]] = None,
) -> list[tuple[int, ...]]:
    """Order the base parts of ``F`` outside ``F0`` so every prefix merges.

    Returns ambient edge-index tuples; each returned part is mergeable (under
    ``rule``) with the union of ``F0`` and the parts before it.  Any greedy
    choice extends to a full order when one exists, so the first mergeable
    part (by smallest edge index) is always taken.  Raises :class:`NoOrder`
    when no part can be appended.
    """
    if isinstance(F0, Hypergraph):
        edge_pos = {e: i for i, e in enumerate(F.ambient.edges)}
        try:
            start = frozenset(edge_pos[e] for e in F0.edges)
        except KeyError as exc:
            raise ValueError("F0 has edges outside the ambient graph") from exc
    else:
        start = frozenset(F0)
    all_edges = frozenset(F.edge_indices)
    if not start <= all_edges:
        raise ValueError("F0 is not contained in the cluster")
    if not start:
        raise ValueError("F0 must contain at least one base part")
    parts = base_parts if base_parts is not None else _base_parts(F, rule)
    part_sets = [frozenset(p) for p in parts]
    covered = frozenset().union(*part_sets) if part_sets else frozenset()
    if covered != all_edges:
        raise ValueError("base parts do not cover the cluster")
    inside_union: frozenset[int] = frozenset()
    for s in part_sets:
        if s <= start:
            inside_union |= s
    if inside_union != start:
        raise ValueError("F0 is not a union of base parts")
    remaining = sorted(
        (p for p, s in zip(parts, part_sets) if not s <= start), key=lambda p: p[0]
    )
    current = set(start)
    order: list[tuple[int, ...]] = []
    G = F.ambient
    while remaining:
        cur_state = _make_state(G, tuple(sorted(current)), (), rule)
        pick = None
        for p in remaining:
            ps = _make_state(G, tuple(p), (), rule)
            if _mergeable(cur_state, ps, rule, G.n) is not None:
                pick = p
                break
        if pick is None:
            raise NoOrder(
                f"no base part is mergeable with the current prefix "
                f"({sorted(current)}); {len(remaining)} parts remain"
            )
        order.append(pick)
        current.update(pick)
        remaining.remove(pick)
    return order


def replay_trace(start: Partition, cluster: Cluster) -> frozenset[int]:
    """Re-run a cluster's trace over the start partition; returns edge indices."""
    pool: dict[int, frozenset[int]] = {
        c.id: frozenset(c.edge_indices) for c in start.clusters
    }
    live: dict[int, frozenset[int]] = dict(pool)
    for ev in cluster.trace:
        left = live.pop(ev.left)
        right = live.pop(ev.right)
        live[ev.new_id] = left | right
    return live[cluster.id]


def rule_doc(rule: MergeRule) -> dict:
    if rule.kind == "sets":
        return {"kind": "sets", "A": sorted(rule.A), "B": sorted(rule.B)}
    return {"kind": rule.kind}


def partition_report(p: Partition) -> dict:
    """Structured document describing a partition (stable field order)."""
    return {
        "stage": p.stage,
        "rule_stack": [rule_doc(r) for r in p.rule_stack],
        "ambient": {"r": p.ambient.r, "n": p.ambient.n, "edge_count": len(p.ambient.edges)},
        "clusters": [
            {
                "id": c.id,
                "edges": list(c.edge_indices),
                "composition": list(composition(c).sizes),
                "trace": [
                    {
                        "new": ev.new_id,
                        "left": ev.left,
                        "right": ev.right,
                        "pair": [ev.pair.u, ev.pair.v],
                        "direction": ev.direction,
                    }
                    for ev in c.trace
                ],
            }
            for c in sorted(p.clusters, key=lambda c: c.edge_indices)
        ],
    }
