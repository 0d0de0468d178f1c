#!/usr/bin/env python3
"""
Sampler Module for the Bidegree Toolkit

This module provides a lazy degree-preserving switch chain over the
realizations of a sequence, plus the statistics built on top of it:

- greedy initial realizations (Ryser, Kleitman-Wang, Havel-Hakimi)
- double-edge swaps, with 3-cycle reorientation for loopless digraphs
- common-neighbor histograms, sampled or exact
- the many-to-one switch that removes one shared out-neighbor
- empirical ratio estimates with a delta-method standard error
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.stats import chisquare

from config import Settings
from errors import ForeignGraphError, NotGraphicalError, UnsupportedVariantError, WrongFormError
from exact_count import enumerate_realizations, partition_expand
from logger import LogCategory, get_logger
from sequences import (
    BidegreeSequence,
    GraphVariant,
    SequenceForm,
    Side,
    decrement,
    is_graphical,
    validate,
)

Edge = Tuple[int, int]
RngLike = Union[None, int, np.random.Generator]

DEFAULT_BURN_IN = 1000
DEFAULT_THIN = 10


class LabeledDigraph:
    """
    A realization held as an N x N 0-1 matrix; entry (u, v) set means u -> v.
    Undirected graphs keep the matrix symmetric and list each edge once as
    (u, v) with u < v.
    """

    def __init__(self, adjacency: np.ndarray, variant: Union[GraphVariant, str]):
        self.adjacency = np.array(adjacency, dtype=np.int8)
        self.variant = GraphVariant.parse(variant)
        self.out_degrees: Tuple[int, ...] = tuple(int(x) for x in self.adjacency.sum(axis=1))
        self.in_degrees: Tuple[int, ...] = tuple(int(x) for x in self.adjacency.sum(axis=0))
        if self.variant is GraphVariant.UNDIRECTED:
            pairs = np.argwhere(np.triu(self.adjacency, k=1))
        else:
            pairs = np.argwhere(self.adjacency)
        self._edges: List[Edge] = [(int(u), int(v)) for u, v in pairs]
        self._index: Dict[Edge, int] = {e: k for k, e in enumerate(self._edges)}

    @property
    def N(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edges(self) -> List[Edge]:
        return list(self._edges)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def sequence(self) -> BidegreeSequence:
        return BidegreeSequence(self.in_degrees, self.out_degrees)

    def key(self) -> bytes:
        return self.adjacency.tobytes()

    def copy(self) -> "LabeledDigraph":
        return LabeledDigraph(self.adjacency, self.variant)

    def _normalize(self, edge: Edge) -> Edge:
        if self.variant is GraphVariant.UNDIRECTED:
            return (min(edge), max(edge))
        return edge

    def _set(self, edge: Edge, value: int):
        u, v = edge
        self.adjacency[u, v] = value
        if self.variant is GraphVariant.UNDIRECTED:
            self.adjacency[v, u] = value

    def replace_edges(self, removed: List[Edge], added: List[Edge]):
        """Swap edges in place; the caller guarantees degrees are unchanged."""
        removed = [self._normalize(e) for e in removed]
        added = [self._normalize(e) for e in added]
        slots = [self._index.pop(e) for e in removed]
        for e in removed:
            self._set(e, 0)
        for slot, e in zip(slots, added):
            self._set(e, 1)
            self._edges[slot] = e
            self._index[e] = slot

    def check(self):
        """Raise AssertionError when the matrix breaks a variant rule or the degree cache."""
        A = self.adjacency
        assert A.min() >= 0 and A.max() <= 1, "entries must be 0 or 1"
        if self.variant is not GraphVariant.DIRECTED_LOOPS:
            assert not np.any(np.diag(A)), "loop in a loopless variant"
        if self.variant is GraphVariant.UNDIRECTED:
            assert np.array_equal(A, A.T), "undirected adjacency must be symmetric"
        assert tuple(int(x) for x in A.sum(axis=1)) == self.out_degrees, "out-degree cache stale"
        assert tuple(int(x) for x in A.sum(axis=0)) == self.in_degrees, "in-degree cache stale"


@dataclass
class NeighborHistogram:
    """Frequency of the number k of common neighbors of a node pair."""
    counts: Dict[int, int] = field(default_factory=dict)
    samples: int = 0

    def add(self, k: int, weight: int = 1):
        self.counts[k] = self.counts.get(k, 0) + weight
        self.samples += weight

    def frequency(self, k: int) -> float:
        return self.counts.get(k, 0) / self.samples if self.samples else 0.0

    def ratio(self, k: int) -> float:
        """counts(k) / counts(k + 1); inf when k + 1 was never seen."""
        upper = self.counts.get(k + 1, 0)
        return self.counts.get(k, 0) / upper if upper else math.inf

    def mean(self) -> float:
        if not self.samples:
            return 0.0
        return sum(k * c for k, c in self.counts.items()) / self.samples

    def to_dict(self) -> Dict[str, object]:
        return {"counts": {str(k): v for k, v in sorted(self.counts.items())},
                "samples": self.samples}


@dataclass(frozen=True)
class EmpiricalRatio:
    estimate: float
    standard_error: float
    samples: int


@dataclass(frozen=True)
class UniformityCheck:
    realizations: int
    observed: int
    statistic: float
    p_value: float


def _ranked(keys: List[np.ndarray], rng: np.random.Generator, N: int) -> np.ndarray:
    """Indices sorted by the given keys (first key primary, descending), ties at random."""
    columns = [rng.random(N)] + [-k for k in reversed(keys)]
    return np.lexsort(columns)


def realize(seq: BidegreeSequence, variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS,
            rng_seed: RngLike = None) -> LabeledDigraph:
    """
    Build one realization greedily, breaking ties with the seeded generator.

    Raises:
        NotGraphicalError: the sequence has no realization under the variant
    """
    variant = GraphVariant.parse(variant)
    if not is_graphical(seq, variant):
        raise NotGraphicalError(f"{seq} is not graphical as {variant.value}")
    rng = np.random.default_rng(rng_seed)
    N = seq.N
    A = np.zeros((N, N), dtype=np.int8)

    if variant is GraphVariant.DIRECTED_LOOPS:
        columns = np.array(seq.in_degrees)
        for u in rng.permutation(N):
            chosen = _ranked([columns], rng, N)[:seq.out_degrees[u]]
            if np.any(columns[chosen] == 0):
                raise NotGraphicalError(f"greedy construction failed for {seq}")
            A[u, chosen] = 1
            columns[chosen] -= 1

    elif variant is GraphVariant.DIRECTED_NOLOOPS:
        r_in = np.array(seq.in_degrees)
        r_out = np.array(seq.out_degrees)
        for u in rng.permutation(N):
            if r_out[u] == 0:
                continue
            order = [v for v in _ranked([r_in, r_out], rng, N) if v != u]
            chosen = order[:r_out[u]]
            if len(chosen) < r_out[u] or np.any(r_in[chosen] == 0):
                raise NotGraphicalError(f"greedy construction failed for {seq}")
            A[u, chosen] = 1
            r_in[chosen] -= 1
            r_out[u] = 0

    else:
        residual = np.array(seq.in_degrees)
        while residual.any():
            u = int(_ranked([residual], rng, N)[0])
            order = [v for v in _ranked([residual], rng, N) if v != u]
            chosen = order[:residual[u]]
            if len(chosen) < residual[u] or np.any(residual[chosen] == 0):
                raise NotGraphicalError(f"greedy construction failed for {seq}")
            A[u, chosen] = 1
            A[chosen, u] = 1
            residual[chosen] -= 1
            residual[u] = 0

    return LabeledDigraph(A, variant)


def _two_edges(g: LabeledDigraph, rng: np.random.Generator) -> Optional[Tuple[Edge, Edge]]:
    """Two edges drawn with replacement; None (a hold) when the same edge comes up twice."""
    m = g.n_edges
    p, q = (int(x) for x in rng.integers(m, size=2))
    if p == q:
        return None
    return g._edges[p], g._edges[q]


def switch_step(g: LabeledDigraph, rng: np.random.Generator) -> LabeledDigraph:
    """
    One lazy double-edge swap, applied in place.

    Two edges u->v and x->y are drawn uniformly with replacement; they become
    u->y and x->v when both targets are absent and allowed under the variant.
    Otherwise (including a repeated draw) the graph is left unchanged.
    Undirected swaps also draw which endpoints pair up.
    """
    if g.n_edges < 2:
        return g
    pair = _two_edges(g, rng)
    if pair is None:
        return g
    (u, v), (x, y) = pair

    if g.variant is GraphVariant.UNDIRECTED:
        if rng.integers(2):
            x, y = y, x
        if len({u, v, x, y}) < 4 or g.has_edge(u, y) or g.has_edge(x, v):
            return g
        g.replace_edges([(u, v), (x, y)], [(u, y), (x, v)])
        return g

    if u == x or v == y:
        return g
    if g.variant is GraphVariant.DIRECTED_NOLOOPS and (u == y or x == v):
        return g
    if g.has_edge(u, y) or g.has_edge(x, v):
        return g
    g.replace_edges([(u, v), (x, y)], [(u, y), (x, v)])
    return g


def triangle_reorient(g: LabeledDigraph, rng: np.random.Generator) -> LabeledDigraph:
    """
    Reverse a directed 3-cycle u->v->w->u in place when none of the reversed
    edges exists. The cycle is proposed from a uniform edge and a uniform third node.
    """
    if g.variant is GraphVariant.UNDIRECTED:
        raise UnsupportedVariantError("triangle reorientation needs a directed graph")
    if g.n_edges < 3:
        return g
    u, v = g._edges[int(rng.integers(g.n_edges))]
    w = int(rng.integers(g.N))
    if len({u, v, w}) < 3:
        return g
    if not (g.has_edge(v, w) and g.has_edge(w, u)):
        return g
    if g.has_edge(v, u) or g.has_edge(w, v) or g.has_edge(u, w):
        return g
    g.replace_edges([(u, v), (v, w), (w, u)], [(v, u), (w, v), (u, w)])
    return g


def _default_triangles(variant: GraphVariant, triangles: Optional[bool]) -> bool:
    if triangles is None:
        return variant is GraphVariant.DIRECTED_NOLOOPS
    if triangles and variant is GraphVariant.UNDIRECTED:
        raise UnsupportedVariantError("triangle reorientation needs a directed graph")
    return triangles


def _chain_step(g: LabeledDigraph, rng: np.random.Generator, triangles: bool):
    if triangles and rng.random() < 0.5:
        triangle_reorient(g, rng)
    else:
        switch_step(g, rng)


def sample_uniform(seq: BidegreeSequence,
                   variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS,
                   burn_in: int = DEFAULT_BURN_IN, thin: int = DEFAULT_THIN,
                   n_samples: int = 1, rng_seed: RngLike = None,
                   triangles: Optional[bool] = None,
                   progress: Optional[Callable[[int, int], None]] = None) -> List[LabeledDigraph]:
    """
    Draw realizations from the lazy switch chain.

    Args:
        seq: Balanced, graphical sequence
        variant: Graph family
        burn_in: Steps before the first sample
        thin: Steps between consecutive samples
        n_samples: Number of graphs returned
        rng_seed: Seed or generator; equal seeds give identical samples
        triangles: Mix in 3-cycle reorientation (default: on for directed-noloops only)
        progress: Optional (done, total) callback

    Raises:
        NotGraphicalError: the sequence has no realization
    """
    variant = GraphVariant.parse(variant)
    if burn_in < 1 or thin < 1:
        raise ValueError("burn_in and thin must be at least 1")
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    triangles = _default_triangles(variant, triangles)
    rng = np.random.default_rng(rng_seed)

    logger = get_logger()
    samples: List[LabeledDigraph] = []
    with logger.track(LogCategory.SAMPLER, "sample_uniform",
                      f"{variant.value} burn_in={burn_in} thin={thin} n={n_samples}",
                      {"triangles": triangles}):
        g = realize(seq, variant, rng)
        if n_samples == 0:
            return samples
        for _ in range(burn_in):
            _chain_step(g, rng, triangles)
        for k in range(n_samples):
            for _ in range(thin):
                _chain_step(g, rng, triangles)
            samples.append(g.copy())
            if progress is not None:
                progress(k + 1, n_samples)
    return samples


def _common(g: LabeledDigraph, i: int, j: int, direction: Side) -> int:
    A = g.adjacency
    if direction is Side.OUT:
        return int(np.sum(A[i] & A[j]))
    return int(np.sum(A[:, i] & A[:, j]))


def common_neighbor_stats(seq: BidegreeSequence, i: int, j: int,
                          direction: Union[Side, str] = Side.OUT, samples: int = 1000,
                          variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS,
                          rng_seed: RngLike = None, burn_in: int = DEFAULT_BURN_IN,
                          thin: int = DEFAULT_THIN) -> NeighborHistogram:
    """Histogram of |{v : i->v and j->v}| (or the in-neighbor version) over sampled realizations."""
    direction = Side.parse(direction)
    if not (0 <= i < seq.N and 0 <= j < seq.N) or i == j:
        raise IndexError(f"({i}, {j}) is not a pair of distinct nodes")
    histogram = NeighborHistogram()
    for g in sample_uniform(seq, variant, burn_in, thin, samples, rng_seed):
        histogram.add(_common(g, i, j, direction))
    return histogram


def exact_neighbor_histogram(seq: BidegreeSequence, i: int, j: int,
                             direction: Union[Side, str] = Side.OUT,
                             settings: Optional[Settings] = None) -> NeighborHistogram:
    """
    Number of realizations (loops allowed) with exactly k common neighbors
    of i and j, for every k; samples is the total count.
    """
    direction = Side.parse(direction)
    histogram = NeighborHistogram()
    for term in partition_expand(seq, i, j, side=direction, settings=settings):
        if term.contribution:
            histogram.add(term.k, term.contribution)
    return histogram


def eliminate_common_neighbor(g: LabeledDigraph, x: int, y: int,
                              rng: np.random.Generator) -> Optional[LabeledDigraph]:
    """
    Remove one shared out-neighbor of x and y without changing any degree.

    For a node v with x->v and y->v, an edge p->q away from x, y and v is
    redirected to p->v, and x->v becomes x->q. Eligible edges need p not
    already pointing at v, and q not already receiving from x or y. The
    returned copy has one fewer common out-neighbor; None when no switch applies.
    """
    if g.variant is GraphVariant.UNDIRECTED:
        raise UnsupportedVariantError("the common-neighbor switch needs a directed graph")
    A = g.adjacency
    shared = [int(v) for v in np.flatnonzero(A[x] & A[y])]
    if not shared:
        return None
    v = shared[int(rng.integers(len(shared)))]
    blocked = {x, y, v}
    eligible = [(p, q) for p, q in g._edges
                if p not in blocked and q not in blocked
                and not A[p, v] and not A[x, q] and not A[y, q]]
    if not eligible:
        return None
    p, q = eligible[int(rng.integers(len(eligible)))]
    result = g.copy()
    result.replace_edges([(p, q), (x, v)], [(p, v), (x, q)])
    return result


def estimate_ratio_empirical(seq_ratio_form: BidegreeSequence, i: int, j: int,
                             samples: int = 1000, rng_seed: RngLike = None,
                             burn_in: int = DEFAULT_BURN_IN,
                             thin: int = DEFAULT_THIN) -> EmpiricalRatio:
    """
    Estimate |G_{d-i}| / |G_{d-j}| (loops allowed) by sampling one extension.

    The extension lowers a_i and a_j by one and appends a node with in-degree
    1 and out-degree 0. Moving that node's single in-edge to j gives a
    realization of d-i exactly when its sender w does not already point at
    j, and to i likewise. Hence the ratio is
    (a_i / a_j) * P[w -/-> j] / P[w -/-> i].

    Raises:
        NotGraphicalError: d-i or d-j has no realization
    """
    seq = seq_ratio_form
    if seq.form is not SequenceForm.RATIO_IN:
        raise WrongFormError("empirical ratios need sum(a) = sum(b) + 1")
    for node in (i, j):
        if not is_graphical(decrement(seq, node, Side.IN), GraphVariant.DIRECTED_LOOPS):
            raise NotGraphicalError(f"decrementing node {node} leaves a non-graphical sequence")
    a_i, a_j = seq.in_degrees[i], seq.in_degrees[j]
    if i == j:
        return EmpiricalRatio(1.0, 0.0, samples)

    a = list(seq.in_degrees)
    a[i] -= 1
    a[j] -= 1
    extended = validate(a + [1], list(seq.out_degrees) + [0])
    extra = seq.N

    misses_j = np.zeros(samples)
    misses_i = np.zeros(samples)
    graphs = sample_uniform(extended, GraphVariant.DIRECTED_LOOPS, burn_in, thin, samples, rng_seed)
    for k, g in enumerate(graphs):
        w = int(np.flatnonzero(g.adjacency[:, extra])[0])
        misses_j[k] = 0 if g.has_edge(w, j) else 1
        misses_i[k] = 0 if g.has_edge(w, i) else 1

    if samples == 0 or misses_i.mean() == 0:
        return EmpiricalRatio(math.inf, math.inf, samples)
    mean_j, mean_i = misses_j.mean(), misses_i.mean()
    estimate = (a_i / a_j) * mean_j / mean_i
    if samples < 2 or mean_j == 0:
        return EmpiricalRatio(estimate, math.inf, samples)
    cov = np.cov(misses_j, misses_i)
    relative_var = (cov[0, 0] / mean_j ** 2 + cov[1, 1] / mean_i ** 2
                    - 2 * cov[0, 1] / (mean_j * mean_i)) / samples
    return EmpiricalRatio(estimate, float(abs(estimate) * math.sqrt(max(relative_var, 0.0))),
                          samples)


def uniformity_check(samples: List[LabeledDigraph], seq: BidegreeSequence,
                     variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS) -> UniformityCheck:
    """Chi-square test of sampled graphs against the full realization set (small N only)."""
    variant = GraphVariant.parse(variant)
    keys = [m.tobytes() for m in enumerate_realizations(seq, variant)]
    observed = Counter(g.key() for g in samples)
    unknown = set(observed) - set(keys)
    if unknown:
        raise ForeignGraphError(f"{len(unknown)} sampled graphs are not realizations of {seq}",
                                {"foreign": len(unknown)})
    counts = [observed.get(key, 0) for key in keys]
    if len(keys) < 2 or not samples:
        return UniformityCheck(len(keys), len(observed), 0.0, 1.0)
    statistic, p_value = chisquare(counts)
    return UniformityCheck(len(keys), len(observed), float(statistic), float(p_value))


def edge_list(g: LabeledDigraph) -> str:
    """One "u v" line per edge, 0-based node labels."""
    return "\n".join(f"{u} {v}" for u, v in sorted(g.edges))


def graph_to_json(g: LabeledDigraph) -> Dict[str, object]:
    return {
        "variant": g.variant.value,
        "nodes": g.N,
        "in_degrees": list(g.in_degrees),
        "out_degrees": list(g.out_degrees),
        "edges": [list(e) for e in sorted(g.edges)],
    }
