#!/usr/bin/env python3
"""
Exact Counting Module for the Bidegree Toolkit

This module provides the ground-truth counts every estimator is checked
against:

- memoized dynamic programs over residual margins for the three graph
  variants (directed with loops, directed without loops, undirected)
- the closed forms for special shapes (concentrated targets, all-ones
  out-degrees, two targets without loops, perfect matchings)
- the two-node partition identity and the residual families it sums over
- exact ratios of counts for sequences one unit apart
- an exhaustive realization enumerator used as an independent oracle

Counts are Python integers and ratios are fractions.Fraction, so nothing in
this module rounds.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Settings, get_settings
from errors import (
    BadShapeError,
    DenominatorZeroError,
    EmptyX0Error,
    NotBalancedError,
    ShapeMismatchError,
    TooLargeError,
    UnsupportedVariantError,
    WrongFormError,
)
from logger import LogCategory, get_logger
from sequences import (
    BidegreeSequence,
    GraphVariant,
    SequenceForm,
    Side,
    decrement,
    require_symmetric,
    transpose,
)

# Arbitrary-precision nonnegative integer
BigCount = int


@dataclass(frozen=True)
class PartitionTerm:
    """One k-term of the two-node partition identity."""
    k: int
    binom: BigCount
    residual_count: BigCount

    @property
    def contribution(self) -> BigCount:
        return self.binom * self.residual_count


def _choose_classes(counts: Sequence[int], total: int) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """
    Yield every (t, weight) with sum(t) == total and 0 <= t[c] <= counts[c];
    weight is prod C(counts[c], t[c]).
    """
    n = len(counts)
    capacity = [0] * (n + 1)
    for c in range(n - 1, -1, -1):
        capacity[c] = capacity[c + 1] + counts[c]
    if capacity[0] < total:
        return
    picked = [0] * n

    def walk(c: int, remaining: int, weight: int):
        if c == n:
            if remaining == 0:
                yield tuple(picked), weight
            return
        low = max(0, remaining - capacity[c + 1])
        high = min(counts[c], remaining)
        for t in range(low, high + 1):
            picked[c] = t
            yield from walk(c + 1, remaining - t, weight * math.comb(counts[c], t))
        picked[c] = 0

    yield from walk(0, total, 1)


class _ExactCounter:
    """Memoized counter bound to one variant and one state budget."""

    def __init__(self, variant: GraphVariant, settings: Settings):
        self.variant = variant
        self.max_states = settings.max_states
        self._memo: Dict[tuple, int] = {}
        self._by_sequence: Dict[tuple, int] = {}

    def _store(self, key: tuple, value: int) -> int:
        self._memo[key] = value
        if len(self._memo) > self.max_states:
            raise TooLargeError(
                f"exact counting exceeded {self.max_states} memo states "
                f"(raise BIDEGREE_MAX_STATE to allow more)",
                {"max_states": self.max_states})
        return value

    def count(self, a: Sequence[int], b: Sequence[int]) -> int:
        if sum(a) != sum(b):
            return 0
        if self.variant is GraphVariant.DIRECTED_LOOPS:
            key = (tuple(sorted(a, reverse=True)), tuple(sorted(b, reverse=True)))
        elif self.variant is GraphVariant.DIRECTED_NOLOOPS:
            key = tuple(sorted(zip(a, b), reverse=True))
        else:
            key = tuple(sorted(a, reverse=True))
        cached = self._by_sequence.get(key)
        if cached is not None:
            return cached

        if self.variant is GraphVariant.DIRECTED_LOOPS:
            rows = tuple(x for x in sorted(b, reverse=True) if x > 0)
            value = self._loops(rows, self._histogram(a))
        elif self.variant is GraphVariant.DIRECTED_NOLOOPS:
            types = Counter((c, o if o > 0 else -1) for c, o in zip(a, b))
            types.pop((0, -1), None)
            value = self._noloops(tuple(sorted(types.items())))
        else:
            value = self._undirected(tuple(x for x in sorted(a, reverse=True) if x > 0))
        self._by_sequence[key] = value
        return value

    @staticmethod
    def _histogram(values: Sequence[int]) -> Tuple[int, ...]:
        """hist[c-1] = number of entries equal to c, for c >= 1."""
        top = max(values, default=0)
        hist = [0] * top
        for v in values:
            if v > 0:
                hist[v - 1] += 1
        return tuple(hist)

    def _loops(self, rows: Tuple[int, ...], hist: Tuple[int, ...]) -> int:
        if not rows:
            return 1 if not any(hist) else 0
        key = ("L", rows, hist)
        if key in self._memo:
            return self._memo[key]

        total = 0
        r, rest = rows[0], rows[1:]
        for t, weight in _choose_classes(hist, r):
            shifted = [hist[c] - t[c] + (t[c + 1] if c + 1 < len(hist) else 0)
                       for c in range(len(hist))]
            while shifted and shifted[-1] == 0:
                shifted.pop()
            total += weight * self._loops(rest, tuple(shifted))
        return self._store(key, total)

    def _noloops(self, state: Tuple[Tuple[Tuple[int, int], int], ...]) -> int:
        """
        state holds ((residual in-degree, pending out-degree or -1), multiplicity)
        pairs, sorted. The next row processed is the pending type with the
        largest out-degree; its own column is excluded from its choices.
        """
        pending = [t for t, _ in state if t[1] > 0]
        if not pending:
            return 1 if all(t[0] == 0 for t, _ in state) else 0
        key = ("N", state)
        if key in self._memo:
            return self._memo[key]

        own = max(pending, key=lambda t: (t[1], t[0]))
        types = dict(state)
        types[own] -= 1
        if types[own] == 0:
            del types[own]

        open_types = [t for t in sorted(types) if t[0] > 0]
        counts = [types[t] for t in open_types]
        total = 0
        for choice, weight in _choose_classes(counts, own[1]):
            nxt = Counter(types)
            for t, taken in zip(open_types, choice):
                if taken:
                    nxt[t] -= taken
                    nxt[(t[0] - 1, t[1])] += taken
            nxt[(own[0], -1)] += 1
            nxt.pop((0, -1), None)
            nxt_state = tuple(sorted((t, m) for t, m in nxt.items() if m > 0))
            total += weight * self._noloops(nxt_state)
        return self._store(key, total)

    def _undirected(self, degrees: Tuple[int, ...]) -> int:
        if not degrees:
            return 1
        key = ("U", degrees)
        if key in self._memo:
            return self._memo[key]

        d, rest = degrees[0], degrees[1:]
        values = sorted(set(rest), reverse=True)
        counts = [rest.count(v) for v in values]
        total = 0
        for choice, weight in _choose_classes(counts, d):
            nxt: List[int] = []
            for v, m, taken in zip(values, counts, choice):
                nxt.extend([v] * (m - taken))
                nxt.extend([v - 1] * taken)
            nxt_degrees = tuple(x for x in sorted(nxt, reverse=True) if x > 0)
            total += weight * self._undirected(nxt_degrees)
        return self._store(key, total)

    def residual_total(self, a_residual: Sequence[int], b: Sequence[int],
                       twos: int, ones: int) -> int:
        """
        Sum of counts over every residual (a_residual, b - s) where s has
        exactly `twos` entries equal to 2, `ones` entries equal to 1, zeros
        elsewhere, and s <= b entrywise. Nodes sharing an out-degree are
        grouped, so s is enumerated by how many of each group take 2 or 1.
        """
        if twos < 0 or ones < 0:
            return 0
        groups = sorted(Counter(b).items(), reverse=True)
        total = 0

        def walk(g: int, twos_left: int, ones_left: int, weight: int, residual: List[int]):
            nonlocal total
            if g == len(groups):
                if twos_left == 0 and ones_left == 0:
                    total += weight * self.count(a_residual, residual)
                return
            value, size = groups[g]
            max_two = min(size, twos_left) if value >= 2 else 0
            for x in range(max_two + 1):
                max_one = min(size - x, ones_left) if value >= 1 else 0
                for y in range(max_one + 1):
                    w = weight * math.comb(size, x) * math.comb(size - x, y)
                    part = [value - 2] * x + [value - 1] * y + [value] * (size - x - y)
                    walk(g + 1, twos_left - x, ones_left - y, w, residual + part)

        walk(0, twos, ones, 1, [])
        return total


def _resolve_settings(settings: Optional[Settings]) -> Settings:
    return settings if settings is not None else get_settings()


def _check_size(seq: BidegreeSequence, settings: Settings):
    if seq.N > settings.max_nodes:
        raise TooLargeError(
            f"N={seq.N} exceeds the exact-count limit of {settings.max_nodes} nodes",
            {"N": seq.N, "max_nodes": settings.max_nodes})


def count_exact(seq: BidegreeSequence, variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS,
                settings: Optional[Settings] = None) -> BigCount:
    """
    Exact number of realizations of a balanced sequence.

    Args:
        seq: Balanced bidegree sequence
        variant: Graph family; undirected reads the (shared) in-degree vector
        settings: Node and memo-state limits (default: environment settings)

    Returns:
        The count as a Python integer (0 when the sequence is not graphical)

    Raises:
        NotBalancedError: the in- and out-degree totals differ
        TooLargeError: N or the DP state space exceeds the configured budget
    """
    variant = GraphVariant.parse(variant)
    settings = _resolve_settings(settings)
    if not seq.is_balanced:
        raise NotBalancedError(
            f"count needs a balanced sequence (sum a = {seq.S}, sum b = {seq.out_total})")
    if variant is GraphVariant.UNDIRECTED:
        require_symmetric(seq)
    _check_size(seq, settings)

    logger = get_logger()
    with logger.track(LogCategory.EXACT, "count_exact", f"{variant.value} N={seq.N} S={seq.S}"):
        counter = _ExactCounter(variant, settings)
        value = counter.count(seq.in_degrees, seq.out_degrees)
        logger.log_debug(LogCategory.EXACT, "count_exact", "DP finished",
                         {"memo_states": len(counter._memo), "digits": len(str(value))})
    return value


# Closed forms

def _concentrated_shape(a: Sequence[int], b: Sequence[int]) -> Optional[Tuple[int, int]]:
    """(k, q) when a has k nonzero entries and b uses only 0, 1 and k; else None."""
    k = sum(1 for x in a if x > 0)
    if k == 0:
        return (0, 0) if not any(b) else None
    allowed = {0, 1, k}
    if any(x not in allowed for x in b):
        return None
    q = 0 if k == 1 else sum(1 for x in b if x == k)
    return k, q


def count_closed_special(seq: BidegreeSequence) -> BigCount:
    """
    Count realizations (directed, loops allowed) when every out-degree is 0, 1
    or k, with k the number of nodes receiving edges. The transposed shape is
    accepted too.

    Returns:
        (S - qk)! / prod (a_i - q)! over the k receiving nodes, where q is the
        number of out-degrees equal to k; 0 when min a_i < q.

    Raises:
        NotBalancedError: totals differ
        ShapeMismatchError: neither the sequence nor its transpose has the shape
    """
    if not seq.is_balanced:
        raise NotBalancedError("closed forms need a balanced sequence")
    for a, b in ((seq.in_degrees, seq.out_degrees), (seq.out_degrees, seq.in_degrees)):
        shape = _concentrated_shape(a, b)
        if shape is None:
            continue
        k, q = shape
        receiving = [x for x in a if x > 0]
        if not receiving:
            return 1
        if min(receiving) < q:
            return 0
        value = math.factorial(seq.S - q * k)
        for x in receiving:
            value //= math.factorial(x - q)
        return value
    raise ShapeMismatchError(
        f"{seq} is not of concentrated-target shape (out-degrees in {{0, 1, k}}, "
        f"k receiving nodes) in either orientation")


def count_all_ones_base(seq_or_S: Union[BidegreeSequence, int],
                        variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS) -> BigCount:
    """
    Base count for telescoping: every out-degree (every degree, when
    undirected) is 0 or 1.

    Directed: S! / prod a_i!. Without loops the sending and receiving nodes
    must be disjoint. Undirected: S! / (2^(S/2) (S/2)!), or 0 for odd S.
    An integer argument means S nodes of degree one on both sides.
    """
    variant = GraphVariant.parse(variant)
    if isinstance(seq_or_S, int):
        S = seq_or_S
        if S < 0:
            raise BadShapeError(f"S must be nonnegative, got {S}")
        if variant is GraphVariant.UNDIRECTED:
            degrees = (1,) * S
        else:
            return math.factorial(S)
    else:
        seq = seq_or_S
        if not seq.is_balanced:
            raise NotBalancedError("base counts need a balanced sequence")
        if variant is GraphVariant.UNDIRECTED:
            require_symmetric(seq)
            degrees = seq.in_degrees
        else:
            if any(x > 1 for x in seq.out_degrees):
                raise BadShapeError("out-degrees must all be 0 or 1")
            if variant is GraphVariant.DIRECTED_NOLOOPS and any(
                    x > 0 and y > 0 for x, y in zip(seq.in_degrees, seq.out_degrees)):
                raise BadShapeError("without loops, sending and receiving nodes must be disjoint")
            value = math.factorial(seq.S)
            for x in seq.in_degrees:
                value //= math.factorial(x)
            return value

    if any(x > 1 for x in degrees):
        raise BadShapeError("undirected degrees must all be 0 or 1")
    S = sum(degrees)
    if S % 2:
        return 0
    return math.factorial(S) // (2 ** (S // 2) * math.factorial(S // 2))


def count_two_targets_noloops(seq: BidegreeSequence) -> BigCount:
    """
    Directed graphs without loops where exactly two nodes receive edges, both
    with the same out-degree delta in {0, 1}, and every other out-degree is
    0, 1 or 2. With q out-degrees equal to 2 the count is
    C(a1 + a2 - 2 delta - 2q, a1 - delta - q), or 0 when either target has
    fewer than q + delta incoming edges.
    """
    if not seq.is_balanced:
        raise NotBalancedError("closed forms need a balanced sequence")
    targets = [n for n, x in enumerate(seq.in_degrees) if x > 0]
    if len(targets) != 2:
        raise ShapeMismatchError("exactly two nodes must have positive in-degree")
    first, second = targets
    delta = seq.out_degrees[first]
    if delta not in (0, 1) or seq.out_degrees[second] != delta:
        raise ShapeMismatchError("both targets need the same out-degree, 0 or 1")
    others = [x for n, x in enumerate(seq.out_degrees) if n not in targets]
    if any(x > 2 for x in others):
        raise ShapeMismatchError("non-target out-degrees must be 0, 1 or 2")
    q = sum(1 for x in others if x == 2)
    a1, a2 = seq.in_degrees[first], seq.in_degrees[second]
    if min(a1, a2) < q + delta:
        return 0
    return math.comb(a1 + a2 - 2 * delta - 2 * q, a1 - delta - q)


# Partition identity and ratios

def _loops_only(variant: GraphVariant, operation: str):
    if variant is not GraphVariant.DIRECTED_LOOPS:
        raise UnsupportedVariantError(f"{operation} is defined for directed graphs with loops")


def _oriented(seq: BidegreeSequence, side: Union[Side, str]) -> BidegreeSequence:
    """Sequence whose in-degree side is the requested side."""
    return seq if Side.parse(side) is Side.IN else transpose(seq)


def _check_pair(seq: BidegreeSequence, i: int, j: int):
    if not (0 <= i < seq.N and 0 <= j < seq.N) or i == j:
        raise BadShapeError(f"({i}, {j}) is not a pair of distinct nodes for N={seq.N}",
                            {"i": i, "j": j, "N": seq.N})


def partition_expand(seq: BidegreeSequence, i: int, j: int, side: Union[Side, str] = Side.IN,
                     settings: Optional[Settings] = None) -> List[PartitionTerm]:
    """
    Split the count by the number k of nodes sending edges to both i and j.

    The term for k is C(a_i + a_j - 2k, a_j - k) times the total count of
    the residual sequences left after removing the incoming edges of i and j
    with exactly k doubly-hit senders. The pair is swapped so that
    a_j <= a_i. With side="out" the pair's out-edges are split instead.

    Returns:
        Terms for k = 0..a_j; their contributions sum to count_exact(seq)
    """
    settings = _resolve_settings(settings)
    if not seq.is_balanced:
        raise NotBalancedError("partition_expand needs a balanced sequence")
    _check_pair(seq, i, j)
    _check_size(seq, settings)
    oriented = _oriented(seq, side)
    a, b = list(oriented.in_degrees), oriented.out_degrees
    if a[j] > a[i]:
        i, j = j, i
    a_i, a_j = a[i], a[j]
    a[i] = a[j] = 0

    terms: List[PartitionTerm] = []
    with get_logger().track(LogCategory.EXACT, "partition_expand", f"pair ({i}, {j})"):
        counter = _ExactCounter(GraphVariant.DIRECTED_LOOPS, settings)
        for k in range(a_j + 1):
            residual = counter.residual_total(a, b, k, a_i + a_j - 2 * k)
            terms.append(PartitionTerm(k, math.comb(a_i + a_j - 2 * k, a_j - k), residual))
    return terms


def _require_ratio_form(seq: BidegreeSequence, side: Side):
    expected = SequenceForm.RATIO_IN if side is Side.IN else SequenceForm.RATIO_OUT
    if seq.form is not expected:
        raise WrongFormError(
            f"expected a ratio-form sequence with the {side.value}-side total one larger",
            {"form": seq.form.value})


def eta_profile(seq_ratio_form: BidegreeSequence, i: int, j: int,
                settings: Optional[Settings] = None) -> List[Fraction]:
    """
    Normalized residual totals for a ratio-form sequence (sum a = sum b + 1).

    eta_k = |X_k| / ((a_i + a_j - 1)(a_i + a_j - 2)...(a_i + a_j - 2k) |X_0|)
    for 0 <= k <= floor((a_i + a_j - 1) / 2), where X_k collects residuals
    with exactly k doubly-hit senders among a_i + a_j - 1 removed edges.

    Raises:
        EmptyX0Error: no residual without shared senders is graphical
    """
    settings = _resolve_settings(settings)
    seq = seq_ratio_form
    _check_pair(seq, i, j)
    _require_ratio_form(seq, Side.IN)
    _check_size(seq, settings)
    a = list(seq.in_degrees)
    a_i, a_j = a[i], a[j]
    a[i] = a[j] = 0
    removed = a_i + a_j - 1
    if removed < 0:
        raise EmptyX0Error("nodes i and j have no incoming edges")

    with get_logger().track(LogCategory.EXACT, "eta_profile", f"pair ({i}, {j})"):
        counter = _ExactCounter(GraphVariant.DIRECTED_LOOPS, settings)
        x0 = counter.residual_total(a, seq.out_degrees, 0, removed)
        if x0 == 0:
            raise EmptyX0Error(f"residual family X_0 is empty for pair ({i}, {j})")
        etas = [Fraction(1)]
        for k in range(1, removed // 2 + 1):
            xk = counter.residual_total(a, seq.out_degrees, k, removed - 2 * k)
            falling = math.perm(removed, 2 * k)
            etas.append(Fraction(xk, falling * x0))
    return etas


def assemble_ratio(a_i: int, a_j: int, etas: Sequence[Fraction]) -> Fraction:
    """
    Rebuild |G_{d-i}| / |G_{d-j}| from an eta profile. Entries past the end
    of the profile are taken as 1; their weights vanish.
    """
    if a_i <= 0 or a_j <= 0:
        raise DenominatorZeroError("a_i and a_j must be positive")

    def eta(k: int) -> Fraction:
        return Fraction(etas[k]) if k < len(etas) else Fraction(1)

    numerator = Fraction(0)
    denominator = Fraction(0)
    for k in range(max(a_i, a_j) + 1):
        numerator += (math.prod(a_j - l for l in range(k))
                      * math.prod(a_i - l for l in range(1, k + 1)) * eta(k))
        denominator += (math.prod(a_j - l for l in range(1, k + 1))
                        * math.prod(a_i - l for l in range(k)) * eta(k))
    if denominator == 0:
        raise DenominatorZeroError("assembled denominator is zero")
    return Fraction(a_i, a_j) * numerator / denominator


def ratio_exact(seq_ratio_form: BidegreeSequence, i: int, j: int,
                side: Union[Side, str] = Side.IN,
                variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS,
                settings: Optional[Settings] = None) -> Fraction:
    """
    Exact |G_{d-i}| / |G_{d-j}| for a ratio-form sequence.

    Raises:
        WrongFormError: the chosen side's total is not one larger
        ZeroDegreeError: node i or j has degree zero on that side
        DenominatorZeroError: d_{-j} has no realization
    """
    side = Side.parse(side)
    variant = GraphVariant.parse(variant)
    if not variant.directed:
        raise UnsupportedVariantError("ratios of one-sided decrements need a directed variant")
    settings = _resolve_settings(settings)
    _require_ratio_form(seq_ratio_form, side)
    _check_pair(seq_ratio_form, i, j)
    minus_i = decrement(seq_ratio_form, i, side)
    minus_j = decrement(seq_ratio_form, j, side)

    with get_logger().track(LogCategory.EXACT, "ratio_exact", f"pair ({i}, {j}) side={side.value}"):
        denominator = count_exact(minus_j, variant, settings)
        if denominator == 0:
            raise DenominatorZeroError(f"d_-{j} is not graphical; the ratio is undefined",
                                       {"i": i, "j": j})
        numerator = count_exact(minus_i, variant, settings)
    return Fraction(numerator, denominator)


def ratio_two_term(seq_ratio_form: BidegreeSequence, i: int, j: int,
                   settings: Optional[Settings] = None) -> Fraction:
    """
    Exact ratio through the padded-node identity

        (a_i / a_j) (1 + |X_1i| / (a_i |X_0i|)) / (1 + |X_1j| / (a_j |X_0j|))

    where X_0i removes a_i single edges from distinct senders after zeroing
    a_i and lowering a_j by one, and X_1i takes two edges from one sender and
    single edges from a_i - 2 others. X_0j and X_1j swap the roles.
    """
    settings = _resolve_settings(settings)
    seq = seq_ratio_form
    _check_pair(seq, i, j)
    _require_ratio_form(seq, Side.IN)
    _check_size(seq, settings)
    a_i, a_j = seq.in_degrees[i], seq.in_degrees[j]
    if a_i == 0 or a_j == 0:
        raise DenominatorZeroError("a_i and a_j must be positive")

    counter = _ExactCounter(GraphVariant.DIRECTED_LOOPS, settings)

    def families(keep: int, lower: int) -> Tuple[int, int]:
        a = list(seq.in_degrees)
        removed = a[keep]
        a[keep] = 0
        a[lower] -= 1
        x0 = counter.residual_total(a, seq.out_degrees, 0, removed)
        x1 = counter.residual_total(a, seq.out_degrees, 1, removed - 2)
        return x0, x1

    with get_logger().track(LogCategory.EXACT, "ratio_two_term", f"pair ({i}, {j})"):
        x0i, x1i = families(i, j)
        x0j, x1j = families(j, i)
    if x0i == 0 or x0j == 0:
        raise DenominatorZeroError("a residual family without shared senders is empty")
    return Fraction(a_i * x0i + x1i, x0i) * Fraction(x0j, a_j * x0j + x1j)


# Exhaustive oracle

def enumerate_realizations(seq: BidegreeSequence,
                           variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS
                           ) -> Iterator[np.ndarray]:
    """
    Yield every realization as an N x N 0-1 adjacency matrix (row u, column
    v set when u -> v). Plain backtracking over rows; shares no code with the
    dynamic programs. Meant for small N.
    """
    variant = GraphVariant.parse(variant)
    if not seq.is_balanced:
        return
    N = seq.N
    matrix = np.zeros((N, N), dtype=np.int8)

    if variant is GraphVariant.UNDIRECTED:
        require_symmetric(seq)
        residual = list(seq.in_degrees)

        def place_node(u: int):
            if u == N:
                if not any(residual):
                    yield matrix.copy()
                return
            candidates = [v for v in range(u + 1, N) if residual[v] > 0]
            for chosen in itertools.combinations(candidates, residual[u]):
                for v in chosen:
                    residual[v] -= 1
                    matrix[u, v] = matrix[v, u] = 1
                saved, residual[u] = residual[u], 0
                yield from place_node(u + 1)
                residual[u] = saved
                for v in chosen:
                    residual[v] += 1
                    matrix[u, v] = matrix[v, u] = 0

        yield from place_node(0)
        return

    columns = list(seq.in_degrees)
    rows = seq.out_degrees
    loops = variant is GraphVariant.DIRECTED_LOOPS

    def place_row(u: int):
        if u == N:
            if not any(columns):
                yield matrix.copy()
            return
        remaining_rows = N - u - 1
        candidates = [v for v in range(N) if columns[v] > 0 and (loops or v != u)]
        for chosen in itertools.combinations(candidates, rows[u]):
            for v in chosen:
                columns[v] -= 1
                matrix[u, v] = 1
            if max(columns) <= remaining_rows:
                yield from place_row(u + 1)
            for v in chosen:
                columns[v] += 1
                matrix[u, v] = 0

    yield from place_row(0)


def count_by_enumeration(seq: BidegreeSequence,
                         variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS) -> BigCount:
    return sum(1 for _ in enumerate_realizations(seq, variant))


def count_closed_form(seq: BidegreeSequence,
                      variant: Union[GraphVariant, str] = GraphVariant.DIRECTED_LOOPS) -> BigCount:
    """
    Count through the closed form matching the variant: concentrated targets
    (loops allowed), two targets (no loops), or the all-ones perfect-matching
    count (undirected).

    Raises:
        ShapeMismatchError, BadShapeError: the sequence has no closed form
    """
    variant = GraphVariant.parse(variant)
    with get_logger().track(LogCategory.EXACT, "count_closed_form", variant.value):
        if variant is GraphVariant.DIRECTED_LOOPS:
            return count_closed_special(seq)
        if variant is GraphVariant.DIRECTED_NOLOOPS:
            return count_two_targets_noloops(seq)
        return count_all_ones_base(seq, variant)
