#!/usr/bin/env python3
"""
Pattern Expansion Module for the Bidegree Toolkit

This module provides the symbolic equality-pattern algebra behind the
higher-order corrections. A sum over index tuples x_1..x_r whose entries
are pairwise distinct is rewritten, one index at a time, into sums over
tuples that are free in a short prefix, with coefficients that are integer
polynomials in the formal tuple length r.

Patterns are stored on a canonical layout:

- the seed group carrying g (weighted expansions only) at index 1
- the remaining free blocks by descending size, then free singletons
- at most one constrained block starting at s, distinct from the suffix
- the suffix s..r of pairwise distinct indices

A brute-force evaluator enumerates the constrained tuples directly and
serves as the oracle for the factored evaluator.
"""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.utilities.iterables import multiset_partitions

from errors import BadKError, InvalidPatternError
from logger import LogCategory, get_logger

R = sympy.Symbol("r")

Number = Union[int, Fraction]
Length = Union[int, sympy.Symbol]


class ExpansionMode(Enum):
    """EXACT keeps every term; TRUNCATED drops the terms at the truncation weight."""
    EXACT = "exact"
    TRUNCATED = "truncated"

    @classmethod
    def parse(cls, value: Union[str, "ExpansionMode"]) -> "ExpansionMode":
        if isinstance(value, ExpansionMode):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"mode must be 'exact' or 'truncated', got {value!r}")


class Convention(Enum):
    """
    Multiplier used when a free singleton is pushed back into the suffix.

    EXACT counts the suffix entries it can coincide with. PUBLISHED uses one
    more; it matches the printed two-pair coefficients of the weight-two
    expansions and is accepted only for truncated expansions.
    """
    EXACT = "exact"
    PUBLISHED = "published"

    @classmethod
    def parse(cls, value: Union[str, "Convention"]) -> "Convention":
        if isinstance(value, Convention):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"convention must be 'exact' or 'published', got {value!r}")


@dataclass(frozen=True)
class EqualityPattern:
    """
    Index constraint: every block's indices are equal, and the indices
    distinct_from..r are pairwise distinct (indices sharing a block count once).
    With weighted=True the index 1 carries g instead of f.
    """
    blocks: Tuple[FrozenSet[int], ...]
    distinct_from: int
    r: Length = R
    weighted: bool = False

    def __post_init__(self):
        seen: set = set()
        for block in self.blocks:
            if not block or min(block) < 1:
                raise InvalidPatternError(f"block {sorted(block)} must hold indices >= 1")
            if seen & block:
                raise InvalidPatternError("blocks must be pairwise disjoint",
                                          {"blocks": [sorted(b) for b in self.blocks]})
            seen |= block
        if self.distinct_from < 1:
            raise InvalidPatternError("distinct_from must be at least 1")
        if isinstance(self.r, int) and seen and max(seen) > self.r:
            raise InvalidPatternError(f"index {max(seen)} exceeds r={self.r}")

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]], distinct_from: int, r: Length = R,
           weighted: bool = False) -> "EqualityPattern":
        """Build from plain iterables; singleton blocks are dropped."""
        frozen = tuple(frozenset(b) for b in blocks if len(set(b)) > 1)
        return cls(tuple(sorted(frozen, key=min)), distinct_from, r, weighted)

    @property
    def weight(self) -> int:
        return pattern_weight(self)


@dataclass(frozen=True, order=True)
class _Shape:
    """Relabeling-invariant content of a canonical pattern."""
    seed: int                 # size of the g-carrying group, 0 when unweighted
    seed_constrained: bool
    free: Tuple[int, ...]     # non-seed free group sizes, descending
    block: int                # non-seed constrained block size, 0 when absent

    @property
    def width(self) -> int:
        seed = self.seed if self.seed and not self.seed_constrained else 0
        return seed + sum(self.free)

    @property
    def constrained(self) -> int:
        return self.seed if self.seed_constrained else self.block

    @property
    def used(self) -> int:
        return self.width + self.constrained

    @property
    def weight(self) -> int:
        groups = list(self.free) + [self.seed, self.block]
        return sum(size - 1 for size in groups if size)

    @property
    def level(self) -> int:
        return self.weight - (1 if self.seed else 0)


@dataclass
class PatternExpansion:
    """Signed combination of patterns with integer polynomial coefficients in r."""
    terms: List[Tuple[sympy.Poly, EqualityPattern]]
    truncation_weight: int
    mode: ExpansionMode = ExpansionMode.EXACT
    convention: Convention = Convention.EXACT
    weighted: bool = False
    r: Length = R

    def coefficient_of(self, pattern: EqualityPattern) -> sympy.Poly:
        """Coefficient of a pattern (any labeling); the zero polynomial when absent."""
        target = canonicalize(pattern)
        for coefficient, term in self.terms:
            if term == target:
                return coefficient
        return sympy.Poly(0, R, domain="ZZ")

    def lines(self) -> List[str]:
        return [f"{format_polynomial(c)} | {describe_pattern(p)}" for c, p in self.terms]


def pattern_weight(pattern: EqualityPattern) -> int:
    """Equality weight: sum over blocks of (|block| - 1)."""
    return sum(len(block) - 1 for block in pattern.blocks)


def _seed_index_group(pattern: EqualityPattern) -> Optional[FrozenSet[int]]:
    for block in pattern.blocks:
        if 1 in block:
            return block
    return None


def _shape_of(pattern: EqualityPattern) -> _Shape:
    s = pattern.distinct_from
    prefix_blocks: List[FrozenSet[int]] = []
    suffix_blocks: List[FrozenSet[int]] = []
    for block in pattern.blocks:
        if max(block) < s:
            prefix_blocks.append(block)
        elif min(block) >= s:
            suffix_blocks.append(block)
        else:
            raise InvalidPatternError(f"block {sorted(block)} straddles the distinct suffix at {s}")
    if len(suffix_blocks) > 1:
        raise InvalidPatternError("at most one block may sit inside the distinct suffix")

    in_blocks = set().union(*prefix_blocks) if prefix_blocks else set()
    singletons = [x for x in range(1, s) if x not in in_blocks]

    seed, seed_constrained = 0, False
    if pattern.weighted:
        group = _seed_index_group(pattern)
        if group is not None:
            seed = len(group)
            seed_constrained = group in suffix_blocks
            if seed_constrained:
                suffix_blocks = []
            else:
                prefix_blocks.remove(group)
        elif 1 < s:
            seed = 1
            singletons.remove(1)
        else:
            raise InvalidPatternError("the weighted index 1 must be free or in a block")

    free = tuple(sorted([len(b) for b in prefix_blocks] + [1] * len(singletons), reverse=True))
    block = len(suffix_blocks[0]) if suffix_blocks else 0
    return _Shape(seed, seed_constrained, free, block)


def _pattern_of(shape: _Shape, r: Length) -> EqualityPattern:
    blocks: List[FrozenSet[int]] = []
    cursor = 1
    if shape.seed and not shape.seed_constrained:
        if shape.seed > 1:
            blocks.append(frozenset(range(cursor, cursor + shape.seed)))
        cursor += shape.seed
    for size in shape.free:
        if size > 1:
            blocks.append(frozenset(range(cursor, cursor + size)))
        cursor += size
    s = cursor
    if shape.constrained:
        blocks.append(frozenset(range(s, s + shape.constrained)))
    return EqualityPattern(tuple(blocks), s, r, weighted=bool(shape.seed))


def canonicalize(pattern: EqualityPattern) -> EqualityPattern:
    """
    Relabel a pattern onto the canonical layout.

    Two patterns describe the same sum exactly when their canonical forms
    are equal.

    Raises:
        InvalidPatternError: a block straddles the suffix start, or the
            suffix holds more than one block
    """
    return _pattern_of(_shape_of(pattern), pattern.r)


def _suffix_size(shape: _Shape, r: Length):
    return r - shape.used


def _rewrite(shape: _Shape, k: int, convention: Convention) -> List[Tuple[object, _Shape]]:
    """One rewrite of a term not yet in its final shape: [(factor, child), ...]."""
    n = _suffix_size(shape, R)
    if shape.constrained:
        # constrained block: free it, minus its coincidences with a suffix entry
        if shape.seed_constrained:
            freed = _Shape(shape.seed, False, shape.free, 0)
            grown = _Shape(shape.seed + 1, True, shape.free, 0)
        else:
            freed = _Shape(shape.seed, False,
                           tuple(sorted(shape.free + (shape.block,), reverse=True)), 0)
            grown = _Shape(shape.seed, False, shape.free, shape.block + 1)
        return [(sympy.Integer(1), freed), (-n, grown)]

    if shape.width < 2 * k:
        freed = _Shape(shape.seed, False, shape.free + (1,), 0)
        paired = _Shape(shape.seed, False, shape.free, 2)
        return [(sympy.Integer(1), freed), (-(n - 1), paired)]

    if 1 not in shape.free:
        raise InvalidPatternError(f"no free singleton to return to the suffix in {shape}")
    rest = list(shape.free)
    rest.remove(1)
    pushed = _Shape(shape.seed, False, tuple(rest), 0)
    paired = _Shape(shape.seed, False, tuple(rest), 2)
    multiplier = n if convention is Convention.EXACT else n + 1
    return [(sympy.Integer(1), pushed), (multiplier, paired)]


def _is_final(shape: _Shape, k: int) -> bool:
    return not shape.constrained and shape.width == 2 * k


def _expand(start: _Shape, r: Length, k: int, mode: Union[ExpansionMode, str],
            convention: Union[Convention, str], operation: str) -> PatternExpansion:
    mode = ExpansionMode.parse(mode)
    convention = Convention.parse(convention)
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise BadKError(f"k must be a positive integer, got {k!r}")
    if isinstance(r, int) and 2 * k > r:
        raise BadKError(f"k={k} frees {2 * k} indices but r={r}", {"k": k, "r": r})
    if convention is Convention.PUBLISHED and mode is ExpansionMode.EXACT:
        raise InvalidPatternError("the published convention only applies to truncated expansions")

    logger = get_logger()
    with logger.track(LogCategory.PATTERNS, operation,
                      f"k={k} mode={mode.value} convention={convention.value}"):
        terms: Dict[_Shape, object] = {start: sympy.Integer(1)}
        while True:
            pending = [s for s in terms if s.level < k and not _is_final(s, k)]
            if not pending:
                break
            shape = min(pending, key=lambda s: (s.level, s))
            coefficient = terms.pop(shape)
            for factor, child in _rewrite(shape, k, convention):
                total = sympy.expand(terms.get(child, 0) + coefficient * factor)
                if total == 0:
                    terms.pop(child, None)
                else:
                    terms[child] = total

        kept: List[Tuple[sympy.Poly, EqualityPattern]] = []
        for shape in sorted(terms, key=lambda s: (s.level, s)):
            if shape.level == k and mode is ExpansionMode.TRUNCATED:
                continue
            poly = sympy.Poly(terms[shape], R, domain="ZZ")
            if isinstance(r, int):
                value = int(poly.eval(r))
                if value == 0 or _suffix_size(shape, r) < 0:
                    continue
                poly = sympy.Poly(value, R, domain="ZZ")
            kept.append((poly, _pattern_of(shape, r)))

    logger.log_debug(LogCategory.PATTERNS, operation, f"{len(kept)} terms")
    return PatternExpansion(kept, k, mode, convention, weighted=bool(start.seed), r=r)


def expand_distinct(r: Length = R, k: int = 1,
                    mode: Union[ExpansionMode, str] = ExpansionMode.EXACT,
                    convention: Union[Convention, str] = Convention.EXACT) -> PatternExpansion:
    """
    Expand the sum over pairwise distinct x_1..x_r of prod f(x_m), freeing
    the first 2k indices.

    Terms below weight k end with the free prefix 1..2k and the distinct
    suffix 2k+1..r. Weight-k terms are kept in whatever shape they reached
    (exact mode) or dropped (truncated mode).

    Args:
        r: The formal symbol r, or a concrete tuple length
        k: Half the length of the freed prefix
        mode: exact or truncated
        convention: exact or published (truncated only)

    Raises:
        BadKError: k < 1, or 2k > r for a concrete r
    """
    return _expand(_Shape(0, False, (), 0), r, k, mode, convention, "expand_distinct")


def expand_with_initial_equality(r: Length = R, k: int = 1,
                                 mode: Union[ExpansionMode, str] = ExpansionMode.TRUNCATED,
                                 convention: Union[Convention, str] = Convention.EXACT
                                 ) -> PatternExpansion:
    """
    Expand the sum over x_1 = x_2, pairwise distinct otherwise, of
    g(x_1) prod_{m >= 2} f(x_m). Weights are counted beyond the seed block.
    """
    return _expand(_Shape(2, True, (), 0), r, k, mode, convention,
                   "expand_with_initial_equality")


def source_pattern(r: Length = R, weighted: bool = False) -> EqualityPattern:
    """The pattern an expansion starts from."""
    if weighted:
        return EqualityPattern((frozenset({1, 2}),), 1, r, weighted=True)
    return EqualityPattern((), 1, r)


def format_polynomial(poly: Union[sympy.Poly, int]) -> str:
    """Render a coefficient: 5, -(4r-10), (2r^2-15r+21)."""
    if not isinstance(poly, sympy.Poly):
        poly = sympy.Poly(poly, R, domain="ZZ")
    coeffs = [int(c) for c in poly.all_coeffs()]
    if poly.degree() <= 0:
        return str(coeffs[-1] if coeffs else 0)
    negative = coeffs[0] < 0
    if negative:
        coeffs = [-c for c in coeffs]

    parts: List[str] = []
    degree = len(coeffs) - 1
    for power, c in zip(range(degree, -1, -1), coeffs):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        if power == 0:
            body = str(magnitude)
        else:
            body = "" if magnitude == 1 else str(magnitude)
            body += "r" if power == 1 else f"r^{power}"
        parts.append(body if not parts and sign == "+" else f"{sign}{body}")
    inner = "".join(parts)
    return f"-({inner})" if negative else f"({inner})"


def _format_block(block: FrozenSet[int]) -> str:
    return "{" + ",".join(str(x) for x in sorted(block)) + "}"


def describe_pattern(pattern: EqualityPattern) -> str:
    """Text form, e.g. "{1,2} | free 3,4 | distinct 5..r"."""
    s = pattern.distinct_from
    in_blocks = set().union(*pattern.blocks) if pattern.blocks else set()
    singletons = [x for x in range(1, s) if x not in in_blocks]

    parts: List[str] = []
    if pattern.blocks:
        parts.append("".join(_format_block(b) for b in sorted(pattern.blocks, key=min)))
    if singletons:
        parts.append("free " + ",".join(str(x) for x in singletons))
    if isinstance(pattern.r, int):
        if s <= pattern.r:
            parts.append(f"distinct {s}..{pattern.r}")
    else:
        parts.append(f"distinct {s}..{pattern.r}")
    return " | ".join(parts) if parts else "empty"


# Numeric evaluation

def _power_sum(f: Sequence[Number], size: int, g: Optional[Sequence[Number]] = None) -> Number:
    if g is None:
        return sum(x ** size for x in f)
    return sum(gx * fx ** (size - 1) for gx, fx in zip(g, f))


def _distinct_sum(weights: List[Sequence[Number]]) -> Number:
    """Sum over pairwise distinct y_1..y_m of prod w_i(y_i), by Moebius inversion over set partitions."""
    if not weights:
        return 1
    total: Number = 0
    N = len(weights[0])
    for partition in multiset_partitions(list(range(len(weights)))):
        mu = 1
        product: Number = 1
        for part in partition:
            size = len(part)
            mu *= (-1) ** (size - 1) * math.factorial(size - 1)
            term: Number = 0
            for x in range(N):
                value: Number = 1
                for i in part:
                    value *= weights[i][x]
                term += value
            product *= term
        total += mu * product
    return total


def _resolve(pattern: EqualityPattern, r: Optional[int]) -> int:
    r_value = r if r is not None else pattern.r
    if not isinstance(r_value, int):
        raise InvalidPatternError("evaluating a pattern needs a concrete r")
    return r_value


def evaluate_pattern(pattern: EqualityPattern, f: Sequence[Number],
                     g: Optional[Sequence[Number]] = None, r: Optional[int] = None,
                     N: Optional[int] = None) -> Number:
    """
    Exact value of the constrained sum, with g on index 1 when supplied.

    Free groups factor into power sums; the distinct suffix (including the
    constrained block) uses inclusion-exclusion over set partitions. A
    layout that does not fit in r indices sums to 0.
    """
    r_value = _resolve(pattern, r)
    f = list(f)[:N] if N is not None else list(f)
    if g is not None:
        g = list(g)[:len(f)]
    shape = _shape_of(pattern)
    n = _suffix_size(shape, r_value)
    if n < 0:
        return 0

    seeded = pattern.weighted and g is not None
    product: Number = 1
    if shape.seed and not shape.seed_constrained:
        product *= _power_sum(f, shape.seed, g if seeded else None)
    for size in shape.free:
        product *= _power_sum(f, size)

    weights: List[Sequence[Number]] = []
    if shape.constrained:
        t = shape.constrained
        if shape.seed_constrained and seeded:
            weights.append([gx * fx ** (t - 1) for gx, fx in zip(g, f)])
        else:
            weights.append([fx ** t for fx in f])
    weights.extend([f] * n)
    return product * _distinct_sum(weights)


def brute_force_sum(pattern: EqualityPattern, f: Sequence[Number],
                    g: Optional[Sequence[Number]] = None, r: Optional[int] = None,
                    N: Optional[int] = None) -> Number:
    """The same sum by direct enumeration of all N^r tuples."""
    r_value = _resolve(pattern, r)
    f = list(f)[:N] if N is not None else list(f)
    seeded = pattern.weighted and g is not None
    s = pattern.distinct_from
    group_of = {}
    for block in pattern.blocks:
        for index in block:
            group_of[index] = min(block)
    if group_of and max(group_of) > r_value:
        return 0

    representatives = sorted({group_of.get(i, i) for i in range(s, r_value + 1)})
    total: Number = 0
    for x in itertools.product(range(len(f)), repeat=r_value):
        if any(x[i - 1] != x[group_of[i] - 1] for i in group_of):
            continue
        values = [x[i - 1] for i in representatives]
        if len(set(values)) != len(values):
            continue
        value: Number = g[x[0]] if seeded else f[x[0]]
        for m in range(1, r_value):
            value *= f[x[m]]
        total += value
    return total


def evaluate_expansion(expansion: PatternExpansion, f: Sequence[Number],
                       g: Optional[Sequence[Number]] = None, r: Optional[int] = None) -> Number:
    r_value = r if r is not None else expansion.r
    if not isinstance(r_value, int):
        raise InvalidPatternError("evaluating an expansion needs a concrete r")
    total: Number = 0
    for coefficient, pattern in expansion.terms:
        c = int(coefficient.eval(r_value))
        if c:
            total += c * evaluate_pattern(pattern, f, g, r_value)
    return total


def check_identity(k: int, weighted: bool = False, r: Optional[int] = None, N: int = 5,
                   seed: int = 0) -> bool:
    """
    Evaluate the exact expansion on a random integer table and compare it
    with brute-force enumeration of the source sum.
    """
    r_value = r if r is not None else 2 * k + 1
    rng = np.random.default_rng(seed)
    f = [int(v) for v in rng.integers(0, 4, size=N)]
    g = [int(v) for v in rng.integers(0, 4, size=N)] if weighted else None
    if weighted:
        expansion = expand_with_initial_equality(R, k, ExpansionMode.EXACT)
    else:
        expansion = expand_distinct(R, k, ExpansionMode.EXACT)
    expected = brute_force_sum(source_pattern(r_value, weighted), f, g, r_value)
    return evaluate_expansion(expansion, f, g, r_value) == expected
