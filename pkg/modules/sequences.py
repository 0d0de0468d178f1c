#!/usr/bin/env python3
"""
Sequence Module for the Bidegree Toolkit

This module provides the degree-sequence data model every other module
consumes: validation, graphicality tests, power-sum moments, the sparsity
diagnostic and the small sequence surgeries (decrement, increment, padding,
transposition, relabeling). It also reads and writes sequence files.

Node indices are 0-based throughout the library.
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from errors import (
    DegenerateSequenceError,
    LengthMismatchError,
    NegativeDegreeError,
    SequenceParseError,
    SumMismatchError,
    UnsupportedVariantError,
    ZeroDegreeError,
)


class GraphVariant(Enum):
    """Which family of simple graphs a sequence is realized in."""
    DIRECTED_LOOPS = "directed-loops"
    DIRECTED_NOLOOPS = "directed-noloops"
    UNDIRECTED = "undirected"

    @property
    def directed(self) -> bool:
        return self is not GraphVariant.UNDIRECTED

    @classmethod
    def parse(cls, value: Union[str, "GraphVariant"]) -> "GraphVariant":
        if isinstance(value, GraphVariant):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise UnsupportedVariantError(f"Unknown graph variant {value!r} (choose from {choices})")


class Side(Enum):
    """Degree side: in-degrees (a) or out-degrees (b)."""
    IN = "in"
    OUT = "out"

    @classmethod
    def parse(cls, value: Union[str, "Side"]) -> "Side":
        if isinstance(value, Side):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"side must be 'in' or 'out', got {value!r}")


class SequenceForm(Enum):
    """Relation between the in-degree and out-degree totals."""
    BALANCED = "balanced"
    RATIO_IN = "ratio-in"    # sum(a) = sum(b) + 1
    RATIO_OUT = "ratio-out"  # sum(b) = sum(a) + 1


@dataclass(frozen=True)
class BidegreeSequence:
    """Paired in/out degree vectors d = (a, b). Build instances with validate()."""
    in_degrees: Tuple[int, ...]
    out_degrees: Tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.in_degrees)

    @property
    def S(self) -> int:
        return sum(self.in_degrees)

    @property
    def out_total(self) -> int:
        return sum(self.out_degrees)

    @property
    def form(self) -> SequenceForm:
        diff = self.S - self.out_total
        if diff == 0:
            return SequenceForm.BALANCED
        return SequenceForm.RATIO_IN if diff == 1 else SequenceForm.RATIO_OUT

    @property
    def is_balanced(self) -> bool:
        return self.form is SequenceForm.BALANCED

    @property
    def is_ratio_form(self) -> bool:
        return self.form is not SequenceForm.BALANCED

    @property
    def d_max(self) -> int:
        return max(max(self.in_degrees, default=0), max(self.out_degrees, default=0))

    @property
    def is_symmetric(self) -> bool:
        return self.in_degrees == self.out_degrees

    def degrees(self, side: Union[Side, str]) -> Tuple[int, ...]:
        return self.in_degrees if Side.parse(side) is Side.IN else self.out_degrees

    def to_dict(self) -> Dict[str, List[int]]:
        return {"in_degrees": list(self.in_degrees), "out_degrees": list(self.out_degrees)}

    def __str__(self) -> str:
        return f"a={list(self.in_degrees)} b={list(self.out_degrees)}"


@dataclass(frozen=True)
class MomentProfile:
    """Power sums alpha[k] = sum a_i^k and beta[k] = sum b_i^k for 0 <= k <= max_order."""
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    max_order: int

    def swapped(self) -> "MomentProfile":
        """The profile of the transposed sequence."""
        return MomentProfile(self.beta, self.alpha, self.max_order)


@dataclass(frozen=True)
class SparsityDiagnostic:
    d_max: int
    S: int
    effective_tau: float
    condition_A1: int
    in_regime: bool


def _as_degree_tuple(values: Iterable, name: str) -> Tuple[int, ...]:
    result = []
    for position, value in enumerate(values):
        if isinstance(value, bool) or int(value) != value:
            raise NegativeDegreeError(f"{name}[{position}] = {value!r} is not an integer")
        value = int(value)
        if value < 0:
            raise NegativeDegreeError(f"{name}[{position}] = {value} is negative",
                                      {"vector": name, "position": position})
        result.append(value)
    return tuple(result)


def validate(raw_in: Sequence[int], raw_out: Sequence[int]) -> BidegreeSequence:
    """
    Build a sequence from raw degree vectors.

    Args:
        raw_in: In-degrees a
        raw_out: Out-degrees b

    Returns:
        A balanced or ratio-form BidegreeSequence

    Raises:
        LengthMismatchError: vectors differ in length
        NegativeDegreeError: an entry is negative or not an integer
        SumMismatchError: the totals differ by more than one
    """
    a = _as_degree_tuple(raw_in, "in_degrees")
    b = _as_degree_tuple(raw_out, "out_degrees")
    if len(a) != len(b):
        raise LengthMismatchError(
            f"in_degrees has {len(a)} entries but out_degrees has {len(b)}")
    if len(a) == 0:
        raise LengthMismatchError("degree vectors must be non-empty")
    if abs(sum(a) - sum(b)) > 1:
        raise SumMismatchError(
            f"sum(in_degrees)={sum(a)} and sum(out_degrees)={sum(b)} differ by more than one",
            {"in_total": sum(a), "out_total": sum(b)})
    return BidegreeSequence(a, b)


def from_degrees(degrees: Sequence[int]) -> BidegreeSequence:
    """Undirected input: a single degree vector used on both sides."""
    return validate(degrees, degrees)


def moments(seq: BidegreeSequence, max_order: int) -> MomentProfile:
    """Exact power sums of both degree vectors up to max_order."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    alpha = tuple(sum(x ** k for x in seq.in_degrees) for k in range(max_order + 1))
    beta = tuple(sum(x ** k for x in seq.out_degrees) for k in range(max_order + 1))
    return MomentProfile(alpha, beta, max_order)


def _gale_ryser(rows: Sequence[int], cols: Sequence[int]) -> bool:
    if sum(rows) != sum(cols):
        return False
    rows = sorted(rows, reverse=True)
    running = 0
    for k in range(1, len(rows) + 1):
        running += rows[k - 1]
        if running > sum(min(c, k) for c in cols):
            return False
    return True


def _fulkerson(a: Sequence[int], b: Sequence[int]) -> bool:
    if sum(a) != sum(b):
        return False
    # (out, in) pairs, lexicographically non-increasing
    pairs = sorted(zip(b, a), reverse=True)
    running = 0
    for k in range(1, len(pairs) + 1):
        running += pairs[k - 1][0]
        bound = sum(min(in_deg, k - 1) for _, in_deg in pairs[:k])
        bound += sum(min(in_deg, k) for _, in_deg in pairs[k:])
        if running > bound:
            return False
    return True


def _erdos_gallai(degrees: Sequence[int]) -> bool:
    if sum(degrees) % 2:
        return False
    d = sorted(degrees, reverse=True)
    running = 0
    for k in range(1, len(d) + 1):
        running += d[k - 1]
        if running > k * (k - 1) + sum(min(x, k) for x in d[k:]):
            return False
    return True


def is_graphical(seq: BidegreeSequence, variant: Union[GraphVariant, str]) -> bool:
    """
    Whether at least one realization exists under the variant.

    Ratio-form sequences are never graphical. The undirected variant reads
    the in-degree vector and requires both vectors to agree.
    """
    variant = GraphVariant.parse(variant)
    if not seq.is_balanced:
        return False
    if variant is GraphVariant.DIRECTED_LOOPS:
        return _gale_ryser(seq.out_degrees, seq.in_degrees)
    if variant is GraphVariant.DIRECTED_NOLOOPS:
        return _fulkerson(seq.in_degrees, seq.out_degrees)
    require_symmetric(seq)
    return _erdos_gallai(seq.in_degrees)


def require_symmetric(seq: BidegreeSequence) -> None:
    if not seq.is_symmetric:
        raise UnsupportedVariantError(
            "the undirected variant needs in_degrees == out_degrees")


def decrement(seq: BidegreeSequence, node: int, side: Union[Side, str] = Side.IN) -> BidegreeSequence:
    """d_{-i}: subtract one from the node's degree on the given side."""
    side = Side.parse(side)
    degrees = list(seq.degrees(side))
    if not 0 <= node < len(degrees):
        raise IndexError(f"node {node} out of range for N={len(degrees)}")
    if degrees[node] == 0:
        raise ZeroDegreeError(f"{side.value}-degree of node {node} is already zero",
                              {"node": node, "side": side.value})
    degrees[node] -= 1
    if side is Side.IN:
        return validate(degrees, seq.out_degrees)
    return validate(seq.in_degrees, degrees)


def increment(seq: BidegreeSequence, node: int, side: Union[Side, str] = Side.IN) -> BidegreeSequence:
    side = Side.parse(side)
    degrees = list(seq.degrees(side))
    if not 0 <= node < len(degrees):
        raise IndexError(f"node {node} out of range for N={len(degrees)}")
    degrees[node] += 1
    if side is Side.IN:
        return validate(degrees, seq.out_degrees)
    return validate(seq.in_degrees, degrees)


def transpose(seq: BidegreeSequence) -> BidegreeSequence:
    return BidegreeSequence(seq.out_degrees, seq.in_degrees)


def pad(seq: BidegreeSequence, length: int) -> BidegreeSequence:
    """Append zero-degree nodes up to the given length."""
    extra = max(0, length - seq.N)
    return BidegreeSequence(seq.in_degrees + (0,) * extra, seq.out_degrees + (0,) * extra)


def permute(seq: BidegreeSequence, order: Sequence[int]) -> BidegreeSequence:
    """Relabel nodes: node k of the result is node order[k] of the input."""
    if sorted(order) != list(range(seq.N)):
        raise ValueError("order must be a permutation of range(N)")
    return BidegreeSequence(tuple(seq.in_degrees[k] for k in order),
                            tuple(seq.out_degrees[k] for k in order))


def sparsity_diagnostic(seq: BidegreeSequence) -> SparsityDiagnostic:
    """Where the sequence sits relative to the d_max = O(S^(1/2 - tau)) regime."""
    S = seq.S
    if S < 2:
        raise DegenerateSequenceError(f"sparsity diagnostic needs S >= 2, got S={S}")
    a_sorted = sorted(seq.in_degrees, reverse=True)
    b_sorted = sorted(seq.out_degrees, reverse=True)
    condition = max(sum(b_sorted[:a_sorted[0]]), sum(a_sorted[:b_sorted[0]]))
    d_max = seq.d_max
    tau = 0.5 - math.log(d_max) / math.log(S)
    return SparsityDiagnostic(d_max=d_max, S=S, effective_tau=tau,
                              condition_A1=condition, in_regime=tau > 0)


# Sequence files

def _check_vector(value, key: str, path: Optional[str]) -> List[int]:
    if not isinstance(value, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise SequenceParseError(f"'{key}' must be a list of integers", path=path)
    return value


def _parse_json(text: str, path: Optional[str]) -> BidegreeSequence:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SequenceParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno, path)
    if not isinstance(data, dict):
        raise SequenceParseError("expected a JSON object", 1, 1, path)
    if "degrees" in data:
        degrees = _check_vector(data["degrees"], "degrees", path)
        return from_degrees(degrees)
    missing = [key for key in ("in_degrees", "out_degrees") if key not in data]
    if missing:
        raise SequenceParseError(f"missing key(s): {', '.join(missing)}", path=path)
    return validate(_check_vector(data["in_degrees"], "in_degrees", path),
                    _check_vector(data["out_degrees"], "out_degrees", path))


def _parse_csv(text: str, path: Optional[str]) -> BidegreeSequence:
    a: List[int] = []
    b: List[int] = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [cell.strip() for cell in row]
        if not cells or all(cell == "" for cell in cells):
            continue
        if line_no == 1 and not cells[0].lstrip("-").isdigit():
            continue  # header
        if len(cells) != 2:
            raise SequenceParseError(f"expected 2 columns, found {len(cells)}", line_no, 1, path)
        for column, cell in enumerate(cells, start=1):
            if not cell.lstrip("-").isdigit():
                raise SequenceParseError(f"not an integer: {cell!r}", line_no, column, path)
        a.append(int(cells[0]))
        b.append(int(cells[1]))
    if not a:
        raise SequenceParseError("no degree rows found", path=path)
    return validate(a, b)


def parse_sequence(text: str, suffix: str = ".json", path: Optional[str] = None) -> BidegreeSequence:
    """Parse sequence text; the suffix selects JSON or CSV."""
    if suffix.lower() == ".csv":
        return _parse_csv(text, path)
    return _parse_json(text, path)


def load_sequence(path: Union[str, Path]) -> BidegreeSequence:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SequenceParseError(f"cannot read {path}: {exc.strerror}", path=str(path))
    return parse_sequence(text, path.suffix, str(path))


def dump_sequence(seq: BidegreeSequence) -> str:
    return json.dumps(seq.to_dict())
