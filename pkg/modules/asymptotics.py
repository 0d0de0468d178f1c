#!/usr/bin/env python3
"""
Asymptotic Estimation Module for the Bidegree Toolkit

This module provides moment-based estimates for sequences in the sparse
regime:

- correction terms of increasing order built from the power sums of the
  degree vectors
- ratio estimates |G_{d-i}| / |G_{d-j}| of orders 1 to 4
- the closed-form count estimate with its single exponential correction
- the telescoping count: an exact base count for all-ones out-degrees times
  a product of single-switch ratios, estimated or exact

All count estimates live in natural-log space.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from scipy.special import gammaln

from config import Settings
from errors import (
    BadOrderError,
    DegenerateSequenceError,
    InsufficientMomentsError,
    NotBalancedError,
    NotGraphicalError,
    WrongFormError,
    ZeroDegreeError,
)
from exact_count import BigCount, count_all_ones_base, ratio_exact
from logger import LogCategory, get_logger
from sequences import (
    BidegreeSequence,
    GraphVariant,
    MomentProfile,
    SequenceForm,
    Side,
    is_graphical,
    moments,
    pad,
)

ORDERS = (1, 2, 3, 4)
# Power sums needed for every correction term: the fourth-order
# expectations multiply three cubic factors.
FULL_MOMENT_ORDER = 9
MIN_MOMENT_ORDER = 4

_X = sympy.Symbol("x")


@dataclass(frozen=True)
class CorrectionTerms:
    """Correction coefficients for the ratio exponents."""
    epsilon: float
    epsilon1: float
    epsilon2: float
    epsilon3: float
    eta1: float
    eta2: float
    epsilon1_t9: Optional[float] = None
    epsilon2_t9: Optional[float] = None


@dataclass(frozen=True)
class LogEstimate:
    """Natural-log count estimate plus the bookkeeping that produced it."""
    log_value: float
    order: int
    side_conventions: Tuple[str, ...] = ()
    graphical: bool = True
    steps: int = 0

    @property
    def estimate(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _power_sum_expectation(expr, power_sums: Sequence[int]) -> Fraction:
    """Sum of a polynomial in x over the entries of a vector, from its power sums."""
    poly = sympy.Poly(sympy.expand(expr), _X, domain="QQ")
    total = Fraction(0)
    for (k,), coeff in poly.terms():
        if k >= len(power_sums):
            raise InsufficientMomentsError(f"power sum of order {k} needed")
        total += _to_fraction(coeff) * power_sums[k]
    return total


def correction_fractions(profile: MomentProfile) -> Dict[str, Optional[Fraction]]:
    """Exact values of every correction coefficient; see correction_terms."""
    if profile.max_order < MIN_MOMENT_ORDER:
        raise InsufficientMomentsError(
            f"corrections need power sums up to order {MIN_MOMENT_ORDER}, "
            f"profile has {profile.max_order}")
    a1, a2, a3 = (Fraction(profile.alpha[k]) for k in (1, 2, 3))
    b1, b2, b3, b4 = (Fraction(profile.beta[k]) for k in (1, 2, 3, 4))
    if a1 == 0 or b1 == 0:
        raise DegenerateSequenceError("corrections need alpha_1 >= 1 and beta_1 >= 1")

    terms: Dict[str, Optional[Fraction]] = {}
    terms["epsilon"] = (b2 - b1) / b1 ** 2
    mix = a2 / a1 ** 2
    terms["epsilon1"] = (b2 + 2 * b3 * mix) / (b1 + b2 * mix) ** 2
    terms["epsilon2"] = (b2 - b1) ** 2 / (2 * b1 ** 4) + (b3 * b1 - 2 * b2 ** 2) / b1 ** 4
    terms["eta1"] = (a2 + 2 * a3 * b2 / a1 ** 2) / (a1 + a2 * b2 / a1 ** 2) ** 2
    terms["eta2"] = (a2 - a1) ** 2 / (2 * a1 ** 4) + (a3 * a1 - 2 * a2 ** 2) / a1 ** 4
    terms["epsilon3"] = ((Fraction(-107, 3) * b2 ** 3 - Fraction(11, 2) * b1 * b2 * b3 + b2 * b4)
                         / b1 ** 6)

    terms["epsilon1_t9"] = None
    terms["epsilon2_t9"] = None
    if profile.max_order >= FULL_MOMENT_ORDER:
        eta1, eta2 = _to_sympy(terms["eta1"]), _to_sympy(terms["eta2"])
        f = _X + _X ** 2 * eta1 + _X ** 3 * eta1 ** 2 / 2 - _X ** 3 * eta2
        f_prev = f.subs(_X, _X - 1)
        e_f = _power_sum_expectation(f, profile.beta)
        e_ff = _power_sum_expectation(f * f_prev, profile.beta)
        e_f2 = _power_sum_expectation(f ** 2, profile.beta)
        e_f2f = _power_sum_expectation(f ** 2 * f_prev, profile.beta)
        if e_f == 0:
            raise DegenerateSequenceError("E_b[f] vanishes")
        terms["epsilon1_t9"] = (e_ff / e_f ** 2
                                + (e_ff ** 2 - 5 * e_f2 * e_ff + 3 * e_f2f * e_f) / e_f ** 4)
        terms["epsilon2_t9"] = (-2 * e_f2 * e_ff + Fraction(1, 2) * e_ff ** 2 + e_f2f * e_f) / e_f ** 4
    return terms


def correction_terms(profile: MomentProfile) -> CorrectionTerms:
    """
    Correction coefficients from a moment profile.

    epsilon is the second-order term; epsilon1/epsilon2 the third-order pair;
    epsilon1_t9/epsilon2_t9/epsilon3 the fourth-order set, whose first two
    need power sums up to order 9 and are None for shorter profiles.

    Raises:
        InsufficientMomentsError: profile stops below order 4
        DegenerateSequenceError: alpha_1 or beta_1 is zero
    """
    exact = correction_fractions(profile)
    return CorrectionTerms(**{name: (float(value) if value is not None else None)
                              for name, value in exact.items()})


def ratio_estimate(seq_ratio_form: BidegreeSequence, i: int, j: int, order: int,
                   side: Union[Side, str] = Side.IN,
                   profile: Optional[MomentProfile] = None) -> float:
    """
    Estimate |G_{d-i}| / |G_{d-j}| at the given order.

    Args:
        seq_ratio_form: Sequence whose `side` total exceeds the other by one
        i, j: Node pair (0-based)
        order: 1 (a_i/a_j) up to 4
        side: Which degree side is decremented; "out" swaps the roles of a and b
        profile: Moments to evaluate the corrections at (default: this sequence's)

    Raises:
        BadOrderError: order outside 1..4
        ZeroDegreeError: node i or j has degree zero on the side
    """
    side = Side.parse(side)
    if order not in ORDERS:
        raise BadOrderError(f"order must be one of {ORDERS}, got {order}")
    seq = seq_ratio_form
    expected = SequenceForm.RATIO_IN if side is Side.IN else SequenceForm.RATIO_OUT
    if seq.form is not expected:
        raise WrongFormError(f"ratio estimates need a ratio-form sequence on the {side.value} side")
    degrees = seq.degrees(side)
    d_i, d_j = degrees[i], degrees[j]
    for node, value in ((i, d_i), (j, d_j)):
        if value == 0:
            raise ZeroDegreeError(f"{side.value}-degree of node {node} is zero", {"node": node})

    base = d_i / d_j
    if order == 1:
        return base

    needed = FULL_MOMENT_ORDER if order == 4 else MIN_MOMENT_ORDER
    if profile is None:
        profile = moments(seq, needed)
    elif profile.max_order < needed:
        raise InsufficientMomentsError(
            f"order {order} needs power sums up to {needed}, profile has {profile.max_order}")
    if side is Side.OUT:
        profile = profile.swapped()
    terms = correction_fractions(profile)

    if order == 2:
        exponent = (d_i - d_j) * terms["epsilon"]
    elif order == 3:
        exponent = (d_i - d_j) * terms["epsilon1"] - (d_i ** 2 - d_j ** 2) * terms["epsilon2"]
    else:
        exponent = ((d_i - d_j) * terms["epsilon1_t9"]
                    - (d_i ** 2 - d_j ** 2) * terms["epsilon2_t9"]
                    + (d_i ** 3 - d_j ** 3) * terms["epsilon3"])
    return base * math.exp(float(exponent))


def count_estimate_closed(seq: BidegreeSequence) -> LogEstimate:
    """
    Closed-form estimate

        log S! - sum log a_i! - sum log b_i! - (alpha_2 - alpha_1)(beta_2 - beta_1) / (2 S^2)

    Non-graphical sequences still get a value; the estimate's `graphical`
    flag records the failure.
    """
    if not seq.is_balanced:
        raise NotBalancedError("count estimates need a balanced sequence")
    S = seq.S
    profile = moments(seq, 2)
    log_value = float(gammaln(S + 1)
                      - sum(gammaln(x + 1) for x in seq.in_degrees)
                      - sum(gammaln(x + 1) for x in seq.out_degrees))
    if S > 0:
        log_value -= ((profile.alpha[2] - profile.alpha[1]) * (profile.beta[2] - profile.beta[1])
                      / (2.0 * S * S))
    graphical = is_graphical(seq, GraphVariant.DIRECTED_LOOPS)
    if not graphical:
        get_logger().log_warning(LogCategory.ASYMPTOTIC, "count_estimate_closed",
                                 "sequence is not graphical; estimate is diagnostic only")
    return LogEstimate(log_value=log_value, order=1, graphical=graphical)


@dataclass(frozen=True)
class SwitchStep:
    """Move one unit of out-degree from donor to recipient; k is the recipient's degree before."""
    donor: int
    recipient: int
    k: int


@dataclass(frozen=True)
class SwitchSchedule:
    in_degrees: Tuple[int, ...]
    base_out: Tuple[int, ...]
    target_out: Tuple[int, ...]
    steps: Tuple[SwitchStep, ...] = field(default_factory=tuple)

    @property
    def base(self) -> BidegreeSequence:
        return BidegreeSequence(self.in_degrees, self.base_out)

    @property
    def target(self) -> BidegreeSequence:
        return BidegreeSequence(self.in_degrees, self.target_out)

    def walk(self):
        """Yield (step, ratio-form sequence before + e_recipient) in schedule order."""
        out = list(self.base_out)
        for step in self.steps:
            out[step.recipient] += 1
            yield step, BidegreeSequence(self.in_degrees, tuple(out))
            out[step.donor] -= 1


def switch_schedule(seq: BidegreeSequence) -> SwitchSchedule:
    """
    Unit out-degree switches turning an all-ones out-vector into b.

    The sequence is padded with zero-degree nodes to max(N, S). Every node
    with b_n >= 1 starts at out-degree 1 and the remaining ones sit on
    zero-out-degree nodes (original nodes first, then padding). Nodes are
    raised to b_n in input order, each step taking the last remaining donor.
    """
    if not seq.is_balanced:
        raise NotBalancedError("telescoping needs a balanced sequence")
    length = max(seq.N, seq.S)
    padded = pad(seq, length)
    target = padded.out_degrees

    base = [1 if x >= 1 else 0 for x in target]
    zero_nodes = [n for n, x in enumerate(target) if x == 0]
    donors = zero_nodes[:seq.S - sum(base)]
    for n in donors:
        base[n] = 1

    steps: List[SwitchStep] = []
    for recipient, b_n in enumerate(target):
        for k in range(1, b_n):
            steps.append(SwitchStep(donor=donors.pop(), recipient=recipient, k=k))
    return SwitchSchedule(padded.in_degrees, tuple(base), target, tuple(steps))


def telescope_count(seq: BidegreeSequence, order: int,
                    refresh_moments: Optional[bool] = None) -> LogEstimate:
    """
    Telescoping estimate: the exact all-ones base count times the estimated
    ratio of every switch step.

    Args:
        seq: Balanced sequence
        order: Ratio-estimate order used for each step (1..4)
        refresh_moments: Recompute moments on every intermediate sequence.
            None selects frozen target moments for order <= 2, per-step above.
    """
    if order not in ORDERS:
        raise BadOrderError(f"order must be one of {ORDERS}, got {order}")
    schedule = switch_schedule(seq)
    if refresh_moments is None:
        refresh_moments = order >= 3
    needed = FULL_MOMENT_ORDER if order == 4 else MIN_MOMENT_ORDER
    frozen = moments(schedule.target, needed)

    with get_logger().track(LogCategory.ASYMPTOTIC, "telescope_count",
                            f"order={order} steps={len(schedule.steps)}",
                            {"refresh_moments": refresh_moments}):
        log_value = math.lgamma(seq.S + 1) - sum(math.lgamma(x + 1) for x in seq.in_degrees)
        for step, ratio_seq in schedule.walk():
            profile = moments(ratio_seq, needed) if refresh_moments else frozen
            log_value += math.log(ratio_estimate(ratio_seq, step.donor, step.recipient,
                                                 order, Side.OUT, profile))
    return LogEstimate(log_value=log_value, order=order,
                       side_conventions=tuple(Side.OUT.value for _ in schedule.steps),
                       graphical=is_graphical(seq, GraphVariant.DIRECTED_LOOPS),
                       steps=len(schedule.steps))


def telescope_exact(seq: BidegreeSequence, settings: Optional[Settings] = None) -> BigCount:
    """
    The telescoping product with exact ratios; equals count_exact(seq).

    Raises:
        NotGraphicalError: the sequence has no realization
        TooLargeError: an intermediate count exceeds the exact budget
    """
    if not is_graphical(seq, GraphVariant.DIRECTED_LOOPS):
        raise NotGraphicalError(f"{seq} is not graphical")
    schedule = switch_schedule(seq)
    with get_logger().track(LogCategory.ASYMPTOTIC, "telescope_exact",
                            f"steps={len(schedule.steps)}"):
        value = Fraction(count_all_ones_base(schedule.base))
        for step, ratio_seq in schedule.walk():
            value *= ratio_exact(ratio_seq, step.donor, step.recipient, Side.OUT,
                                 GraphVariant.DIRECTED_LOOPS, settings)
    if value.denominator != 1:
        raise ArithmeticError(f"telescoping product {value} is not an integer")
    return value.numerator
