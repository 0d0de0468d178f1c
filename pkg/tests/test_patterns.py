#!/usr/bin/env python3
"""
Unit tests for the equality-pattern expansions.

Golden coefficients are checked symbolically; every exact expansion is
also evaluated on random integer tables and compared with brute-force
enumeration of the source sum.
"""

import unittest
import sys
from pathlib import Path

import numpy as np
import sympy

# Add project root and modules to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(project_root / "modules"))

from errors import BadKError, InvalidPatternError
from patterns import (
    R,
    Convention,
    EqualityPattern,
    ExpansionMode,
    brute_force_sum,
    canonicalize,
    check_identity,
    describe_pattern,
    evaluate_expansion,
    evaluate_pattern,
    expand_distinct,
    expand_with_initial_equality,
    format_polynomial,
    source_pattern,
)


def poly(expr) -> sympy.Poly:
    return sympy.Poly(expr, R, domain="ZZ")


def coefficient_strings(expansion):
    return sorted(format_polynomial(c) for c, _ in expansion.terms)


class TestGoldenCoefficients(unittest.TestCase):
    """Test cases for the printed coefficient polynomials."""

    def test_first_order_pair(self):
        expansion = expand_distinct(R, 2, ExpansionMode.TRUNCATED, Convention.PUBLISHED)
        self.assertEqual(len(expansion.terms), 2)
        self.assertEqual(expansion.coefficient_of(EqualityPattern.of([], 5)), poly(1))
        self.assertEqual(expansion.coefficient_of(EqualityPattern.of([[1, 2]], 5)),
                         poly(-(4 * R - 10)))

    def test_second_order_unweighted(self):
        published = expand_distinct(R, 3, "truncated", "published")
        exact = expand_distinct(R, 3, "truncated", "exact")
        single_pair = EqualityPattern.of([[1, 2]], 7)
        two_pairs = EqualityPattern.of([[1, 2], [3, 4]], 7)
        triple = EqualityPattern.of([[1, 2, 3]], 7)
        for expansion in (published, exact):
            self.assertEqual(expansion.coefficient_of(single_pair), poly(-(6 * R - 21)))
            self.assertEqual(expansion.coefficient_of(triple), poly(6 * R ** 2 - 48 * R + 112))
        self.assertEqual(published.coefficient_of(two_pairs), poly(9 * R ** 2 - 58 * R + 69))
        self.assertEqual(exact.coefficient_of(two_pairs), poly(9 * R ** 2 - 57 * R + 63))

    def test_weighted_first_order(self):
        expansion = expand_with_initial_equality(R, 2, "truncated", "published")
        seed_triple = EqualityPattern.of([[1, 2, 3]], 5, weighted=True)
        seed_and_pair = EqualityPattern.of([[1, 2], [3, 4]], 5, weighted=True)
        self.assertEqual(expansion.coefficient_of(seed_triple), poly(-(R - 2)))
        self.assertEqual(expansion.coefficient_of(seed_and_pair), poly(-(2 * R - 7)))
        self.assertEqual(len(expansion.terms), 3)

    def test_weighted_second_order(self):
        published = expand_with_initial_equality(R, 3, "truncated", "published")
        self.assertEqual(coefficient_strings(published), sorted([
            "1", "-(r-2)", "-(4r-18)", "(r^2-5r+6)", "(3r^2-21r+30)",
            "(4r^2-40r+104)", "(2r^2-15r+21)",
        ]))
        exact = expand_with_initial_equality(R, 3, "truncated", "exact")
        self.assertEqual(coefficient_strings(exact), sorted([
            "1", "-(r-2)", "-(4r-18)", "(r^2-5r+6)", "(3r^2-21r+30)",
            "(4r^2-40r+104)", "(2r^2-14r+15)",
        ]))

    def test_degree_matches_level(self):
        expansion = expand_distinct(R, 3, "truncated", "published")
        for coefficient, pattern in expansion.terms:
            with self.subTest(pattern=describe_pattern(pattern)):
                self.assertEqual(max(coefficient.degree(), 0), pattern.weight)

    def test_fully_free_tuple_gives_moebius_values(self):
        # with r = 2k every index is freed and the coefficients are Moebius values
        expansion = expand_distinct(6, 3, "exact")
        self.assertEqual(expansion.coefficient_of(EqualityPattern.of([[1, 2, 3]], 7, r=6)),
                         poly(40))
        self.assertEqual(expansion.coefficient_of(EqualityPattern.of([[1, 2], [3, 4]], 7, r=6)),
                         poly(45))


class TestExpansionsAreExact(unittest.TestCase):
    """Test cases comparing exact expansions with brute force."""

    def setUp(self):
        rng = np.random.default_rng(7)
        self.f = [int(v) for v in rng.integers(0, 4, size=5)]
        self.g = [int(v) for v in rng.integers(0, 4, size=5)]

    def test_distinct_sums(self):
        for k, r_values in ((1, (2, 3, 4, 5)), (2, (4, 5))):
            expansion = expand_distinct(R, k, ExpansionMode.EXACT)
            for r in r_values:
                with self.subTest(k=k, r=r):
                    expected = brute_force_sum(source_pattern(r), self.f, r=r)
                    self.assertEqual(evaluate_expansion(expansion, self.f, r=r), expected)

    def test_initial_equality_sums(self):
        for k, r_values in ((1, (2, 3, 4)), (2, (4, 5))):
            expansion = expand_with_initial_equality(R, k, ExpansionMode.EXACT)
            for r in r_values:
                with self.subTest(k=k, r=r):
                    expected = brute_force_sum(source_pattern(r, True), self.f, self.g, r=r)
                    self.assertEqual(evaluate_expansion(expansion, self.f, self.g, r=r), expected)

    def test_random_tables(self):
        rng = np.random.default_rng(41)
        expansions = {}
        for k in (1, 2):
            expansions[(k, False)] = expand_distinct(R, k, ExpansionMode.EXACT)
            expansions[(k, True)] = expand_with_initial_equality(R, k, ExpansionMode.EXACT)
        for table in range(20):
            N = int(rng.integers(2, 7))
            f = [int(v) for v in rng.integers(-3, 4, size=N)]
            g = [int(v) for v in rng.integers(-3, 4, size=N)]
            for (k, weighted), expansion in expansions.items():
                for r in range(2 * k, 6):
                    with self.subTest(table=table, k=k, weighted=weighted, r=r):
                        source_g = g if weighted else None
                        expected = brute_force_sum(source_pattern(r, weighted), f, source_g, r=r)
                        self.assertEqual(evaluate_expansion(expansion, f, source_g, r=r), expected)

    def test_check_identity(self):
        for k in (1, 2, 3):
            for weighted in (False, True):
                with self.subTest(k=k, weighted=weighted):
                    self.assertTrue(check_identity(k, weighted, r=2 * k, N=max(4, 2 * k), seed=k))
        self.assertTrue(check_identity(2, True))
        self.assertTrue(check_identity(2, False, r=6, N=6))

    def test_concrete_length(self):
        expansion = expand_distinct(2, 1, ExpansionMode.EXACT)
        self.assertEqual(expansion.lines(), ["1 | free 1,2", "-1 | {1,2} | distinct 1..2"])


class TestPatternEvaluation(unittest.TestCase):
    """Test cases for the factored evaluator."""

    def test_small_values(self):
        f = [1, 2, 3]
        self.assertEqual(evaluate_pattern(EqualityPattern.of([], 1, r=2), f), 22)
        self.assertEqual(evaluate_pattern(EqualityPattern.of([[1, 2]], 3, r=2), f), 14)

    def test_matches_brute_force(self):
        f = [2, 0, 1, 3, 1]
        g = [1, 1, 2, 0, 3]
        patterns = [
            EqualityPattern.of([[1, 2]], 4, r=5),
            EqualityPattern.of([], 3, r=5),
            EqualityPattern.of([[4, 5]], 3, r=5),
            EqualityPattern.of([[1, 2], [3, 4]], 5, r=5),
            EqualityPattern.of([[1, 2, 3]], 4, r=5, weighted=True),
            EqualityPattern.of([[1, 2]], 1, r=4, weighted=True),
        ]
        for pattern in patterns:
            with self.subTest(pattern=describe_pattern(pattern)):
                self.assertEqual(evaluate_pattern(pattern, f, g),
                                 brute_force_sum(pattern, f, g))

    def test_layout_longer_than_tuple(self):
        self.assertEqual(evaluate_pattern(EqualityPattern.of([[4, 5]], 4, r=6), [1, 1], r=3), 0)

    def test_needs_concrete_length(self):
        with self.assertRaises(InvalidPatternError):
            evaluate_pattern(EqualityPattern.of([[1, 2]], 3), [1, 2])


class TestCanonicalForms(unittest.TestCase):
    """Test cases for relabeling and text rendering."""

    def test_canonicalize(self):
        pattern = EqualityPattern.of([[3, 4]], 5)
        self.assertEqual(canonicalize(pattern), EqualityPattern.of([[1, 2]], 5))
        suffix_block = EqualityPattern.of([[5, 6]], 5)
        self.assertEqual(canonicalize(suffix_block), suffix_block)

    def test_idempotent(self):
        patterns = [
            EqualityPattern.of([[2, 3], [4, 5, 6]], 7),
            EqualityPattern.of([[1, 4]], 5, weighted=True),
            EqualityPattern.of([[1, 2]], 1, weighted=True),
        ]
        for pattern in patterns:
            with self.subTest(pattern=describe_pattern(pattern)):
                once = canonicalize(pattern)
                self.assertEqual(canonicalize(once), once)

    def test_invalid_patterns(self):
        with self.assertRaises(InvalidPatternError):
            EqualityPattern((frozenset({1, 2}), frozenset({2, 3})), 4)
        with self.assertRaises(InvalidPatternError):
            EqualityPattern.of([[0, 1]], 3)
        with self.assertRaises(InvalidPatternError):
            canonicalize(EqualityPattern.of([[2, 5]], 4))
        with self.assertRaises(InvalidPatternError):
            canonicalize(EqualityPattern.of([[5, 6], [7, 8]], 5))

    def test_describe(self):
        self.assertEqual(describe_pattern(EqualityPattern.of([[1, 2]], 5)),
                         "{1,2} | free 3,4 | distinct 5..r")
        self.assertEqual(describe_pattern(EqualityPattern.of([[1, 2]], 5, r=4)),
                         "{1,2} | free 3,4")

    def test_format_polynomial(self):
        cases = [
            (poly(2 * R ** 2 - 15 * R + 21), "(2r^2-15r+21)"),
            (poly(-(4 * R - 10)), "-(4r-10)"),
            (poly(R), "(r)"),
            (5, "5"),
            (poly(0), "0"),
        ]
        for value, expected in cases:
            with self.subTest(expected=expected):
                self.assertEqual(format_polynomial(value), expected)


class TestExpansionErrors(unittest.TestCase):
    """Test cases for rejected expansion requests."""

    def test_bad_k(self):
        with self.assertRaises(BadKError):
            expand_distinct(R, 0)
        with self.assertRaises(BadKError):
            expand_distinct(3, 2)

    def test_published_needs_truncation(self):
        with self.assertRaises(InvalidPatternError):
            expand_distinct(R, 2, ExpansionMode.EXACT, Convention.PUBLISHED)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            expand_distinct(R, 2, "approximate")


if __name__ == '__main__':
    unittest.main()
