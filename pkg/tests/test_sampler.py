#!/usr/bin/env python3
"""
Unit tests for the switch-chain sampler and the statistics built on it.
"""

import math
import os
import unittest
import sys
from collections import Counter
from pathlib import Path

import numpy as np

# Add project root and modules to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(project_root / "modules"))

from errors import ForeignGraphError, NotGraphicalError, UnsupportedVariantError, WrongFormError
from exact_count import count_exact, ratio_exact
from sampler import (
    LabeledDigraph,
    NeighborHistogram,
    common_neighbor_stats,
    edge_list,
    eliminate_common_neighbor,
    estimate_ratio_empirical,
    exact_neighbor_histogram,
    graph_to_json,
    realize,
    sample_uniform,
    switch_step,
    triangle_reorient,
    uniformity_check,
)
from sequences import GraphVariant, from_degrees, validate


REALIZE_CASES = [
    (([2, 2, 2, 2], [2, 2, 2, 2]), GraphVariant.DIRECTED_LOOPS),
    (([3, 1, 1, 1], [1, 2, 2, 1]), GraphVariant.DIRECTED_LOOPS),
    (([2, 2, 2, 2], [2, 2, 2, 2]), GraphVariant.DIRECTED_NOLOOPS),
    (([2, 1, 1, 0], [1, 1, 1, 1]), GraphVariant.DIRECTED_NOLOOPS),
    (([2, 2, 2, 2], [2, 2, 2, 2]), GraphVariant.UNDIRECTED),
    (([3, 2, 2, 2, 1], [3, 2, 2, 2, 1]), GraphVariant.UNDIRECTED),
]


class TestRealize(unittest.TestCase):
    """Test cases for the greedy initial realizations."""

    def test_realizations_match_sequence(self):
        for (a, b), variant in REALIZE_CASES:
            for seed in range(3):
                with self.subTest(a=a, variant=variant, seed=seed):
                    seq = validate(a, b)
                    g = realize(seq, variant, seed)
                    g.check()
                    self.assertEqual(g.sequence(), seq)

    def test_not_graphical(self):
        with self.assertRaises(NotGraphicalError):
            realize(validate([4, 0], [2, 2]))
        with self.assertRaises(NotGraphicalError):
            realize(validate([2, 0], [1, 1]), GraphVariant.DIRECTED_NOLOOPS)

    def test_undirected_edges_listed_once(self):
        g = realize(from_degrees([2, 2, 2]), GraphVariant.UNDIRECTED, 0)
        self.assertEqual(sorted(g.edges), [(0, 1), (0, 2), (1, 2)])


class TestChain(unittest.TestCase):
    """Test cases for the switch chain."""

    def test_steps_preserve_degrees(self):
        rng = np.random.default_rng(11)
        for (a, b), variant in REALIZE_CASES:
            with self.subTest(a=a, variant=variant):
                seq = validate(a, b)
                g = realize(seq, variant, rng)
                for _ in range(200):
                    switch_step(g, rng)
                    if variant is not GraphVariant.UNDIRECTED:
                        triangle_reorient(g, rng)
                    self.assertEqual(g.sequence(), seq)
                g.check()
                self.assertEqual(g.n_edges, seq.S if variant.directed else seq.S // 2)

    def test_deterministic_given_seed(self):
        seq = validate([2, 2, 1, 1], [1, 2, 2, 1])
        first = sample_uniform(seq, burn_in=50, thin=5, n_samples=10, rng_seed=42)
        second = sample_uniform(seq, burn_in=50, thin=5, n_samples=10, rng_seed=42)
        self.assertEqual([g.key() for g in first], [g.key() for g in second])

    def test_zero_samples(self):
        self.assertEqual(sample_uniform(validate([1, 1], [1, 1]), n_samples=0), [])

    def test_argument_checks(self):
        seq = validate([1, 1], [1, 1])
        with self.assertRaises(ValueError):
            sample_uniform(seq, burn_in=0)
        with self.assertRaises(ValueError):
            sample_uniform(seq, n_samples=-1)
        with self.assertRaises(UnsupportedVariantError):
            sample_uniform(from_degrees([1, 1]), GraphVariant.UNDIRECTED, triangles=True)

    def test_transitions_are_symmetric(self):
        seq = validate([1, 1, 1], [1, 1, 1])
        rng = np.random.default_rng(5)
        g = realize(seq, GraphVariant.DIRECTED_LOOPS, rng)
        transitions = Counter()
        previous = g.key()
        for _ in range(6000):
            switch_step(g, rng)
            current = g.key()
            if current != previous:
                transitions[(previous, current)] += 1
            previous = current
        self.assertEqual(len({a for a, _ in transitions}), 6)
        for (a, b), forward in transitions.items():
            backward = transitions[(b, a)]
            self.assertLessEqual(abs(forward - backward), 4 * math.sqrt(forward + backward) + 3)


class TestUniformity(unittest.TestCase):
    """Test cases comparing sampled graphs with the full realization set."""

    def test_permutation_matrices(self):
        seq = validate([1, 1, 1], [1, 1, 1])
        samples = sample_uniform(seq, burn_in=50, thin=10, n_samples=3000, rng_seed=1)
        result = uniformity_check(samples, seq)
        self.assertEqual(result.realizations, 6)
        self.assertEqual(result.observed, 6)
        self.assertGreater(result.p_value, 0.01)

    def test_three_cycles_need_reorientation(self):
        seq = validate([1, 1, 1], [1, 1, 1])
        variant = GraphVariant.DIRECTED_NOLOOPS
        stuck = sample_uniform(seq, variant, burn_in=20, thin=10, n_samples=50,
                               rng_seed=2, triangles=False)
        self.assertEqual(uniformity_check(stuck, seq, variant).observed, 1)
        mixed = sample_uniform(seq, variant, burn_in=20, thin=10, n_samples=2000, rng_seed=2)
        result = uniformity_check(mixed, seq, variant)
        self.assertEqual((result.realizations, result.observed), (2, 2))
        self.assertGreater(result.p_value, 0.01)

    def test_perfect_matchings(self):
        seq = from_degrees([1, 1, 1, 1])
        samples = sample_uniform(seq, GraphVariant.UNDIRECTED, burn_in=20, thin=10,
                                 n_samples=2000, rng_seed=3)
        result = uniformity_check(samples, seq, GraphVariant.UNDIRECTED)
        self.assertEqual((result.realizations, result.observed), (3, 3))
        self.assertGreater(result.p_value, 0.01)

    def test_rejects_foreign_graphs(self):
        seq = validate([1, 1], [1, 1])
        foreign = LabeledDigraph(np.array([[1, 1], [0, 0]]), GraphVariant.DIRECTED_LOOPS)
        with self.assertRaises(ForeignGraphError) as ctx:
            uniformity_check([foreign], seq)
        self.assertEqual(ctx.exception.details["foreign"], 1)


@unittest.skipUnless(os.environ.get("BIDEGREE_LARGE_SAMPLES") == "1",
                     "set BIDEGREE_LARGE_SAMPLES=1 for the 100,000-sample runs")
class TestLargeSampleUniformity(unittest.TestCase):
    """Chi-square uniformity on 100,000 thinned samples per variant."""

    SAMPLES = 100_000

    def check(self, seq, variant, thin, seed, expected_realizations):
        samples = sample_uniform(seq, variant, burn_in=500, thin=thin,
                                 n_samples=self.SAMPLES, rng_seed=seed)
        result = uniformity_check(samples, seq, variant)
        self.assertEqual(result.realizations, expected_realizations)
        self.assertEqual(result.observed, expected_realizations)
        self.assertGreater(result.p_value, 0.01)

    def test_permutation_matrices(self):
        self.check(validate([1, 1, 1], [1, 1, 1]), GraphVariant.DIRECTED_LOOPS, 10, 101, 6)

    def test_derangements_with_reorientation(self):
        self.check(validate([1] * 4, [1] * 4), GraphVariant.DIRECTED_NOLOOPS, 20, 102, 9)

    def test_five_cycles(self):
        self.check(from_degrees([2] * 5), GraphVariant.UNDIRECTED, 20, 103, 12)


class TestNeighborStatistics(unittest.TestCase):
    """Test cases for common-neighbor histograms and the elimination switch."""

    def test_histogram_helpers(self):
        histogram = NeighborHistogram()
        for k, weight in ((0, 6), (1, 3), (2, 1)):
            histogram.add(k, weight)
        self.assertEqual(histogram.samples, 10)
        self.assertAlmostEqual(histogram.frequency(1), 0.3)
        self.assertEqual(histogram.ratio(0), 2.0)
        self.assertEqual(histogram.ratio(2), math.inf)
        self.assertAlmostEqual(histogram.mean(), 0.5)
        self.assertEqual(histogram.to_dict()["counts"], {"0": 6, "1": 3, "2": 1})

    def test_exact_histogram_sums_to_count(self):
        seq = validate([2] * 4, [2] * 4)
        for direction in ("in", "out"):
            with self.subTest(direction=direction):
                histogram = exact_neighbor_histogram(seq, 0, 1, direction)
                self.assertEqual(histogram.samples, count_exact(seq))
                self.assertTrue(set(histogram.counts) <= {0, 1, 2})

    def test_sampled_histogram_tracks_exact(self):
        seq = validate([2] * 4, [2] * 4)
        exact = exact_neighbor_histogram(seq, 0, 1, "out")
        sampled = common_neighbor_stats(seq, 0, 1, "out", samples=400, rng_seed=3)
        self.assertEqual(sampled.samples, 400)
        for k in range(3):
            with self.subTest(k=k):
                self.assertAlmostEqual(sampled.frequency(k), exact.frequency(k), delta=0.1)
        with self.assertRaises(IndexError):
            common_neighbor_stats(seq, 1, 1)

    def test_eliminate_common_neighbor(self):
        A = np.zeros((5, 5), dtype=np.int8)
        for u, v in ((0, 2), (1, 2), (3, 4), (4, 3)):
            A[u, v] = 1
        g = LabeledDigraph(A, GraphVariant.DIRECTED_LOOPS)
        switched = eliminate_common_neighbor(g, 0, 1, np.random.default_rng(0))
        self.assertIsNotNone(switched)
        switched.check()
        self.assertEqual(switched.sequence(), g.sequence())
        self.assertEqual(int(np.sum(switched.adjacency[0] & switched.adjacency[1])), 0)
        self.assertTrue(g.has_edge(0, 2))
        self.assertIsNone(eliminate_common_neighbor(switched, 0, 1, np.random.default_rng(0)))

    def test_eliminate_needs_directed_graph(self):
        g = realize(from_degrees([2, 2, 2]), GraphVariant.UNDIRECTED, 0)
        with self.assertRaises(UnsupportedVariantError):
            eliminate_common_neighbor(g, 0, 1, np.random.default_rng(0))


class TestEmpiricalRatio(unittest.TestCase):
    """Test cases for sampled ratio estimates."""

    def test_single_out_edges_give_exact_ratio(self):
        seq = validate([2, 1, 1], [1, 1, 1])
        result = estimate_ratio_empirical(seq, 0, 1, samples=50, rng_seed=0, burn_in=20, thin=5)
        self.assertEqual(result.estimate, float(ratio_exact(seq, 0, 1)))
        self.assertEqual(result.standard_error, 0.0)
        symmetric = estimate_ratio_empirical(seq, 1, 2, samples=50, rng_seed=0, burn_in=20, thin=5)
        self.assertEqual(symmetric.estimate, 1.0)

    def test_tracks_exact_ratio(self):
        seq = validate([3, 2, 2, 2], [2, 2, 2, 2])
        exact = float(ratio_exact(seq, 0, 1))
        result = estimate_ratio_empirical(seq, 0, 1, samples=1500, rng_seed=9)
        self.assertLess(abs(result.estimate / exact - 1), 0.15)
        self.assertTrue(math.isfinite(result.standard_error))

    def test_requires_ratio_form(self):
        with self.assertRaises(WrongFormError):
            estimate_ratio_empirical(validate([1, 1], [1, 1]), 0, 1)


class TestOutputHelpers(unittest.TestCase):
    """Test cases for edge lists and JSON rendering."""

    def test_edge_list_and_json(self):
        A = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        g = LabeledDigraph(A, GraphVariant.DIRECTED_NOLOOPS)
        self.assertEqual(edge_list(g), "0 1\n1 2\n2 0")
        data = graph_to_json(g)
        self.assertEqual(data["nodes"], 3)
        self.assertEqual(data["edges"], [[0, 1], [1, 2], [2, 0]])
        self.assertEqual(data["variant"], "directed-noloops")


if __name__ == '__main__':
    unittest.main()
