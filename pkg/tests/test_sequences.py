#!/usr/bin/env python3
"""
Unit tests for the sequence data model.

Covers validation, graphicality for the three variants, power-sum moments,
the small sequence surgeries and the JSON/CSV readers.
"""

import unittest
import sys
import tempfile
from pathlib import Path

# Add project root and modules to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(project_root / "modules"))

from errors import (
    DegenerateSequenceError,
    LengthMismatchError,
    NegativeDegreeError,
    SequenceParseError,
    SumMismatchError,
    UnsupportedVariantError,
    ZeroDegreeError,
)
from sequences import (
    GraphVariant,
    SequenceForm,
    Side,
    decrement,
    dump_sequence,
    from_degrees,
    increment,
    is_graphical,
    load_sequence,
    moments,
    pad,
    parse_sequence,
    permute,
    sparsity_diagnostic,
    transpose,
    validate,
)


class TestValidate(unittest.TestCase):
    """Test cases for building sequences from raw vectors."""

    def test_balanced_sequence(self):
        seq = validate([2, 1, 0], [1, 1, 1])
        self.assertEqual(seq.N, 3)
        self.assertEqual(seq.S, 3)
        self.assertEqual(seq.d_max, 2)
        self.assertIs(seq.form, SequenceForm.BALANCED)
        self.assertTrue(seq.is_balanced)

    def test_ratio_forms(self):
        self.assertIs(validate([2, 1, 1], [1, 1, 1]).form, SequenceForm.RATIO_IN)
        self.assertIs(validate([1, 1, 1], [2, 1, 1]).form, SequenceForm.RATIO_OUT)
        self.assertTrue(validate([2, 1, 1], [1, 1, 1]).is_ratio_form)

    def test_rejects_bad_vectors(self):
        cases = [
            (([1, 1], [1, 1, 0]), LengthMismatchError),
            (([], []), LengthMismatchError),
            (([1, -1], [0, 0]), NegativeDegreeError),
            (([2.5, 0], [1, 1]), NegativeDegreeError),
            (([True, 0], [1, 0]), NegativeDegreeError),
            (([3, 0], [1, 0]), SumMismatchError),
        ]
        for (a, b), error in cases:
            with self.subTest(a=a, b=b):
                with self.assertRaises(error):
                    validate(a, b)

    def test_error_carries_exit_code(self):
        with self.assertRaises(SumMismatchError) as ctx:
            validate([3, 0], [1, 0])
        self.assertEqual(ctx.exception.exit_code, 2)
        self.assertEqual(ctx.exception.details["in_total"], 3)

    def test_from_degrees_is_symmetric(self):
        seq = from_degrees([2, 1, 1])
        self.assertTrue(seq.is_symmetric)
        self.assertEqual(seq.in_degrees, (2, 1, 1))


class TestGraphicality(unittest.TestCase):
    """Test cases for the realizability checks."""

    def test_loops_versus_noloops(self):
        seq = validate([2, 0], [1, 1])
        self.assertTrue(is_graphical(seq, GraphVariant.DIRECTED_LOOPS))
        self.assertFalse(is_graphical(seq, GraphVariant.DIRECTED_NOLOOPS))

    def test_regular_sequences(self):
        seq = validate([2, 2, 2, 2], [2, 2, 2, 2])
        for variant in GraphVariant:
            with self.subTest(variant=variant):
                self.assertTrue(is_graphical(seq, variant))

    def test_undirected_checks(self):
        cases = [
            ([1, 1, 1], False),
            ([2, 2, 2], True),
            ([3, 1, 1, 1], True),
            ([3, 3, 1, 1], False),
        ]
        for degrees, expected in cases:
            with self.subTest(degrees=degrees):
                self.assertEqual(is_graphical(from_degrees(degrees), "undirected"), expected)

    def test_undirected_needs_symmetric_input(self):
        with self.assertRaises(UnsupportedVariantError):
            is_graphical(validate([2, 0], [1, 1]), GraphVariant.UNDIRECTED)

    def test_ratio_form_is_not_graphical(self):
        self.assertFalse(is_graphical(validate([2, 1, 1], [1, 1, 1]), "directed-loops"))

    def test_unknown_variant(self):
        with self.assertRaises(UnsupportedVariantError):
            GraphVariant.parse("hypergraph")


class TestMomentsAndSurgery(unittest.TestCase):
    """Test cases for power sums and the sequence surgeries."""

    def setUp(self):
        self.seq = validate([1, 2, 0], [0, 2, 1])

    def test_moments(self):
        profile = moments(self.seq, 3)
        self.assertEqual(profile.alpha, (3, 3, 5, 9))
        self.assertEqual(profile.beta, (3, 3, 5, 9))
        self.assertEqual(profile.swapped().alpha, profile.beta)
        with self.assertRaises(ValueError):
            moments(self.seq, 0)

    def test_decrement_and_increment(self):
        lowered = decrement(self.seq, 1, Side.IN)
        self.assertEqual(lowered.in_degrees, (1, 1, 0))
        self.assertIs(lowered.form, SequenceForm.RATIO_OUT)
        self.assertEqual(increment(lowered, 1, "in"), self.seq)
        self.assertEqual(decrement(self.seq, 2, Side.OUT).out_degrees, (0, 2, 0))

    def test_decrement_zero_degree(self):
        with self.assertRaises(ZeroDegreeError):
            decrement(self.seq, 2, Side.IN)
        with self.assertRaises(IndexError):
            decrement(self.seq, 5)

    def test_transpose_pad_permute(self):
        self.assertEqual(transpose(self.seq).in_degrees, (0, 2, 1))
        padded = pad(self.seq, 5)
        self.assertEqual(padded.in_degrees, (1, 2, 0, 0, 0))
        self.assertEqual(padded.S, self.seq.S)
        self.assertEqual(pad(self.seq, 2), self.seq)
        relabeled = permute(self.seq, [2, 0, 1])
        self.assertEqual(relabeled.in_degrees, (0, 1, 2))
        self.assertEqual(relabeled.out_degrees, (1, 0, 2))
        with self.assertRaises(ValueError):
            permute(self.seq, [0, 0, 1])

    def test_sparsity_diagnostic(self):
        diagnostic = sparsity_diagnostic(validate([2, 2, 2, 2], [2, 2, 2, 2]))
        self.assertAlmostEqual(diagnostic.effective_tau, 0.5 - 1 / 3)
        self.assertEqual(diagnostic.condition_A1, 4)
        self.assertTrue(diagnostic.in_regime)
        with self.assertRaises(DegenerateSequenceError):
            sparsity_diagnostic(validate([1, 0], [0, 1]))


class TestSequenceFiles(unittest.TestCase):
    """Test cases for the JSON and CSV readers."""

    def test_json_object(self):
        seq = parse_sequence('{"in_degrees": [1, 1], "out_degrees": [2, 0]}')
        self.assertEqual(seq.out_degrees, (2, 0))
        self.assertEqual(parse_sequence(dump_sequence(seq)), seq)

    def test_json_single_vector(self):
        self.assertTrue(parse_sequence('{"degrees": [1, 1, 2]}').is_symmetric)

    def test_json_errors_report_position(self):
        with self.assertRaises(SequenceParseError) as ctx:
            parse_sequence('{"in_degrees": [1, 2')
        self.assertEqual(ctx.exception.line, 1)
        self.assertIsNotNone(ctx.exception.column)
        for text in ('[1, 2]', '{"in_degrees": [1]}', '{"in_degrees": ["x"], "out_degrees": [1]}'):
            with self.subTest(text=text):
                with self.assertRaises(SequenceParseError):
                    parse_sequence(text)

    def test_csv(self):
        seq = parse_sequence("in,out\n2,1\n1,1\n1,1\n", ".csv")
        self.assertEqual(seq.in_degrees, (2, 1, 1))
        self.assertIs(seq.form, SequenceForm.RATIO_IN)

    def test_csv_error_location(self):
        with self.assertRaises(SequenceParseError) as ctx:
            parse_sequence("in,out\n1,1\n1,x\n", ".csv")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (3, 2))
        with self.assertRaises(SequenceParseError):
            parse_sequence("1,1,1\n", ".csv")

    def test_load_sequence(self):
        seq = load_sequence(project_root / "sequences" / "reg2_4.json")
        self.assertEqual(seq.in_degrees, (2, 2, 2, 2))
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(SequenceParseError):
                load_sequence(Path(tmp) / "missing.json")


if __name__ == '__main__':
    unittest.main()
