#!/usr/bin/env python3
"""
Unit tests for the structured run logger.
"""

import json
import unittest
import sys
import tempfile
import threading
from pathlib import Path

# Add project root and modules to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(project_root / "modules"))

from errors import TooLargeError
from logger import (
    BidegreeLogger,
    LogCategory,
    configure_logger,
    create_progress_callback,
    get_logger,
)


class TestBidegreeLogger(unittest.TestCase):
    """Test cases for BidegreeLogger."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.log_dir = Path(self.temp_dir.name)
        self.logger = BidegreeLogger(log_dir=self.log_dir, session_id="unit")

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_track_records_duration(self):
        with self.logger.track(LogCategory.EXACT, "count_exact", "N=4") as active:
            pass
        self.assertIsNotNone(active.duration_ms)
        self.assertIn("count_exact", self.logger.timings)
        last = self.logger.operations[-1]
        self.assertTrue(last.success)
        self.assertEqual(last.category, "exact")

    def test_track_marks_failures(self):
        with self.assertRaises(TooLargeError):
            with self.logger.track(LogCategory.EXACT, "count_exact"):
                raise TooLargeError("too many states")
        last = self.logger.operations[-1]
        self.assertFalse(last.success)
        self.assertEqual(last.error_code, "TOO_LARGE")
        self.assertEqual(len(self.logger.get_recent_errors()), 1)

    def test_nested_operations(self):
        with self.logger.track(LogCategory.ASYMPTOTIC, "outer"):
            with self.logger.track(LogCategory.EXACT, "inner"):
                pass
        names = [e.operation for e in self.logger.operations if e.success]
        self.assertEqual(names, ["inner", "outer"])

    def test_end_without_start(self):
        self.assertIsNone(self.logger.end_operation(True))
        self.assertEqual(self.logger.operations[-1].level, "WARNING")

    def test_json_lines_and_summary(self):
        self.logger.log_info(LogCategory.CLI, "count", "done", {"value": 24})
        self.logger.finalize_session(True)
        lines = (self.log_dir / "unit.json").read_text().splitlines()
        records = [json.loads(line) for line in lines]
        self.assertTrue(any(r["operation"] == "count" for r in records))
        summary = json.loads((self.log_dir / "unit_summary.json").read_text())
        self.assertEqual(summary["session_id"], "unit")
        self.assertGreater(summary["total_operations"], 0)

    def test_threads_keep_separate_stacks(self):
        def work(name):
            with self.logger.track(LogCategory.EXACT, name):
                pass

        threads = [threading.Thread(target=work, args=(f"op{n}",)) for n in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        finished = {e.operation for e in self.logger.operations if e.success}
        self.assertEqual(finished, {"op0", "op1", "op2", "op3"})

    def test_progress_callback(self):
        callback = create_progress_callback(self.logger, "sample", every_percent=50.0)
        for done in range(1, 11):
            callback(done, 10)
        updates = [e for e in self.logger.operations if e.message.startswith("Progress")]
        self.assertEqual([e.details["progress_percent"] for e in updates], [10.0, 60.0, 100.0])


class TestGlobalLogger(unittest.TestCase):
    """Test cases for the process-wide logger."""

    def test_configure_replaces_instance(self):
        first = configure_logger(session_id="first")
        self.assertIs(get_logger(), first)
        second = configure_logger(session_id="second", verbose=True)
        self.assertIs(get_logger(), second)
        self.assertIsNone(second.json_log_file)


if __name__ == '__main__':
    unittest.main()
