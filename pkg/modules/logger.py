#!/usr/bin/env python3
"""
Logging Module for the Bidegree Toolkit

This module provides structured run logging for counting, estimation,
expansion and sampling operations: nested operation timing, JSON-lines
records and per-session summaries. Console output goes to stderr so that
stdout stays reserved for data.
"""

import json
import logging
import sys
import threading
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional


class LogLevel(Enum):
    """Log levels for toolkit operations."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LogCategory(Enum):
    """Categories for the toolkit's operation families."""
    SYSTEM = "system"
    SEQUENCE = "sequence"
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"
    PATTERNS = "patterns"
    SAMPLER = "sampler"
    CLI = "cli"


_PY_LEVELS = {
    LogLevel.DEBUG: logging.DEBUG,
    LogLevel.INFO: logging.INFO,
    LogLevel.WARNING: logging.WARNING,
    LogLevel.ERROR: logging.ERROR,
    LogLevel.CRITICAL: logging.CRITICAL,
}


@dataclass
class LogEntry:
    """Structured log entry for a toolkit operation."""
    timestamp: str
    level: str
    category: str
    operation: str
    message: str
    details: Optional[Dict[str, Any]] = None
    duration_ms: Optional[float] = None
    success: Optional[bool] = None
    error_code: Optional[str] = None


@dataclass
class _ActiveOperation:
    category: LogCategory
    name: str
    started: float = field(default_factory=time.perf_counter)
    duration_ms: Optional[float] = None


class BidegreeLogger:
    """Session logger with nested operation timing."""

    def __init__(self, log_dir: Optional[Path] = None, session_id: Optional[str] = None,
                 console_level: int = logging.CRITICAL):
        """
        Initialize the logger.

        Args:
            log_dir: Directory for log files; nothing is written to disk when None
            session_id: Unique session identifier (default: timestamp-based)
            console_level: Minimum level echoed to stderr
        """
        self.log_dir = Path(log_dir) if log_dir else None
        self.session_id = session_id or f"bidegree_{int(time.time())}"
        self.session_start = time.time()

        self.main_log_file: Optional[Path] = None
        self.json_log_file: Optional[Path] = None
        self.error_log_file: Optional[Path] = None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            self.main_log_file = self.log_dir / f"{self.session_id}.log"
            self.json_log_file = self.log_dir / f"{self.session_id}.json"
            self.error_log_file = self.log_dir / f"{self.session_id}_errors.log"

        self._setup_loggers(console_level)

        self.operations: List[LogEntry] = []
        self.timings: Dict[str, float] = {}
        self._local = threading.local()
        self._lock = threading.Lock()

        self.log_debug(LogCategory.SYSTEM, "session_start",
                       f"Session started: {self.session_id}")

    def _setup_loggers(self, console_level: int):
        """Set up Python logging infrastructure."""
        self.main_logger = logging.getLogger(f"bidegree.{self.session_id}")
        self.main_logger.setLevel(logging.DEBUG)
        self.main_logger.propagate = False
        self.main_logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(console_level)
        console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        self.main_logger.addHandler(console_handler)

        self.error_logger = logging.getLogger(f"bidegree.{self.session_id}.errors")
        self.error_logger.setLevel(logging.WARNING)
        self.error_logger.propagate = False
        self.error_logger.handlers.clear()

        if self.log_dir is None:
            return

        main_handler = logging.FileHandler(self.main_log_file)
        main_handler.setLevel(logging.DEBUG)
        main_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        self.main_logger.addHandler(main_handler)

        error_handler = logging.FileHandler(self.error_log_file)
        error_handler.setLevel(logging.WARNING)
        error_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s'))
        self.error_logger.addHandler(error_handler)

    @property
    def _active(self) -> List[_ActiveOperation]:
        """Operation stack of the calling thread."""
        stack = getattr(self._local, "stack", None)
        if stack is None:
            stack = self._local.stack = []
        return stack

    def start_operation(self, category: LogCategory, operation: str, message: str,
                        details: Optional[Dict[str, Any]] = None) -> _ActiveOperation:
        """
        Start tracking an operation. Operations nest; each end_operation
        closes the most recently started one.

        Args:
            category: Operation category
            operation: Operation name
            message: Description of the operation
            details: Additional operation details
        """
        active = _ActiveOperation(category, operation)
        self._active.append(active)
        self.log_debug(category, operation, f"Started: {message}", details)
        return active

    def end_operation(self, success: bool, message: Optional[str] = None,
                      error_code: Optional[str] = None,
                      details: Optional[Dict[str, Any]] = None) -> Optional[float]:
        """
        End the innermost active operation.

        Returns:
            The operation's duration in milliseconds, or None when no operation is active
        """
        if not self._active:
            self.log_warning(LogCategory.SYSTEM, "logging_error",
                             "end_operation called without active operation")
            return None

        active = self._active.pop()
        duration_ms = (time.perf_counter() - active.started) * 1000.0
        active.duration_ms = duration_ms
        with self._lock:
            self.timings[active.name] = duration_ms

        level = LogLevel.DEBUG if success else LogLevel.ERROR
        final_message = message or f"{'Completed' if success else 'Failed'}: {active.name}"
        self._log_entry(level, active.category, active.name, final_message,
                        details, duration_ms, success, error_code)
        return duration_ms

    @contextmanager
    def track(self, category: LogCategory, operation: str, message: str = "",
              details: Optional[Dict[str, Any]] = None) -> Iterator[_ActiveOperation]:
        """
        Wrap a block in start_operation/end_operation, failing it on exceptions.
        The yielded operation carries duration_ms once the block exits.
        """
        active = self.start_operation(category, operation, message or operation, details)
        try:
            yield active
        except Exception as exc:
            self.end_operation(False, f"Failed: {operation}: {exc}",
                               error_code=getattr(exc, "error_code", type(exc).__name__))
            raise
        self.end_operation(True)

    def log_debug(self, category: LogCategory, operation: str, message: str,
                  details: Optional[Dict[str, Any]] = None):
        self._log_entry(LogLevel.DEBUG, category, operation, message, details)

    def log_info(self, category: LogCategory, operation: str, message: str,
                 details: Optional[Dict[str, Any]] = None):
        self._log_entry(LogLevel.INFO, category, operation, message, details)

    def log_warning(self, category: LogCategory, operation: str, message: str,
                    details: Optional[Dict[str, Any]] = None):
        self._log_entry(LogLevel.WARNING, category, operation, message, details)

    def log_error(self, category: LogCategory, operation: str, message: str,
                  details: Optional[Dict[str, Any]] = None, error_code: Optional[str] = None):
        self._log_entry(LogLevel.ERROR, category, operation, message, details,
                        error_code=error_code)

    def _log_entry(self, level: LogLevel, category: LogCategory, operation: str,
                   message: str, details: Optional[Dict[str, Any]] = None,
                   duration_ms: Optional[float] = None, success: Optional[bool] = None,
                   error_code: Optional[str] = None):
        """Create and store a log entry."""
        entry = LogEntry(
            timestamp=datetime.now().isoformat(),
            level=level.value,
            category=category.value,
            operation=operation,
            message=message,
            details=details,
            duration_ms=duration_ms,
            success=success,
            error_code=error_code,
        )

        log_message = f"[{category.value}:{operation}] {message}"
        if details:
            log_message += f" | Details: {json.dumps(details, default=str)}"

        self.main_logger.log(_PY_LEVELS[level], log_message)
        if _PY_LEVELS[level] >= logging.WARNING:
            self.error_logger.log(_PY_LEVELS[level], log_message)

        with self._lock:
            self.operations.append(entry)
            self._write_json_entry(entry)

    def _write_json_entry(self, entry: LogEntry):
        if self.json_log_file is None:
            return
        try:
            with open(self.json_log_file, 'a') as f:
                json.dump(asdict(entry), f, default=str)
                f.write('\n')
        except OSError as e:
            self.main_logger.error(f"Failed to write JSON log entry: {e}")

    def log_progress_update(self, operation: str, progress_percent: float,
                            message: Optional[str] = None):
        """Log progress of a long-running operation."""
        details = {"progress_percent": round(progress_percent, 2)}
        if message:
            details["progress_message"] = message
        self.log_debug(LogCategory.SAMPLER, operation,
                       f"Progress: {progress_percent:.1f}%", details)

    def create_session_summary(self) -> Dict[str, Any]:
        """Create a summary of the current session."""
        category_counts: Dict[str, int] = {}
        success_counts = {"success": 0, "failure": 0, "unknown": 0}
        error_codes: Dict[str, int] = {}

        for entry in self.operations:
            category_counts[entry.category] = category_counts.get(entry.category, 0) + 1
            if entry.success is True:
                success_counts["success"] += 1
            elif entry.success is False:
                success_counts["failure"] += 1
            else:
                success_counts["unknown"] += 1
            if entry.error_code:
                error_codes[entry.error_code] = error_codes.get(entry.error_code, 0) + 1

        summary: Dict[str, Any] = {
            "session_id": self.session_id,
            "start_time": datetime.fromtimestamp(self.session_start).isoformat(),
            "duration_seconds": round(time.time() - self.session_start, 3),
            "total_operations": len(self.operations),
            "category_counts": category_counts,
            "success_counts": success_counts,
            "error_codes": error_codes,
        }
        if self.log_dir is not None:
            summary["log_files"] = {
                "main_log": str(self.main_log_file),
                "json_log": str(self.json_log_file),
                "error_log": str(self.error_log_file),
            }
        return summary

    def finalize_session(self, success: bool = True, final_message: Optional[str] = None):
        """Finalize the session and write the summary file when logging to disk."""
        summary = self.create_session_summary()
        final_msg = final_message or (
            f"Session {'completed successfully' if success else 'ended with errors'}")
        self.log_debug(LogCategory.SYSTEM, "session_end", final_msg,
                       {"session_summary": summary})

        if self.log_dir is None:
            return
        summary_file = self.log_dir / f"{self.session_id}_summary.json"
        try:
            with open(summary_file, 'w') as f:
                json.dump(summary, f, indent=2, default=str)
        except OSError as e:
            self.main_logger.error(f"Failed to write session summary: {e}")

    def get_recent_errors(self, limit: int = 10) -> List[LogEntry]:
        errors = [entry for entry in self.operations
                  if entry.level in (LogLevel.ERROR.value, LogLevel.CRITICAL.value)]
        return errors[-limit:]


_logger: Optional[BidegreeLogger] = None


def get_logger() -> BidegreeLogger:
    """Return the process-wide logger, creating a console-only one on first use."""
    global _logger
    if _logger is None:
        _logger = BidegreeLogger()
    return _logger


def configure_logger(log_dir: Optional[Path] = None, session_id: Optional[str] = None,
                     verbose: bool = False) -> BidegreeLogger:
    """Install a fresh process-wide logger."""
    global _logger
    _logger = BidegreeLogger(log_dir=log_dir, session_id=session_id,
                             console_level=logging.DEBUG if verbose else logging.CRITICAL)
    return _logger


def create_progress_callback(logger: BidegreeLogger, operation: str,
                             every_percent: float = 10.0) -> Callable[[int, int], None]:
    """
    Create a (done, total) callback that logs progress at coarse steps.

    Args:
        logger: Logger that receives the updates
        operation: Operation name recorded with each update
        every_percent: Minimum progress between two records
    """
    last = {"percent": -every_percent}

    def callback(done: int, total: int):
        if total <= 0:
            return
        percent = 100.0 * done / total
        if percent - last["percent"] >= every_percent or done == total:
            last["percent"] = percent
            logger.log_progress_update(operation, percent)

    return callback
