"""
Operation log for command-line runs.

Each command (run, sweep, validate) writes one line per lifecycle step, to the
console and to a log file inside the run's output directory, so a results folder
carries its own provenance.
"""
import logging
import os
import sys
from datetime import datetime
from pathlib import Path

DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING
ERROR = logging.ERROR

DEFAULT_LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] - %(message)s"
DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

OP_RUN = "RUN"
OP_SWEEP = "SWEEP"
OP_VALIDATE = "VALIDATE"
OP_CONFIG = "CONFIG"
OP_ERROR = "ERROR"


class RunLogger:
    """Logger configured for simulator command operations."""

    def __init__(
        self,
        name="gate_sim",
        log_level=INFO,
        log_format=DEFAULT_LOG_FORMAT,
        date_format=DEFAULT_DATE_FORMAT,
        log_dir=None,
        log_file="run_operations.log",
        console=True,
    ):
        """
        Args:
            name: Logger name
            log_level: Minimum level to log
            log_format: Format string for log messages
            date_format: Format string for timestamps
            log_dir: Directory for the log file; no file handler when None
            log_file: Name of the log file
            console: Whether to echo to stdout
        """
        self.logger = logging.getLogger(name)
        self.logger.setLevel(log_level)
        self.logger.propagate = False

        for handler in self.logger.handlers[:]:
            handler.close()
            self.logger.removeHandler(handler)

        formatter = logging.Formatter(log_format, date_format)
        if console:
            console_handler = logging.StreamHandler(sys.stdout)
            console_handler.setFormatter(formatter)
            self.logger.addHandler(console_handler)

        self.log_path = None
        if log_dir is not None:
            log_path = Path(log_dir)
            log_path.mkdir(exist_ok=True, parents=True)
            self.log_path = log_path / log_file
            file_handler = logging.FileHandler(filename=self.log_path, mode="a", encoding="utf-8")
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

    def operation(self, op_type, message, details=None, level=INFO):
        """
        Log a command operation with structured details.

        Args:
            op_type: Type of operation (RUN, SWEEP, ...)
            message: Primary log message
            details: Dictionary with additional details
            level: Log level for this message
        """
        structured_data = {
            "timestamp": datetime.now().isoformat(),
            "operation": op_type,
            "pid": os.getpid(),
            **(details or {}),
        }
        details_str = ", ".join(f"{k}={v}" for k, v in structured_data.items())
        self.logger.log(level, f"{message} | {details_str}")

    def run(self, message, details=None):
        self.operation(OP_RUN, message, details, INFO)

    def sweep(self, message, details=None):
        self.operation(OP_SWEEP, message, details, INFO)

    def validate(self, message, details=None):
        self.operation(OP_VALIDATE, message, details, INFO)

    def config(self, message, details=None):
        self.operation(OP_CONFIG, message, details, DEBUG)

    def warning(self, message, details=None):
        self.operation(OP_ERROR, message, details, WARNING)

    def error(self, message, details=None):
        self.operation(OP_ERROR, message, details, ERROR)

    def close(self):
        for handler in self.logger.handlers[:]:
            handler.close()
            self.logger.removeHandler(handler)
