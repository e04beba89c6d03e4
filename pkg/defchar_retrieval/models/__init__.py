"""Benchmark history database."""

from .database import Base, init_db, open_session
from .benchmark_run import BenchmarkRun, ClassResult, record_reports

__all__ = ['Base', 'init_db', 'open_session', 'BenchmarkRun', 'ClassResult', 'record_reports']
