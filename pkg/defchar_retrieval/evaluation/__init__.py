"""Retrieval measures, the leave-one-out benchmark and its reports."""

from .benchmark import EvalConfig, EvalReport, canonical_order, run_benchmark, siblings_by_source, time_phases
from .measures import ap_at_k, map_at_k, precision_at_k
from .report import (
    class_csv, class_table, distribution_table, format_mean_std, render_table, render_text_report,
    select_outstanding, summary_csv, summary_table, timing_table, write_report,
)

__all__ = [
    'EvalConfig', 'EvalReport', 'canonical_order', 'run_benchmark', 'siblings_by_source', 'time_phases',
    'ap_at_k', 'map_at_k', 'precision_at_k',
    'class_csv', 'class_table', 'distribution_table', 'format_mean_std', 'render_table', 'render_text_report',
    'select_outstanding', 'summary_csv', 'summary_table', 'timing_table', 'write_report',
]
