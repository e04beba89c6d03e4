"""
Benchmark reports: CSV files plus plain-text tables in the usual results
layout (``Feature, Similarity Metric, Image Size, mAP@1 ... Average``).
"""

import csv
import io
import math
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from jinja2 import Template

from defchar_retrieval.evaluation.benchmark import EvalReport
from defchar_retrieval.exceptions import StoreIOError
from defchar_retrieval.features import get_extractor
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

OUTSTANDING_MARK = '*'

TABLE_TEMPLATE = Template("""\
{{ title }}
{{ rule }}
{% for row in rows -%}
{{ row }}
{% endfor -%}
{{ rule }}
{% if footnote %}{{ footnote }}
{% endif %}""")


def format_mean_std(value: Tuple[float, float]) -> str:
    mean, std = value
    if math.isnan(mean):
        return 'n/a'
    return f'{mean:.2f} ± {std:.2f}'


def feature_label(report: EvalReport) -> str:
    return get_extractor(report.config.feature).label


def size_label(report: EvalReport) -> str:
    side = report.config.image_side
    return 'Raw' if side is None else f'{side}x{side}'


def _sort_key(report: EvalReport):
    side = report.config.image_side
    return report.config.feature, report.config.metric, -1 if side is None else side


def select_outstanding(reports: Iterable[EvalReport]) -> Dict[str, EvalReport]:
    """Best configuration per feature: highest Average mAP, then lower spread, then name."""
    best: Dict[str, EvalReport] = {}
    for report in sorted(reports, key=_sort_key):
        mean, std = report.average
        if math.isnan(mean):
            continue
        current = best.get(report.config.feature)
        if current is None:
            best[report.config.feature] = report
            continue
        current_mean, current_std = current.average
        if (mean, -std) > (current_mean, -current_std):
            best[report.config.feature] = report
    return best


def render_table(title: str, header: Sequence[str], rows: Sequence[Sequence[str]], footnote: str = '') -> str:
    widths = [max(len(str(cell)) for cell in column) for column in zip(header, *rows)]

    def line(cells):
        return '  '.join(str(cell).ljust(width) for cell, width in zip(cells, widths)).rstrip()

    lines = [line(header), '  '.join('-' * w for w in widths)] + [line(row) for row in rows]
    rule = '=' * max(len(title), max(len(text) for text in lines))
    return TABLE_TEMPLATE.render(title=title, rule=rule, rows=lines, footnote=footnote)


def _k_values(reports: Sequence[EvalReport]) -> Tuple[int, ...]:
    return tuple(sorted({k for report in reports for k in report.k_values}))


def summary_table(reports: Sequence[EvalReport], title: str = 'Retrieval performance') -> str:
    reports = sorted(reports, key=_sort_key)
    k_values = _k_values(reports)
    outstanding = {id(r) for r in select_outstanding(reports).values()}
    header = ['Feature', 'Similarity Metric', 'Image Size'] + [f'mAP@{k}' for k in k_values] + ['Average']
    rows = []
    for report in reports:
        mark = OUTSTANDING_MARK if id(report) in outstanding else ''
        rows.append(
            [mark + feature_label(report), report.config.metric.capitalize(), size_label(report)]
            + [format_mean_std(report.map_at[k]) if k in report.map_at else 'n/a' for k in k_values]
            + [format_mean_std(report.average)]
        )
    footnote = f'{OUTSTANDING_MARK} best configuration per feature' if outstanding else ''
    return render_table(title, header, rows, footnote)


def class_table(report: EvalReport) -> str:
    """AP@K per class for one configuration."""
    header = ['Class', 'Queries'] + [f'AP@{k}' for k in report.k_values]
    rows = []
    for label in report.classes:
        per_k = report.class_ap.get(label, {})
        rows.append([str(label), str(report.query_counts.get(label, 0))]
                    + [format_mean_std(per_k[k]) if k in per_k else 'n/a' for k in report.k_values])
    title = f'{feature_label(report)} / {report.config.metric.capitalize()} / {size_label(report)}'
    return render_table(title, header, rows)


def timing_table(reports: Sequence[EvalReport]) -> str:
    header = ['Feature', 'Similarity Metric', 'Image Size', 'Extraction s/query', 'Retrieval s/query', 'Failed']
    rows = [
        [feature_label(r), r.config.metric.capitalize(), size_label(r),
         f'{r.extraction_seconds:.4f}', f'{r.retrieval_seconds:.4f}', str(r.failed_queries)]
        for r in sorted(reports, key=_sort_key)
    ]
    return render_table('Timing per query', header, rows)


def distribution_table(class_counts: Mapping[int, int], title: str = 'Class distribution') -> str:
    rows = [[str(label), str(count)] for label, count in sorted(class_counts.items())]
    rows.append(['Total', str(sum(class_counts.values()))])
    return render_table(title, ['Class', 'Patterns'], rows)


def summary_csv(reports: Sequence[EvalReport]) -> str:
    reports = sorted(reports, key=_sort_key)
    k_values = _k_values(reports)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    header = ['feature', 'metric', 'image_size']
    for k in k_values:
        header += [f'map@{k}_mean', f'map@{k}_std']
    header += ['average_mean', 'average_std', 'queries', 'failed_queries',
               'extraction_seconds', 'retrieval_seconds']
    writer.writerow(header)
    for r in reports:
        row: List[Union[str, int, float]] = [r.config.feature, r.config.metric, r.config.image_side or '']
        for k in k_values:
            row += list(r.map_at.get(k, ('', '')))
        row += list(r.average) + [r.total_queries, r.failed_queries, r.extraction_seconds, r.retrieval_seconds]
        writer.writerow(row)
    return buffer.getvalue()


def class_csv(reports: Sequence[EvalReport]) -> str:
    reports = sorted(reports, key=_sort_key)
    k_values = _k_values(reports)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    header = ['feature', 'metric', 'image_size', 'class', 'patterns', 'queries']
    for k in k_values:
        header += [f'ap@{k}_mean', f'ap@{k}_std']
    writer.writerow(header)
    for r in reports:
        for label in r.classes:
            per_k = r.class_ap.get(label, {})
            row = [r.config.feature, r.config.metric, r.config.image_side or '', label,
                   r.class_counts[label], r.query_counts.get(label, 0)]
            for k in k_values:
                row += list(per_k.get(k, ('', '')))
            writer.writerow(row)
    return buffer.getvalue()


def render_text_report(reports: Sequence[EvalReport], dataset_name: str = '') -> str:
    title = f'Retrieval performance: {dataset_name}' if dataset_name else 'Retrieval performance'
    sections = [summary_table(reports, title)]
    if reports:
        sections.append(distribution_table(reports[0].class_counts))
    sections.extend(class_table(r) for r in sorted(reports, key=_sort_key))
    sections.append(timing_table(reports))
    return '\n'.join(sections)


def write_report(reports: Sequence[EvalReport], out_dir: Union[str, Path], dataset_name: str = '') -> Dict[str, Path]:
    """Write summary.csv, classes.csv and report.txt into ``out_dir``."""
    out_dir = Path(out_dir)
    outputs = {
        'summary': (out_dir / 'summary.csv', summary_csv(reports)),
        'classes': (out_dir / 'classes.csv', class_csv(reports)),
        'text': (out_dir / 'report.txt', render_text_report(reports, dataset_name)),
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for path, content in outputs.values():
            path.write_text(content, encoding='utf-8')
    except OSError as e:
        raise StoreIOError(f"cannot write report to {out_dir}: {e}") from e
    logger.info(f"Wrote benchmark report for {len(reports)} configurations to {out_dir}")
    return {name: path for name, (path, _) in outputs.items()}
