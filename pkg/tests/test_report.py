import csv
import io

import pytest

from defchar_retrieval.evaluation import (
    EvalConfig, EvalReport, class_table, distribution_table, format_mean_std, render_text_report,
    select_outstanding, summary_csv, summary_table, write_report,
)


def make_report(feature, metric, maps, side=None, classes=None):
    config = EvalConfig(feature, metric, image_side=side, k_values=tuple(maps))
    classes = classes or {1: 3, 2: 2}
    return EvalReport(
        config=config,
        class_ap={label: dict(maps) for label in classes},
        map_at=dict(maps),
        class_counts=dict(classes),
        query_counts=dict(classes),
    )


def test_format_mean_std():
    assert format_mean_std((0.876, 0.06)) == '0.88 ± 0.06'
    assert format_mean_std((float('nan'), float('nan'))) == 'n/a'


def test_one_row_per_configuration():
    reports = [make_report('defchars', m, {1: (0.9, 0.1), 5: (0.8, 0.1)})
               for m in ('manhattan', 'cosine', 'euclidean', 'jaccard')]
    lines = summary_table(reports).splitlines()
    body = [line for line in lines if line.startswith(('DefChars', '*DefChars'))]
    assert len(body) == 4
    assert summary_csv(reports).count('\n') == 5


def test_raw_image_rows():
    reports = [make_report('raw', m, {1: (0.5, 0.2)}, side=s)
               for m in ('mse', 'sam', 'uiq') for s in (8, 20, 50, 100)]
    rows = list(csv.DictReader(io.StringIO(summary_csv(reports))))
    assert len(rows) == 12
    assert {row['image_size'] for row in rows} == {'8', '20', '50', '100'}
    assert '100x100' in summary_table(reports)


def test_outstanding_prefers_higher_average_then_lower_spread():
    a = make_report('defchars', 'manhattan', {1: (0.90, 0.10)})
    b = make_report('defchars', 'cosine', {1: (0.90, 0.05)})
    c = make_report('defchars', 'jaccard', {1: (0.85, 0.01)})
    d = make_report('lbp', 'cosine', {1: (0.70, 0.10)}, side=20)
    best = select_outstanding([a, b, c, d])
    assert best['defchars'] is b
    assert best['lbp'] is d
    lines = summary_table([a, b, c, d]).splitlines()
    marked = [line for line in lines if line.startswith('*') and 'best configuration' not in line]
    assert len(marked) == 2
    assert any('Cosine' in line and 'DefChars' in line for line in marked)


def test_distribution_table_totals():
    table = distribution_table({1: 89, 2: 73, 3: 118, 4: 24})
    assert 'Total' in table
    assert '304' in table


def test_class_table_lists_every_class():
    report = make_report('defchars', 'manhattan', {1: (1.0, 0.0)}, classes={1: 2, 2: 2, 3: 1})
    table = class_table(report)
    assert 'AP@1' in table
    assert all(f'\n{label} ' in table for label in (1, 2, 3))


def test_write_report(tmp_path):
    reports = [make_report('defchars', 'manhattan', {1: (1.0, 0.0), 5: (0.6, 0.0)})]
    paths = write_report(reports, tmp_path / 'out', 'tiny')
    assert sorted(p.name for p in paths.values()) == ['classes.csv', 'report.txt', 'summary.csv']
    text = paths['text'].read_text(encoding='utf-8')
    assert 'Retrieval performance: tiny' in text
    assert 'Timing per query' in text
    assert render_text_report(reports, 'tiny') == text


@pytest.mark.parametrize('maps, expected', [
    ({1: (0.9, 0.1), 5: (0.7, 0.3)}, (0.8, 0.2)),
    ({1: (1.0, 0.0)}, (1.0, 0.0)),
])
def test_average_column(maps, expected):
    assert make_report('defchars', 'manhattan', maps).average == pytest.approx(expected)
