import pytest

from defchar_retrieval.evaluation import EvalConfig, EvalReport
from defchar_retrieval.models import BenchmarkRun, init_db, record_reports


def report(feature, metric, mean, std, side=None, dataset='wind-turbine'):
    config = EvalConfig(feature, metric, image_side=side, k_values=(1, 5), dataset=dataset)
    maps = {1: (mean, std), 5: (mean, std)}
    return EvalReport(config=config, class_ap={1: maps, 2: maps}, map_at=maps,
                      class_counts={1: 4, 2: 3}, query_counts={1: 4, 2: 3}, failed_queries=1)


@pytest.fixture
def session():
    factory = init_db('sqlite:///:memory:')
    with factory() as session:
        yield session


def test_record_and_read_back(session):
    (run,) = record_reports(session, [report('defchars', 'manhattan', 0.9, 0.05)])
    assert run.id is not None
    data = session.get(BenchmarkRun, run.id).to_dict()
    assert data['map'] == {'1': [0.9, 0.05], '5': [0.9, 0.05]}
    assert data['average_map'] == pytest.approx(0.9)
    assert data['queries'] == 7
    assert data['failed_queries'] == 1
    assert [c['class'] for c in data['classes']] == [1, 2]
    assert run.label == 'defchars/manhattan/raw'


def test_recent_filters_by_dataset(session):
    record_reports(session, [report('defchars', 'manhattan', 0.9, 0.05),
                             report('lbp', 'cosine', 0.6, 0.1, side=20, dataset='heatsink')])
    assert len(BenchmarkRun.recent(session)) == 2
    (only,) = BenchmarkRun.recent(session, dataset='heatsink')
    assert only.feature == 'lbp'
    assert only.image_side == 20
    assert len(BenchmarkRun.recent(session, limit=1)) == 1


def test_best_for_feature(session):
    record_reports(session, [
        report('defchars', 'manhattan', 0.90, 0.10),
        report('defchars', 'cosine', 0.90, 0.05),
        report('defchars', 'jaccard', 0.80, 0.01),
        report('raw', 'mse', 0.95, 0.01, side=8),
    ])
    assert BenchmarkRun.best_for_feature(session, 'defchars').metric == 'cosine'
    assert BenchmarkRun.best_for_feature(session, 'defchars', dataset='lake-ice') is None


def test_unscored_report_is_stored_without_average(session):
    empty = EvalReport(config=EvalConfig('defchars', 'cosine', k_values=(1,)), class_ap={}, map_at={},
                       class_counts={1: 2}, query_counts={1: 0}, failed_queries=2)
    (run,) = record_reports(session, [empty])
    assert run.average_map is None
    assert 'n/a' in repr(run)
    assert BenchmarkRun.best_for_feature(session, 'defchars') is None
