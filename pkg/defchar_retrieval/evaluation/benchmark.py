"""
Leave-one-out benchmark: every pattern queries the datastore built from all
the others, and Precision@K is aggregated per class and over classes.
"""

import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from defchar_retrieval.config import Config
from defchar_retrieval.exceptions import ConfigurationError, DefCharError, EvaluationError, KindMismatch
from defchar_retrieval.evaluation.measures import ap_at_k, map_at_k, precision_at_k
from defchar_retrieval.features import ExtractionSettings, extract_payload, get_extractor
from defchar_retrieval.imaging import PatternRecord
from defchar_retrieval.metrics import get_metric
from defchar_retrieval.store import IndexItem, build_store, retrieve
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

MeanStd = Tuple[float, float]


@dataclass(frozen=True)
class EvalConfig:
    """One cell of the feature x metric x image-size grid."""
    feature: str
    metric: str
    image_side: Optional[int] = None
    k_values: Tuple[int, ...] = field(default_factory=lambda: tuple(Config.DEFAULT_K_VALUES))
    dataset: str = ''
    threads: int = 1
    settings: Optional[ExtractionSettings] = None

    def __post_init__(self):
        extractor = get_extractor(self.feature)
        metric = get_metric(self.metric)
        object.__setattr__(self, 'feature', extractor.name)
        object.__setattr__(self, 'metric', metric.name)
        if metric.input_kind is not extractor.input_kind:
            raise KindMismatch(
                f"metric '{metric.name}' compares {metric.input_kind.value} payloads; "
                f"feature '{extractor.name}' produces {extractor.input_kind.value} payloads"
            )
        if extractor.uses_image_size:
            if self.image_side is None or self.image_side < 1:
                raise ConfigurationError(f"feature '{extractor.name}' needs a positive image size")
        else:
            object.__setattr__(self, 'image_side', None)
        k_values = tuple(sorted(set(int(k) for k in self.k_values)))
        if not k_values or k_values[0] < 1:
            raise ConfigurationError(f"K values must be positive integers, got {self.k_values}")
        object.__setattr__(self, 'k_values', k_values)
        if self.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.threads}")

    @property
    def label(self) -> str:
        size = self.image_side if self.image_side is not None else 'raw'
        return f'{self.feature}/{self.metric}/{size}'


@dataclass
class EvalReport:
    config: EvalConfig
    class_ap: Dict[int, Dict[int, MeanStd]]
    map_at: Dict[int, MeanStd]
    class_counts: Dict[int, int]
    query_counts: Dict[int, int]
    failed_queries: int = 0
    failed_ids: Tuple[str, ...] = ()
    extraction_seconds: float = 0.0
    retrieval_seconds: float = 0.0

    @property
    def k_values(self) -> Tuple[int, ...]:
        return self.config.k_values

    @property
    def classes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.class_counts))

    @property
    def average(self) -> MeanStd:
        """Mean of the mAP@K means and mean of their spreads across the K values."""
        if not self.map_at:
            return float('nan'), float('nan')
        means = [self.map_at[k][0] for k in self.k_values]
        stds = [self.map_at[k][1] for k in self.k_values]
        return float(np.mean(means)), float(np.mean(stds))

    @property
    def total_queries(self) -> int:
        return sum(self.query_counts.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'feature': self.config.feature,
            'metric': self.config.metric,
            'image_side': self.config.image_side,
            'k_values': list(self.k_values),
            'dataset': self.config.dataset,
            'map': {str(k): list(v) for k, v in self.map_at.items()},
            'average': list(self.average),
            'class_ap': {str(c): {str(k): list(v) for k, v in per_k.items()} for c, per_k in self.class_ap.items()},
            'class_counts': {str(c): n for c, n in self.class_counts.items()},
            'query_counts': {str(c): n for c, n in self.query_counts.items()},
            'failed_queries': self.failed_queries,
            'failed_ids': list(self.failed_ids),
            'extraction_seconds': self.extraction_seconds,
            'retrieval_seconds': self.retrieval_seconds,
        }


def canonical_order(records: Sequence[PatternRecord]) -> List[PatternRecord]:
    """Index order used by every benchmark, independent of input order."""
    return sorted(records, key=lambda r: (r.source_image, r.id))


def siblings_by_source(records: Sequence[PatternRecord]) -> Dict[str, List[PatternRecord]]:
    groups = defaultdict(list)
    for record in records:
        groups[record.source_image].append(record)
    return groups


def _timed_extract(config: EvalConfig, record: PatternRecord, siblings: Sequence[PatternRecord]):
    start = time.perf_counter()
    try:
        payload = extract_payload(config.feature, record, siblings, config.image_side, config.settings)
    except DefCharError as e:
        return None, time.perf_counter() - start, e
    return payload, time.perf_counter() - start, None


def _timed_query(store, position: int, config: EvalConfig):
    start = time.perf_counter()
    try:
        ranked = retrieve(store, store.payload(position), config.metric, k=max(config.k_values), exclude=position)
    except DefCharError as e:
        return None, time.perf_counter() - start, e
    label = store.entries[position].class_label
    precisions = {k: precision_at_k(ranked, lambda item: item.class_label == label, k) for k in config.k_values}
    return precisions, time.perf_counter() - start, None


def _fan_out(threads: int, calls):
    if threads > 1:
        return Parallel(n_jobs=threads, prefer='threads')(calls)
    return [fn(*args, **kwargs) for fn, args, kwargs in calls]


def run_benchmark(records: Sequence[PatternRecord], config: EvalConfig) -> EvalReport:
    """Leave-one-out retrieval over ``records`` for one configuration."""
    records = canonical_order(records)
    class_counts: Dict[int, int] = defaultdict(int)
    for record in records:
        class_counts[record.class_label] += 1
    if len(records) < 2 or not class_counts:
        raise EvaluationError(f"a benchmark needs at least 2 patterns, got {len(records)}")

    logger.info(f"Benchmark {config.label}: extracting features for {len(records)} patterns")
    groups = siblings_by_source(records)
    extracted = _fan_out(config.threads, [
        delayed(_timed_extract)(config, record, groups[record.source_image]) for record in records
    ])

    failed_ids: List[str] = []
    indexed: List[PatternRecord] = []
    items: List[IndexItem] = []
    extraction_times: List[float] = []
    for record, (payload, seconds, error) in zip(records, extracted):
        if error is not None:
            logger.warning(f"Skipping pattern {record.id}: extraction failed: {error}")
            failed_ids.append(record.id)
            continue
        indexed.append(record)
        items.append(IndexItem(payload, record.class_label, record.source_image))
        extraction_times.append(seconds)

    settings = config.settings or ExtractionSettings()
    store = build_store(items, config.feature, image_side=config.image_side, extraction=settings.to_dict())
    store.matrix  # stack once before queries share the store

    logger.info(f"Benchmark {config.label}: running {len(store)} leave-one-out queries")
    answers = _fan_out(config.threads, [
        delayed(_timed_query)(store, position, config) for position in range(len(store))
    ])

    per_class: Dict[int, Dict[int, List[float]]] = defaultdict(lambda: defaultdict(list))
    retrieval_times: List[float] = []
    for record, (precisions, seconds, error) in zip(indexed, answers):
        if error is not None:
            logger.warning(f"Excluding query {record.id}: {error}")
            failed_ids.append(record.id)
            continue
        retrieval_times.append(seconds)
        for k, value in precisions.items():
            per_class[record.class_label][k].append(value)

    class_ap: Dict[int, Dict[int, MeanStd]] = {}
    query_counts: Dict[int, int] = {}
    for label in sorted(class_counts):
        if label not in per_class:
            logger.error(f"Class {label} has no scored queries under {config.label}")
            query_counts[label] = 0
            continue
        class_ap[label] = {k: ap_at_k(per_class[label][k]) for k in config.k_values}
        query_counts[label] = len(per_class[label][config.k_values[0]])

    map_at: Dict[int, MeanStd] = {}
    if class_ap:
        map_at = {k: map_at_k([class_ap[label][k][0] for label in sorted(class_ap)]) for k in config.k_values}

    report = EvalReport(
        config=config,
        class_ap=class_ap,
        map_at=map_at,
        class_counts=dict(sorted(class_counts.items())),
        query_counts=query_counts,
        failed_queries=len(failed_ids),
        failed_ids=tuple(sorted(failed_ids)),
        extraction_seconds=float(np.mean(extraction_times)) if extraction_times else 0.0,
        retrieval_seconds=float(np.mean(retrieval_times)) if retrieval_times else 0.0,
    )
    average = report.average
    logger.info(f"Benchmark {config.label}: average mAP {average[0]:.2f} ± {average[1]:.2f}, "
                f"{report.failed_queries} failed queries")
    return report


def time_phases(records: Sequence[PatternRecord], config: EvalConfig) -> Tuple[float, float]:
    """Mean extraction and retrieval seconds per query."""
    report = run_benchmark(records, config)
    return report.extraction_seconds, report.retrieval_seconds
