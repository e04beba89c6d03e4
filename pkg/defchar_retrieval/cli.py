#!/usr/bin/env python3
"""
Command-line interface: build datastores, query them, run benchmark sweeps,
inspect DefChars and list recorded benchmark runs.

stdout carries command data; diagnostics go to stderr through logging.
Exit codes: 0 success, 1 internal error, 2 input error, 3 configuration error.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from defchar_retrieval import __version__
from defchar_retrieval.config import get_config
from defchar_retrieval.dataset import class_distribution, load_manifest, load_patterns, read_polygon_file
from defchar_retrieval.evaluation import (
    EvalConfig, canonical_order, distribution_table, render_table, run_benchmark, siblings_by_source,
    summary_table, write_report,
)
from defchar_retrieval.exceptions import ConfigurationError, DefCharError, KindMismatch
from defchar_retrieval.features import (
    SLOT_NAMES, ExtractionSettings, extract_defchars, extract_payload, get_extractor, normalize,
)
from defchar_retrieval.geometry import rasterize
from defchar_retrieval.imaging import PatternRecord, crop_pattern, read_image, read_mask
from defchar_retrieval.metrics import InputKind, available_metrics, get_metric
from defchar_retrieval.store import IndexItem, build_store, load, retrieve, save
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)
active_config = get_config()

QUERY_ID = 'query#0'
DEFAULT_METRIC = {InputKind.FEATURE_VECTOR: 'manhattan', InputKind.IMAGE: 'mse'}


def _split(value: Any) -> Tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(str(v).strip() for v in value if str(v).strip())
    return tuple(part.strip() for part in str(value).split(',') if part.strip())


def _int_tuple(value: Any, name: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in _split(value))
    except ValueError:
        raise ConfigurationError(f"{name} must be a comma-separated list of integers, got {value!r}") from None


@dataclass
class RunConfig:
    """Settings of one CLI invocation: config-file values overridden by flags."""
    features: Tuple[str, ...] = ('defchars',)
    metrics: Tuple[str, ...] = ()
    sizes: Tuple[int, ...] = field(default_factory=lambda: tuple(active_config.DEFAULT_IMAGE_SIZES))
    k_values: Tuple[int, ...] = field(default_factory=lambda: tuple(active_config.DEFAULT_K_VALUES))
    store: Optional[str] = None
    out: Optional[str] = None
    threads: int = field(default_factory=lambda: active_config.DEFAULT_THREADS)
    results_db: str = field(default_factory=lambda: active_config.RESULTS_DB_URL)

    # config-file key / CLI flag -> field
    KEYS = {'feature': 'features', 'metric': 'metrics', 'size': 'sizes', 'k': 'k_values',
            'store': 'store', 'out': 'out', 'threads': 'threads', 'results_db': 'results_db'}

    @classmethod
    def from_sources(cls, file_values: Dict[str, Any], flag_values: Dict[str, Any]) -> 'RunConfig':
        unknown = set(file_values) - set(cls.KEYS)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged = dict(file_values)
        merged.update({key: value for key, value in flag_values.items() if key in cls.KEYS and value is not None})

        run = cls()
        if 'feature' in merged:
            run.features = tuple(get_extractor(name).name for name in _split(merged['feature']))
        if 'metric' in merged:
            run.metrics = tuple(get_metric(name).name for name in _split(merged['metric']))
        if 'size' in merged:
            run.sizes = _int_tuple(merged['size'], 'size')
        if 'k' in merged:
            run.k_values = _int_tuple(merged['k'], 'k')
        for key in ('store', 'out', 'results_db'):
            if merged.get(key) is not None:
                setattr(run, key, str(merged[key]))
        if 'threads' in merged:
            run.threads = int(merged['threads'])
        run.validate()
        return run

    def validate(self):
        if not self.features:
            raise ConfigurationError("at least one feature is required")
        if any(size < 1 for size in self.sizes):
            raise ConfigurationError(f"image sizes must be positive, got {self.sizes}")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ConfigurationError(f"K values must be positive, got {self.k_values}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.threads}")

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def eval_configs(self, dataset: str = '') -> List[EvalConfig]:
        """Every compatible feature x metric x size combination."""
        configs = []
        for feature in self.features:
            extractor = get_extractor(feature)
            metrics = [m for m in self.metrics if get_metric(m).input_kind is extractor.input_kind] \
                if self.metrics else list(available_metrics(extractor.input_kind))
            sizes = self.sizes if extractor.uses_image_size else (None,)
            for metric in metrics:
                for size in sizes:
                    configs.append(EvalConfig(feature, metric, image_side=size, k_values=self.k_values,
                                              dataset=dataset, threads=self.threads))
        if not configs:
            raise KindMismatch(
                f"no metric in {', '.join(self.metrics)} fits feature(s) {', '.join(self.features)}"
            )
        return configs


def _load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return data


def run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_sources(_load_config_file(args.config), vars(args))


def _settings(extraction: Optional[Dict[str, Any]] = None) -> ExtractionSettings:
    if not extraction:
        return ExtractionSettings()
    try:
        return ExtractionSettings(**extraction)
    except TypeError as e:
        raise ConfigurationError(f"unrecognised extraction settings {extraction}: {e}") from e


def query_pattern(image_path: str, mask_path: Optional[str], polygon_path: Optional[str],
                  settings: ExtractionSettings) -> PatternRecord:
    """Single pattern from an image plus a mask PNG or polygon JSON."""
    if bool(mask_path) == bool(polygon_path):
        raise ConfigurationError("give exactly one of --mask or --polygon")
    image = read_image(image_path)
    if mask_path:
        mask = read_mask(mask_path)
    else:
        mask = rasterize(read_polygon_file(polygon_path), image.shape[:2])
    return crop_pattern(image, mask, 0, QUERY_ID, Path(image_path).name, settings.padding_ratio)


def _extract_all(records: Sequence[PatternRecord], feature: str, side: Optional[int],
                 settings: ExtractionSettings, threads: int) -> List[Any]:
    groups = siblings_by_source(records)
    calls = (delayed(extract_payload)(feature, r, groups[r.source_image], side, settings) for r in records)
    return Parallel(n_jobs=threads, prefer='threads')(calls)


def cmd_index(args: argparse.Namespace) -> int:
    run = run_config(args)
    if not run.store:
        raise ConfigurationError("index needs --store")
    if len(run.features) != 1:
        raise ConfigurationError("index builds one store per feature; give a single --feature")
    feature = run.features[0]
    side = run.sizes[0] if get_extractor(feature).uses_image_size else None
    settings = _settings()

    manifest = load_manifest(args.manifest)
    records = canonical_order(load_patterns(manifest, settings.padding_ratio))
    logger.info(f"Class distribution: {class_distribution(records)}")

    start = time.perf_counter()
    payloads = _extract_all(records, feature, side, settings, run.threads)
    extraction_seconds = time.perf_counter() - start

    start = time.perf_counter()
    items = [IndexItem(p, r.class_label, r.source_image) for p, r in zip(payloads, records)]
    store = build_store(items, feature, image_side=side, extraction=settings.to_dict())
    save(store, run.store)
    indexing_seconds = time.perf_counter() - start

    print(f"entries: {len(store)}")
    print(f"feature: {store.feature_kind}")
    print(f"extraction_seconds: {extraction_seconds:.4f}")
    print(f"indexing_seconds: {indexing_seconds:.4f}")
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    run = run_config(args)
    if not run.store:
        raise ConfigurationError("query needs --store")
    store = load(run.store)
    metric = get_metric(run.metrics[0] if run.metrics else DEFAULT_METRIC[store.input_kind])
    if metric.input_kind is not store.input_kind:
        raise KindMismatch(f"metric '{metric.name}' cannot rank a '{store.feature_kind}' store")

    settings = _settings(store.extraction)
    record = query_pattern(args.image, args.mask, args.polygon, settings)
    payload = extract_payload(store.feature_kind, record, (), store.image_side, settings)
    ranked = retrieve(store, payload, metric, k=args.top, threads=run.threads)

    lines = ['rank,index,source,class,score']
    lines += [f'{rank},{item.index},{item.source_image},{item.class_label},{item.score!r}'
              for rank, item in enumerate(ranked, start=1)]
    text = '\n'.join(lines) + '\n'
    sys.stdout.write(text)
    if run.out:
        Path(run.out).write_text(text, encoding='utf-8')
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    run = run_config(args)
    manifest = load_manifest(args.manifest)
    records = load_patterns(manifest)
    counts = class_distribution(records)
    logger.info(f"Class distribution: {counts}")

    reports, failed = [], []
    for config in run.eval_configs(manifest.name):
        try:
            reports.append(run_benchmark(records, config))
        except DefCharError as e:
            logger.error(f"Benchmark {config.label} failed: {e}")
            failed.append(config.label)

    sys.stdout.write(summary_table(reports, f'Retrieval performance: {manifest.name}'))
    sys.stdout.write('\n' + distribution_table(counts))
    if run.out:
        write_report(reports, run.out, manifest.name)
    if run.results_db and reports:
        from defchar_retrieval.models import open_session, record_reports

        with open_session(run.results_db) as session:
            record_reports(session, reports)
        logger.info(f"Recorded {len(reports)} benchmark runs")

    if failed:
        print(f"failed combinations: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    settings = _settings()
    record = query_pattern(args.image, args.mask, args.polygon, settings)
    vector = extract_defchars(record, (), settings)
    normalized = normalize(vector)

    lines = ['slot,raw,normalized']
    lines += [f"{name},{format(raw, '.17g')},{format(norm, '.17g')}"
              for name, raw, norm in zip(SLOT_NAMES, vector.values, normalized.values)]
    sys.stdout.write('\n'.join(lines) + '\n')
    return 0


def cmd_history(args: argparse.Namespace) -> int:
    from defchar_retrieval.models import BenchmarkRun, open_session

    run = run_config(args)
    if not run.results_db:
        raise ConfigurationError("history needs --results-db or RESULTS_DB_URL")
    with open_session(run.results_db) as session:
        runs = BenchmarkRun.recent(session, limit=args.limit, dataset=args.dataset)
        rows = [[str(r.id), r.created_at.strftime('%Y-%m-%d %H:%M:%S'), r.dataset, r.label,
                 'n/a' if r.average_map is None else f'{r.average_map:.2f} ± {r.average_std:.2f}',
                 str(r.queries), str(r.failed_queries)] for r in runs]
    header = ['Id', 'Recorded', 'Dataset', 'Configuration', 'Average', 'Queries', 'Failed']
    sys.stdout.write(render_table('Benchmark history', header, rows))
    return 0


def _add_run_flags(parser: argparse.ArgumentParser, *names: str):
    helps = {
        'feature': 'Feature kind(s): defchars, raw, lbp (comma-separated)',
        'metric': 'Similarity metric name(s) (comma-separated)',
        'size': 'Image side(s) for raw and lbp features (comma-separated)',
        'k': 'K values, e.g. 1,5,10,15,20',
        'store': 'Datastore directory',
        'out': 'Output path',
        'threads': 'Worker threads (1 = sequential)',
        'results_db': 'SQLAlchemy URL of the benchmark history database',
    }
    for name in names:
        flag = '--' + name.replace('_', '-')
        kwargs = {'type': int} if name == 'threads' else {}
        parser.add_argument(flag, dest=name, default=None, help=helps[name], **kwargs)


def _add_annotation_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--image', required=True, help='Image file (PNG or JPEG)')
    parser.add_argument('--mask', help='Mask PNG, nonzero = inside the pattern')
    parser.add_argument('--polygon', help='Polygon JSON with [x, y] rings')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='defchar-ir',
                                     description='DefChars irregular-pattern image retrieval')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help='JSON config file mirroring the command flags')
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    index_parser = subparsers.add_parser('index', help='Extract features and build a datastore')
    index_parser.add_argument('manifest', help='Dataset manifest JSON')
    _add_run_flags(index_parser, 'feature', 'size', 'store', 'threads')
    index_parser.set_defaults(handler=cmd_index)

    query_parser = subparsers.add_parser('query', help='Rank datastore entries against one pattern')
    _add_annotation_flags(query_parser)
    _add_run_flags(query_parser, 'store', 'metric', 'out', 'threads')
    query_parser.add_argument('--k', '--top', dest='top', type=int, default=10,
                              help='Number of results (default: 10)')
    query_parser.set_defaults(handler=cmd_query)

    evaluate_parser = subparsers.add_parser('evaluate', help='Run the leave-one-out benchmark sweep')
    evaluate_parser.add_argument('manifest', help='Dataset manifest JSON')
    _add_run_flags(evaluate_parser, 'feature', 'metric', 'size', 'k', 'out', 'threads', 'results_db')
    evaluate_parser.set_defaults(handler=cmd_evaluate)

    extract_parser = subparsers.add_parser('extract', help='Print the DefChars of one pattern')
    _add_annotation_flags(extract_parser)
    extract_parser.set_defaults(handler=cmd_extract)

    history_parser = subparsers.add_parser('history', help='List recorded benchmark runs')
    _add_run_flags(history_parser, 'results_db')
    history_parser.add_argument('--limit', type=int, default=20, help='Rows to show (default: 20)')
    history_parser.add_argument('--dataset', help='Only runs on this dataset')
    history_parser.set_defaults(handler=cmd_history)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0

    try:
        return args.handler(args)
    except DefCharError as e:
        print(f"defchar-ir: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error in '{args.command}': {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
