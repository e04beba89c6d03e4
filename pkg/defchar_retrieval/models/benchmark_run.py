import json
import math
from datetime import datetime, timezone
from typing import List, Optional

from sqlalchemy import DateTime, Float, ForeignKey, Integer, String, Text, select
from sqlalchemy.orm import Mapped, Session, mapped_column, relationship

from defchar_retrieval import __version__
from defchar_retrieval.evaluation import EvalReport
from .database import Base


def _utcnow():
    return datetime.now(timezone.utc)


class BenchmarkRun(Base):
    """One evaluated feature / metric / image-size configuration."""

    __tablename__ = 'benchmark_runs'

    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    dataset: Mapped[str] = mapped_column(String(200), default='', index=True)
    feature: Mapped[str] = mapped_column(String(50), nullable=False, index=True)
    metric: Mapped[str] = mapped_column(String(50), nullable=False)
    image_side: Mapped[Optional[int]] = mapped_column(Integer)

    # JSON-encoded {k: [mean, std]}
    k_values: Mapped[str] = mapped_column(Text, nullable=False)
    map_results: Mapped[str] = mapped_column(Text, nullable=False)
    average_map: Mapped[Optional[float]] = mapped_column(Float, index=True)
    average_std: Mapped[Optional[float]] = mapped_column(Float)

    # Query accounting and timings
    queries: Mapped[int] = mapped_column(Integer, default=0)
    failed_queries: Mapped[int] = mapped_column(Integer, default=0)
    extraction_seconds: Mapped[float] = mapped_column(Float, default=0.0)
    retrieval_seconds: Mapped[float] = mapped_column(Float, default=0.0)

    package_version: Mapped[str] = mapped_column(String(20), default=__version__)
    created_at: Mapped[datetime] = mapped_column(DateTime(timezone=True), default=_utcnow, nullable=False, index=True)

    class_results: Mapped[List['ClassResult']] = relationship(
        back_populates='run', cascade='all, delete-orphan', order_by='ClassResult.class_label'
    )

    def __repr__(self):
        size = self.image_side if self.image_side is not None else 'raw'
        score = "n/a" if self.average_map is None else f"{self.average_map:.2f}"
        return f"<BenchmarkRun {self.feature}/{self.metric}/{size}: {score}>"

    @property
    def label(self) -> str:
        size = self.image_side if self.image_side is not None else 'raw'
        return f'{self.feature}/{self.metric}/{size}'

    def to_dict(self):
        """Convert to dictionary for output."""
        return {
            'id': self.id,
            'dataset': self.dataset,
            'feature': self.feature,
            'metric': self.metric,
            'image_side': self.image_side,
            'k_values': json.loads(self.k_values),
            'map': json.loads(self.map_results),
            'average_map': self.average_map,
            'average_std': self.average_std,
            'queries': self.queries,
            'failed_queries': self.failed_queries,
            'extraction_seconds': self.extraction_seconds,
            'retrieval_seconds': self.retrieval_seconds,
            'package_version': self.package_version,
            'created_at': self.created_at.isoformat() if self.created_at else None,
            'classes': [result.to_dict() for result in self.class_results],
        }

    @classmethod
    def from_report(cls, report: EvalReport) -> 'BenchmarkRun':
        average_map, average_std = report.average
        run = cls(
            dataset=report.config.dataset,
            feature=report.config.feature,
            metric=report.config.metric,
            image_side=report.config.image_side,
            k_values=json.dumps(list(report.k_values)),
            map_results=json.dumps({str(k): list(v) for k, v in report.map_at.items()}),
            average_map=None if math.isnan(average_map) else average_map,
            average_std=None if math.isnan(average_std) else average_std,
            queries=report.total_queries,
            failed_queries=report.failed_queries,
            extraction_seconds=report.extraction_seconds,
            retrieval_seconds=report.retrieval_seconds,
        )
        for label in report.classes:
            run.class_results.append(ClassResult(
                class_label=label,
                patterns=report.class_counts[label],
                queries=report.query_counts.get(label, 0),
                ap_results=json.dumps({str(k): list(v) for k, v in report.class_ap.get(label, {}).items()}),
            ))
        return run

    @classmethod
    def recent(cls, session: Session, limit: int = 20, dataset: Optional[str] = None) -> List['BenchmarkRun']:
        query = select(cls)
        if dataset:
            query = query.where(cls.dataset == dataset)
        query = query.order_by(cls.created_at.desc(), cls.id.desc()).limit(limit)
        return list(session.scalars(query))

    @classmethod
    def best_for_feature(cls, session: Session, feature: str,
                         dataset: Optional[str] = None) -> Optional['BenchmarkRun']:
        """Highest average mAP recorded for a feature; lower spread wins ties."""
        query = select(cls).where(cls.feature == feature, cls.average_map.is_not(None))
        if dataset:
            query = query.where(cls.dataset == dataset)
        query = query.order_by(cls.average_map.desc(), cls.average_std.asc(), cls.id.asc()).limit(1)
        return session.scalars(query).first()


class ClassResult(Base):
    """AP@K of one class within a benchmark run."""

    __tablename__ = 'class_results'

    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    run_id: Mapped[int] = mapped_column(ForeignKey('benchmark_runs.id'), nullable=False, index=True)
    class_label: Mapped[int] = mapped_column(Integer, nullable=False)
    patterns: Mapped[int] = mapped_column(Integer, default=0)
    queries: Mapped[int] = mapped_column(Integer, default=0)
    ap_results: Mapped[str] = mapped_column(Text, nullable=False)

    run: Mapped[BenchmarkRun] = relationship(back_populates='class_results')

    def __repr__(self):
        return f'<ClassResult run={self.run_id} class={self.class_label}>'

    def to_dict(self):
        return {
            'class': self.class_label,
            'patterns': self.patterns,
            'queries': self.queries,
            'ap': json.loads(self.ap_results),
        }


def record_reports(session: Session, reports: List[EvalReport]) -> List[BenchmarkRun]:
    """Persist benchmark reports and return the stored rows."""
    runs = [BenchmarkRun.from_report(report) for report in reports]
    session.add_all(runs)
    session.commit()
    return runs
