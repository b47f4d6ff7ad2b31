import logging
import time
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .base import BaseCatalogMatcher
from ..classifier import BaseClassifier, ShapeletForest
from ..config import DetectionConfig
from ..exceptions import ConfigError, SeriesTooShortError, UsageError
from ..types import (
    CatalogEvent,
    CatalogMatch,
    Detection,
    DetectionReport,
    Label,
    LabeledWindow,
    LearningSet,
    Prediction,
    TimeSeries,
)

logger = logging.getLogger(__name__)


class IntervalCatalogMatcher(BaseCatalogMatcher):
    """Событие совпадает с детекцией, если его время попадает в
    [window_start - tolerance, window_end + tolerance].

    Каждое событие засчитывается не более чем одной детекции (самому раннему
    окну). В matched_event_id детекции записывается самое раннее событие,
    попавшее в её интервал, даже если оно уже засчитано соседнему окну:
    новой считается только детекция без событий каталога.
    """

    def match(
        self, detections: Sequence[Detection], catalog: Sequence[CatalogEvent], tolerance_seconds: float = 0.0
    ) -> CatalogMatch:
        if tolerance_seconds < 0:
            logger.error(f"Допуск не может быть отрицательным: {tolerance_seconds}")
            raise UsageError(f"Допуск не может быть отрицательным: {tolerance_seconds}")
        events = sorted(catalog, key=lambda e: (e.origin_time, e.id))
        origins = np.array([event.origin_time for event in events], dtype=np.float64)
        annotated = sorted(detections, key=lambda d: d.window_start)
        starts = np.array([d.window_start for d in annotated], dtype=np.float64) - tolerance_seconds
        ends = np.array([d.window_end for d in annotated], dtype=np.float64) + tolerance_seconds
        firsts = np.searchsorted(origins, starts, side="left")
        annotated = [
            d.model_copy(update={"matched_event_id": events[i].id if i < len(events) and origins[i] <= end else None})
            for d, i, end in zip(annotated, firsts, ends)
        ]
        matches = {}
        missed: List[CatalogEvent] = []
        for event in events:
            index = int(np.searchsorted(ends, event.origin_time, side="left"))
            if index < len(annotated) and starts[index] <= event.origin_time:
                matches[event.id] = index
            else:
                missed.append(event)
        return CatalogMatch(detections=annotated, matches=matches, missed=missed)


_default_matcher = IntervalCatalogMatcher()


def match_catalog(
    detections: Sequence[Detection], catalog: Sequence[CatalogEvent], tolerance_seconds: float = 0.0
) -> CatalogMatch:
    return _default_matcher.match(detections, catalog, tolerance_seconds)


def probability_histogram(detections: Sequence[Detection], bin_edges: Sequence[float]) -> List[int]:
    """Число детекций в каждом интервале вероятностей [a, b), последний интервал закрыт."""
    edges = np.asarray(bin_edges, dtype=np.float64)
    if edges.size < 2 or np.any(np.diff(edges) <= 0):
        logger.error(f"Границы интервалов должны строго возрастать: {list(bin_edges)}")
        raise UsageError(f"Границы интервалов должны строго возрастать: {list(bin_edges)}")
    counts, _ = np.histogram([d.prob_event for d in detections], bins=edges)
    return counts.astype(int).tolist()


def review_band(detections: Sequence[Detection], low: float = 0.5, high: float = 0.6) -> List[Detection]:
    """Детекции с вероятностью в [low, high) - кандидаты на ручную проверку."""
    return [d for d in detections if low <= d.prob_event < high]


def label_windows(
    windows: Sequence[TimeSeries], catalog: Sequence[CatalogEvent], tolerance_seconds: float = 0.0
) -> LearningSet:
    """Размечает окна по каталогу: окно с временем события внутри - Event, иначе Other."""
    origins = np.sort(np.array([event.origin_time for event in catalog], dtype=np.float64))
    labeled = []
    for index, window in enumerate(windows):
        low = np.searchsorted(origins, window.start_time - tolerance_seconds, side="left")
        high = np.searchsorted(origins, window.end_time + tolerance_seconds, side="right")
        label = Label.EVENT if high > low else Label.OTHER
        labeled.append(LabeledWindow(window_id=f"window-{index:06d}", series=window, label=label))
    return LearningSet(windows=labeled)


def build_report(
    detections: Sequence[Detection],
    catalog_match: CatalogMatch,
    runtime_seconds: float = 0.0,
    bin_edges: Sequence[float] = (0.5, 0.6, 0.7, 0.8, 0.9, 0.96, 1.0),
    ground_truth: Optional[Sequence[CatalogEvent]] = None,
    tolerance_seconds: float = 0.0,
    review: tuple = (0.5, 0.6),
    matcher: Optional[BaseCatalogMatcher] = None,
) -> DetectionReport:
    """Сводка детекций: совпадения с каталогом, новые события, гистограмма.

    precision и recall считаются только при известной истине (ground_truth):
    каталог с проверенными новыми событиями для реальных данных или список
    внедрённых событий для синтетики.
    """
    matcher = matcher or _default_matcher
    total = len(detections)
    matched = sum(d.matched_event_id is not None for d in catalog_match.detections)
    report = DetectionReport(
        total_detections=total,
        catalog_matched=matched,
        new_events=total - matched,
        missed_catalog_events=len(catalog_match.missed),
        review_count=len(review_band(detections, *review)),
        runtime_seconds=runtime_seconds,
        bin_edges=list(bin_edges),
        histogram=probability_histogram(detections, bin_edges),
    )
    if ground_truth is not None:
        truth_match = matcher.match(detections, ground_truth, tolerance_seconds)
        true_positives = sum(d.matched_event_id is not None for d in truth_match.detections)
        report.false_positives = total - true_positives
        report.false_negatives = len(truth_match.missed)
        report.precision = true_positives / total if total else None
        found = len(ground_truth) - len(truth_match.missed)
        report.recall = found / len(ground_truth) if ground_truth else None
    return report


class DetectionManager:
    """Поиск событий в непрерывной записи обученной моделью.

    :param classifier: Обученный классификатор.
    :param config: Параметры сопоставления и отчёта.
    :param matcher: (опционально) Сопоставление с каталогом. Использовать только для кастомных классов.
    :param n_jobs: Число потоков.
    :param logger: (опционально) кастомный логгер.
    """

    def __init__(
        self,
        classifier: BaseClassifier,
        config: Optional[DetectionConfig] = None,
        matcher: Optional[BaseCatalogMatcher] = None,
        n_jobs: int = 1,
        logger: Optional[logging.Logger] = None,
    ):
        self.classifier = classifier
        self.config = config or DetectionConfig()
        self.matcher = matcher or _default_matcher
        self.n_jobs = n_jobs
        self.logger = logger or logging.getLogger(__name__)
        self.last_runtime_seconds = 0.0

    def _check_bin_edges(self) -> None:
        """Интервалы гистограммы должны покрывать все вероятности детекций: [порог решения, 1]."""
        if not isinstance(self.classifier, ShapeletForest) or self.classifier.forest is None:
            return
        edges = self.config.bin_edges
        threshold = self.classifier.forest.decision_threshold
        if edges[0] > threshold or edges[-1] < 1.0:
            self.logger.error(f"Гистограмма {edges} не покрывает вероятности детекций [{threshold}, 1]")
            raise ConfigError(f"Гистограмма {edges} не покрывает вероятности детекций [{threshold}, 1]")

    def _check_windows(self, windows: Sequence[TimeSeries]) -> None:
        if not isinstance(self.classifier, ShapeletForest):
            return
        forest = self.classifier._require_forest()
        longest = max((s.length for s in forest.shapelets), default=0)
        for window in windows:
            if len(window) < longest:
                self.logger.error(f"Окно длиной {len(window)} короче шейплета длиной {longest}")
                raise SeriesTooShortError(f"Окно длиной {len(window)} короче шейплета длиной {longest}")
            if forest.sample_rate_hz is not None and window.sample_rate_hz != forest.sample_rate_hz:
                self.logger.error(
                    f"Частота окна {window.sample_rate_hz} Гц не совпадает с частотой обучения {forest.sample_rate_hz} Гц"
                )
                raise UsageError(
                    f"Частота окна {window.sample_rate_hz} Гц не совпадает с частотой обучения {forest.sample_rate_hz} Гц"
                )

    def _classify(self, windows: Sequence[TimeSeries]) -> List[Prediction]:
        if isinstance(self.classifier, ShapeletForest) and len({len(w) for w in windows}) == 1:
            return self.classifier.predict_many(np.stack([w.samples for w in windows]))
        return [self.classifier.predict_window(w) for w in windows]

    def detect(self, windows: Sequence[TimeSeries]) -> List[Detection]:
        """Классифицирует каждое окно и возвращает окна класса Event по времени начала.

        :param windows: Окна, подготовленные так же, как обучающий набор.
        """
        started = time.perf_counter()
        self._check_bin_edges()
        windows = sorted(windows, key=lambda w: w.start_time)
        if not windows:
            return []
        self._check_windows(windows)
        chunks = [list(chunk) for chunk in np.array_split(np.arange(len(windows)), max(1, self.n_jobs)) if len(chunk)]
        results = Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(self._classify)([windows[i] for i in chunk]) for chunk in chunks
        )
        predictions = [prediction for part in results for prediction in part]
        detections = [
            Detection(window_start=w.start_time, window_end=w.end_time, prob_event=p.prob_event)
            for w, p in zip(windows, predictions)
            if p.label == Label.EVENT
        ]
        self.last_runtime_seconds = time.perf_counter() - started
        self.logger.info(
            f"Классифицировано окон: {len(windows)}, детекций: {len(detections)} "
            f"за {self.last_runtime_seconds:.1f} с"
        )
        return detections

    def match_catalog(self, detections: Sequence[Detection], catalog: Sequence[CatalogEvent]) -> CatalogMatch:
        catalog_match = self.matcher.match(detections, catalog, self.config.tolerance_seconds)
        self.logger.info(
            f"Совпало с каталогом событий: {len(catalog_match.matches)}, пропущено: {len(catalog_match.missed)}"
        )
        return catalog_match

    def build_report(
        self,
        detections: Sequence[Detection],
        catalog_match: CatalogMatch,
        runtime_seconds: Optional[float] = None,
        ground_truth: Optional[Sequence[CatalogEvent]] = None,
    ) -> DetectionReport:
        return build_report(
            detections,
            catalog_match,
            runtime_seconds=self.last_runtime_seconds if runtime_seconds is None else runtime_seconds,
            bin_edges=self.config.bin_edges,
            ground_truth=ground_truth,
            tolerance_seconds=self.config.tolerance_seconds,
            review=(self.config.review_low, self.config.review_high),
            matcher=self.matcher,
        )


def write_detections(detections: Sequence[Detection], path: Path) -> None:
    """Пишет детекции построчно в JSON (JSON Lines)."""
    fields = {"window_start", "window_end", "prob_event", "matched_event_id"}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for detection in detections:
            handle.write(detection.model_dump_json(include=fields) + "\n")
    logger.info(f"Записано детекций: {len(detections)} в {path}")


def write_histogram(report: DetectionReport, path: Path) -> None:
    frame = pd.DataFrame(
        {"bin_low": report.bin_edges[:-1], "bin_high": report.bin_edges[1:], "count": report.histogram}
    )
    frame.to_csv(path, index=False)
