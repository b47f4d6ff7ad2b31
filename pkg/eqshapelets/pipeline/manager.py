import logging
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..classifier import BaseClassifier, ShapeletForest
from ..config import RunConfig
from ..core import BaseDistance, DistanceManager, balance, train_test_split
from ..detection import BaseCatalogMatcher, DetectionManager, IntervalCatalogMatcher
from ..discovery import BaseQualityMeasure, InformationGainQuality, ShapeletDiscovery
from ..preprocess import BasePreprocessor, PreprocessManager
from ..synth import SynthManager
from ..types import (
    CatalogEvent,
    CatalogMatch,
    Detection,
    DetectionReport,
    Evaluation,
    GapReport,
    GroundTruth,
    LearningSet,
    Shapelet,
    SweepRow,
    TimeSeries,
)


class EqShapeletsManager:
    """Менеджер полного цикла: подготовка данных, поиск шейплетов, обучение леса и детекция.

    :param config: Конфигурация запуска. По-умолчанию, значения по умолчанию всех секций.
    :param distance: (опционально) Мера расстояния. Использовать только для кастомных классов.
    :param quality: (опционально) Мера качества кандидатов. Использовать только для кастомных классов.
    :param classifier: (опционально) Классификатор. Использовать только для кастомных классов.
    :param matcher: (опционально) Сопоставление с каталогом. Использовать только для кастомных классов.
    :param preprocessor: (опционально) Подготовка записей. Использовать только для кастомных классов.
    :param n_jobs: Число потоков. Результаты от него не зависят.
    :param logger: (опционально) кастомный логгер.
    """

    def __init__(
        self,
        config: Optional[RunConfig] = None,
        distance: Optional[BaseDistance] = None,
        quality: Optional[BaseQualityMeasure] = None,
        classifier: Optional[BaseClassifier] = None,
        matcher: Optional[BaseCatalogMatcher] = None,
        preprocessor: Optional[BasePreprocessor] = None,
        n_jobs: int = 1,
        logger: Optional[logging.Logger] = None,
    ):
        self.config = config or RunConfig()
        self.n_jobs = n_jobs
        self.logger = logger or logging.getLogger(__name__)
        self.timings: Dict[str, float] = {}

        self._distance = distance or DistanceManager(z_normalize=self.config.discovery.z_normalize)
        self._quality = quality or InformationGainQuality()
        self._matcher = matcher or IntervalCatalogMatcher()
        self._preprocessor = preprocessor or PreprocessManager(self.logger)
        self._discovery = ShapeletDiscovery(self.config.discovery, self._distance, self._quality, n_jobs, self.logger)
        self._synth = SynthManager(self.config.synth, self.logger)
        self.classifier = classifier or ShapeletForest(
            self.config.forest, self.config.discovery.z_normalize, self._distance, n_jobs, self.logger
        )

    def _timed(self, stage: str, started: float) -> None:
        self.timings[stage] = self.timings.get(stage, 0.0) + time.perf_counter() - started

    def synth_record(self) -> Tuple[TimeSeries, GroundTruth]:
        started = time.perf_counter()
        result = self._synth.gen_record()
        self._timed("synth", started)
        return result

    def synth_learning_set(self, n_event_windows: int, n_other_windows: int) -> Tuple[LearningSet, GroundTruth]:
        """Синтетический обучающий набор с окнами длительности preprocess.window_seconds."""
        started = time.perf_counter()
        result = self._synth.gen_learning_set(
            n_event_windows, n_other_windows, self.config.preprocess.window_seconds
        )
        self._timed("synth", started)
        return result

    def preprocess_record(self, segments: Sequence[TimeSeries]) -> Tuple[List[TimeSeries], GapReport]:
        """Склейка, фильтр, прореживание и нарезка непрерывной записи на окна."""
        started = time.perf_counter()
        result = self._preprocessor.run_pipeline(segments, self.config.preprocess)
        self._timed("preprocess", started)
        return result

    def preprocess_learning_set(self, learning_set: LearningSet) -> LearningSet:
        started = time.perf_counter()
        windows = [
            window.model_copy(update={"series": self._preprocessor.condition(window.series, self.config.preprocess)})
            for window in learning_set
        ]
        self._timed("preprocess", started)
        return LearningSet(windows=windows)

    def split(self, learning_set: LearningSet, balanced: bool = False) -> Tuple[LearningSet, LearningSet]:
        """Разбиение 60/40 (по желанию после балансировки классов) с seed леса."""
        seed = self.config.forest.seed
        if balanced:
            learning_set = balance(learning_set, seed)
        return train_test_split(learning_set, 0.6, seed)

    def discover(self, learning_set: LearningSet) -> List[Shapelet]:
        started = time.perf_counter()
        shapelets = self._discovery.discover(learning_set)
        self._timed("discover", started)
        return shapelets

    def sweep(self, train: LearningSet, test: LearningSet, thresholds: Optional[Sequence[float]] = None) -> List[SweepRow]:
        started = time.perf_counter()
        thresholds = self.config.sweep.thresholds if thresholds is None else thresholds
        rows = self._discovery.ig_threshold_sweep(train, test, thresholds, self.classifier)
        self._timed("sweep", started)
        self.timings["sweep_scoring"] = self.timings.get("sweep_scoring", 0.0) + self._discovery.last_scoring_seconds
        return rows

    def train(self, shapelets: Sequence[Shapelet], learning_set: LearningSet) -> BaseClassifier:
        started = time.perf_counter()
        self.classifier.fit(shapelets, learning_set)
        self._timed("train", started)
        return self.classifier

    def evaluate(self, learning_set: LearningSet) -> Evaluation:
        started = time.perf_counter()
        evaluation = self.classifier.evaluate(learning_set)
        self._timed("evaluate", started)
        return evaluation

    def load_model(self, path: Path) -> BaseClassifier:
        self.classifier = ShapeletForest.load(path, self.n_jobs)
        return self.classifier

    def detect(
        self,
        windows: Sequence[TimeSeries],
        catalog: Sequence[CatalogEvent] = (),
        ground_truth: Optional[Sequence[CatalogEvent]] = None,
    ) -> Tuple[List[Detection], CatalogMatch, DetectionReport]:
        """Детекция, сопоставление с каталогом и отчёт.

        :param windows: Окна записи, подготовленные как обучающий набор.
        :param catalog: События каталога.
        :param ground_truth: (опционально) Полный список истинных событий для precision и recall.
        :return: Детекции с отметками каталога, результат сопоставления и отчёт.
        """
        started = time.perf_counter()
        detector = DetectionManager(self.classifier, self.config.detection, self._matcher, self.n_jobs, self.logger)
        detections = detector.detect(windows)
        catalog_match = detector.match_catalog(detections, catalog)
        report = detector.build_report(detections, catalog_match, ground_truth=ground_truth)
        self._timed("detect", started)
        return catalog_match.detections, catalog_match, report
