import logging
import time
from typing import TYPE_CHECKING, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from .base import BaseQualityMeasure
from .quality import InformationGainQuality
from ..config import DiscoveryConfig
from ..core import BaseDistance, DistanceManager
from ..exceptions import SeriesTooShortError, SingleClassError, UsageError
from ..types import DistanceProfile, Label, LearningSet, Shapelet, Subsequence, SweepRow

if TYPE_CHECKING:
    from ..classifier import BaseClassifier

logger = logging.getLogger(__name__)


class Candidate(NamedTuple):
    """Оценённый кандидат: ссылка на участок окна и его качество."""

    window_index: int
    window_id: str
    offset: int
    length: int
    quality: float
    split_threshold: float

    @property
    def source_window_id(self) -> str:
        return self.window_id

    @property
    def interval(self) -> tuple:
        return self.offset, self.offset + self.length

    def sort_key(self) -> tuple:
        return -self.quality, self.length, self.window_id, self.offset


def _overlaps(a, b, overlap_frac: float) -> bool:
    if a.source_window_id != b.source_window_id:
        return False
    a_start, a_end = a.interval
    b_start, b_end = b.interval
    overlap = min(a_end, b_end) - max(a_start, b_start)
    return overlap > overlap_frac * min(a.length, b.length)


def remove_similar(shapelets: Sequence, overlap_frac: float = 0.25, limit: Optional[int] = None) -> List:
    """Жадно удаляет похожие шейплеты.

    Шейплет отбрасывается, если он из того же окна, что и уже оставленный, и их
    интервалы [offset, offset + length) перекрываются больше чем на
    overlap_frac от длины более короткого.

    :param shapelets: Шейплеты, отсортированные по убыванию качества.
    :param overlap_frac: Допустимая доля перекрытия.
    :param limit: Остановиться, набрав limit шейплетов.
    """
    kept = []
    for shapelet in shapelets:
        if limit is not None and len(kept) >= limit:
            break
        if not any(_overlaps(shapelet, other, overlap_frac) for other in kept):
            kept.append(shapelet)
    return kept


def merge(n: int, current: Sequence[Shapelet], incoming: Sequence[Shapelet]) -> List[Shapelet]:
    """Сливает два списка и оставляет n лучших по качеству."""
    return sorted([*current, *incoming], key=Shapelet.sort_key)[:n]


class ShapeletDiscovery:
    """Поиск шейплетов: перебор кандидатов, профили расстояний, оценка по IG,
    удаление похожих и слияние в общий топ-n.

    :param config: Параметры поиска.
    :param distance: (опционально) Мера расстояния. Использовать только для кастомных классов.
    :param quality: (опционально) Мера качества. Использовать только для кастомных классов.
    :param n_jobs: Число потоков для оценки кандидатов.
    :param logger: (опционально) кастомный логгер.
    """

    def __init__(
        self,
        config: Optional[DiscoveryConfig] = None,
        distance: Optional[BaseDistance] = None,
        quality: Optional[BaseQualityMeasure] = None,
        n_jobs: int = 1,
        logger: Optional[logging.Logger] = None,
    ):
        self.config = config or DiscoveryConfig()
        self.distance = distance or DistanceManager(z_normalize=self.config.z_normalize)
        self.quality = quality or InformationGainQuality()
        self.n_jobs = n_jobs
        self.logger = logger or logging.getLogger(__name__)
        self.last_scoring_seconds = 0.0

    def distance_profile(self, candidate: Subsequence, learning_set: LearningSet) -> DistanceProfile:
        """Минимальные расстояния от кандидата до каждого окна в порядке набора."""
        if candidate.length > learning_set.window_len:
            self.logger.error(f"Кандидат длиной {candidate.length} длиннее окна {learning_set.window_len}")
            raise SeriesTooShortError(f"Кандидат длиной {candidate.length} длиннее окна {learning_set.window_len}")
        distances = self.distance.profile(candidate.values, learning_set.matrix())
        return DistanceProfile(window_ids=tuple(learning_set.window_ids), distances=distances)

    def _score_window(self, index: int, window_id: str, windows: np.ndarray, labels: List[Label]) -> List[Candidate]:
        window_len = windows.shape[1]
        scored: List[Candidate] = []
        for length in self.config.lengths(window_len):
            for offset in range(0, window_len - length + 1, self.config.offset_step):
                distances = self.distance.profile(windows[index, offset : offset + length], windows)
                threshold, quality = self.quality.evaluate(distances, labels)
                # Постоянный профиль (IG = 0) отбрасывается до фильтра по порогу
                if quality > 0.0:
                    scored.append(Candidate(index, window_id, offset, length, quality, threshold))
        self.logger.debug(f"Окно {window_id}: оценено кандидатов с IG > 0: {len(scored)}")
        return scored

    def score_candidates(self, learning_set: LearningSet) -> List[List[Candidate]]:
        """Оценивает всех кандидатов, по списку на каждое окно набора.

        Результат не зависит от числа потоков: списки собираются в порядке окон.
        """
        counts = learning_set.class_counts()
        if not counts[Label.EVENT] or not counts[Label.OTHER]:
            self.logger.error(f"Обучающий набор содержит один класс: {counts}")
            raise SingleClassError(f"Обучающий набор содержит один класс: {dict(counts)}")
        windows = learning_set.matrix()
        labels = learning_set.labels
        started = time.perf_counter()
        scored = Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(self._score_window)(i, window.window_id, windows, labels) for i, window in enumerate(learning_set)
        )
        self.logger.info(
            f"Оценено окон: {len(scored)}, кандидатов с IG > 0: {sum(map(len, scored))} "
            f"за {time.perf_counter() - started:.1f} с"
        )
        return scored

    def select(
        self, scored: Sequence[Sequence[Candidate]], learning_set: LearningSet, quality_threshold: Optional[float] = None
    ) -> List[Shapelet]:
        """Фильтр по порогу качества, группировка по качеству, удаление похожих и слияние в топ-n."""
        threshold = self.config.quality_threshold if quality_threshold is None else quality_threshold
        windows = learning_set.matrix()
        best: List[Shapelet] = []
        for candidates in scored:
            qualifying = sorted((c for c in candidates if c.quality >= threshold), key=Candidate.sort_key)
            # Из окна в общий топ-n могут попасть только первые n оставленных
            kept = remove_similar(qualifying, self.config.similarity_overlap_frac, limit=self.config.max_shapelets)
            best = merge(self.config.max_shapelets, best, [self._materialize(c, windows) for c in kept])
        return best

    @staticmethod
    def _materialize(candidate: Candidate, windows: np.ndarray) -> Shapelet:
        values = windows[candidate.window_index, candidate.offset : candidate.offset + candidate.length]
        return Shapelet(
            values=values.tolist(),
            length=candidate.length,
            quality=candidate.quality,
            split_threshold=candidate.split_threshold,
            source_window_id=candidate.window_id,
            source_offset=candidate.offset,
        )

    def discover(self, learning_set: LearningSet) -> List[Shapelet]:
        """Находит до max_shapelets шейплетов с качеством не ниже порога.

        :param learning_set: Размеченный набор окон с обоими классами.
        :return: Шейплеты по убыванию качества.
        """
        shapelets = self.select(self.score_candidates(learning_set), learning_set)
        self.logger.info(
            f"Найдено шейплетов: {len(shapelets)} (порог IG {self.config.quality_threshold}, n = {self.config.max_shapelets})"
        )
        return shapelets

    def ig_threshold_sweep(
        self,
        train: LearningSet,
        test: LearningSet,
        thresholds: Iterable[float],
        classifier: "BaseClassifier",
    ) -> List[SweepRow]:
        """Перебор порогов IG: поиск на train, обучение, точность на test.

        Оценка кандидатов от порога не зависит и выполняется один раз; её время
        входит в runtime_seconds каждой строки вместе со временем отбора,
        обучения и проверки. Время оценки отдельно сохраняется в
        last_scoring_seconds.

        :param train: Обучающий набор.
        :param test: Тестовый набор.
        :param thresholds: Пороги IG.
        :param classifier: Классификатор, переобучаемый для каждого порога.
        :return: Строки по возрастанию порога.
        """
        thresholds = sorted(thresholds)
        if not thresholds:
            self.logger.error("Пустой список порогов IG")
            raise UsageError("Пустой список порогов IG")
        started = time.perf_counter()
        scored = self.score_candidates(train)
        scoring_seconds = time.perf_counter() - started
        self.last_scoring_seconds = scoring_seconds
        rows: List[SweepRow] = []
        for threshold in thresholds:
            started = time.perf_counter()
            shapelets = self.select(scored, train, threshold)
            classifier.fit(shapelets, train)
            evaluation = classifier.evaluate(test)
            rows.append(
                SweepRow(
                    ig_threshold=threshold,
                    shapelet_count=len(shapelets),
                    test_accuracy=evaluation.accuracy or 0.0,
                    runtime_seconds=scoring_seconds + time.perf_counter() - started,
                )
            )
            self.logger.info(
                f"Порог IG {threshold}: шейплетов {len(shapelets)}, точность {rows[-1].test_accuracy:.3f}"
            )
        return rows


def discover(learning_set: LearningSet, config: DiscoveryConfig, n_jobs: int = 1) -> List[Shapelet]:
    """Поиск шейплетов с мерами по умолчанию."""
    return ShapeletDiscovery(config, n_jobs=n_jobs).discover(learning_set)
