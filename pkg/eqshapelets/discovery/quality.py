import logging
import math
from collections import Counter
from typing import Iterable, Sequence, Tuple

import numpy as np

from .base import BaseQualityMeasure
from ..exceptions import UsageError
from ..types import DistanceProfile

logger = logging.getLogger(__name__)


def entropy_from_counts(counts: Iterable[int]) -> float:
    """Энтропия по числу объектов каждого класса, логарифм по основанию 2, 0*log0 = 0."""
    counts = sorted(c for c in counts if c > 0)
    total = sum(counts)
    result = 0.0
    for count in counts:
        p = count / total
        result -= p * math.log2(p)
    return result


def entropy(labels: Iterable) -> float:
    """Энтропия мультимножества меток.

    :param labels: Метки классов.
    :return: Энтропия, для двух классов в [0, 1].
    """
    counts = Counter(labels)
    if not counts:
        logger.error("Энтропия пустого набора меток не определена")
        raise UsageError("Энтропия пустого набора меток не определена")
    return entropy_from_counts(counts.values())


def split_gain(n_first: int, n_total: int, a_first: int, a_total: int) -> float:
    """Информационный выигрыш разбиения двухклассового набора.

    :param n_first: Число объектов первого класса во всём наборе.
    :param n_total: Размер набора.
    :param a_first: Число объектов первого класса в части T_a.
    :param a_total: Размер части T_a.
    """
    b_first, b_total = n_first - a_first, n_total - a_total
    whole = entropy_from_counts((n_first, n_total - n_first))
    part_a = entropy_from_counts((a_first, a_total - a_first)) if a_total else 0.0
    part_b = entropy_from_counts((b_first, b_total - b_first)) if b_total else 0.0
    gain = whole - (a_total / n_total * part_a + b_total / n_total * part_b)
    return min(1.0, max(0.0, gain))


def _encode(labels: Sequence) -> np.ndarray:
    """Кодирует метки как признак принадлежности первому (по сортировке) классу."""
    classes = sorted(set(labels))
    if len(classes) > 2:
        logger.error(f"Ожидалось не более двух классов, получено: {classes}")
        raise UsageError(f"Ожидалось не более двух классов, получено: {classes}")
    return np.array([label == classes[0] for label in labels], dtype=np.int64)


def _as_distances(profile) -> np.ndarray:
    if isinstance(profile, DistanceProfile):
        return profile.distances
    return np.asarray(profile, dtype=np.float64)


def information_gain(profile, labels: Sequence, threshold: float) -> float:
    """Выигрыш разбиения T_a = {d < threshold}, T_b = {d >= threshold}.

    :param profile: DistanceProfile или массив расстояний.
    :param labels: Метки, выровненные с профилем.
    :param threshold: Порог расстояния.
    """
    distances = _as_distances(profile)
    if distances.shape[0] != len(labels):
        raise UsageError(f"Профиль ({distances.shape[0]}) и метки ({len(labels)}) не выровнены")
    first = _encode(labels)
    near = distances < threshold
    return split_gain(int(first.sum()), int(first.size), int(first[near].sum()), int(near.sum()))


def best_split_encoded(distances: np.ndarray, first: np.ndarray) -> Tuple[float, float]:
    """Лучшее разбиение по закодированным меткам (1 - первый класс).

    Пороги - середины между соседними различными отсортированными расстояниями.
    При равном выигрыше выбирается больший зазор, затем меньший порог.
    """
    order = np.argsort(distances, kind="stable")
    ordered = distances[order]
    cumulative = np.cumsum(first[order])
    n_total = int(ordered.shape[0])
    n_first = int(cumulative[-1])
    best_key = None
    best = (float(ordered[0]), 0.0)
    for i in range(n_total - 1):
        low, high = ordered[i], ordered[i + 1]
        if not low < high:
            continue
        threshold = float((low + high) / 2)
        a_total = int(np.searchsorted(ordered, threshold, side="left"))
        a_first = int(cumulative[a_total - 1]) if a_total else 0
        gain = split_gain(n_first, n_total, a_first, a_total)
        key = (gain, float(high - low), -threshold)
        if best_key is None or key > best_key:
            best_key, best = key, (threshold, gain)
    return best


def best_split(profile, labels: Sequence) -> Tuple[float, float]:
    """Порог с максимальным информационным выигрышем.

    :param profile: DistanceProfile или массив расстояний.
    :param labels: Метки, выровненные с профилем.
    :return: Пара (порог, выигрыш). Если все расстояния равны - (это значение, 0).
    """
    distances = _as_distances(profile)
    if distances.shape[0] != len(labels):
        raise UsageError(f"Профиль ({distances.shape[0]}) и метки ({len(labels)}) не выровнены")
    return best_split_encoded(distances, _encode(labels))


class InformationGainQuality(BaseQualityMeasure):
    """Качество кандидата - информационный выигрыш лучшего разбиения"""

    def evaluate(self, distances: np.ndarray, labels: Sequence) -> Tuple[float, float]:
        return best_split(distances, labels)
