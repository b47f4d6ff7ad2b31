import logging
from typing import Iterator, List, Tuple

import numpy as np

from ..exceptions import SeriesTooShortError, UsageError
from ..types import Label, LearningSet, Subsequence, TimeSeries

logger = logging.getLogger(__name__)


def enumerate_subsequences(series: TimeSeries, length: int, step: int = 1) -> Iterator[Subsequence]:
    """Лениво перечисляет (m - l) + 1 подпоследовательностей длины l по порядку смещений.

    :param series: Исходный ряд длиной m.
    :param length: Длина подпоследовательности, 3 <= l <= m.
    :param step: Шаг смещения.
    """
    if not 3 <= length <= len(series):
        logger.error(f"Длина подпоследовательности {length} вне диапазона [3, {len(series)}]")
        raise SeriesTooShortError(f"Длина подпоследовательности {length} вне диапазона [3, {len(series)}]")
    if step < 1:
        raise UsageError(f"Шаг смещения должен быть положительным: {step}")
    for offset in range(0, len(series) - length + 1, step):
        yield Subsequence(source=series, offset=offset, length=length)


def segment(record: TimeSeries, window_len: int) -> Tuple[List[TimeSeries], int]:
    """Нарезает запись на неперекрывающиеся окна по window_len отсчётов.

    Неполный хвост отбрасывается.

    :return: Список окон и число отброшенных отсчётов.
    """
    if window_len < 1:
        logger.error(f"Длина окна должна быть положительной: {window_len}")
        raise UsageError(f"Длина окна должна быть положительной: {window_len}")
    count = len(record) // window_len
    dropped = len(record) - count * window_len
    windows = [
        record.derive(
            record.samples[i * window_len : (i + 1) * window_len],
            start_time=record.start_time + i * window_len / record.sample_rate_hz,
        )
        for i in range(count)
    ]
    if dropped:
        logger.debug(f"Отброшен неполный хвост записи: {dropped} отсчётов")
    return windows, dropped


def balance(learning_set: LearningSet, seed: int = 0) -> LearningSet:
    """Оставляет все окна Event и столько же случайных окон Other.

    Выборка детерминирована seed, исходный порядок окон сохраняется.
    """
    events = [i for i, label in enumerate(learning_set.labels) if label == Label.EVENT]
    others = [i for i, label in enumerate(learning_set.labels) if label == Label.OTHER]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 3])))
    keep = min(len(events), len(others))
    chosen = sorted(rng.choice(others, size=keep, replace=False).tolist()) if keep else []
    logger.info(f"Балансировка набора: {len(events)} Event, {keep} из {len(others)} Other")
    return learning_set.subset(sorted(events + chosen))


def train_test_split(
    learning_set: LearningSet, train_fraction: float = 0.6, seed: int = 0
) -> Tuple[LearningSet, LearningSet]:
    """Стратифицированное детерминированное разбиение на обучающую и тестовую части.

    :param learning_set: Исходный набор.
    :param train_fraction: Доля обучающей части в каждом классе.
    :param seed: Зерно генератора.
    :return: Пара (train, test).
    """
    if not 0 < train_fraction < 1:
        raise UsageError(f"train_fraction должен быть в (0, 1): {train_fraction}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 4])))
    train: List[int] = []
    test: List[int] = []
    for label in (Label.EVENT, Label.OTHER):
        indices = np.array([i for i, value in enumerate(learning_set.labels) if value == label], dtype=np.int64)
        rng.shuffle(indices)
        cut = int(round(train_fraction * indices.size))
        train.extend(indices[:cut].tolist())
        test.extend(indices[cut:].tolist())
    if not train or not test:
        raise UsageError("Разбиение дало пустую обучающую или тестовую часть")
    return learning_set.subset(sorted(train)), learning_set.subset(sorted(test))
