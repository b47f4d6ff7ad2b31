"""Синтетические сейсмограммы с известными событиями.

Все случайные величины берутся из счётчикового генератора Philox (numpy),
потоки выводятся из seed через SeedSequence([seed, поток, номер]):
поток 0 - времена и амплитуды событий записи, 2 - шум записи по часовым
блокам, 5 - окна обучающего набора. Поэтому результат одинаков на всех
платформах и не зависит от порядка генерации блоков.
"""
import logging
import math
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from ..config import SynthConfig
from ..exceptions import MissingInputError, UsageError, WaveformFormatError
from ..types import GroundTruth, InjectedEvent, Label, LabeledWindow, LearningSet, TimeSeries

logger = logging.getLogger(__name__)

_CHUNK_SECONDS = 3600.0
_EVENT_STREAM = 0
_NOISE_STREAM = 2
_WINDOW_STREAM = 5


def _stream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


def wavelet(relative_times: np.ndarray, amplitude: float, config: SynthConfig) -> np.ndarray:
    """Затухающая синусоида с резким вступлением; ноль вне [0, wavelet_duration_seconds)."""
    relative_times = np.asarray(relative_times, dtype=np.float64)
    inside = (relative_times >= 0) & (relative_times < config.wavelet_duration_seconds)
    envelope = np.exp(-relative_times / config.wavelet_decay_seconds)
    carrier = np.sin(2 * np.pi * config.wavelet_dominant_hz * relative_times)
    return np.where(inside, amplitude * envelope * carrier, 0.0)


def _inject(samples: np.ndarray, rate: float, onset: float, amplitude: float, config: SynthConfig) -> None:
    first = max(0, math.ceil(onset * rate))
    last = min(samples.shape[0], math.ceil((onset + config.wavelet_duration_seconds) * rate))
    if first >= last:
        return
    relative = np.arange(first, last) / rate - onset
    samples[first:last] += wavelet(relative, amplitude, config)


class SynthManager:
    """Генератор синтетических записей и обучающих наборов.

    :param config: Параметры генерации.
    :param logger: (опционально) кастомный логгер.
    """

    def __init__(self, config: Optional[SynthConfig] = None, logger: Optional[logging.Logger] = None):
        self.config = config or SynthConfig()
        self.logger = logger or logging.getLogger(__name__)

    def _event_times(self, rng: np.random.Generator) -> List[float]:
        config = self.config
        if config.event_times is not None:
            times = sorted(config.event_times)
            outside = [t for t in times if not 0 <= t < config.duration_seconds]
            if outside:
                self.logger.error(f"Времена событий вне записи: {outside}")
                raise UsageError(f"Времена событий вне записи: {outside}")
            return times
        span = max(0.0, config.duration_seconds - config.wavelet_duration_seconds)
        count = int(rng.poisson(config.event_rate_per_hour * config.duration_seconds / 3600.0))
        return sorted(rng.uniform(0.0, span, size=count).tolist())

    def _noise(self, size: int, stream: Tuple[int, ...]) -> np.ndarray:
        return _stream(self.config.seed, *stream).normal(0.0, self.config.noise_sigma, size=size)

    def gen_record(self) -> Tuple[TimeSeries, GroundTruth]:
        """Непрерывная запись: гауссов шум плюс затухающие пакеты в моменты событий.

        :return: Запись и список внедрённых событий (абсолютные времена).
        """
        config = self.config
        rate = config.sample_rate_hz
        total = int(round(config.duration_seconds * rate))
        chunk = int(round(_CHUNK_SECONDS * rate))
        samples = np.empty(total)
        for index, start in enumerate(range(0, total, chunk)):
            stop = min(total, start + chunk)
            samples[start:stop] = self._noise(stop - start, (_NOISE_STREAM, index))
        events_rng = _stream(config.seed, _EVENT_STREAM)
        low, high = config.event_amplitude_range
        truth = GroundTruth()
        for onset in self._event_times(events_rng):
            amplitude = float(events_rng.uniform(low, high))
            _inject(samples, rate, onset, amplitude, config)
            truth.events.append(
                InjectedEvent(
                    time=config.start_time + onset, amplitude=amplitude, duration=config.wavelet_duration_seconds
                )
            )
        self.logger.info(f"Сгенерирована запись: {total} отсчётов, событий {len(truth)}")
        return TimeSeries(samples=samples, sample_rate_hz=rate, start_time=config.start_time), truth

    def gen_learning_set(
        self, n_event_windows: int, n_other_windows: int, window_seconds: float = 300.0
    ) -> Tuple[LearningSet, GroundTruth]:
        """Размеченные окна: в каждом окне Event ровно одно событие, окна Other - чистый шум.

        :param n_event_windows: Число окон с событием.
        :param n_other_windows: Число окон без события.
        :param window_seconds: Длительность окна, секунды.
        """
        config = self.config
        if n_event_windows < 0 or n_other_windows < 0 or n_event_windows + n_other_windows < 1:
            self.logger.error(f"Некорректное число окон: {n_event_windows}, {n_other_windows}")
            raise UsageError(f"Некорректное число окон: {n_event_windows}, {n_other_windows}")
        margin = 0.1 * window_seconds
        latest = window_seconds - config.wavelet_duration_seconds - margin
        if latest < margin:
            self.logger.error(f"Окно {window_seconds} с слишком короткое для события")
            raise UsageError(f"Окно {window_seconds} с слишком короткое для события")
        rate = config.sample_rate_hz
        size = int(round(window_seconds * rate))
        low, high = config.event_amplitude_range
        windows: List[LabeledWindow] = []
        truth = GroundTruth()
        labels = [Label.EVENT] * n_event_windows + [Label.OTHER] * n_other_windows
        for index, label in enumerate(labels):
            rng = _stream(config.seed, _WINDOW_STREAM, index)
            samples = rng.normal(0.0, config.noise_sigma, size=size)
            start_time = config.start_time + index * window_seconds
            ordinal = index if label == Label.EVENT else index - n_event_windows
            window_id = f"{label.value.lower()}-{ordinal:04d}"
            if label == Label.EVENT:
                onset = float(rng.uniform(margin, latest))
                amplitude = float(rng.uniform(low, high))
                _inject(samples, rate, onset, amplitude, config)
                truth.events.append(
                    InjectedEvent(
                        time=start_time + onset,
                        amplitude=amplitude,
                        duration=config.wavelet_duration_seconds,
                        window_id=window_id,
                    )
                )
            series = TimeSeries(samples=samples, sample_rate_hz=rate, start_time=start_time)
            windows.append(LabeledWindow(window_id=window_id, series=series, label=label))
        self.logger.info(f"Сгенерирован обучающий набор: {n_event_windows} Event, {n_other_windows} Other")
        return LearningSet(windows=windows), truth


def gen_record(config: SynthConfig) -> Tuple[TimeSeries, GroundTruth]:
    return SynthManager(config).gen_record()


def gen_learning_set(
    config: SynthConfig, n_event_windows: int, n_other_windows: int, window_seconds: float = 300.0
) -> Tuple[LearningSet, GroundTruth]:
    return SynthManager(config).gen_learning_set(n_event_windows, n_other_windows, window_seconds)


def write_truth(truth: GroundTruth, path: Path) -> None:
    frame = pd.DataFrame(
        [event.model_dump() for event in truth.events], columns=["time", "amplitude", "duration", "window_id"]
    )
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.debug(f"Записано событий: {len(truth)} в {path}")


def read_truth(path: Path) -> GroundTruth:
    path = Path(path)
    if not path.is_file():
        logger.error(f"Файл событий не найден: {path}")
        raise MissingInputError(f"Файл событий не найден: {path}")
    try:
        frame = pd.read_csv(path, dtype={"window_id": "string"})
        events = [
            InjectedEvent(
                time=float(row.time),
                amplitude=float(row.amplitude),
                duration=float(row.duration),
                window_id=None if pd.isna(row.window_id) else str(row.window_id),
            )
            for row in frame.itertuples(index=False)
        ]
    except (ValueError, KeyError, AttributeError) as e:
        logger.error(f"Некорректный файл событий {path}: {e}")
        raise WaveformFormatError(f"Некорректный файл событий {path}: {e}") from e
    return GroundTruth(events=events)
