import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import butter, sosfiltfilt

from .base import BasePreprocessor
from ..config import PreprocessConfig
from ..core.series import segment
from ..exceptions import (
    DecimationFactorError,
    NyquistError,
    OverlappingSegmentsError,
    SampleRateMismatchError,
    UsageError,
)
from ..types import GapReport, LabeledWindow, LearningSet, TimeSeries

logger = logging.getLogger(__name__)

# Допуск на дрожание меток времени, в долях периода дискретизации
_JITTER = 1e-6


class PreprocessManager(BasePreprocessor):
    """Подготовка записи: склейка сегментов, полосовой фильтр, прореживание, окна.

    :param logger: (опционально) кастомный логгер.
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    def stitch(self, segments: Sequence[TimeSeries]) -> Tuple[TimeSeries, GapReport]:
        """Склеивает сегменты, опуская пропуски между ними.

        Пропуском считается любой разрыв не короче одного периода дискретизации.

        :param segments: Сегменты, отсортированные по времени начала, с одной частотой.
        :return: Склеенный ряд и отчёт о пропусках.
        """
        if not segments:
            self.logger.error("Пустой список сегментов")
            raise UsageError("Пустой список сегментов")
        rate = segments[0].sample_rate_hz
        period = 1.0 / rate
        gaps: List[float] = []
        for previous, current in zip(segments, segments[1:]):
            if current.sample_rate_hz != rate:
                self.logger.error(f"Сегменты с разной частотой: {rate} и {current.sample_rate_hz} Гц")
                raise SampleRateMismatchError(f"Сегменты с разной частотой: {rate} и {current.sample_rate_hz} Гц")
            gap = current.start_time - previous.end_time
            if gap < -_JITTER * period:
                self.logger.error(
                    f"Сегменты перекрываются: {previous.end_time} > {current.start_time}"
                )
                raise OverlappingSegmentsError(
                    f"Сегменты перекрываются: {previous.end_time} > {current.start_time}"
                )
            if gap >= period * (1 - _JITTER):
                gaps.append(gap)
        stitched = segments[0].derive(np.concatenate([s.samples for s in segments]))
        offsets = np.concatenate([[0], np.cumsum([len(s) for s in segments[:-1]])]).astype(int)
        report = GapReport(
            gap_count=len(gaps),
            longest_gap_seconds=max(gaps, default=0.0),
            total_dropped_seconds=float(sum(gaps)),
            boundaries=[(int(offset), s.start_time) for offset, s in zip(offsets, segments)],
        )
        self.logger.info(
            f"Склеено {len(segments)} сегментов: пропусков {report.gap_count}, "
            f"самый длинный {report.longest_gap_seconds:.1f} с"
        )
        return stitched, report

    def bandpass(self, series: TimeSeries, config: PreprocessConfig) -> TimeSeries:
        """Полосовой фильтр Баттерворта нулевой фазы (прямой и обратный проход).

        Порядок config.filter_order относится к полосовому фильтру целиком.
        """
        nyquist = series.sample_rate_hz / 2
        if config.band_high_hz >= nyquist:
            self.logger.error(
                f"Верхняя граница полосы {config.band_high_hz} Гц не ниже частоты Найквиста {nyquist} Гц"
            )
            raise NyquistError(
                f"Верхняя граница полосы {config.band_high_hz} Гц не ниже частоты Найквиста {nyquist} Гц"
            )
        sos = butter(
            config.filter_order // 2,
            [config.band_low_hz, config.band_high_hz],
            btype="bandpass",
            fs=series.sample_rate_hz,
            output="sos",
        )
        padlen = min(3 * (2 * sos.shape[0] + 1), len(series) - 1)
        filtered = sosfiltfilt(sos, series.samples, padlen=padlen)
        return series.derive(filtered)

    def decimate(self, series: TimeSeries, target_hz: float) -> TimeSeries:
        """Прореживание: оставляет каждый k-й отсчёт, k = частота / target_hz.

        Сигнал должен быть заранее ограничен по полосе ниже target_hz / 2.
        """
        ratio = series.sample_rate_hz / target_hz
        factor = int(round(ratio))
        if factor < 1 or abs(ratio - factor) > 1e-9 * ratio:
            self.logger.error(f"Нецелый коэффициент прореживания: {series.sample_rate_hz} / {target_hz}")
            raise DecimationFactorError(f"Нецелый коэффициент прореживания: {series.sample_rate_hz} / {target_hz}")
        if factor == 1:
            return series
        return series.derive(series.samples[::factor], sample_rate_hz=target_hz)

    def condition(self, series: TimeSeries, config: PreprocessConfig) -> TimeSeries:
        return self.decimate(self.bandpass(series, config), config.decimate_to_hz)

    def run_pipeline(
        self, segments: Sequence[TimeSeries], config: PreprocessConfig
    ) -> Tuple[List[TimeSeries], GapReport]:
        """Склейка -> фильтр -> прореживание -> окна по round(window_seconds * decimate_to_hz) отсчётов.

        Время начала окна - истинное время его первого отсчёта с учётом пропусков.
        Окно, захватывающее пропуск, сохраняется; его window_end равен началу
        плюс длительность отсчётов и не включает пропущенное время.

        :param segments: Сегменты непрерывной записи.
        :param config: Параметры подготовки.
        :return: Окна и отчёт о пропусках.
        """
        stitched, report = self.stitch(segments)
        conditioned = self.condition(stitched, config)
        windows, dropped = segment(conditioned, config.window_samples)
        factor = int(round(stitched.sample_rate_hz / conditioned.sample_rate_hz))
        firsts = np.arange(len(windows), dtype=np.int64) * config.window_samples * factor
        lasts = firsts + (config.window_samples - 1) * factor
        starts = report.sample_times(firsts, stitched.sample_rate_hz)
        windows = [window.derive(window.samples, start_time=float(start)) for window, start in zip(windows, starts)]
        period = 1.0 / stitched.sample_rate_hz
        elided = report.sample_times(lasts, stitched.sample_rate_hz) - starts - (lasts - firsts) * period
        straddling = int(np.count_nonzero(elided >= period * (1 - _JITTER)))
        if straddling:
            self.logger.warning(f"Окон, захватывающих пропуск в записи: {straddling}")
        self.logger.info(
            f"Подготовлено окон: {len(windows)} по {config.window_samples} отсчётов, отброшено {dropped}"
        )
        return windows, report

    def condition_learning_set(self, learning_set: LearningSet, config: PreprocessConfig) -> LearningSet:
        """Фильтрует и прореживает каждое окно набора, сохраняя id и метки."""
        windows = [
            LabeledWindow(window_id=w.window_id, series=self.condition(w.series, config), label=w.label)
            for w in learning_set
        ]
        return LearningSet(windows=windows)
