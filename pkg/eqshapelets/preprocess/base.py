from abc import ABC, abstractmethod
from typing import List, Sequence, Tuple

from ..config import PreprocessConfig
from ..types import GapReport, TimeSeries


class BasePreprocessor(ABC):
    """Абстрактный базовый класс подготовки непрерывной записи"""

    @abstractmethod
    def stitch(self, segments: Sequence[TimeSeries]) -> Tuple[TimeSeries, GapReport]:
        """Склеивает сегменты записи, опуская пропуски

        :param segments: Сегменты, отсортированные по времени начала

        :returns Склеенный ряд и отчёт о пропусках
        """

    @abstractmethod
    def condition(self, series: TimeSeries, config: PreprocessConfig) -> TimeSeries:
        """Фильтрует и прореживает один ряд"""

    @abstractmethod
    def run_pipeline(
        self, segments: Sequence[TimeSeries], config: PreprocessConfig
    ) -> Tuple[List[TimeSeries], GapReport]:
        """Полная цепочка: склейка, фильтрация, прореживание, нарезка на окна"""
