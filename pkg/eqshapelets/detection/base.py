from abc import ABC, abstractmethod
from typing import Sequence

from ..types import CatalogEvent, CatalogMatch, Detection


class BaseCatalogMatcher(ABC):
    """Абстрактный базовый класс сопоставления детекций с каталогом событий"""

    @abstractmethod
    def match(
        self, detections: Sequence[Detection], catalog: Sequence[CatalogEvent], tolerance_seconds: float
    ) -> CatalogMatch:
        """Сопоставляет детекции с событиями каталога

        :param detections: Детекции, отсортированные по началу окна
        :param catalog: События каталога в любом порядке
        :param tolerance_seconds: Допуск по времени

        :returns Размеченные детекции и пропущенные события
        """
