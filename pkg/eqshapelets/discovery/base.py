from abc import ABC, abstractmethod
from typing import Sequence, Tuple

import numpy as np


class BaseQualityMeasure(ABC):
    """Абстрактный базовый класс оценки качества кандидата в шейплеты"""

    @abstractmethod
    def evaluate(self, distances: np.ndarray, labels: Sequence) -> Tuple[float, float]:
        """Находит лучшее разбиение списка расстояний

        :param distances: Расстояния от кандидата до каждого окна
        :param labels: Метки окон в том же порядке

        :returns Пара (порог разбиения, качество)
        """
