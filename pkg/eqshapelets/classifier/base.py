from abc import ABC, abstractmethod
from typing import Sequence

from ..types import Evaluation, FeatureVector, LearningSet, Prediction, Shapelet, TimeSeries


class BaseClassifier(ABC):
    """Абстрактный базовый класс классификатора окон по признакам-шейплетам"""

    @abstractmethod
    def fit(self, shapelets: Sequence[Shapelet], learning_set: LearningSet) -> "BaseClassifier":
        """Обучает классификатор на расстояниях окон до шейплетов

        :param shapelets: Шейплеты, задающие пространство признаков
        :param learning_set: Размеченные окна
        """

    @abstractmethod
    def predict_proba(self, feature: FeatureVector) -> Prediction:
        """Вероятности классов для одного вектора признаков"""

    @abstractmethod
    def predict_window(self, window: TimeSeries) -> Prediction:
        """Вероятности классов для одного окна"""

    @abstractmethod
    def evaluate(self, learning_set: LearningSet) -> Evaluation:
        """Точность, precision и recall на размеченных окнах"""
