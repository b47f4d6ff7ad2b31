from abc import ABC, abstractmethod

import numpy as np


class BaseDistance(ABC):
    """Абстрактный базовый класс меры расстояния между подпоследовательностями"""

    @abstractmethod
    def distance(self, x: np.ndarray, y: np.ndarray) -> float:
        """Расстояние между двумя подпоследовательностями одинаковой длины

        :param x: Первая подпоследовательность
        :param y: Вторая подпоследовательность

        :returns Неотрицательное расстояние
        """

    @abstractmethod
    def min_distance(self, shapelet: np.ndarray, series: np.ndarray, best_so_far: float = np.inf) -> float:
        """Расстояние от шейплета до наиболее похожего участка ряда

        :param shapelet: Значения шейплета
        :param series: Отсчёты ряда
        :param best_so_far: Верхняя граница для раннего прерывания

        :returns Минимальное расстояние по всем положениям
        """

    @abstractmethod
    def profile(self, shapelet: np.ndarray, windows: np.ndarray) -> np.ndarray:
        """Минимальные расстояния от шейплета до каждой строки матрицы окон"""
