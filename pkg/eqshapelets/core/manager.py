import logging
from typing import Optional, Union

import numpy as np

from .base import BaseDistance
from .kernels import min_distance_kernel, min_znorm_distance_kernel, profile_kernel, sq_euclidean_kernel, znorm_kernel
from ..exceptions import LengthMismatchError, SeriesTooShortError
from ..types import Subsequence, TimeSeries

logger = logging.getLogger(__name__)

ArrayLike = Union[Subsequence, TimeSeries, np.ndarray, list, tuple]


def as_array(values: ArrayLike) -> np.ndarray:
    """Приводит подпоследовательность, ряд или массив к непрерывному float64."""
    if isinstance(values, Subsequence):
        values = values.values
    elif isinstance(values, TimeSeries):
        values = values.samples
    return np.ascontiguousarray(values, dtype=np.float64)


class DistanceManager(BaseDistance):
    """Квадрат евклидова расстояния между подпоследовательностями.

    По умолчанию расстояние считается по сырым отсчётам. При z_normalize=True
    шейплет и каждое положение в ряду предварительно z-нормализуются.

    :param z_normalize: Включить z-нормализацию.
    """

    def __init__(self, z_normalize: bool = False):
        self.z_normalize = z_normalize

    def _prepare(self, shapelet: np.ndarray) -> np.ndarray:
        shapelet = as_array(shapelet)
        return znorm_kernel(shapelet) if self.z_normalize else shapelet

    def distance(self, x: ArrayLike, y: ArrayLike) -> float:
        x, y = as_array(x), as_array(y)
        if x.shape[0] != y.shape[0]:
            logger.error(f"Длины подпоследовательностей не совпадают: {x.shape[0]} != {y.shape[0]}")
            raise LengthMismatchError(f"Длины подпоследовательностей не совпадают: {x.shape[0]} != {y.shape[0]}")
        if self.z_normalize:
            x, y = znorm_kernel(x), znorm_kernel(y)
        return float(sq_euclidean_kernel(x, y))

    def min_distance(self, shapelet: ArrayLike, series: ArrayLike, best_so_far: Optional[float] = None) -> float:
        """Минимальное расстояние по всем (m - l) + 1 положениям шейплета в ряду.

        С best_so_far положения, чья частичная сумма превысила границу,
        прерываются досрочно. Если истинный минимум не больше границы, результат
        побитово совпадает с полным перебором, иначе возвращается inf.
        """
        shapelet, series = self._prepare(shapelet), as_array(series)
        if shapelet.shape[0] > series.shape[0]:
            logger.error(f"Шейплет длиной {shapelet.shape[0]} длиннее ряда длиной {series.shape[0]}")
            raise SeriesTooShortError(f"Шейплет длиной {shapelet.shape[0]} длиннее ряда длиной {series.shape[0]}")
        bound = np.inf if best_so_far is None else float(best_so_far)
        if self.z_normalize:
            return float(min_znorm_distance_kernel(shapelet, series, bound))
        return float(min_distance_kernel(shapelet, series, bound))

    def profile(self, shapelet: ArrayLike, windows: np.ndarray) -> np.ndarray:
        shapelet = self._prepare(shapelet)
        windows = np.ascontiguousarray(windows, dtype=np.float64)
        if shapelet.shape[0] > windows.shape[1]:
            logger.error(f"Шейплет длиной {shapelet.shape[0]} длиннее окна длиной {windows.shape[1]}")
            raise SeriesTooShortError(f"Шейплет длиной {shapelet.shape[0]} длиннее окна длиной {windows.shape[1]}")
        return profile_kernel(shapelet, windows, self.z_normalize)


_default_distance = DistanceManager()


def sq_euclidean(x: ArrayLike, y: ArrayLike) -> float:
    """Сумма квадратов разностей двух подпоследовательностей одинаковой длины."""
    return _default_distance.distance(x, y)


def min_subsequence_distance(shapelet: ArrayLike, series: ArrayLike, best_so_far: Optional[float] = None) -> float:
    """Расстояние от шейплета до его наилучшего положения в ряду."""
    return _default_distance.min_distance(shapelet, series, best_so_far)
