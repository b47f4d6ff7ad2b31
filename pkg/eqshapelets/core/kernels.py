"""Последовательные ядра расстояний на numba.

Суммирование идёт строго по порядку индексов, без fastmath, поэтому
последовательные и параллельные запуски совпадают побитово.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def sq_euclidean_kernel(x, y):
    total = 0.0
    for i in range(x.shape[0]):
        diff = x[i] - y[i]
        total += diff * diff
    return total


@njit(cache=True, nogil=True)
def min_distance_kernel(shapelet, series, best_so_far):
    length = shapelet.shape[0]
    best = best_so_far
    found = np.inf
    for start in range(series.shape[0] - length + 1):
        total = 0.0
        abandoned = False
        for i in range(length):
            diff = shapelet[i] - series[start + i]
            total += diff * diff
            if total > best:
                abandoned = True
                break
        if not abandoned:
            if total < found:
                found = total
            if total < best:
                best = total
    return found


@njit(cache=True, nogil=True)
def znorm_kernel(values):
    length = values.shape[0]
    total = 0.0
    for i in range(length):
        total += values[i]
    mean = total / length
    spread = 0.0
    for i in range(length):
        spread += (values[i] - mean) * (values[i] - mean)
    std = np.sqrt(spread / length)
    out = np.zeros(length)
    if std > 0.0:
        for i in range(length):
            out[i] = (values[i] - mean) / std
    return out


@njit(cache=True, nogil=True)
def min_znorm_distance_kernel(shapelet, series, best_so_far):
    # shapelet уже z-нормализован вызывающей стороной
    length = shapelet.shape[0]
    best = best_so_far
    found = np.inf
    for start in range(series.shape[0] - length + 1):
        window = znorm_kernel(series[start : start + length])
        total = 0.0
        abandoned = False
        for i in range(length):
            diff = shapelet[i] - window[i]
            total += diff * diff
            if total > best:
                abandoned = True
                break
        if not abandoned:
            if total < found:
                found = total
            if total < best:
                best = total
    return found


@njit(cache=True, nogil=True)
def profile_kernel(shapelet, windows, normalized):
    out = np.empty(windows.shape[0])
    for row in range(windows.shape[0]):
        if normalized:
            out[row] = min_znorm_distance_kernel(shapelet, windows[row], np.inf)
        else:
            out[row] = min_distance_kernel(shapelet, windows[row], np.inf)
    return out
