from typing import Sequence

import numpy as np

from eqshapelets.types import Label, LabeledWindow, LearningSet, TimeSeries


def make_set(matrix, labels: Sequence[Label], sample_rate_hz: float = 20.0) -> LearningSet:
    """Набор из матрицы окон (n, m) и меток."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    windows = [
        LabeledWindow(
            window_id=f"w-{i:04d}",
            series=TimeSeries(samples=row, sample_rate_hz=sample_rate_hz, start_time=i * row.shape[0] / sample_rate_hz),
            label=label,
        )
        for i, (row, label) in enumerate(zip(matrix, labels))
    ]
    return LearningSet(windows=windows)
