from .base import BaseDistance
from .manager import DistanceManager, min_subsequence_distance, sq_euclidean
from .series import balance, enumerate_subsequences, segment, train_test_split

__all__ = [
    "BaseDistance",
    "DistanceManager",
    "balance",
    "enumerate_subsequences",
    "min_subsequence_distance",
    "segment",
    "sq_euclidean",
    "train_test_split",
]
