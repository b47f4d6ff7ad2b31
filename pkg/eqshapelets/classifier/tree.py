"""Дерево решений CART по индексу Джини."""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

logger = logging.getLogger(__name__)

LEAF = -1


class Tree(BaseModel):
    """Бинарное дерево в виде параллельных списков узлов.

    feature (List[int]): Индекс признака узла, -1 для листа.\n
    threshold (List[float]): Порог узла; x < threshold - левая ветвь.\n
    left, right (List[int]): Индексы потомков, -1 для листа.\n
    counts (List[Tuple[int, int]]): Число окон (Event, Other) в узле.
    """

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    counts: List[Tuple[int, int]] = []

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        def _depth(node: int) -> int:
            if self.feature[node] == LEAF:
                return 0
            return 1 + max(_depth(self.left[node]), _depth(self.right[node]))

        return _depth(0)

    def leaf_for(self, values: np.ndarray) -> int:
        node = 0
        while self.feature[node] != LEAF:
            node = self.left[node] if values[self.feature[node]] < self.threshold[node] else self.right[node]
        return node

    def event_fraction(self, values: np.ndarray) -> float:
        events, others = self.counts[self.leaf_for(values)]
        return events / (events + others)


def gini(events: int, total: int) -> float:
    if not total:
        return 0.0
    p = events / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def draw_features(rng: np.random.Generator, n_features: int) -> np.ndarray:
    """Случайное подмножество из floor(sqrt(k)) признаков, по возрастанию индекса."""
    size = max(1, math.isqrt(n_features))
    return np.sort(rng.choice(n_features, size=size, replace=False))


def _best_split(
    values: np.ndarray, events: np.ndarray, min_leaf: int
) -> Optional[Tuple[float, float]]:
    """Лучший порог одного признака: (уменьшение Джини, порог) или None."""
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    cumulative = np.cumsum(events[order])
    total = ordered.shape[0]
    total_events = int(cumulative[-1])
    parent = gini(total_events, total)
    best: Optional[Tuple[float, float]] = None
    for i in range(min_leaf - 1, total - min_leaf):
        if not ordered[i] < ordered[i + 1]:
            continue
        n_left = i + 1
        e_left = int(cumulative[i])
        n_right = total - n_left
        decrease = parent - (n_left / total * gini(e_left, n_left) + n_right / total * gini(total_events - e_left, n_right))
        if decrease > 0 and (best is None or decrease > best[0]):
            best = (decrease, float((ordered[i] + ordered[i + 1]) / 2))
    return best


def fit_tree(
    features: np.ndarray,
    events: np.ndarray,
    rng: np.random.Generator,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
) -> Tree:
    """Строит дерево CART.

    В каждом узле выбирается пара (признак, порог) с наибольшим уменьшением
    индекса Джини среди floor(sqrt(k)) случайных признаков. Пороги - середины
    между соседними различными значениями. Узел становится листом, если он
    чист, достигнута глубина max_depth или разбиение оставило бы в потомке
    меньше min_leaf окон.

    :param features: Матрица признаков (n, k).
    :param events: Признак класса Event для каждой строки.
    :param rng: Генератор, определяющий выбор признаков.
    :param max_depth: Ограничение глубины, None - без ограничения.
    :param min_leaf: Минимальное число окон в листе.
    """
    features = np.asarray(features, dtype=np.float64)
    events = np.asarray(events, dtype=np.int64)
    tree = Tree()

    def _add(rows: np.ndarray) -> int:
        node = tree.node_count
        n_events = int(events[rows].sum())
        tree.feature.append(LEAF)
        tree.threshold.append(0.0)
        tree.left.append(LEAF)
        tree.right.append(LEAF)
        tree.counts.append((n_events, int(rows.shape[0]) - n_events))
        return node

    def _grow(rows: np.ndarray, depth: int) -> int:
        node = _add(rows)
        n_events, n_others = tree.counts[node]
        n_features = features.shape[1]
        if not n_events or not n_others or n_features == 0:
            return node
        if (max_depth is not None and depth >= max_depth) or rows.shape[0] < 2 * min_leaf:
            return node
        best = None
        for feature in draw_features(rng, n_features):
            split = _best_split(features[rows, feature], events[rows], min_leaf)
            if split is not None and (best is None or split[0] > best[0]):
                best = (split[0], split[1], int(feature))
        if best is None:
            return node
        _, threshold, feature = best
        near = features[rows, feature] < threshold
        if near.all() or not near.any():
            return node
        tree.feature[node] = feature
        tree.threshold[node] = threshold
        tree.left[node] = _grow(rows[near], depth + 1)
        tree.right[node] = _grow(rows[~near], depth + 1)
        return node

    _grow(np.arange(features.shape[0]), 0)
    logger.debug(f"Построено дерево: узлов {tree.node_count}")
    return tree
