import logging
import math
from pathlib import Path
from typing import List, Literal, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ValidationError

from .base import BaseClassifier
from .tree import Tree, fit_tree
from ..config import ForestParams
from ..core import BaseDistance, DistanceManager
from ..exceptions import (
    DimensionMismatchError,
    MissingInputError,
    ModelFormatError,
    SeriesTooShortError,
    SingleClassError,
    UsageError,
)
from ..types import Evaluation, FeatureVector, Label, LearningSet, Prediction, Shapelet, TimeSeries

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1


class Forest(BaseModel):
    """Обученный случайный лес вместе с шейплетами, задающими признаки."""

    format: Literal["eqshapelets/model"] = "eqshapelets/model"
    version: int = MODEL_FORMAT_VERSION
    shapelets: List[Shapelet]
    trees: List[Tree]
    params: ForestParams
    z_normalize: bool = False
    window_len: Optional[int] = None
    sample_rate_hz: Optional[float] = None
    manifest: Optional[str] = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def rng_seed(self) -> int:
        return self.params.seed

    @property
    def decision_threshold(self) -> float:
        return self.params.decision_threshold


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """Независимый поток Philox для дерева, выводимый из seed и номера дерева."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 1, tree_index])))


def _fit_member(features: np.ndarray, events: np.ndarray, params: ForestParams, tree_index: int) -> Tree:
    rng = tree_rng(params.seed, tree_index)
    rows = rng.integers(0, features.shape[0], size=features.shape[0]) if params.bootstrap else np.arange(features.shape[0])
    return fit_tree(features[rows], events[rows], rng, params.max_depth, params.min_leaf)


def fit_forest(
    features: np.ndarray,
    labels: Sequence[Label],
    params: ForestParams,
    shapelets: Sequence[Shapelet] = (),
    n_jobs: int = 1,
) -> Forest:
    """Обучает n_trees деревьев на бутстреп-выборках.

    :param features: Матрица признаков (n, k).
    :param labels: Метки окон.
    :param params: Гиперпараметры леса.
    :param shapelets: Шейплеты, сохраняемые в модели.
    :param n_jobs: Число потоков.
    """
    events = np.array([label == Label.EVENT for label in labels], dtype=np.int64)
    if events.size == 0 or events.all() or not events.any():
        logger.error("Для обучения леса нужны окна обоих классов")
        raise SingleClassError("Для обучения леса нужны окна обоих классов")
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != events.size:
        logger.error(f"Матрица признаков {features.shape} не согласована с числом меток {events.size}")
        raise DimensionMismatchError(f"Матрица признаков {features.shape} не согласована с числом меток {events.size}")
    trees = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_fit_member)(features, events, params, index) for index in range(params.n_trees)
    )
    logger.info(f"Обучен лес: деревьев {len(trees)}, признаков {features.shape[1]}, окон {events.size}")
    return Forest(shapelets=list(shapelets), trees=trees, params=params)


def predict_proba(forest: Forest, feature) -> Prediction:
    """Средняя по деревьям доля окон Event в листе.

    Сумма считается через math.fsum, поэтому не зависит от порядка деревьев.
    """
    values = feature.values if isinstance(feature, FeatureVector) else np.asarray(feature, dtype=np.float64)
    if values.shape[0] != len(forest.shapelets):
        logger.error(f"Размерность признаков {values.shape[0]} не совпадает с числом шейплетов {len(forest.shapelets)}")
        raise DimensionMismatchError(
            f"Размерность признаков {values.shape[0]} не совпадает с числом шейплетов {len(forest.shapelets)}"
        )
    prob_event = math.fsum(tree.event_fraction(values) for tree in forest.trees) / forest.n_trees
    label = Label.EVENT if prob_event >= forest.decision_threshold else Label.OTHER
    return Prediction(label=label, prob_event=prob_event, prob_other=1.0 - prob_event)


def evaluate_predictions(truth: Sequence[Label], predicted: Sequence[Label]) -> Evaluation:
    tp = sum(t == Label.EVENT and p == Label.EVENT for t, p in zip(truth, predicted))
    fp = sum(t == Label.OTHER and p == Label.EVENT for t, p in zip(truth, predicted))
    fn = sum(t == Label.EVENT and p == Label.OTHER for t, p in zip(truth, predicted))
    tn = sum(t == Label.OTHER and p == Label.OTHER for t, p in zip(truth, predicted))
    return Evaluation.from_counts(tp, fp, fn, tn)


class ShapeletForest(BaseClassifier):
    """Случайный лес над преобразованием окон в расстояния до шейплетов.

    :param params: Гиперпараметры леса.
    :param z_normalize: Z-нормализация при вычислении расстояний.
    :param distance: (опционально) Мера расстояния. Использовать только для кастомных классов.
    :param n_jobs: Число потоков.
    :param logger: (опционально) кастомный логгер.
    """

    def __init__(
        self,
        params: Optional[ForestParams] = None,
        z_normalize: bool = False,
        distance: Optional[BaseDistance] = None,
        n_jobs: int = 1,
        logger: Optional[logging.Logger] = None,
    ):
        self.params = params or ForestParams()
        self.z_normalize = z_normalize
        self.distance = distance or DistanceManager(z_normalize=z_normalize)
        self.n_jobs = n_jobs
        self.logger = logger or logging.getLogger(__name__)
        self.forest: Optional[Forest] = None

    @classmethod
    def from_forest(cls, forest: Forest, n_jobs: int = 1) -> "ShapeletForest":
        classifier = cls(forest.params, z_normalize=forest.z_normalize, n_jobs=n_jobs)
        classifier.forest = forest
        return classifier

    @property
    def shapelets(self) -> List[Shapelet]:
        return self._require_forest().shapelets

    def _require_forest(self) -> Forest:
        if self.forest is None:
            self.logger.error("Классификатор не обучен")
            raise UsageError("Классификатор не обучен")
        return self.forest

    def transform(self, shapelets: Sequence[Shapelet], windows: np.ndarray) -> np.ndarray:
        """Матрица признаков (n, k): расстояние каждого окна до каждого шейплета."""
        windows = np.ascontiguousarray(np.atleast_2d(windows), dtype=np.float64)
        columns = [self.distance.profile(shapelet.array, windows) for shapelet in shapelets]
        if not columns:
            return np.zeros((windows.shape[0], 0))
        return np.column_stack(columns)

    def shapelet_transform(self, shapelets: Sequence[Shapelet], window: TimeSeries) -> FeatureVector:
        """values[i] - минимальное расстояние от i-го шейплета до окна."""
        for shapelet in shapelets:
            if shapelet.length > len(window):
                self.logger.error(f"Шейплет длиной {shapelet.length} длиннее окна длиной {len(window)}")
                raise SeriesTooShortError(f"Шейплет длиной {shapelet.length} длиннее окна длиной {len(window)}")
        return FeatureVector(values=self.transform(shapelets, window.samples)[0])

    def fit(self, shapelets: Sequence[Shapelet], learning_set: LearningSet) -> "ShapeletForest":
        features = self.transform(shapelets, learning_set.matrix())
        forest = fit_forest(features, learning_set.labels, self.params, shapelets, self.n_jobs)
        self.forest = forest.model_copy(
            update={
                "z_normalize": self.z_normalize,
                "window_len": learning_set.window_len,
                "sample_rate_hz": learning_set.sample_rate_hz,
            }
        )
        return self

    def predict_proba(self, feature: FeatureVector) -> Prediction:
        return predict_proba(self._require_forest(), feature)

    def predict_window(self, window: TimeSeries) -> Prediction:
        return self.predict_proba(self.shapelet_transform(self.shapelets, window))

    def predict_many(self, windows: np.ndarray) -> List[Prediction]:
        """Предсказания для матрицы окон (n, m)."""
        forest = self._require_forest()
        features = self.transform(forest.shapelets, windows)
        return [predict_proba(forest, row) for row in features]

    def evaluate(self, learning_set: LearningSet) -> Evaluation:
        predictions = self.predict_many(learning_set.matrix())
        evaluation = evaluate_predictions(learning_set.labels, [p.label for p in predictions])
        self.logger.info(
            f"Оценка на {len(learning_set)} окнах: точность {evaluation.accuracy}, "
            f"precision {evaluation.precision}, recall {evaluation.recall}"
        )
        return evaluation

    def save(self, path: Path, manifest: Optional[str] = None) -> None:
        forest = self._require_forest()
        if manifest is not None:
            forest = forest.model_copy(update={"manifest": manifest})
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(forest.model_dump_json(indent=2), encoding="utf-8")
        self.logger.info(f"Модель сохранена в {path}")

    @classmethod
    def load(cls, path: Path, n_jobs: int = 1) -> "ShapeletForest":
        path = Path(path)
        if not path.is_file():
            logger.error(f"Файл модели не найден: {path}")
            raise MissingInputError(f"Файл модели не найден: {path}")
        try:
            forest = Forest.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            logger.error(f"Некорректный файл модели {path}: {e}")
            raise ModelFormatError(f"Некорректный файл модели {path}: {e}") from e
        if forest.version != MODEL_FORMAT_VERSION:
            logger.error(f"Неподдерживаемая версия модели: {forest.version}")
            raise ModelFormatError(f"Неподдерживаемая версия модели: {forest.version}")
        return cls.from_forest(forest, n_jobs)


def shapelet_transform(shapelets: Sequence[Shapelet], window: TimeSeries, z_normalize: bool = False) -> FeatureVector:
    return ShapeletForest(z_normalize=z_normalize).shapelet_transform(shapelets, window)


def evaluate(forest: Forest, learning_set: LearningSet) -> Evaluation:
    return ShapeletForest.from_forest(forest).evaluate(learning_set)
