from enum import StrEnum
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _readonly_array(value) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if array.ndim != 1:
        raise ValueError("Ожидался одномерный массив отсчётов")
    array.flags.writeable = False
    return array


class Label(StrEnum):
    EVENT = "Event"
    OTHER = "Other"


class TimeSeries(BaseModel):
    """Временной ряд: упорядоченные отсчёты с частотой дискретизации.

    samples (np.ndarray): Отсчёты, только для чтения.\n
    sample_rate_hz (float): Частота дискретизации, Гц.\n
    start_time (float): Время первого отсчёта, секунды от эпохи.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: np.ndarray
    sample_rate_hz: float = Field(gt=0)
    start_time: float = 0.0

    @field_validator("samples", mode="before")
    @classmethod
    def _validate_samples(cls, value) -> np.ndarray:
        array = _readonly_array(value)
        if array.size == 0:
            raise ValueError("Временной ряд не может быть пустым")
        if not np.all(np.isfinite(array)):
            raise ValueError("Временной ряд содержит NaN или Inf")
        return array

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def length(self) -> int:
        return len(self)

    @property
    def duration_seconds(self) -> float:
        return len(self) / self.sample_rate_hz

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration_seconds

    def derive(self, samples, sample_rate_hz: Optional[float] = None, start_time: Optional[float] = None) -> "TimeSeries":
        """Создаёт новый ряд с теми же метаданными, заменяя отсчёты."""
        return TimeSeries(
            samples=samples,
            sample_rate_hz=self.sample_rate_hz if sample_rate_hz is None else sample_rate_hz,
            start_time=self.start_time if start_time is None else start_time,
        )


class Subsequence(BaseModel):
    """Подпоследовательность из l соседних отсчётов ряда."""

    model_config = ConfigDict(frozen=True)

    source: TimeSeries
    offset: int = Field(ge=0)
    length: int = Field(ge=3)

    @model_validator(mode="after")
    def _check_bounds(self) -> "Subsequence":
        if self.offset + self.length > len(self.source):
            raise ValueError(
                f"Подпоследовательность [{self.offset}, {self.offset + self.length}) "
                f"выходит за пределы ряда длиной {len(self.source)}"
            )
        return self

    @property
    def values(self) -> np.ndarray:
        return self.source.samples[self.offset : self.offset + self.length]


class LabeledWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    window_id: str
    series: TimeSeries
    label: Label


class LearningSet(BaseModel):
    """Набор размеченных окон одинаковой длины и частоты дискретизации."""

    model_config = ConfigDict(frozen=True)

    windows: List[LabeledWindow]

    @model_validator(mode="after")
    def _check_uniform(self) -> "LearningSet":
        if not self.windows:
            raise ValueError("Обучающий набор не может быть пустым")
        first = self.windows[0].series
        for window in self.windows:
            if len(window.series) != len(first) or window.series.sample_rate_hz != first.sample_rate_hz:
                raise ValueError(
                    f"Окно {window.window_id} отличается по длине или частоте от окна {self.windows[0].window_id}"
                )
        ids = [window.window_id for window in self.windows]
        if len(set(ids)) != len(ids):
            raise ValueError("Идентификаторы окон должны быть уникальны")
        return self

    def __len__(self) -> int:
        return len(self.windows)

    def __iter__(self) -> Iterator[LabeledWindow]:
        return iter(self.windows)

    @property
    def window_len(self) -> int:
        return len(self.windows[0].series)

    @property
    def sample_rate_hz(self) -> float:
        return self.windows[0].series.sample_rate_hz

    @property
    def labels(self) -> List[Label]:
        return [window.label for window in self.windows]

    @property
    def window_ids(self) -> List[str]:
        return [window.window_id for window in self.windows]

    def matrix(self) -> np.ndarray:
        """Возвращает отсчёты всех окон в виде матрицы (n, window_len)."""
        return np.ascontiguousarray(np.stack([window.series.samples for window in self.windows]))

    def class_counts(self) -> Dict[Label, int]:
        counts = {Label.EVENT: 0, Label.OTHER: 0}
        for label in self.labels:
            counts[label] += 1
        return counts

    def subset(self, indices) -> "LearningSet":
        return LearningSet(windows=[self.windows[i] for i in indices])


class GapReport(BaseModel):
    """Отчёт о пропусках в склеенной записи.

    boundaries (List[Tuple[int, float]]): Для каждого сегмента индекс его первого
    отсчёта в склеенном ряду и истинное время этого отсчёта.
    """

    gap_count: int = Field(default=0, ge=0)
    longest_gap_seconds: float = Field(default=0.0, ge=0)
    total_dropped_seconds: float = Field(default=0.0, ge=0)
    boundaries: List[Tuple[int, float]] = Field(default_factory=list)

    def sample_times(self, indices, sample_rate_hz: float) -> np.ndarray:
        """Истинные времена отсчётов склеенного ряда с частотой sample_rate_hz."""
        indices = np.asarray(indices, dtype=np.int64)
        if not self.boundaries:
            return indices / sample_rate_hz
        offsets = np.array([index for index, _ in self.boundaries], dtype=np.int64)
        starts = np.array([start for _, start in self.boundaries], dtype=np.float64)
        owner = np.searchsorted(offsets, indices, side="right") - 1
        return starts[owner] + (indices - offsets[owner]) / sample_rate_hz


class Shapelet(BaseModel):
    """Найденный шейплет с качеством (IG), порогом разбиения и происхождением.

    values (List[float]): Материализованная копия подпоследовательности.\n
    quality (float): Информационный выигрыш, [0, 1].\n
    split_threshold (float): Порог расстояния, разделяющий окна.\n
    source_window_id (str): Окно-источник.\n
    source_offset (int): Смещение в окне-источнике.
    """

    model_config = ConfigDict(frozen=True)

    values: List[float]
    length: int = Field(ge=3)
    quality: float = Field(ge=0.0, le=1.0)
    split_threshold: float = Field(ge=0.0)
    source_window_id: str
    source_offset: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_length(self) -> "Shapelet":
        if len(self.values) != self.length:
            raise ValueError(f"Длина шейплета {self.length} не совпадает с числом значений {len(self.values)}")
        return self

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    @property
    def interval(self) -> Tuple[int, int]:
        return self.source_offset, self.source_offset + self.length

    def sort_key(self) -> tuple:
        """Порядок: качество по убыванию, затем короче, затем (окно, смещение)."""
        return -self.quality, self.length, self.source_window_id, self.source_offset


class DistanceProfile(BaseModel):
    """Список расстояний от кандидата до каждого окна набора."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    window_ids: Tuple[str, ...]
    distances: np.ndarray

    @field_validator("distances", mode="before")
    @classmethod
    def _validate_distances(cls, value) -> np.ndarray:
        array = _readonly_array(value)
        if np.any(array < 0):
            raise ValueError("Расстояния должны быть неотрицательны")
        return array

    @model_validator(mode="after")
    def _check_aligned(self) -> "DistanceProfile":
        if len(self.window_ids) != self.distances.shape[0]:
            raise ValueError("Число окон и число расстояний не совпадают")
        return self

    def __len__(self) -> int:
        return len(self.window_ids)

    def items(self) -> List[Tuple[str, float]]:
        return list(zip(self.window_ids, self.distances.tolist()))


class SweepRow(BaseModel):
    ig_threshold: float
    shapelet_count: int = Field(ge=0)
    test_accuracy: float = Field(ge=0.0, le=1.0)
    runtime_seconds: float = Field(ge=0.0)


class FeatureVector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _validate_values(cls, value) -> np.ndarray:
        array = _readonly_array(value)
        if np.any(array < 0):
            raise ValueError("Расстояния до шейплетов должны быть неотрицательны")
        return array

    def __len__(self) -> int:
        return int(self.values.shape[0])


class Prediction(BaseModel):
    label: Label
    prob_event: float = Field(ge=0.0, le=1.0)
    prob_other: float = Field(ge=0.0, le=1.0)


class Evaluation(BaseModel):
    """Матрица ошибок и метрики, Event - положительный класс.

    Неопределённые отношения (деление на ноль) возвращаются как None.
    """

    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0
    true_negatives: int = 0
    accuracy: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int, tn: int = 0) -> "Evaluation":
        total = tp + fp + fn + tn
        return cls(
            true_positives=tp,
            false_positives=fp,
            false_negatives=fn,
            true_negatives=tn,
            accuracy=(tp + tn) / total if total else None,
            precision=tp / (tp + fp) if tp + fp else None,
            recall=tp / (tp + fn) if tp + fn else None,
        )


class CatalogEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    origin_time: float
    magnitude: Optional[float] = None


class Detection(BaseModel):
    window_start: float
    window_end: float
    prob_event: float = Field(ge=0.0, le=1.0)
    label: Label = Label.EVENT
    matched_event_id: Optional[str] = None


class CatalogMatch(BaseModel):
    """Результат сопоставления детекций с каталогом.

    detections (List[Detection]): Детекции с заполненным matched_event_id.\n
    matches (Dict[str, int]): id события -> индекс детекции.\n
    missed (List[CatalogEvent]): События без детекции.
    """

    detections: List[Detection]
    matches: Dict[str, int] = Field(default_factory=dict)
    missed: List[CatalogEvent] = Field(default_factory=list)

    @property
    def matched_detection_indices(self) -> List[int]:
        return sorted(set(self.matches.values()))


class DetectionReport(BaseModel):
    total_detections: int = 0
    catalog_matched: int = 0
    new_events: int = 0
    missed_catalog_events: int = 0
    false_positives: Optional[int] = None
    false_negatives: Optional[int] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    review_count: int = 0
    runtime_seconds: float = 0.0
    bin_edges: List[float] = Field(default_factory=list)
    histogram: List[int] = Field(default_factory=list)
    manifest: Optional[str] = None


class InjectedEvent(BaseModel):
    time: float
    amplitude: float
    duration: float
    window_id: Optional[str] = None


class GroundTruth(BaseModel):
    events: List[InjectedEvent] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)

    def as_catalog(self) -> List[CatalogEvent]:
        return [
            CatalogEvent(id=f"inj-{i:05d}", origin_time=event.time, magnitude=None)
            for i, event in enumerate(self.events)
        ]


class RunManifest(BaseModel):
    """Манифест запуска: всё, что нужно для воспроизведения артефактов."""

    subcommand: str
    tool_version: str
    config: dict = Field(default_factory=dict)
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)
    seeds: Dict[str, int] = Field(default_factory=dict)
    threads: Optional[int] = None
    default_sample_rate_hz: Optional[float] = None
