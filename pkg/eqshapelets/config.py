import logging
import tomllib
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .exceptions import ConfigError, MissingInputError

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_THRESHOLDS = [round(0.05 * i, 2) for i in range(1, 11)]
DEFAULT_HISTOGRAM_EDGES = [0.50, 0.60, 0.70, 0.80, 0.90, 0.96, 1.00]


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class PreprocessConfig(_Section):
    """Параметры подготовки записи: полосовой фильтр, прореживание, окна.

    :param band_low_hz: Нижняя граница полосы, Гц.
    :param band_high_hz: Верхняя граница полосы, Гц.
    :param filter_order: Порядок фильтра Баттерворта (чётный).
    :param decimate_to_hz: Частота после прореживания, Гц.
    :param window_seconds: Длительность окна, секунды.
    """

    band_low_hz: float = 4.0
    band_high_hz: float = 10.0
    filter_order: int = 4
    decimate_to_hz: float = 20.0
    window_seconds: float = 300.0

    @model_validator(mode="after")
    def _check_band(self) -> "PreprocessConfig":
        if not 0 < self.band_low_hz < self.band_high_hz:
            raise ValueError("Требуется 0 < band_low_hz < band_high_hz")
        # Верхняя граница совпадает с Найквистом после прореживания (10 Гц при 20 Гц)
        if self.band_high_hz > self.decimate_to_hz / 2:
            raise ValueError("band_high_hz не может превышать decimate_to_hz / 2")
        if self.filter_order < 2 or self.filter_order % 2:
            raise ValueError("filter_order должен быть чётным и не меньше 2")
        if self.window_seconds <= 0:
            raise ValueError("window_seconds должен быть положительным")
        return self

    @property
    def window_samples(self) -> int:
        return int(round(self.window_seconds * self.decimate_to_hz))


class DiscoveryConfig(_Section):
    """Параметры поиска шейплетов.

    :param min_len: Минимальная длина кандидата (не меньше 3).
    :param max_len: Максимальная длина кандидата. None - длина окна.
    :param max_shapelets: Сколько шейплетов хранить (n).
    :param quality_threshold: Порог информационного выигрыша.
    :param length_step: Шаг перебора длин.
    :param offset_step: Шаг перебора смещений.
    :param similarity_overlap_frac: Доля перекрытия, при которой кандидаты считаются похожими.
    :param z_normalize: Z-нормализация подпоследовательностей перед сравнением.
    """

    min_len: int = Field(default=3, ge=3)
    max_len: Optional[int] = None
    max_shapelets: int = Field(default=8, ge=1)
    quality_threshold: float = Field(default=0.45, ge=0.0)
    length_step: int = Field(default=1, ge=1)
    offset_step: int = Field(default=1, ge=1)
    similarity_overlap_frac: float = Field(default=0.25, gt=0.0, le=1.0)
    z_normalize: bool = False

    @model_validator(mode="after")
    def _check_lengths(self) -> "DiscoveryConfig":
        if self.max_len is not None and self.max_len < self.min_len:
            raise ValueError("max_len не может быть меньше min_len")
        return self

    def lengths(self, window_len: int) -> range:
        upper = window_len if self.max_len is None else min(self.max_len, window_len)
        return range(self.min_len, upper + 1, self.length_step)


class ForestParams(_Section):
    n_trees: int = Field(default=100, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    min_leaf: int = Field(default=1, ge=1)
    bootstrap: bool = True
    seed: int = 0
    decision_threshold: float = Field(default=0.5, gt=0.0, lt=1.0)


class SynthConfig(_Section):
    """Параметры синтетической записи.

    Времена событий задаются явно (event_times, секунды от начала записи)
    либо интенсивностью event_rate_per_hour.
    """

    duration_seconds: float = Field(default=3600.0, gt=0)
    sample_rate_hz: float = Field(default=100.0, gt=0)
    start_time: float = 0.0
    noise_sigma: float = Field(default=1.0, ge=0.0)
    event_times: Optional[List[float]] = None
    event_rate_per_hour: float = Field(default=12.0, ge=0.0)
    event_amplitude_range: Tuple[float, float] = (8.0, 12.0)
    wavelet_dominant_hz: float = Field(default=6.0, gt=0)
    wavelet_decay_seconds: float = Field(default=1.0, gt=0)
    wavelet_duration_seconds: float = Field(default=5.0, gt=0)
    seed: int = 0

    @field_validator("event_amplitude_range")
    @classmethod
    def _check_amplitudes(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if value[0] > value[1]:
            raise ValueError("Нижняя граница амплитуды больше верхней")
        return value

    @model_validator(mode="after")
    def _check_wavelet(self) -> "SynthConfig":
        if self.wavelet_dominant_hz >= self.sample_rate_hz / 2:
            raise ValueError("wavelet_dominant_hz должен быть ниже частоты Найквиста")
        return self


class DetectionConfig(_Section):
    tolerance_seconds: float = Field(default=0.0, ge=0.0)
    bin_edges: List[float] = Field(default_factory=lambda: list(DEFAULT_HISTOGRAM_EDGES))
    review_low: float = 0.5
    review_high: float = 0.6

    @field_validator("bin_edges")
    @classmethod
    def _check_edges(cls, value: List[float]) -> List[float]:
        if len(value) < 2 or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("Границы интервалов гистограммы должны строго возрастать")
        return value


class SweepConfig(_Section):
    thresholds: List[float] = Field(default_factory=lambda: list(DEFAULT_SWEEP_THRESHOLDS))

    @field_validator("thresholds")
    @classmethod
    def _check_thresholds(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("Список порогов не может быть пустым")
        return value


class RunConfig(_Section):
    """Полная конфигурация запуска: по одной секции на этап."""

    synth: SynthConfig = Field(default_factory=SynthConfig)
    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    discovery: DiscoveryConfig = Field(default_factory=DiscoveryConfig)
    forest: ForestParams = Field(default_factory=ForestParams)
    detection: DetectionConfig = Field(default_factory=DetectionConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @model_validator(mode="after")
    def _check_histogram_covers_detections(self) -> "RunConfig":
        edges = self.detection.bin_edges
        if edges[0] > self.forest.decision_threshold or edges[-1] < 1.0:
            raise ValueError(
                f"Гистограмма {edges} должна покрывать [decision_threshold, 1] = "
                f"[{self.forest.decision_threshold}, 1]"
            )
        return self


def parse_override(override: str) -> Tuple[str, str, object]:
    """Разбирает переопределение вида section.key=value.

    Значение читается как скаляр или массив TOML, иначе остаётся строкой.
    """
    if "=" not in override or "." not in override.split("=", 1)[0]:
        logger.error(f"Некорректное переопределение параметра: {override}")
        raise ConfigError(f"Ожидалось section.key=value, получено: {override}")
    path, raw = override.split("=", 1)
    section, key = path.strip().split(".", 1)
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return section, key, value


def build_config(data: Optional[dict] = None, overrides: Iterable[str] = ()) -> RunConfig:
    """Собирает RunConfig из словаря секций и переопределений командной строки."""
    sections: Dict[str, dict] = {name: dict(values) for name, values in (data or {}).items()}
    for override in overrides:
        section, key, value = parse_override(override)
        sections.setdefault(section, {})[key] = value
    try:
        return RunConfig(**sections)
    except ValidationError as e:
        logger.error(f"Ошибка валидации конфигурации: {e}")
        raise ConfigError(f"Ошибка валидации конфигурации: {e}") from e


def load_config(path: Optional[Path] = None, overrides: Iterable[str] = ()) -> RunConfig:
    """Читает TOML-файл конфигурации и применяет переопределения.

    :param path: Путь к файлу. None - только значения по умолчанию.
    :param overrides: Строки вида section.key=value.
    :return: Проверенная конфигурация.
    """
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            logger.error(f"Файл конфигурации не найден: {path}")
            raise MissingInputError(f"Файл конфигурации не найден: {path}")
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as e:
            logger.error(f"Ошибка разбора конфигурации {path}: {e}")
            raise ConfigError(f"Ошибка разбора конфигурации {path}: {e}") from e
        logger.debug(f"Конфигурация прочитана из {path}: {data}")
    return build_config(data, overrides)
