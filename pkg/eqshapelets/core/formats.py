"""Форматы волновых форм: CSV по отсчёту на строку и бинарный формат EQS1.

Бинарный формат: магия b"EQS1", затем little-endian u32 число отсчётов,
f64 частота дискретизации, f64 время начала и f64 отсчёты.
"""
import logging
import re
import struct
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from ..exceptions import MissingInputError, WaveformFormatError
from ..types import Label, LabeledWindow, LearningSet, TimeSeries

logger = logging.getLogger(__name__)

MAGIC = b"EQS1"
_HEADER = struct.Struct("<Idd")
_CSV_HEADER = re.compile(r"#\s*sample_rate_hz=(?P<rate>\S+)\s+start_time=(?P<start>\S+)")
WAVEFORM_SUFFIXES = (".bin", ".csv")


def _build(samples, rate: float, start: float, path: Path) -> TimeSeries:
    try:
        return TimeSeries(samples=samples, sample_rate_hz=rate, start_time=start)
    except ValidationError as e:
        logger.error(f"Некорректная волновая форма в {path}: {e}")
        raise WaveformFormatError(f"Некорректная волновая форма в {path}: {e}") from e


def encode_binary(series: TimeSeries) -> bytes:
    header = _HEADER.pack(len(series), series.sample_rate_hz, series.start_time)
    return MAGIC + header + series.samples.astype("<f8").tobytes()


def decode_binary(payload: bytes, path: Path = Path("<bytes>")) -> TimeSeries:
    if payload[:4] != MAGIC:
        logger.error(f"Неизвестная сигнатура файла {path}: {payload[:4]!r}")
        raise WaveformFormatError(f"Неизвестная сигнатура файла {path}: {payload[:4]!r}")
    if len(payload) < 4 + _HEADER.size:
        raise WaveformFormatError(f"Файл {path} обрезан: нет заголовка")
    count, rate, start = _HEADER.unpack_from(payload, 4)
    body = payload[4 + _HEADER.size :]
    if len(body) != 8 * count:
        logger.error(f"Файл {path}: ожидалось {count} отсчётов, получено {len(body) // 8}")
        raise WaveformFormatError(f"Файл {path}: ожидалось {count} отсчётов, получено {len(body) // 8}")
    return _build(np.frombuffer(body, dtype="<f8"), rate, start, path)


def read_csv(path: Path, default_rate: Optional[float] = None) -> TimeSeries:
    """Читает CSV: по отсчёту на строку, необязательный заголовок
    "# sample_rate_hz=<r> start_time=<t>".

    Без заголовка используется default_rate и время начала 0.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            first = handle.readline().strip()
    except UnicodeDecodeError as e:
        logger.error(f"Файл {path} не является текстом в UTF-8: {e}")
        raise WaveformFormatError(f"Файл {path} не является текстом в UTF-8: {e}") from e
    match = _CSV_HEADER.match(first)
    if match:
        rate, start = float(match["rate"]), float(match["start"])
    elif default_rate is not None:
        rate, start = default_rate, 0.0
    else:
        logger.error(f"В файле {path} нет заголовка с частотой дискретизации, укажите --sample-rate")
        raise WaveformFormatError(f"В файле {path} нет заголовка с частотой дискретизации, укажите --sample-rate")
    try:
        samples = np.atleast_1d(np.loadtxt(path, comments="#", dtype=np.float64, ndmin=1))
    except ValueError as e:
        logger.error(f"Ошибка разбора CSV {path}: {e}")
        raise WaveformFormatError(f"Ошибка разбора CSV {path}: {e}") from e
    return _build(samples, rate, start, path)


def write_csv(series: TimeSeries, path: Path) -> None:
    header = f"sample_rate_hz={series.sample_rate_hz!r} start_time={series.start_time!r}"
    np.savetxt(path, series.samples, fmt="%.17g", header=header, comments="# ")


def read_waveform(path: Path, default_rate: Optional[float] = None) -> TimeSeries:
    """Читает волновую форму, формат определяется по расширению."""
    path = Path(path)
    if not path.is_file():
        logger.error(f"Файл волновой формы не найден: {path}")
        raise MissingInputError(f"Файл волновой формы не найден: {path}")
    if path.suffix == ".csv":
        return read_csv(path, default_rate)
    return decode_binary(path.read_bytes(), path)


def write_waveform(series: TimeSeries, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".csv":
        write_csv(series, path)
    else:
        path.write_bytes(encode_binary(series))
    logger.debug(f"Записано {len(series)} отсчётов в {path}")


def list_waveforms(directory: Path) -> List[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        logger.error(f"Каталог не найден: {directory}")
        raise MissingInputError(f"Каталог не найден: {directory}")
    return sorted(path for path in directory.iterdir() if path.suffix in WAVEFORM_SUFFIXES)


def read_segments(directory: Path, default_rate: Optional[float] = None) -> List[TimeSeries]:
    """Читает все сегменты записи из каталога и сортирует их по времени начала.

    :param default_rate: Частота для CSV без заголовка.
    """
    segments = [read_waveform(path, default_rate) for path in list_waveforms(directory)]
    if not segments:
        logger.error(f"В каталоге {directory} нет волновых форм")
        raise MissingInputError(f"В каталоге {directory} нет волновых форм")
    return sorted(segments, key=lambda series: series.start_time)


def read_learning_set(directory: Path, default_rate: Optional[float] = None) -> LearningSet:
    """Читает обучающий набор: подкаталоги Event/ и Other/, по файлу на окно."""
    directory = Path(directory)
    if not directory.is_dir():
        logger.error(f"Каталог обучающего набора не найден: {directory}")
        raise MissingInputError(f"Каталог обучающего набора не найден: {directory}")
    windows = []
    for label in Label:
        class_dir = directory / label.value
        if not class_dir.is_dir():
            continue
        for path in list_waveforms(class_dir):
            windows.append(LabeledWindow(window_id=path.stem, series=read_waveform(path, default_rate), label=label))
    windows.sort(key=lambda window: window.window_id)
    try:
        return LearningSet(windows=windows)
    except ValidationError as e:
        logger.error(f"Некорректный обучающий набор в {directory}: {e}")
        raise WaveformFormatError(f"Некорректный обучающий набор в {directory}: {e}") from e


def write_learning_set(learning_set: LearningSet, directory: Path, suffix: str = ".bin") -> None:
    directory = Path(directory)
    for window in learning_set:
        write_waveform(window.series, directory / window.label.value / f"{window.window_id}{suffix}")
    logger.info(f"Обучающий набор из {len(learning_set)} окон записан в {directory}")
