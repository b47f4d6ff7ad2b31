"""CSV каталога событий: id,origin_time_iso8601,magnitude."""
import logging
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from ..exceptions import MissingInputError, WaveformFormatError
from ..types import CatalogEvent

logger = logging.getLogger(__name__)

COLUMNS = ["id", "origin_time_iso8601", "magnitude"]
_EPOCH = pd.Timestamp(0, tz="UTC")


def read_catalog(path: Path) -> List[CatalogEvent]:
    """Читает каталог и сортирует события по времени. Время без зоны считается UTC."""
    path = Path(path)
    if not path.is_file():
        logger.error(f"Файл каталога не найден: {path}")
        raise MissingInputError(f"Файл каталога не найден: {path}")
    try:
        frame = pd.read_csv(path, dtype={"id": "string"})
        missing = [column for column in COLUMNS if column not in frame.columns]
        if missing:
            raise KeyError(f"нет колонок {missing}")
        origins = pd.to_datetime(frame["origin_time_iso8601"], utc=True, format="ISO8601")
        seconds = (origins - _EPOCH).dt.total_seconds()
    except (ValueError, KeyError) as e:
        logger.error(f"Некорректный файл каталога {path}: {e}")
        raise WaveformFormatError(f"Некорректный файл каталога {path}: {e}") from e
    events = [
        CatalogEvent(
            id=str(event_id),
            origin_time=float(origin),
            magnitude=None if pd.isna(magnitude) else float(magnitude),
        )
        for event_id, origin, magnitude in zip(frame["id"], seconds, frame["magnitude"])
    ]
    events.sort(key=lambda event: (event.origin_time, event.id))
    logger.info(f"Прочитан каталог {path}: событий {len(events)}")
    return events


def write_catalog(events: Sequence[CatalogEvent], path: Path) -> None:
    frame = pd.DataFrame(
        {
            "id": [event.id for event in events],
            "origin_time_iso8601": [
                (_EPOCH + pd.Timedelta(seconds=event.origin_time)).isoformat() for event in events
            ],
            "magnitude": [event.magnitude for event in events],
        },
        columns=COLUMNS,
    )
    frame.to_csv(path, index=False)
    logger.debug(f"Записан каталог: {len(events)} событий в {path}")
