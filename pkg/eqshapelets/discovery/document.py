"""Версионированный JSON-документ с найденными шейплетами."""
import logging
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ValidationError

from ..config import DiscoveryConfig
from ..exceptions import MissingInputError, ModelFormatError
from ..types import Shapelet

logger = logging.getLogger(__name__)

SHAPELETS_FORMAT_VERSION = 1


class ShapeletDocument(BaseModel):
    format: Literal["eqshapelets/shapelets"] = "eqshapelets/shapelets"
    version: int = SHAPELETS_FORMAT_VERSION
    window_len: int
    sample_rate_hz: float
    config: DiscoveryConfig
    shapelets: List[Shapelet]
    manifest: Optional[str] = None


def save_shapelets(document: ShapeletDocument, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Сохранено шейплетов: {len(document.shapelets)} в {path}")


def load_shapelets(path: Path) -> ShapeletDocument:
    path = Path(path)
    if not path.is_file():
        logger.error(f"Файл шейплетов не найден: {path}")
        raise MissingInputError(f"Файл шейплетов не найден: {path}")
    try:
        document = ShapeletDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        logger.error(f"Некорректный файл шейплетов {path}: {e}")
        raise ModelFormatError(f"Некорректный файл шейплетов {path}: {e}") from e
    if document.version != SHAPELETS_FORMAT_VERSION:
        logger.error(f"Неподдерживаемая версия файла шейплетов: {document.version}")
        raise ModelFormatError(f"Неподдерживаемая версия файла шейплетов: {document.version}")
    return document
