from .base import BasePreprocessor
from .manager import PreprocessManager

__all__ = ["BasePreprocessor", "PreprocessManager"]
