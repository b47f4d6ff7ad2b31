from .manager import EqShapeletsManager

__all__ = ["EqShapeletsManager"]
