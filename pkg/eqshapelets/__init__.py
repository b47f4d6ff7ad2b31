__version__ = "1.0.0"

from .classifier import ShapeletForest
from .config import RunConfig, load_config
from .detection import DetectionManager
from .discovery import ShapeletDiscovery
from .pipeline import EqShapeletsManager
from .preprocess import PreprocessManager
from .synth import SynthManager

__all__ = [
    "DetectionManager",
    "EqShapeletsManager",
    "PreprocessManager",
    "RunConfig",
    "ShapeletDiscovery",
    "ShapeletForest",
    "SynthManager",
    "load_config",
]
