from .base import BaseQualityMeasure
from .document import ShapeletDocument, load_shapelets, save_shapelets
from .manager import Candidate, ShapeletDiscovery, discover, merge, remove_similar
from .quality import InformationGainQuality, best_split, entropy, information_gain

__all__ = [
    "BaseQualityMeasure",
    "Candidate",
    "InformationGainQuality",
    "ShapeletDiscovery",
    "ShapeletDocument",
    "best_split",
    "discover",
    "entropy",
    "information_gain",
    "load_shapelets",
    "merge",
    "remove_similar",
    "save_shapelets",
]
