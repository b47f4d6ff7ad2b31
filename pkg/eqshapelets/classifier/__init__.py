from .base import BaseClassifier
from .manager import (
    Forest,
    ShapeletForest,
    evaluate,
    evaluate_predictions,
    fit_forest,
    predict_proba,
    shapelet_transform,
    tree_rng,
)
from .tree import Tree, fit_tree

__all__ = [
    "BaseClassifier",
    "Forest",
    "ShapeletForest",
    "Tree",
    "evaluate",
    "evaluate_predictions",
    "fit_forest",
    "fit_tree",
    "predict_proba",
    "shapelet_transform",
    "tree_rng",
]
