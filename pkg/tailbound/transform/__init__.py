from tailbound.transform.cayley import SkewParams, cayley_map, inverse_cayley
from tailbound.transform.loss import compaction_loss, loss_gradient
from tailbound.transform.model import TransformModel
from tailbound.transform.pca import pca_basis
from tailbound.transform.trainer import TrainHistory, train_transform, train_transform_with_history

__all__ = [
    "SkewParams",
    "TrainHistory",
    "TransformModel",
    "cayley_map",
    "compaction_loss",
    "inverse_cayley",
    "loss_gradient",
    "pca_basis",
    "train_transform",
    "train_transform_with_history",
]
