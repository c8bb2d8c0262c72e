"""
Globality: the attention-weighted mean distance between attending nodes.

    globality = sum_d d * a(d) / sum_d a(d)

where ``a(d)`` is the mean attention at distance ``d``. Dividing by the
diameter of the largest training component gives a value in ``[0, 1]``
unless a smaller component holds a longer path.
"""

from dataclasses import dataclass

import numpy as np

from ggt_vae.exceptions import InsufficientDataError, UndefinedMetricError
from ggt_vae.utils.logging import get_logger

from .attention_distance import AttentionByDistance

logger = get_logger(__name__)


@dataclass
class GlobalityReport:
    """Globality per head and per layer (head average).

    Attributes:
        values (np.ndarray): Shape ``(L, H)``, in hops
        normalized (np.ndarray): ``values / diameter``
        layer_values (np.ndarray): Shape ``(L,)``
        layer_normalized (np.ndarray): Shape ``(L,)``
        diameter (int): Training-graph diameter
    """

    values: np.ndarray
    normalized: np.ndarray
    layer_values: np.ndarray
    layer_normalized: np.ndarray
    diameter: int


def globality(abd: AttentionByDistance) -> GlobalityReport:
    """
    Compute globality and its normalized form.

    Raises:
        InsufficientDataError: Diameter below 1
        UndefinedMetricError: A head has zero attention mass at every
            realized distance
    """
    if abd.diameter < 1:
        raise InsufficientDataError(
            f"Globality needs a diameter of at least 1, got {abd.diameter}"
        )
    mass = abd.means.sum(axis=-1)
    if (mass <= 0).any():
        raise UndefinedMetricError(
            "Attention has no mass at any realized distance"
        )
    values = (abd.means * abd.distances).sum(axis=-1) / mass
    normalized = values / abd.diameter
    if (normalized > 1.0).any():
        logger.warning(
            f"Normalized globality up to {normalized.max():.3f}: a smaller "
            f"component has paths longer than the diameter {abd.diameter}"
        )
    return GlobalityReport(
        values=values,
        normalized=normalized,
        layer_values=values.mean(axis=1),
        layer_normalized=normalized.mean(axis=1),
        diameter=abd.diameter,
    )
