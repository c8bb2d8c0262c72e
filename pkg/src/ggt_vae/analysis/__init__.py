"""Attention-versus-distance analysis, globality and CSV exports."""

from .attention_distance import (
    AttentionByDistance,
    attention_by_distance,
    layer_average,
)
from .export import (
    attention_map_key,
    export_analysis,
    export_attention_maps,
    export_latents,
)
from .globality import GlobalityReport, globality

__all__ = [
    "AttentionByDistance",
    "GlobalityReport",
    "attention_by_distance",
    "attention_map_key",
    "export_analysis",
    "export_attention_maps",
    "export_latents",
    "globality",
    "layer_average",
]
