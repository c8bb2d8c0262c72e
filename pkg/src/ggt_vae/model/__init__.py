"""GGT-VAE network: parameters, encoder, decoder and checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .decoder import decode_full, decode_logits, decode_pairs, pair_index
from .encoder import (
    AttentionRecord,
    EncoderInputs,
    ForwardOutput,
    embed,
    encode,
    feed_forward,
    multi_head_attention,
    reparameterize,
    transformer_layer,
)
from .params import ModelParams, init_params, parameter_layout

__all__ = [
    "AttentionRecord",
    "EncoderInputs",
    "ForwardOutput",
    "ModelParams",
    "decode_full",
    "decode_logits",
    "decode_pairs",
    "embed",
    "encode",
    "feed_forward",
    "init_params",
    "load_checkpoint",
    "multi_head_attention",
    "pair_index",
    "parameter_layout",
    "reparameterize",
    "save_checkpoint",
    "transformer_layer",
]
