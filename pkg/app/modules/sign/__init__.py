from app.modules.sign.models import DiffusionFeatures, ModelParams, Gradients, EmbeddingMatrix
from app.modules.sign.encoder import (
    precompute_diffusion,
    message_passing_diffusion,
    init_params,
    encode,
    encode_rows,
    score,
    score_pairs,
    pair_logits,
    backward,
)
from app.modules.sign.checkpoint import save_checkpoint, load_checkpoint, checkpoint_bytes

__all__ = [
    "DiffusionFeatures",
    "ModelParams",
    "Gradients",
    "EmbeddingMatrix",
    "precompute_diffusion",
    "message_passing_diffusion",
    "init_params",
    "encode",
    "encode_rows",
    "score",
    "score_pairs",
    "pair_logits",
    "backward",
    "save_checkpoint",
    "load_checkpoint",
    "checkpoint_bytes",
]
