# loop / routes 依赖 sign 模块，这里只导出不依赖 sign 的部分
from app.modules.trainer.loss import weighted_bce, weighted_bce_grad
from app.modules.trainer.schemas import TrainConfig, TrainReport, EpochRecord
from app.modules.trainer.batches import Batch, make_batches, positives_per_batch

__all__ = [
    "weighted_bce",
    "weighted_bce_grad",
    "TrainConfig",
    "TrainReport",
    "EpochRecord",
    "Batch",
    "make_batches",
    "positives_per_batch",
]
