from pydantic import BaseModel, ConfigDict, Field
from typing import List, Optional

from app.modules.ingest import config as ingest_config
from app.modules.sign import config as sign_config
from app.modules.trainer import config


class TrainConfig(BaseModel):
    """训练配置（配置文件 key = value 与命令行参数共用这些字段名）"""
    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(default=config.BATCH_SIZE, gt=0)
    epochs: int = Field(default=config.EPOCHS, ge=0)
    learning_rate: float = Field(default=config.LEARNING_RATE, gt=0)
    pos_weight: float = Field(default=config.POS_WEIGHT, gt=0)
    batch_neg_pos_ratio: float = Field(default=config.BATCH_NEG_POS_RATIO, ge=0)
    seed: int = ingest_config.SEED
    test_fraction: float = Field(default=ingest_config.TEST_FRACTION, gt=0.0, lt=1.0)
    branch_width: int = Field(default=sign_config.BRANCH_WIDTH, gt=0)
    embed_dim: int = Field(default=sign_config.EMBED_DIM, gt=0)
    hops: int = Field(default=sign_config.HOPS, ge=0)
    progress: bool = config.PROGRESS


class EpochRecord(BaseModel):
    epoch: int
    mean_loss: float
    seconds: float


class TrainReport(BaseModel):
    """训练报告"""
    initial_loss: Optional[float] = None
    epochs: List[EpochRecord] = []
    seconds: float = 0.0
    checkpoint: Optional[str] = None

    @property
    def epoch_losses(self) -> List[float]:
        return [record.mean_loss for record in self.epochs]
