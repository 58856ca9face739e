from pydantic import BaseModel, ConfigDict, Field
from typing import Optional

from app.modules.ingest import config


class IngestOptions(BaseModel):
    """ingest 命令的生效配置"""
    model_config = ConfigDict(extra="forbid")

    edges: str
    features: str
    covid: Optional[str] = None
    negatives: int = Field(default=config.NEGATIVE_COUNT, ge=0)
    test_fraction: float = Field(default=config.TEST_FRACTION, gt=0.0, lt=1.0)
    seed: int = config.SEED
    strict_counts: bool = False
    strict_parse: bool = True


class IngestSummary(BaseModel):
    """ingest 结果摘要"""
    drugs: int
    diseases: int
    genes: int
    anatomies: int
    links: int
    covid_targets: int
    train_pos: int
    test_pos: int
    train_neg: int
    test_neg: int
