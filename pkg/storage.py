import logging
import os
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv

from app.modules.cli.errors import ArtifactError

# 加载 .env 文件中的环境变量
load_dotenv()

logger = logging.getLogger(__name__)

# 阶段产物默认输出目录（--out 优先）
OUTPUT_DIR = os.getenv("DRCOVID_OUT", "runs")

# 各阶段产物文件名
GRAPH_FILE = "graph.bin"
FEATURES_FILE = "features.bin"
SPLIT_FILE = "split.tsv"
TARGETS_FILE = "targets.tsv"
CHECKPOINT_FILE = "model.ckpt"
TRAIN_LOG_FILE = "train_log.csv"
ROC_FILE = "roc.csv"
RANKS_FILE = "ranks.csv"
RANK_SUMMARY_FILE = "rank_summary.csv"
COVID_REPORT_FILE = "covid_report.csv"
COVID_SCORES_FILE = "covid_scores.csv"
COVID_WORKBOOK_FILE = "covid_report.xlsx"
PROXIMITY_FILE = "proximity.csv"
RANK_TABLE_FILE = "rank_table.csv"


class StageDir:
    """一个阶段的产物目录"""

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path or OUTPUT_DIR)

    def __truediv__(self, name: str) -> Path:
        return self.path / name

    def ensure(self) -> "StageDir":
        self.path.mkdir(parents=True, exist_ok=True)
        return self

    def require(self, name: str, stage: str = "ingest") -> Path:
        """返回已存在的上游产物路径，缺失时提示先运行哪个阶段"""
        path = self.path / name
        if not path.exists():
            raise ArtifactError(f"缺少产物 {path}，请先运行 {stage} 命令")
        return path

    def __str__(self) -> str:
        return str(self.path)
