import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from app.modules.cli.errors import DataValidationError, ExitCode, PipelineError

# 加载 .env 文件
load_dotenv()

logger = logging.getLogger(__name__)

# 所有配置项都可以用 DRCOVID_<KEY> 环境变量覆盖
LOG_LEVEL = os.getenv("DRCOVID_LOG_LEVEL", "INFO")

ModelT = TypeVar("ModelT", bound=BaseModel)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    读取 `key = value` 格式的配置文件

    空行与 # 开头的注释行被忽略；重复的键以最后一次为准。
    """
    path = Path(path)
    if not path.exists():
        raise PipelineError(f"配置文件不存在: {path}", ExitCode.NO_INPUT)

    values: Dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep or not key.strip():
            raise DataValidationError(f"配置文件 {path} 第 {line_no} 行格式错误: {line!r}")
        values[key.strip()] = value.strip()
    return values


def resolve_config(
    model_cls: Type[ModelT],
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ModelT:
    """
    合并配置：模型默认值（含环境变量） < 配置文件 < 命令行参数

    配置文件中不属于该模型的键会被忽略并告警，便于多个阶段共用一个文件。
    """
    merged: Dict[str, Any] = {}
    if config_file:
        file_values = read_config_file(config_file)
        unknown = sorted(set(file_values) - set(model_cls.model_fields))
        if unknown:
            logger.warning("配置文件 %s 中的未知键已忽略: %s", config_file, ", ".join(unknown))
        merged.update({k: v for k, v in file_values.items() if k in model_cls.model_fields})
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return model_cls(**merged)
    except ValidationError as e:
        raise PipelineError(f"配置校验失败: {e}", ExitCode.USAGE)
