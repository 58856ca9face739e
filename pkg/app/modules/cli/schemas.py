from pydantic import BaseModel
from typing import Any, Dict, List, Optional


class CommandResponse(BaseModel):
    """命令执行结果"""
    code: int
    message: str
    data: Dict[str, Any] = {}


class RunManifest(BaseModel):
    """阶段清单：命令、生效配置、输入文件摘要、种子与版本"""
    command: str
    config: Dict[str, Any] = {}
    inputs: Dict[str, str] = {}
    outputs: List[str] = []
    seed: Optional[int] = None
    version: str
