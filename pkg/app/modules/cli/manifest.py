import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Union

from app import __version__
from app.modules.cli.errors import ArtifactError
from app.modules.cli.schemas import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_TEMPLATE = "manifest.{command}.json"


def file_digest(path: Union[str, Path]) -> str:
    """sha256 摘要（分块读取）"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(
    command: str,
    config: Mapping[str, Any],
    inputs: Iterable[Union[str, Path]],
    outputs: Iterable[str],
    seed: Optional[int],
) -> RunManifest:
    # 只记录文件名和摘要，与运行目录无关
    digests: Dict[str, str] = {}
    for path in inputs:
        path = Path(path)
        digests[path.name] = file_digest(path)
    return RunManifest(
        command=command,
        config=dict(config),
        inputs=digests,
        outputs=sorted(outputs),
        seed=seed,
        version=__version__,
    )


def write_manifest(out_dir: Union[str, Path], manifest: RunManifest) -> Path:
    path = Path(out_dir) / MANIFEST_TEMPLATE.format(command=manifest.command)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def verify_outputs(out_dir: Union[str, Path], outputs: Iterable[str]) -> None:
    """阶段结束时确认所有声明的产物都已生成"""
    missing = [name for name in outputs if not (Path(out_dir) / name).exists()]
    if missing:
        raise ArtifactError(f"阶段产物缺失: {', '.join(missing)}")
