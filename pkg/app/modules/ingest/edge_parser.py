import logging
from pathlib import Path
from typing import List, NamedTuple, Tuple, Union

from app.modules.cli.errors import ArtifactError, DataValidationError
from app.modules.graph.models import PREFIX_TO_KIND, EntityKind

logger = logging.getLogger(__name__)


class EdgeRecord(NamedTuple):
    head_name: str
    relation: str
    tail_name: str

    @property
    def head_kind(self) -> EntityKind:
        return EntityKind.from_name(self.head_name)

    @property
    def tail_kind(self) -> EntityKind:
        return EntityKind.from_name(self.tail_name)


class EdgeParser:
    """边三元组文件解析器（head<TAB>relation<TAB>tail）"""

    @staticmethod
    def has_known_prefix(name: str) -> bool:
        head, sep, rest = name.partition("::")
        return bool(sep) and bool(rest) and head in PREFIX_TO_KIND

    @staticmethod
    def parse_line(line: str) -> EdgeRecord:
        """
        解析单行

        Raises:
            ValueError: 列数不对或实体前缀无法识别
        """
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise ValueError(f"应为 3 列制表符分隔，实际 {len(parts)} 列")

        head, relation, tail = (part.strip() for part in parts)
        if not relation:
            raise ValueError("关系为空")
        for name in (head, tail):
            if not EdgeParser.has_known_prefix(name):
                raise ValueError(f"无法识别的实体前缀: {name!r}")

        return EdgeRecord(head, relation, tail)

    @staticmethod
    def parse_edge_file(path: Union[str, Path], strict: bool = True) -> List[EdgeRecord]:
        """
        解析边文件

        Args:
            path: 文件路径（UTF-8）
            strict: 严格模式下只要有格式错误的行就整体失败；否则跳过并告警

        Returns:
            按文件顺序排列的 EdgeRecord 列表
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ArtifactError(f"边文件读取失败: {path}: {e}")

        records: List[EdgeRecord] = []
        malformed: List[Tuple[int, str]] = []

        for line_no, line in enumerate(text.splitlines(), start=1):
            # 空行和注释行跳过
            if not line.strip() or line.startswith("#"):
                continue
            try:
                records.append(EdgeParser.parse_line(line))
            except ValueError as e:
                malformed.append((line_no, str(e)))

        if malformed:
            details = "; ".join(f"第 {no} 行: {reason}" for no, reason in malformed[:10])
            if strict:
                raise DataValidationError(f"边文件 {path} 中有 {len(malformed)} 行格式错误 ({details})")
            logger.warning("边文件 %s 跳过 %d 行格式错误 (%s)", path, len(malformed), details)

        logger.info("边文件 %s 解析完成，共 %d 条记录", path, len(records))
        return records
