from enum import IntEnum


class ExitCode(IntEnum):
    """命令退出码"""
    OK = 0
    FAILURE = 1
    USAGE = 2
    DATA_ERROR = 65
    NO_INPUT = 66
    SOFTWARE = 70


class PipelineError(Exception):
    """流水线异常基类（携带退出码和错误详情）"""

    exit_code = ExitCode.FAILURE

    def __init__(self, detail: str, exit_code: ExitCode = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class DataValidationError(PipelineError):
    """输入数据校验失败"""
    exit_code = ExitCode.DATA_ERROR


class StructuralError(PipelineError):
    """矩阵结构错误（维度不匹配、不对称等）"""
    exit_code = ExitCode.DATA_ERROR


class NumericError(PipelineError):
    """数值错误（出现 NaN / Inf）"""
    exit_code = ExitCode.SOFTWARE


class ArtifactError(PipelineError):
    """缺少阶段产物或产物损坏"""
    exit_code = ExitCode.NO_INPUT
