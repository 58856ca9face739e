from app.modules.cli.errors import (
    ExitCode,
    PipelineError,
    DataValidationError,
    StructuralError,
    NumericError,
    ArtifactError,
)
from app.modules.cli.router import CommandRouter, PipelineApp, arg
from app.modules.cli.schemas import CommandResponse, RunManifest

__all__ = [
    "ExitCode",
    "PipelineError",
    "DataValidationError",
    "StructuralError",
    "NumericError",
    "ArtifactError",
    "CommandRouter",
    "PipelineApp",
    "arg",
    "CommandResponse",
    "RunManifest",
]
