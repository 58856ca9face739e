import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from app.modules.cli.errors import ExitCode, PipelineError
from app.modules.cli.schemas import CommandResponse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Argument:
    flags: Tuple[str, ...]
    options: Dict[str, Any]


def arg(*flags: str, **options: Any) -> Argument:
    """声明一个命令行参数（参数同 argparse.add_argument）"""
    return Argument(flags, options)


@dataclass
class CommandRoute:
    name: str
    endpoint: Callable[[argparse.Namespace], CommandResponse]
    summary: str
    arguments: Sequence[Argument] = ()
    tags: List[str] = field(default_factory=list)

    @property
    def description(self) -> str:
        return (self.endpoint.__doc__ or self.summary).strip()


class CommandRouter:
    """子命令路由（一个模块一个）"""

    def __init__(self, tags: Optional[List[str]] = None):
        self.tags = tags or []
        self.routes: List[CommandRoute] = []

    def command(self, name: str, summary: str = "", arguments: Sequence[Argument] = ()):
        def decorator(func):
            self.routes.append(CommandRoute(name, func, summary, arguments, list(self.tags)))
            return func
        return decorator


class PipelineApp:
    """命令行应用：汇总各模块的路由并分发执行"""

    def __init__(self, title: str, description: str, version: str):
        self.title = title
        self.description = description
        self.version = version
        self.routes: List[CommandRoute] = []
        self.global_arguments: List[Argument] = []
        self.startup_handlers: List[Callable[[argparse.Namespace], None]] = []

    def include_router(self, router: CommandRouter) -> None:
        self.routes.extend(router.routes)

    def on_startup(self, func: Callable[[argparse.Namespace], None]):
        """注册在命令执行前调用的钩子（如配置日志）"""
        self.startup_handlers.append(func)
        return func

    def add_global_argument(self, *flags: str, **options: Any) -> None:
        self.global_arguments.append(arg(*flags, **options))

    def build_parser(self) -> argparse.ArgumentParser:
        # 全局参数既可写在子命令前也可写在子命令后
        common = argparse.ArgumentParser(add_help=False)
        for argument in self.global_arguments:
            options = dict(argument.options)
            options["default"] = argparse.SUPPRESS
            common.add_argument(*argument.flags, **options)

        parser = argparse.ArgumentParser(prog=self.title, description=self.description)
        parser.add_argument("--version", action="version", version=f"%(prog)s {self.version}")
        for argument in self.global_arguments:
            parser.add_argument(*argument.flags, **argument.options)

        subparsers = parser.add_subparsers(dest="command", required=True)
        for route in self.routes:
            sub = subparsers.add_parser(
                route.name, help=route.summary, description=route.description, parents=[common]
            )
            for argument in route.arguments:
                sub.add_argument(*argument.flags, **argument.options)
            sub.set_defaults(endpoint=route.endpoint)
        return parser

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        parser = self.build_parser()
        args = parser.parse_args(argv)
        for handler in self.startup_handlers:
            handler(args)
        try:
            response = args.endpoint(args)
        except PipelineError as e:
            logger.error("%s 失败: %s", args.command, e.detail)
            print(CommandResponse(code=int(e.exit_code), message=e.detail).model_dump_json(), file=sys.stderr)
            return int(e.exit_code)
        print(response.model_dump_json(indent=2))
        return ExitCode.OK if response.code == ExitCode.OK else int(response.code)
