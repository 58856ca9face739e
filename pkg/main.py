import logging
import sys

from app import __version__
from app.modules.cli.config import LOG_LEVEL
from app.modules.cli.router import PipelineApp
from app.modules.ingest.routes import router as ingest_router
from app.modules.trainer.routes import router as train_router
from app.modules.evaluator.routes import router as evaluator_router
from app.modules.proximity.routes import router as proximity_router

app = PipelineApp(
    title="drcovid",
    description="异构图药物重定位流水线：数据导入、SIGN 训练、评估、COVID-19 预测与网络邻近度基线",
    version=__version__,
)

# 全局参数（各子命令共用）
app.add_global_argument("--seed", type=int, default=None, help="随机种子")
app.add_global_argument("--config", default=None, help="key = value 格式的配置文件")
app.add_global_argument("--out", default=None, help="产物输出目录（默认 $DRCOVID_OUT 或 runs）")
app.add_global_argument("--log-level", default=None, help="日志级别（默认 $DRCOVID_LOG_LEVEL 或 INFO）")


@app.on_startup
def configure_logging(args):
    logging.basicConfig(
        level=(args.log_level or LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


# 包含路由
app.include_router(ingest_router)
app.include_router(train_router)
app.include_router(evaluator_router)
app.include_router(proximity_router)


def main(argv=None) -> int:
    return app.run(argv)


if __name__ == "__main__":
    sys.exit(main())
