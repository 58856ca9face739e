import argparse
import logging

from app.modules.cli.config import resolve_config
from app.modules.cli.errors import ExitCode
from app.modules.cli.manifest import build_manifest, verify_outputs, write_manifest
from app.modules.cli.router import CommandRouter, arg
from app.modules.cli.schemas import CommandResponse
from app.modules.ingest.serializer import load_artifacts
from app.modules.sign.encoder import message_passing_diffusion
from app.modules.trainer.loop import train
from app.modules.trainer.schemas import TrainConfig
from storage import CHECKPOINT_FILE, TRAIN_LOG_FILE, StageDir

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["模型训练"])


@router.command(
    "train",
    summary="预计算扩散特征并用 SGD 训练编码器与打分器",
    arguments=[
        arg("--graph-dir", help="ingest 产物目录（默认同 --out）"),
        arg("--epochs", type=int),
        arg("--batch-size", type=int),
        arg("--learning-rate", type=float),
        arg("--pos-weight", type=float, help="正样本损失权重 w"),
        arg("--batch-neg-pos-ratio", type=float, help="批内负/正样本比例"),
        arg("--branch-width", type=int, help="每个扩散分支的宽度 h"),
        arg("--embed-dim", type=int, help="嵌入维度 l"),
        arg("--hops", type=int, help="扩散阶数 r"),
        arg("--no-progress", action="store_true", help="关闭进度条"),
    ],
)
def cmd_train(args: argparse.Namespace) -> CommandResponse:
    """
    训练模型

    产物: model.ckpt, train_log.csv, manifest.train.json
    """
    cfg = resolve_config(
        TrainConfig,
        args.config,
        {
            "epochs": args.epochs,
            "batch_size": args.batch_size,
            "learning_rate": args.learning_rate,
            "pos_weight": args.pos_weight,
            "batch_neg_pos_ratio": args.batch_neg_pos_ratio,
            "branch_width": args.branch_width,
            "embed_dim": args.embed_dim,
            "hops": args.hops,
            "seed": args.seed,
            "progress": False if args.no_progress else None,
        },
    )
    out = StageDir(args.out).ensure()
    artifacts = load_artifacts(args.graph_dir or out.path, cfg.seed)

    diffusion = message_passing_diffusion(artifacts.graph, artifacts.features, artifacts.split.test_pos, cfg.hops)
    _, report = train(
        artifacts.graph,
        diffusion,
        artifacts.split,
        cfg,
        checkpoint_path=out / CHECKPOINT_FILE,
        log_path=out / TRAIN_LOG_FILE,
    )

    outputs = [CHECKPOINT_FILE, TRAIN_LOG_FILE]
    verify_outputs(out.path, outputs)
    inputs = list(artifacts.paths) + ([args.config] if args.config else [])
    write_manifest(out.path, build_manifest("train", cfg.model_dump(), inputs, outputs, cfg.seed))

    return CommandResponse(
        code=ExitCode.OK,
        message="训练完成",
        data={
            "initial_loss": report.initial_loss,
            "epoch_losses": report.epoch_losses,
            "checkpoint": report.checkpoint,
        },
    )
