import argparse
import csv
import logging

from app.modules.cli.errors import ExitCode
from app.modules.cli.manifest import build_manifest, verify_outputs, write_manifest
from app.modules.cli.router import CommandRouter, arg
from app.modules.cli.schemas import CommandResponse
from app.modules.evaluator.export import fmt
from app.modules.graph.models import EntityKind
from app.modules.graph.sparse import build_adjacency
from app.modules.ingest import config as ingest_config
from app.modules.ingest.serializer import load_artifacts
from app.modules.proximity import config
from app.modules.proximity.interactome import build_interactome, target_gene_sets
from app.modules.proximity.scoring import rank_by_proximity
from storage import PROXIMITY_FILE, StageDir

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["网络邻近度基线"])


@router.command(
    "baseline",
    summary="按网络邻近度 Z 分数对药物排序",
    arguments=[
        arg("--graph-dir", help="ingest 产物目录（默认同 --out）"),
        arg("--disease", required=True, help="疾病节点名，如 Disease::MESH:D007239"),
        arg("--n-perm", type=int, default=config.N_PERM, help=f"置换次数（默认 {config.N_PERM}）"),
        arg("--exhaustive", action="store_true", help="枚举全部度匹配集合代替随机置换（仅适合小网络）"),
        arg("--no-progress", action="store_true", help="关闭进度条"),
    ],
)
def cmd_baseline(args: argparse.Namespace) -> CommandResponse:
    """
    网络邻近度排名

    产物: proximity.csv（drug,disease,P,Z，无法计算记为 NC）, manifest.baseline.json
    疾病没有关联基因时所有药物都记为 NC，命令仍然成功并告警。
    """
    seed = ingest_config.SEED if args.seed is None else args.seed
    out = StageDir(args.out).ensure()
    artifacts = load_artifacts(args.graph_dir or out.path, seed)
    graph = artifacts.graph

    disease = graph.node_by_name(args.disease)
    adjacency = build_adjacency(graph)
    interactome = build_interactome(graph, adjacency)
    drugs = graph.nodes(EntityKind.DRUG)
    gene_sets = target_gene_sets(graph, drugs + [disease], adjacency)
    disease_genes = gene_sets.pop(disease)

    message = "网络邻近度排名完成"
    if not len(disease_genes):
        message = f"{args.disease} 没有关联基因，全部药物无法计算"
        logger.warning(message)

    report, scores = rank_by_proximity(
        interactome,
        gene_sets,
        disease,
        disease_genes,
        n_perm=args.n_perm,
        seed=seed,
        exhaustive=args.exhaustive,
        progress=not args.no_progress,
    )

    with open(out / PROXIMITY_FILE, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["drug", "disease", "P", "Z"])
        for score in scores:
            writer.writerow([graph.name_of(score.drug), args.disease, fmt(score.P), fmt(score.Z)])

    outputs = [PROXIMITY_FILE]
    verify_outputs(out.path, outputs)
    manifest_config = {"disease": args.disease, "n_perm": args.n_perm, "exhaustive": args.exhaustive}
    write_manifest(out.path, build_manifest("baseline", manifest_config, artifacts.paths, outputs, seed))

    computable = sum(1 for s in scores if s.computable)
    return CommandResponse(
        code=ExitCode.OK,
        message=message,
        data={"disease": args.disease, "drugs": len(report), "computable": computable},
    )
