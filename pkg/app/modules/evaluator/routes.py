import argparse
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from app.modules.cli.errors import DataValidationError, ExitCode
from app.modules.cli.manifest import build_manifest, verify_outputs, write_manifest
from app.modules.cli.router import CommandRouter, arg
from app.modules.cli.schemas import CommandResponse
from app.modules.evaluator import config
from app.modules.evaluator.export import (
    write_covid_report,
    write_covid_scores,
    write_covid_workbook,
    write_rank_summary,
    write_rank_table,
    write_ranks,
    write_roc,
)
from app.modules.evaluator.metrics import rank_summary
from app.modules.evaluator.ranking import compare_rankings, covid_report, evaluate_test_set
from app.modules.graph.models import EntityKind
from app.modules.graph.sparse import build_adjacency
from app.modules.ingest import config as ingest_config
from app.modules.ingest.builder import CovidTargetSet
from app.modules.ingest.serializer import IngestArtifacts, load_artifacts
from app.modules.proximity import config as proximity_config
from app.modules.proximity.interactome import build_interactome, target_gene_sets
from app.modules.proximity.scoring import rank_by_proximity
from app.modules.sign.checkpoint import load_checkpoint
from app.modules.sign.encoder import encode, message_passing_diffusion
from app.modules.sign.models import ModelParams
from storage import (
    CHECKPOINT_FILE,
    COVID_REPORT_FILE,
    COVID_SCORES_FILE,
    COVID_WORKBOOK_FILE,
    RANK_SUMMARY_FILE,
    RANK_TABLE_FILE,
    RANKS_FILE,
    ROC_FILE,
    StageDir,
)

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["评估与预测"])

MODEL_ARGUMENTS = [
    arg("--graph-dir", help="ingest 产物目录（默认同 --out）"),
    arg("--checkpoint", help="模型检查点（默认 <out>/model.ckpt）"),
]


def _load_model(args: argparse.Namespace) -> Tuple[StageDir, int, IngestArtifacts, ModelParams, Path, object]:
    """读取产物与检查点，在训练时相同的无泄漏图上重新编码全部节点"""
    seed = ingest_config.SEED if args.seed is None else args.seed
    out = StageDir(args.out).ensure()
    artifacts = load_artifacts(args.graph_dir or out.path, seed)
    checkpoint = Path(args.checkpoint) if args.checkpoint else out / CHECKPOINT_FILE
    params = load_checkpoint(checkpoint)
    diffusion = message_passing_diffusion(artifacts.graph, artifacts.features, artifacts.split.test_pos, params.r)
    embeddings = encode(params, diffusion)
    return out, seed, artifacts, params, checkpoint, embeddings


@router.command("evaluate", summary="测试集 ROC/AUROC 与已知治疗药物排名", arguments=MODEL_ARGUMENTS)
def cmd_evaluate(args: argparse.Namespace) -> CommandResponse:
    """
    评估模型

    产物: roc.csv, ranks.csv, rank_summary.csv, manifest.evaluate.json
    """
    out, seed, artifacts, params, checkpoint, embeddings = _load_model(args)
    graph = artifacts.graph
    curve, reports = evaluate_test_set(params, embeddings, artifacts.split, graph.nodes(EntityKind.DRUG))

    write_roc(out / ROC_FILE, curve)
    write_ranks(out / RANKS_FILE, graph, reports)
    write_rank_summary(out / RANK_SUMMARY_FILE, graph, reports)

    outputs = [ROC_FILE, RANKS_FILE, RANK_SUMMARY_FILE]
    verify_outputs(out.path, outputs)
    write_manifest(out.path, build_manifest("evaluate", {}, [*artifacts.paths, checkpoint], outputs, seed))

    return CommandResponse(
        code=ExitCode.OK,
        message="评估完成",
        data={"auroc": curve.auroc, **rank_summary(reports)},
    )


def _select_targets(targets: CovidTargetSet, names: Optional[str], graph) -> CovidTargetSet:
    if not names:
        return targets
    wanted = [name.strip() for name in names.split(",") if name.strip()]
    known = {graph.name_of(t): t for t in targets.targets}
    missing = [name for name in wanted if name not in known]
    if missing:
        raise DataValidationError(f"不是 COVID-19 目标节点: {', '.join(missing)}")
    chosen = tuple(known[name] for name in wanted)
    return CovidTargetSet(targets=chosen, links=tuple(link for link in targets.links if link[0] in chosen))


@router.command(
    "predict",
    summary="为 COVID-19 目标节点排序全部药物并导出前 K 名并集",
    arguments=MODEL_ARGUMENTS + [
        arg("--top-k", type=int, default=config.TOP_K, help=f"每个目标取前 K 名（默认 {config.TOP_K}）"),
        arg("--targets", help="只报告这些目标节点（逗号分隔的节点名）"),
    ],
)
def cmd_predict(args: argparse.Namespace) -> CommandResponse:
    """
    COVID-19 药物预测

    产物: covid_report.csv, covid_scores.csv, covid_report.xlsx, manifest.predict.json
    """
    out, seed, artifacts, params, checkpoint, embeddings = _load_model(args)
    graph = artifacts.graph
    targets = _select_targets(artifacts.targets, args.targets, graph)
    drugs = graph.nodes(EntityKind.DRUG)
    report = covid_report(params, embeddings, targets, drugs, args.top_k)

    write_covid_report(out / COVID_REPORT_FILE, graph, report)
    write_covid_scores(out / COVID_SCORES_FILE, graph, report)
    write_covid_workbook(out / COVID_WORKBOOK_FILE, graph, report)

    outputs = [COVID_REPORT_FILE, COVID_SCORES_FILE, COVID_WORKBOOK_FILE]
    verify_outputs(out.path, outputs)
    manifest_config = {"top_k": args.top_k, "targets": args.targets}
    write_manifest(out.path, build_manifest("predict", manifest_config, [*artifacts.paths, checkpoint], outputs, seed))

    return CommandResponse(
        code=ExitCode.OK,
        message="预测完成",
        data={"targets": len(report.targets), "top_k": report.k, "union": len(report.union)},
    )


@router.command(
    "compare",
    summary="比较已知治疗药物在模型与网络邻近度下的名次",
    arguments=MODEL_ARGUMENTS + [
        arg("--n-perm", type=int, default=proximity_config.N_PERM),
        arg("--exhaustive", action="store_true", help="枚举全部度匹配集合（仅适合小网络）"),
    ],
)
def cmd_compare(args: argparse.Namespace) -> CommandResponse:
    """
    排名对比

    产物: rank_table.csv, manifest.compare.json
    """
    out, seed, artifacts, params, checkpoint, embeddings = _load_model(args)
    graph = artifacts.graph
    drugs = graph.nodes(EntityKind.DRUG)
    _, model_reports = evaluate_test_set(params, embeddings, artifacts.split, drugs)

    adjacency = build_adjacency(graph)
    interactome = build_interactome(graph, adjacency)
    diseases = sorted({report.disease for report in model_reports})
    gene_sets = target_gene_sets(graph, drugs + diseases, adjacency)
    drug_genes = {drug: gene_sets[drug] for drug in drugs}

    proximity_reports = {}
    proximity_z = {}
    for disease in diseases:
        report, scores = rank_by_proximity(
            interactome, drug_genes, disease, gene_sets[disease],
            n_perm=args.n_perm, seed=seed, exhaustive=args.exhaustive,
        )
        proximity_reports[disease] = report
        proximity_z.update({(score.drug, disease): score.Z for score in scores})

    rows = compare_rankings(model_reports, proximity_reports, proximity_z)
    write_rank_table(out / RANK_TABLE_FILE, graph, rows)

    outputs = [RANK_TABLE_FILE]
    verify_outputs(out.path, outputs)
    manifest_config = {"n_perm": args.n_perm, "exhaustive": args.exhaustive}
    write_manifest(out.path, build_manifest("compare", manifest_config, [*artifacts.paths, checkpoint], outputs, seed))

    not_computable = sum(1 for row in rows if row.proximity_rank is None)
    return CommandResponse(
        code=ExitCode.OK,
        message="排名对比完成",
        data={"pairs": len(rows), "proximity_not_computable": not_computable},
    )
