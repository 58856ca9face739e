import argparse
import logging

from app.modules.cli.config import resolve_config
from app.modules.cli.errors import DataValidationError, ExitCode
from app.modules.cli.manifest import build_manifest, verify_outputs, write_manifest
from app.modules.cli.router import CommandRouter, arg
from app.modules.cli.schemas import CommandResponse
from app.modules.graph.models import EntityKind
from app.modules.ingest import config
from app.modules.ingest.builder import build_graph, inject_covid_nodes
from app.modules.ingest.edge_parser import EdgeParser
from app.modules.ingest.features import FeatureReader, build_feature_matrix, write_feature_file
from app.modules.ingest.schemas import IngestOptions, IngestSummary
from app.modules.ingest.serializer import write_graph, write_targets
from app.modules.sign import config as sign_config
from app.modules.ingest.split import (
    negative_pool_size,
    sample_negatives,
    split_links,
    with_negatives,
    write_split,
)
from storage import FEATURES_FILE, GRAPH_FILE, SPLIT_FILE, TARGETS_FILE, StageDir

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["数据导入"])


@router.command(
    "ingest",
    summary="解析边文件与特征文件，构建异构图并划分训练/测试集",
    arguments=[
        arg("--edges", help="边三元组文件（head<TAB>relation<TAB>tail）"),
        arg("--features", help="节点特征文件（二进制 + .names，或纯文本）"),
        arg("--covid", help="COVID-19 目标节点的疾病侧→基因边文件（可选）"),
        arg("--negatives", type=int, help=f"负样本数（默认 {config.NEGATIVE_COUNT}）"),
        arg("--test-fraction", type=float, help=f"测试集比例（默认 {config.TEST_FRACTION}）"),
        arg("--strict-counts", action="store_true", default=None, help="校验全量 DRKG 的节点、边与正样本数"),
        arg("--lenient", action="store_true", help="跳过格式错误的行（默认遇错即失败）"),
    ],
)
def cmd_ingest(args: argparse.Namespace) -> CommandResponse:
    """
    导入数据

    产物: graph.bin, features.bin(+.names), split.tsv, targets.tsv, manifest.ingest.json
    """
    options = resolve_config(
        IngestOptions,
        args.config,
        {
            "edges": args.edges,
            "features": args.features,
            "covid": args.covid,
            "negatives": args.negatives,
            "test_fraction": args.test_fraction,
            "seed": args.seed,
            "strict_counts": args.strict_counts,
            "strict_parse": False if args.lenient else None,
        },
    )
    out = StageDir(args.out).ensure()

    records = EdgeParser.parse_edge_file(options.edges, strict=options.strict_parse)
    table = FeatureReader.read(options.features)
    if options.strict_counts and table.dim != sign_config.FEATURE_DIM:
        raise DataValidationError(f"特征维度与全量数据不符: 实际 {table.dim}，期望 {sign_config.FEATURE_DIM}")
    graph, _ = build_graph(records, table, strict_counts=options.strict_counts)

    inputs = [options.edges, options.features]
    covid_records = []
    if options.covid:
        covid_records = EdgeParser.parse_edge_file(options.covid, strict=options.strict_parse)
        inputs.append(options.covid)
    graph, targets = inject_covid_nodes(graph, covid_records, strict_counts=options.strict_counts)
    # 注入后基因与解剖部位的全局编号发生偏移，特征需重新对齐
    features = build_feature_matrix(graph, table)

    split = split_links(graph, options.seed, options.test_fraction)
    if options.strict_counts and len(split.positives) != config.EXPECTED_POSITIVES:
        raise DataValidationError(
            f"正样本数与全量数据不符: 实际 {len(split.positives)}，期望 {config.EXPECTED_POSITIVES}"
        )

    available = negative_pool_size(graph, split.positives, targets.targets)
    count = options.negatives
    if count > available:
        logger.warning("负样本数 %d 超过可用的无连接对数 %d，已截断", count, available)
        count = available
    negatives = sample_negatives(graph, count, options.seed, split.positives, targets.targets)
    split = with_negatives(split, negatives, options.test_fraction)

    write_graph(out / GRAPH_FILE, graph)
    write_feature_file(out / FEATURES_FILE, graph.global_names(), features)
    write_split(out / SPLIT_FILE, graph, split)
    write_targets(out / TARGETS_FILE, graph, targets)

    outputs = [GRAPH_FILE, FEATURES_FILE, FEATURES_FILE + ".names", SPLIT_FILE, TARGETS_FILE]
    verify_outputs(out.path, outputs)
    write_manifest(out.path, build_manifest("ingest", options.model_dump(), inputs, outputs, options.seed))

    summary = IngestSummary(
        drugs=graph.count(EntityKind.DRUG),
        diseases=graph.count(EntityKind.DISEASE),
        genes=graph.count(EntityKind.GENE),
        anatomies=graph.count(EntityKind.ANATOMY),
        links=graph.num_edges,
        covid_targets=len(targets),
        train_pos=len(split.train_pos),
        test_pos=len(split.test_pos),
        train_neg=len(split.train_neg),
        test_neg=len(split.test_neg),
    )
    return CommandResponse(code=ExitCode.OK, message="数据导入完成", data=summary.model_dump())
