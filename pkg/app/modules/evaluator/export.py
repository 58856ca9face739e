"""评估结果导出（CSV 为主，COVID-19 报告另附一份 Excel）"""
import csv
from pathlib import Path
from typing import Iterable, List, Optional, Union

import openpyxl
from openpyxl.styles import Font

from app.modules.evaluator.models import CovidReport, RankComparison, RankReport, RocCurve
from app.modules.graph.models import HeteroGraph

NOT_COMPUTABLE = "NC"

PathLike = Union[str, Path]


def fmt(value: Optional[float]) -> str:
    """浮点数的可复现文本形式；None 记为 NC"""
    return NOT_COMPUTABLE if value is None else repr(float(value))


def _writer(f):
    return csv.writer(f, lineterminator="\n")


def write_roc(path: PathLike, curve: RocCurve) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _writer(f)
        writer.writerow(["threshold", "fpr", "tpr"])
        for threshold, fpr, tpr in zip(curve.thresholds, curve.fpr, curve.tpr):
            writer.writerow([fmt(threshold), fmt(fpr), fmt(tpr)])
        writer.writerow(["AUROC", fmt(curve.auroc)])


def write_ranks(path: PathLike, graph: HeteroGraph, reports: Iterable[RankReport]) -> None:
    """disease,drug,logit,rank；每个疾病只写一次完整排名"""
    written = set()
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _writer(f)
        writer.writerow(["disease", "drug", "logit", "rank"])
        for report in reports:
            if report.disease in written:
                continue
            written.add(report.disease)
            disease = graph.name_of(report.disease)
            for rank, (drug, logit) in enumerate(zip(report.drugs, report.scores), start=1):
                writer.writerow([disease, graph.name_of(drug), fmt(logit), rank])


def write_rank_summary(path: PathLike, graph: HeteroGraph, reports: Iterable[RankReport]) -> None:
    """disease,drug,rank：每个测试正样本中已知治疗药物的名次"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _writer(f)
        writer.writerow(["disease", "drug", "rank"])
        for report in reports:
            writer.writerow([graph.name_of(report.disease), graph.name_of(report.target), report.target_rank])


def _union_rows(graph: HeteroGraph, report: CovidReport) -> List[List]:
    rows = []
    for drug in report.union:
        cells = [report.cell(drug, column) for column in range(len(report.targets))]
        rows.append([graph.name_of(drug)] + cells)
    return rows


def _score_rows(graph: HeteroGraph, report: CovidReport) -> List[List]:
    return [[graph.name_of(drug)] + row.tolist() for drug, row in zip(report.drugs, report.ranks)]


def write_covid_report(path: PathLike, graph: HeteroGraph, report: CovidReport) -> None:
    """矩阵形式：第一列药物名，每个目标节点一列，单元格为名次（超过 K 为空）"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _writer(f)
        writer.writerow(["drug"] + [graph.name_of(t) for t in report.targets])
        for row in _union_rows(graph, report):
            writer.writerow(["" if cell is None else cell for cell in row])


def write_covid_scores(path: PathLike, graph: HeteroGraph, report: CovidReport) -> None:
    """全部药物 × 全部目标节点的名次矩阵"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _writer(f)
        writer.writerow(["drug"] + [graph.name_of(t) for t in report.targets])
        writer.writerows(_score_rows(graph, report))


def write_covid_workbook(path: PathLike, graph: HeteroGraph, report: CovidReport) -> None:
    """Excel 版报告：前 K 名并集 + 完整名次矩阵两个工作表"""
    workbook = openpyxl.Workbook()
    header = ["药物"] + [graph.name_of(t) for t in report.targets]

    union_sheet = workbook.active
    union_sheet.title = f"前{report.k}名并集"
    union_sheet.append(header)
    for row in _union_rows(graph, report):
        union_sheet.append(row)

    full_sheet = workbook.create_sheet("全部名次")
    full_sheet.append(header)
    for row in _score_rows(graph, report):
        full_sheet.append(row)

    for sheet in (union_sheet, full_sheet):
        for cell in sheet[1]:
            cell.font = Font(bold=True)
        sheet.freeze_panes = "B2"
        sheet.column_dimensions["A"].width = 28
    workbook.save(path)


def write_rank_table(path: PathLike, graph: HeteroGraph, rows: Iterable[RankComparison]) -> None:
    """disease,drug,model_rank,proximity_rank,proximity_z；无法计算记为 NC"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _writer(f)
        writer.writerow(["disease", "drug", "model_rank", "proximity_rank", "proximity_z"])
        for row in rows:
            writer.writerow([
                graph.name_of(row.disease),
                graph.name_of(row.drug),
                row.model_rank,
                NOT_COMPUTABLE if row.proximity_rank is None else row.proximity_rank,
                fmt(row.proximity_z),
            ])
