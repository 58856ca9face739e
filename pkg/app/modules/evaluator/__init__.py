from app.modules.evaluator.models import RocCurve, RankReport, CovidReport, RankComparison
from app.modules.evaluator.metrics import auroc, rank_summary
from app.modules.evaluator.ranking import rank_drugs, evaluate_test_set, covid_report, compare_rankings

__all__ = [
    "RocCurve",
    "RankReport",
    "CovidReport",
    "RankComparison",
    "auroc",
    "rank_summary",
    "rank_drugs",
    "evaluate_test_set",
    "covid_report",
    "compare_rankings",
]
