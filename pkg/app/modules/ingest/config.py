import os
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 视为「药物治疗疾病」正样本的关系（逗号分隔，可用环境变量覆盖）
POSITIVE_RELATIONS = tuple(
    relation.strip()
    for relation in os.getenv(
        "DRCOVID_POSITIVE_RELATIONS",
        "treats,palliates,Hetionet::CtD::Compound:Disease,Hetionet::CpD::Compound:Disease,GNBR::T::Compound:Disease",
    ).split(",")
    if relation.strip()
)

NEGATIVE_COUNT = int(os.getenv("DRCOVID_NEGATIVE_COUNT", "200000"))
TEST_FRACTION = float(os.getenv("DRCOVID_TEST_FRACTION", "0.10"))
SEED = int(os.getenv("DRCOVID_SEED", "0"))

# 全量 DRKG 子图的校验数字（--strict-counts）
EXPECTED_NODE_COUNTS = (8070, 4166, 29848, 400)
EXPECTED_LINKS = 1417624
EXPECTED_POSITIVES = 6113
EXPECTED_COVID_TARGETS = 33
EXPECTED_COVID_LINKS = 461
