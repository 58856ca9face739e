import os
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# COVID-19 报告中每个目标节点取前 K 个药物
TOP_K = int(os.getenv("DRCOVID_TOP_K", "10"))
# 排名汇总中「前 N 名」的统计口径
TOP_RANK_CUTOFF = int(os.getenv("DRCOVID_TOP_RANK_CUTOFF", "15"))
