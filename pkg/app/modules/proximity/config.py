import os
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 置换检验次数
N_PERM = int(os.getenv("DRCOVID_N_PERM", "1000"))
# 置换分布标准差低于该值时 Z 视为无法计算
MIN_STD = float(os.getenv("DRCOVID_MIN_STD", "1e-12"))
