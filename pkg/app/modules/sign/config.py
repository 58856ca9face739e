import os
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 编码器维度：特征维度 d 由特征文件决定，这里只是全量数据的默认值
FEATURE_DIM = int(os.getenv("DRCOVID_FEATURE_DIM", "400"))
BRANCH_WIDTH = int(os.getenv("DRCOVID_BRANCH_WIDTH", "250"))
EMBED_DIM = int(os.getenv("DRCOVID_EMBED_DIM", "250"))
HOPS = int(os.getenv("DRCOVID_HOPS", "2"))

# LeakyReLU 负半轴斜率
LEAKY_SLOPE = float(os.getenv("DRCOVID_LEAKY_SLOPE", "0.01"))
