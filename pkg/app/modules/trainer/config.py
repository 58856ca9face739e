import os
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 训练默认值（与全量实验一致），均可用 DRCOVID_<KEY> 覆盖
BATCH_SIZE = int(os.getenv("DRCOVID_BATCH_SIZE", "512"))
EPOCHS = int(os.getenv("DRCOVID_EPOCHS", "20"))
LEARNING_RATE = float(os.getenv("DRCOVID_LEARNING_RATE", "0.01"))
POS_WEIGHT = float(os.getenv("DRCOVID_POS_WEIGHT", "1.5"))
BATCH_NEG_POS_RATIO = float(os.getenv("DRCOVID_BATCH_NEG_POS_RATIO", "1.5"))
PROGRESS = os.getenv("DRCOVID_PROGRESS", "true").lower() == "true"
