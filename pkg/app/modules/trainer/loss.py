import numpy as np
from scipy.special import expit


def weighted_bce(logit, label, w: float):
    """
    加权二元交叉熵（逐样本）

        w·z·log(1 + e^{-s}) + (1-z)·log(1 + e^{s})

    用 logaddexp 计算 softplus，|s| 很大时也不会溢出。
    """
    logit = np.asarray(logit, dtype=np.float64)
    label = np.asarray(label, dtype=np.float64)
    return w * label * np.logaddexp(0.0, -logit) + (1.0 - label) * np.logaddexp(0.0, logit)


def weighted_bce_grad(logit, label, w: float):
    """对 logit 的导数: -w·z·σ(-s) + (1-z)·σ(s)"""
    logit = np.asarray(logit, dtype=np.float64)
    label = np.asarray(label, dtype=np.float64)
    return -w * label * expit(-logit) + (1.0 - label) * expit(logit)
