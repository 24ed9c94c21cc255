"""Cayley 轉換訓練：PCA warm start + mini-batch Adam + 驗證集 early stopping。"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tailbound.config.settings import TrainConfig
from tailbound.exceptions import DatasetTooSmallError, TrainingDivergedError
from tailbound.logging_config import get_logger
from tailbound.transform.cayley import SkewParams, n_skew_params
from tailbound.transform.loss import loss_and_gradient, usable_rows
from tailbound.transform.model import TransformModel
from tailbound.transform.pca import pca_basis
from tailbound.utils.decorators import log_elapsed
from tailbound.utils.helpers import as_matrix

logger = get_logger("transform.trainer")

MIN_SPLIT_SIZE = 10


@dataclass
class TrainHistory:
    """每個 epoch 的訓練 / 驗證 loss 與學習率。"""

    warm_start_loss: float = 0.0
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    learning_rate: list[float] = field(default_factory=list)
    best_epoch: int = -1          # -1 表示沒有任何 epoch 改善驗證 loss
    final_train_loss: float = 0.0
    fell_back_to_warm_start: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.train_loss)


class _Adam:
    def __init__(self, size: int, config: TrainConfig):
        self.lr = config.learning_rate
        self.beta1 = config.adam_beta1
        self.beta2 = config.adam_beta2
        self.eps = config.adam_eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * np.square(grad)
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def split_train_val(data, config: TrainConfig) -> tuple[np.ndarray, np.ndarray]:
    """以 seed 打亂後切出訓練 / 驗證集，兩者都至少需要 10 個向量。"""
    x = as_matrix(data, dtype=np.float64)
    n = x.shape[0]
    n_train = int(round(config.train_fraction * n))
    n_val = int(round(config.val_fraction * n))
    if n_train < MIN_SPLIT_SIZE or n_val < MIN_SPLIT_SIZE:
        raise DatasetTooSmallError(
            f"資料量 {n} 不足：訓練集 {n_train}、驗證集 {n_val}，各需至少 {MIN_SPLIT_SIZE} 個向量"
        )
    perm = np.random.default_rng(config.seed).permutation(n)
    return x[perm[:n_train]], x[perm[n_train:n_train + n_val]]


def _evaluate(params, d, config, warm, x) -> float:
    loss, _ = loss_and_gradient(
        SkewParams(d, params), config.gamma, warm, x, config.alpha_target, with_gradient=False
    )
    if not np.isfinite(loss):
        raise TrainingDivergedError(f"loss 非有限值 ({loss})，學習率 {config.learning_rate} 可能過大")
    return loss


@log_elapsed("轉換訓練")
def train_transform_with_history(data, config: TrainConfig | None = None) -> tuple[TransformModel, TrainHistory]:
    """訓練轉換並回傳 (模型, 訓練紀錄)。"""
    config = config or TrainConfig()
    train_raw, val_raw = split_train_val(data, config)
    d = train_raw.shape[1]

    warm = pca_basis(train_raw)
    train = usable_rows(train_raw)
    val = usable_rows(val_raw)

    history = TrainHistory()
    params = np.zeros(n_skew_params(d))
    history.warm_start_loss = _evaluate(params, d, config, warm, train)
    best_params = params.copy()
    best_val = _evaluate(params, d, config, warm, val)

    logger.info(
        "開始訓練: d=%d 訓練=%d 驗證=%d α=%.2f warm-start loss=%.6f",
        d, train.shape[0], val.shape[0], config.alpha_target, history.warm_start_loss,
    )

    if d > 1:
        rng = np.random.default_rng(config.seed + 1)
        adam = _Adam(params.shape[0], config)
        stale = 0
        since_decay = 0

        for epoch in range(config.max_epochs):
            order = rng.permutation(train.shape[0])
            for start in range(0, train.shape[0], config.batch_size):
                batch = train[order[start:start + config.batch_size]]
                loss, grad = loss_and_gradient(
                    SkewParams(d, params), config.gamma, warm, batch, config.alpha_target
                )
                if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
                    raise TrainingDivergedError(
                        f"epoch {epoch} 出現非有限 loss/梯度，學習率 {adam.lr} 可能過大"
                    )
                params = adam.step(params, grad)

            train_loss = _evaluate(params, d, config, warm, train)
            val_loss = _evaluate(params, d, config, warm, val)
            history.train_loss.append(train_loss)
            history.val_loss.append(val_loss)
            history.learning_rate.append(adam.lr)
            logger.debug("epoch %d: train=%.6f val=%.6f lr=%.2e", epoch, train_loss, val_loss, adam.lr)

            if val_loss < best_val:
                best_val = val_loss
                best_params = params.copy()
                history.best_epoch = epoch
                stale = 0
                since_decay = 0
            else:
                stale += 1
                since_decay += 1
                if since_decay >= config.lr_decay_window:
                    adam.lr *= config.lr_decay_factor
                    since_decay = 0
                    logger.debug("驗證 loss 連續 %d 個 epoch 未改善，學習率降為 %.2e", config.lr_decay_window, adam.lr)
                if stale >= config.patience:
                    logger.info("early stopping 於 epoch %d（最佳 epoch %d）", epoch, history.best_epoch)
                    break

    final_loss = _evaluate(best_params, d, config, warm, train)
    if final_loss > history.warm_start_loss:
        logger.warning(
            "訓練後 loss %.6f 高於 warm start %.6f，改用 warm start",
            final_loss, history.warm_start_loss,
        )
        best_params = np.zeros_like(best_params)
        final_loss = history.warm_start_loss
        history.fell_back_to_warm_start = True
    history.final_train_loss = final_loss

    model = TransformModel.compose(SkewParams(d, best_params), config.gamma, warm, seed=config.seed)
    logger.info(
        "訓練完成: loss %.6f → %.6f，正交性誤差 %.2e",
        history.warm_start_loss, final_loss, model.orthogonality_error(),
    )
    return model, history


def train_transform(data, config: TrainConfig | None = None) -> TransformModel:
    """訓練能量壓縮轉換，回傳的模型訓練集 loss 不高於 PCA warm start。"""
    model, _ = train_transform_with_history(data, config)
    return model
