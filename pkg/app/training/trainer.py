from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from app.core.errors import TrainingError
from app.evaluation.metrics import accuracy
from app.models.embedding import EmbeddingVector
from app.models.head import HeadWeights, TrainConfig, TrainHistory
from app.models.taxonomy import IsicCode
from app.training.adam import adam_step, init_adam_state
from app.training.softmax_head import batch_gradients, init_head, predict_label

logger = logging.getLogger(__name__)

Labeled = Tuple[EmbeddingVector, IsicCode]


def _stack(items: Sequence[Labeled], index: dict, dim: Optional[int], what: str) -> Tuple[np.ndarray, np.ndarray]:
    vectors, targets = [], []
    for i, (vec, label) in enumerate(items):
        if label not in index:
            raise TrainingError(f"{what} example {i} has label {label!r} outside the label list")
        v = np.asarray(vec, dtype=np.float64)
        if v.ndim != 1 or (dim is not None and v.shape[0] != dim):
            raise TrainingError(f"{what} example {i} has shape {v.shape}, expected ({dim},)")
        dim = v.shape[0]
        vectors.append(v)
        targets.append(index[label])
    return np.vstack(vectors), np.asarray(targets, dtype=np.int64)


def train_head(
    train: Sequence[Labeled],
    labels: Sequence[IsicCode],
    config: TrainConfig,
    eval_set: Optional[Sequence[Labeled]] = None,
    *,
    provider_id: str = "",
) -> Tuple[HeadWeights, TrainHistory]:
    """
    Mini-batch Adam on mean cross-entropy over precomputed embeddings.
    Fully determined by (train, labels, config); no early stopping.
    """
    if not train:
        raise TrainingError("empty training set")
    index = {label: k for k, label in enumerate(labels)}
    if len(index) != len(labels):
        raise TrainingError("duplicate labels")
    X, y = _stack(train, index, None, "train")
    n, dim = X.shape
    eval_X = eval_truths = None
    if eval_set:
        eval_X, _ = _stack(eval_set, index, dim, "eval")
        eval_truths = [label for _, label in eval_set]

    weights = init_head(dim, labels, provider_id)
    state = init_adam_state(weights)
    history = TrainHistory(epoch_eval_accuracy=[] if eval_X is not None else None)
    rng = np.random.default_rng(config.shuffle_seed)
    steps_per_epoch = math.ceil(n / config.batch_size)

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        epoch_losses = []
        for s in range(steps_per_epoch):
            batch = order[s * config.batch_size:(s + 1) * config.batch_size]
            loss, dW, db = batch_gradients(weights, X[batch], y[batch])
            history.step_losses.append(loss)
            epoch_losses.append(loss)
            weights, state = adam_step(weights, state, (dW, db), config)
        history.epoch_losses.append(float(np.mean(epoch_losses)))

        if eval_X is not None:
            preds = [predict_label(weights, x) for x in eval_X]
            acc = accuracy(eval_truths, preds)
            history.epoch_eval_accuracy.append(acc)
            logger.info("epoch %d/%d loss=%.6f eval_acc=%.4f", epoch, config.epochs, history.epoch_losses[-1], acc)
        else:
            logger.info("epoch %d/%d loss=%.6f", epoch, config.epochs, history.epoch_losses[-1])

    return weights, history
