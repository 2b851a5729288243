from __future__ import annotations

from typing import Tuple

import numpy as np

from app.core.errors import TrainingError
from app.models.head import AdamState, HeadWeights, TrainConfig


def init_adam_state(weights: HeadWeights) -> AdamState:
    return AdamState(
        m_W=np.zeros_like(weights.W),
        m_b=np.zeros_like(weights.b),
        v_W=np.zeros_like(weights.W),
        v_b=np.zeros_like(weights.b),
        t=0,
    )


def _update(theta, m, v, g, t, cfg: TrainConfig):
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g
    m_hat = m / (1.0 - cfg.adam_beta1 ** t)
    v_hat = v / (1.0 - cfg.adam_beta2 ** t)
    return theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_epsilon), m, v


def adam_step(
    weights: HeadWeights,
    state: AdamState,
    grads: Tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
) -> Tuple[HeadWeights, AdamState]:
    """One bias-corrected Adam update of (W, b); returns new objects."""
    dW, db = grads
    if dW.shape != weights.W.shape or db.shape != weights.b.shape:
        raise TrainingError("gradient shapes do not match the weights")
    if not (np.all(np.isfinite(dW)) and np.all(np.isfinite(db))):
        raise TrainingError("non-finite gradient entries")
    if state.t < 0:
        raise TrainingError("negative Adam step counter")

    t = state.t + 1
    W, m_W, v_W = _update(weights.W, state.m_W, state.v_W, dW, t, config)
    b, m_b, v_b = _update(weights.b, state.m_b, state.v_b, db, t, config)
    return (
        HeadWeights(labels=weights.labels, W=W, b=b, provider_id=weights.provider_id),
        AdamState(m_W=m_W, m_b=m_b, v_W=v_W, v_b=v_b, t=t),
    )
