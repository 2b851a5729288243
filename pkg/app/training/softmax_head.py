"""
Linear softmax classification head.

For one example x with true index y:
  p  = softmax(W x + b)
  e  = p - onehot(y)
  dW = outer(e, x), db = e
Mini-batch gradients and losses are means over the batch.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from app.core.errors import TrainingError
from app.models.embedding import EmbeddingVector, to_vector
from app.models.head import HeadWeights
from app.models.taxonomy import IsicCode

PROB_FLOOR = 1e-15


def init_head(dim: int, labels: Sequence[IsicCode], provider_id: str = "") -> HeadWeights:
    """Zero weights: the objective is convex and the start is exactly uniform."""
    if dim < 1:
        raise TrainingError("dim must be >= 1")
    if not labels:
        raise TrainingError("labels must be non-empty")
    k = len(labels)
    return HeadWeights(
        labels=tuple(labels),
        W=np.zeros((k, dim), dtype=np.float64),
        b=np.zeros(k, dtype=np.float64),
        provider_id=provider_id,
    )


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(weights: HeadWeights, x: EmbeddingVector) -> np.ndarray:
    x = to_vector(x, weights.dim)
    return _softmax_rows(weights.W @ x + weights.b)


def predict_proba(weights: HeadWeights, X: np.ndarray) -> np.ndarray:
    if X.ndim != 2 or X.shape[1] != weights.dim:
        raise TrainingError(f"expected an n x {weights.dim} matrix, got {X.shape}")
    return _softmax_rows(X @ weights.W.T + weights.b)


def cross_entropy(probabilities: np.ndarray, true_index: int) -> float:
    if not 0 <= true_index < probabilities.shape[0]:
        raise TrainingError(f"true index {true_index} out of range for {probabilities.shape[0]} classes")
    return float(-np.log(max(float(probabilities[true_index]), PROB_FLOOR)))


def gradients(weights: HeadWeights, x: EmbeddingVector, true_index: int) -> Tuple[np.ndarray, np.ndarray]:
    p = forward(weights, x)
    if not 0 <= true_index < p.shape[0]:
        raise TrainingError(f"true index {true_index} out of range for {p.shape[0]} classes")
    e = p.copy()
    e[true_index] -= 1.0
    return np.outer(e, np.asarray(x, dtype=np.float64)), e


def batch_gradients(weights: HeadWeights, X: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """Mean loss and mean gradients over the rows of X."""
    n = X.shape[0]
    P = predict_proba(weights, X)
    rows = np.arange(n)
    loss = float(np.mean(-np.log(np.maximum(P[rows, y], PROB_FLOOR))))
    E = P
    E[rows, y] -= 1.0
    return loss, E.T @ X / n, E.mean(axis=0)


def rank(weights: HeadWeights, probabilities: np.ndarray, top_n: int) -> List[Tuple[IsicCode, float]]:
    """Top-n labels by descending probability; ties by ascending code."""
    if top_n < 1:
        raise TrainingError("top_n must be >= 1")
    order = sorted(range(len(weights.labels)), key=lambda k: (-probabilities[k], weights.labels[k]))
    return [(weights.labels[k], float(probabilities[k])) for k in order[:top_n]]


def predict_label(weights: HeadWeights, x: EmbeddingVector) -> IsicCode:
    return rank(weights, forward(weights, x), 1)[0][0]
