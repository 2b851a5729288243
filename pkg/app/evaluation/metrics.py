"""
Multi-class evaluation: one-vs-rest tallies, accuracy, per-class
precision/recall/F1 and their support-weighted aggregates.

Conventions:
- any 0/0 quotient is 0 (including F1 when precision + recall == 0)
- zero-support classes carry zero weight in the aggregates
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np
from sklearn.metrics import accuracy_score, multilabel_confusion_matrix, precision_recall_fscore_support

from app.core.errors import MetricsError
from app.models.metrics import ClassMetrics, ClassRow, ConfusionTally, EvaluationReport
from app.models.taxonomy import IsicCode

HEADLINE_COLUMNS = ("Accuracy", "Precision weighted", "Recall weighted", "F1 weighted")


def _check(truths: Sequence[IsicCode], predictions: Sequence[IsicCode], labels: Sequence[IsicCode]) -> None:
    if len(truths) != len(predictions):
        raise MetricsError(f"length mismatch: {len(truths)} truths vs {len(predictions)} predictions")
    known = set(labels)
    if len(known) != len(labels):
        raise MetricsError("label list contains duplicates")
    for name, seq in (("truth", truths), ("prediction", predictions)):
        for value in seq:
            if value not in known:
                raise MetricsError(f"{name} label {value!r} is outside the label set")


def _ints(a: np.ndarray) -> Tuple[int, ...]:
    return tuple(int(x) for x in a)


def _floats(a: np.ndarray) -> Tuple[float, ...]:
    return tuple(float(x) for x in a)


def confusion_tallies(
    truths: Sequence[IsicCode],
    predictions: Sequence[IsicCode],
    labels: Sequence[IsicCode],
) -> ConfusionTally:
    _check(truths, predictions, labels)
    n, k = len(truths), len(labels)
    if n == 0:
        zeros = (0,) * k
        return ConfusionTally(labels=tuple(labels), tp=zeros, tn=zeros, fp=zeros, fn=zeros, n=0)
    # one 2x2 block per label: [[tn, fp], [fn, tp]]
    mcm = multilabel_confusion_matrix(list(truths), list(predictions), labels=list(labels))
    return ConfusionTally(
        labels=tuple(labels),
        tp=_ints(mcm[:, 1, 1]),
        tn=_ints(mcm[:, 0, 0]),
        fp=_ints(mcm[:, 0, 1]),
        fn=_ints(mcm[:, 1, 0]),
        n=n,
    )


def accuracy(truths: Sequence[IsicCode], predictions: Sequence[IsicCode]) -> float:
    """Correct predictions over all predictions."""
    if len(truths) != len(predictions):
        raise MetricsError(f"length mismatch: {len(truths)} truths vs {len(predictions)} predictions")
    if not truths:
        raise MetricsError("accuracy of an empty evaluation is undefined")
    return float(accuracy_score(list(truths), list(predictions)))


def one_vs_rest_accuracy(tally: ConfusionTally) -> float:
    """sum_k(TP_k + TN_k) / (n * |K|); inflated relative to accuracy() once |K| > 2."""
    if tally.n == 0:
        raise MetricsError("no samples")
    hits = sum(tally.tp) + sum(tally.tn)
    return hits / (tally.n * len(tally.labels))


def _divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return np.divide(num, den, out=np.zeros(len(num), dtype=np.float64), where=den != 0)


def per_class_prf(tally: ConfusionTally) -> ClassMetrics:
    """Per-class precision, recall and F1 straight from the one-vs-rest cells."""
    if tally.n == 0:
        raise MetricsError("no samples")
    tp, fp, fn = (np.asarray(c, dtype=np.float64) for c in (tally.tp, tally.fp, tally.fn))
    precision = _divide(tp, tp + fp)
    recall = _divide(tp, tp + fn)
    f1 = _divide(2 * precision * recall, precision + recall)
    return ClassMetrics(
        labels=tally.labels,
        precision=_floats(precision),
        recall=_floats(recall),
        f1=_floats(f1),
        support=_ints(tp + fn),
    )


def weighted_aggregate(metrics: ClassMetrics) -> Tuple[float, float, float]:
    support = np.asarray(metrics.support, dtype=np.float64)
    if support.sum() == 0:
        raise MetricsError("zero total support")
    p, r, f = (float(np.average(v, weights=support)) for v in (metrics.precision, metrics.recall, metrics.f1))
    return p, r, f


def classification_report(
    truths: Sequence[IsicCode],
    predictions: Sequence[IsicCode],
    labels: Sequence[IsicCode],
) -> EvaluationReport:
    tally = confusion_tallies(truths, predictions, labels)
    if tally.n == 0:
        raise MetricsError("no samples")
    y_true, y_pred, k = list(truths), list(predictions), list(labels)
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=k, average=None, zero_division=0
    )
    p_w, r_w, f_w, _ = precision_recall_fscore_support(y_true, y_pred, labels=k, average="weighted", zero_division=0)
    rows: List[ClassRow] = [
        ClassRow(label=label, precision=float(p), recall=float(r), f1=float(f), support=int(s))
        for label, p, r, f, s in zip(k, precision, recall, f1, support)
    ]
    return EvaluationReport(
        n=tally.n,
        accuracy=accuracy(y_true, y_pred),
        precision_weighted=float(p_w),
        recall_weighted=float(r_w),
        f1_weighted=float(f_w),
        one_vs_rest_accuracy=one_vs_rest_accuracy(tally),
        per_class=rows,
    )


def _pct(x: float) -> str:
    return f"{x * 100:.2f}%"


def render_report_table(report: EvaluationReport) -> str:
    """Two lines: the four headline column names, then their percentages."""
    values = (report.accuracy, report.precision_weighted, report.recall_weighted, report.f1_weighted)
    cells = [_pct(v) for v in values]
    widths = [max(len(h), len(c)) for h, c in zip(HEADLINE_COLUMNS, cells)]
    header = "  ".join(h.ljust(w) for h, w in zip(HEADLINE_COLUMNS, widths)).rstrip()
    row = "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return f"{header}\n{row}"
