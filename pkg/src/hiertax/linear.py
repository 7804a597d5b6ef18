"""Multinomial logistic (softmax) models trained with categorical cross-entropy.

This is the shared primitive behind both hierarchical estimators: the
bottom-up estimator is one softmax over all leaves, the top-down estimator
is one softmax per internal node.

Training is mini-batch adaptive-moment gradient descent with decoupled
weight decay (bias excluded) and a linear warmup + linear decay learning
rate schedule.  Weights and biases start at zero, which makes two edge
cases analytically checkable: zero epochs predict the uniform
distribution, and classes absent from the training set keep probabilities
no higher than uniform.

Runs are bitwise reproducible for a fixed seed and config under
single-threaded execution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    ClassIndexOutOfRange,
    DimensionMismatch,
    EmptyTrainingSet,
    IndexOutOfRange,
)
from .features import SparseVector
from .hierarchy import ClassCode

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 0.01
    epochs: int = 10
    batch_size: int = 32
    warmup_steps: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be non-negative")

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)


@dataclass
class SoftmaxModel:
    """Trained softmax over an ordered class list."""

    class_list: tuple[ClassCode, ...]
    weights: np.ndarray  # (classes, features)
    bias: np.ndarray  # (classes,)
    config: TrainConfig
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return len(self.class_list)

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    def predict_proba(self, x: SparseVector) -> np.ndarray:
        return predict_proba(self, x)


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def _stack_csr(vectors: Sequence[SparseVector], width: int) -> sp.csr_matrix:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        indptr[i + 1] = indptr[i] + len(v)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.empty(0, np.int64)
    data = np.concatenate([v.values for v in vectors]) if vectors else np.empty(0, np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), width))


def batch_loss_and_grads(
    weights: np.ndarray,
    bias: np.ndarray,
    x: sp.csr_matrix,
    labels: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy over a batch and its analytic gradients.

    The gradient of softmax composed with cross-entropy is the classic
    ``p - y`` form; this function is also the target of the finite
    difference gradient check.
    """
    n = x.shape[0]
    probs = _softmax_rows(x @ weights.T + bias)
    loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), labels], 1e-300))))
    grad_logits = probs
    grad_logits[np.arange(n), labels] -= 1.0
    grad_logits /= n
    grad_w = np.asarray((x.T @ grad_logits).T)
    grad_b = grad_logits.sum(axis=0)
    return loss, grad_w, grad_b


def _lr_factor(step: int, warmup: int, total: int) -> float:
    # linear warmup over `warmup` steps, then linear decay to zero at `total`
    if warmup > 0 and step <= warmup:
        return step / warmup
    if total <= warmup:
        return 1.0
    return max(0.0, (total - step) / (total - warmup))


def train_softmax(
    examples: Sequence[tuple[SparseVector, int]],
    class_list: Sequence[ClassCode],
    config: TrainConfig,
    width: int | None = None,
) -> SoftmaxModel:
    """Train a softmax classifier on (sparse vector, class index) pairs.

    ``width`` fixes the feature dimension; when omitted it is inferred
    from the largest index seen.  Examples are visited in seeded shuffled
    order, so identical inputs and seed give identical weights.
    """
    if not examples:
        raise EmptyTrainingSet("no training examples")
    class_list = tuple(class_list)
    n_classes = len(class_list)
    for _, label in examples:
        if not 0 <= label < n_classes:
            raise ClassIndexOutOfRange(
                f"class index {label} outside 0..{n_classes - 1}"
            )
    if width is None:
        width = max((int(v.indices[-1]) + 1 for v, _ in examples if len(v)), default=0)

    weights = np.zeros((n_classes, width), dtype=np.float64)
    bias = np.zeros(n_classes, dtype=np.float64)
    model = SoftmaxModel(class_list=class_list, weights=weights, bias=bias, config=config)
    if config.epochs == 0:
        return model

    x_all = _stack_csr([v for v, _ in examples], width)
    y_all = np.array([label for _, label in examples], dtype=np.int64)
    n = len(examples)
    batches_per_epoch = math.ceil(n / config.batch_size)
    total_steps = config.epochs * batches_per_epoch

    m_w = np.zeros_like(weights)
    v_w = np.zeros_like(weights)
    m_b = np.zeros_like(bias)
    v_b = np.zeros_like(bias)
    rng = np.random.default_rng(config.seed)
    step = 0
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, grad_w, grad_b = batch_loss_and_grads(
                weights, bias, x_all[batch], y_all[batch]
            )
            epoch_loss += loss * len(batch)
            step += 1
            lr = config.learning_rate * _lr_factor(step, config.warmup_steps, total_steps)

            m_w = ADAM_BETA1 * m_w + (1 - ADAM_BETA1) * grad_w
            v_w = ADAM_BETA2 * v_w + (1 - ADAM_BETA2) * grad_w**2
            m_b = ADAM_BETA1 * m_b + (1 - ADAM_BETA1) * grad_b
            v_b = ADAM_BETA2 * v_b + (1 - ADAM_BETA2) * grad_b**2
            m_hat_w = m_w / (1 - ADAM_BETA1**step)
            v_hat_w = v_w / (1 - ADAM_BETA2**step)
            m_hat_b = m_b / (1 - ADAM_BETA1**step)
            v_hat_b = v_b / (1 - ADAM_BETA2**step)
            weights -= lr * m_hat_w / (np.sqrt(v_hat_w) + ADAM_EPS)
            bias -= lr * m_hat_b / (np.sqrt(v_hat_b) + ADAM_EPS)
            # decoupled weight decay, never applied to the bias
            weights -= lr * config.weight_decay * weights
        model.epoch_losses.append(epoch_loss / n)
    return model


def predict_proba(model: SoftmaxModel, x: SparseVector) -> np.ndarray:
    """softmax(Wx + b); strictly positive, sums to 1 within 1e-9."""
    if len(x) and int(x.indices[-1]) >= model.width:
        raise DimensionMismatch(
            f"vector index {int(x.indices[-1])} >= model width {model.width}"
        )
    logits = model.bias.copy()
    if len(x):
        logits += model.weights[:, x.indices] @ x.values
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def predict_proba_many(model: SoftmaxModel, vectors: Sequence[SparseVector]) -> np.ndarray:
    """Batched probabilities, one row per input vector."""
    for v in vectors:
        if len(v) and int(v.indices[-1]) >= model.width:
            raise DimensionMismatch(
                f"vector index {int(v.indices[-1])} >= model width {model.width}"
            )
    x = _stack_csr(vectors, model.width)
    return _softmax_rows(x @ model.weights.T + model.bias)


def cce_loss(dist: Sequence[float], true_index: int) -> float:
    """Categorical cross-entropy of a distribution against one true class."""
    dist = np.asarray(dist, dtype=np.float64)
    if not 0 <= true_index < len(dist):
        raise IndexOutOfRange(f"index {true_index} outside 0..{len(dist) - 1}")
    return float(-np.log(dist[true_index]))
