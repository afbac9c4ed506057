"""Adam training with minibatching, validation tracking, and early stopping.

Two loops share the optimizer and checkpoint plumbing: the supervised loop
shuffles minibatches each epoch and applies the patience rule, and the
residual loop runs a fixed number of full-batch epochs (the convention for
the differential-equation tasks, whose budgets are fixed per problem). Both
return the checkpoint with the smallest validation loss seen.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tape, grad
from .autodiff import ops
from .network import Model, unflatten_pieces

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 200_000
    patience: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


@dataclass(frozen=True)
class TrainOutcome:
    best_model: Model
    best_val_loss: float
    epochs_run: int
    history: tuple[tuple[float, float], ...]  # (train_loss, val_loss) per epoch
    failed: bool = False


def mse(predictions, targets) -> float:
    """Mean squared difference; the standard batch loss."""
    p = np.asarray(predictions, dtype=np.float64).ravel()
    t = np.asarray(targets, dtype=np.float64).ravel()
    if p.size == 0:
        raise ValueError("mse of empty vectors")
    if p.size != t.size:
        raise ValueError(f"mse length mismatch: {p.size} vs {t.size}")
    return float(np.mean((p - t) ** 2))


def adam_step(params: np.ndarray, g: np.ndarray, state: AdamState,
              lr: float) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; rejects non-finite gradient entries."""
    if params.shape != g.shape:
        raise ValueError("parameter/gradient length mismatch")
    bad = ~np.isfinite(g)
    if bad.any():
        idx = int(np.argmax(bad))
        raise ValueError(f"non-finite gradient entry at index {idx}: {g[idx]}")
    t = state.step + 1
    m = ADAM_BETA1 * state.m + (1.0 - ADAM_BETA1) * g
    v = ADAM_BETA2 * state.v + (1.0 - ADAM_BETA2) * g * g
    m_hat = m / (1.0 - ADAM_BETA1**t)
    v_hat = v / (1.0 - ADAM_BETA2**t)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return new_params, AdamState(m, v, t)


class EarlyStopping:
    """Counts consecutive epochs with validation loss above its running minimum."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = np.inf
        self.bad_streak = 0

    def update(self, val_loss: float) -> bool:
        """Record one epoch; returns True when the new loss is a new minimum."""
        if val_loss < self.best:
            self.best = val_loss
            self.bad_streak = 0
            return True
        if val_loss > self.best:
            self.bad_streak += 1
        else:  # exact tie is not an increase, so the streak is broken
            self.bad_streak = 0
        return False

    @property
    def should_stop(self) -> bool:
        return self.bad_streak >= self.patience


class _Checkpoint:
    def __init__(self, theta: np.ndarray):
        self.theta = theta.copy()
        self.val_loss = np.inf

    def offer(self, theta: np.ndarray, val_loss: float):
        if val_loss < self.val_loss:
            self.val_loss = val_loss
            self.theta = theta.copy()


def _supervised_loss_nodes(model, pieces_nodes, x, y):
    preds = model.forward(x, pieces=pieces_nodes)
    return ops.mean_square(preds - y)


def train_supervised(model: Model, train_xy, val_xy,
                     cfg: TrainConfig) -> TrainOutcome:
    """Minibatch Adam with per-epoch validation and the patience rule.

    train_xy, val_xy: tuples (x, y) with x of shape (in_dim, n) and y (1, n).
    The final short batch of each epoch is used, keeping the epoch loss an
    unbiased mean. Deterministic for a fixed config.
    """
    x_train, y_train = (np.asarray(a, dtype=np.float64) for a in train_xy)
    x_val, y_val = (np.asarray(a, dtype=np.float64) for a in val_xy)
    n = x_train.shape[1]
    if n == 0:
        raise ValueError("empty training set")

    rng = np.random.default_rng(cfg.seed)
    template = model.param_pieces()
    theta = model.flatten()
    state = AdamState.zeros(theta.size)
    stopper = EarlyStopping(cfg.patience)
    checkpoint = _Checkpoint(theta)
    history: list[tuple[float, float]] = []
    failed = False
    epochs_run = 0

    for _epoch in range(cfg.max_epochs):
        order = rng.permutation(n)
        sq_err_sum = 0.0
        pieces = unflatten_pieces(theta, template)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            xb, yb = x_train[:, idx], y_train[:, idx]
            tape = Tape()
            nodes = [tape.leaf(p) for p in pieces]
            loss = _supervised_loss_nodes(model, nodes, xb, yb)
            if not np.isfinite(loss.value):
                failed = True
                break
            try:
                g = grad(loss, nodes)
                theta, state = adam_step(theta, g, state, cfg.learning_rate)
            except ValueError:
                failed = True
                break
            pieces = unflatten_pieces(theta, template)
            sq_err_sum += loss.value * idx.size
        epochs_run = _epoch + 1
        if failed:
            break
        train_loss = sq_err_sum / n
        val_loss = mse(model.forward(x_val, pieces=pieces), y_val)
        history.append((train_loss, val_loss))
        if not np.isfinite(val_loss):
            failed = True
            break
        improved = stopper.update(val_loss)
        if improved:
            checkpoint.offer(theta, val_loss)
        if stopper.should_stop:
            break

    best = model.with_pieces(unflatten_pieces(checkpoint.theta, template))
    best_val = checkpoint.val_loss if np.isfinite(checkpoint.val_loss) else np.inf
    return TrainOutcome(best, float(best_val), epochs_run, tuple(history), failed)


def train_residual(model: Model, objective, epochs: int,
                   cfg: TrainConfig) -> TrainOutcome:
    """Fixed-budget Adam on a residual objective; no patience rule.

    `objective` supplies per-epoch collocation points (possibly jittered),
    a minibatch size, `loss_nodes` building the recorded batch loss, and a
    plain-float `validation_loss`. The smallest-validation checkpoint is
    returned, mirroring the reference solver convention for these tasks.
    """
    template = model.param_pieces()
    theta = model.flatten()
    state = AdamState.zeros(theta.size)
    checkpoint = _Checkpoint(theta)
    history: list[tuple[float, float]] = []
    failed = False
    epochs_run = 0
    rng = np.random.default_rng(cfg.seed)
    batch = getattr(objective, "batch_size", None)

    for _epoch in range(epochs):
        points = objective.epoch_points(rng)
        n = points.shape[1]
        order = rng.permutation(n) if batch else np.arange(n)
        step = batch or n
        sq_sum = 0.0
        pieces = unflatten_pieces(theta, template)
        epochs_run = _epoch + 1
        for start in range(0, n, step):
            idx = order[start:start + step]
            tape = Tape()
            nodes = [tape.leaf(p) for p in pieces]
            loss = objective.loss_nodes(model, nodes, points[:, idx])
            if not np.isfinite(loss.value):
                failed = True
                break
            try:
                g = grad(loss, nodes)
                theta, state = adam_step(theta, g, state, cfg.learning_rate)
            except ValueError:
                failed = True
                break
            pieces = unflatten_pieces(theta, template)
            sq_sum += loss.value * idx.size
        if failed:
            break
        val_loss = objective.validation_loss(model, pieces)
        history.append((sq_sum / n, val_loss))
        if not np.isfinite(val_loss):
            failed = True
            break
        checkpoint.offer(theta, val_loss)

    best = model.with_pieces(unflatten_pieces(checkpoint.theta, template))
    best_val = checkpoint.val_loss if np.isfinite(checkpoint.val_loss) else np.inf
    return TrainOutcome(best, float(best_val), epochs_run, tuple(history), failed)


def mse_loss_fns(model: Model, x, y):
    """value_at/grad_at pair over flat parameters, for gradient checking."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    template = model.param_pieces()

    class _Fns:
        @staticmethod
        def value_at(theta):
            pieces = unflatten_pieces(theta, template)
            return mse(model.forward(x, pieces=pieces), y)

        @staticmethod
        def grad_at(theta):
            tape = Tape()
            nodes = [tape.leaf(p) for p in unflatten_pieces(theta, template)]
            loss = _supervised_loss_nodes(model, nodes, x, y)
            return grad(loss, nodes)

    return _Fns


def export_history(outcome: TrainOutcome, path) -> None:
    """Write the per-epoch loss curve as CSV (epoch, train_loss, val_loss)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss"])
        for i, (tr, va) in enumerate(outcome.history, start=1):
            writer.writerow([i, repr(tr), repr(va)])
