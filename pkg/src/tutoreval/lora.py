"""Low-rank adapter numerics at desk scale.

A frozen base weight W gets a trainable update delta = alpha * up @ down,
where ``up`` is (out_dim, rank) and ``down`` is (rank, in_dim). The module
also carries the training hyperparameter record, the linear warmup
schedule, and L2 gradient-norm clipping. No optimizer state or real model
layers live here; everything is a pure function over explicit arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ParseError, ShapeError, ValidationError


@dataclass(frozen=True)
class TrainConfig:
    """Fine-tuning hyperparameter record; defaults are the shipped settings."""

    rank: int = 64
    alpha: float = 2.0
    dropout: float = 0.0
    learning_rate: float = 4e-5
    warmup_fraction: float = 0.10
    weight_decay: float = 0.05
    max_steps: int = 500
    clip_norm: float = 1.0
    max_seq_len: int = 2048
    batch_size: int = 2
    seed: int = 42
    eval_every: int = 50
    checkpoint_every: int = 100
    checkpoint_retention: int = 3

    def __post_init__(self) -> None:
        positive = (
            "rank", "alpha", "learning_rate", "max_steps", "clip_norm",
            "max_seq_len", "batch_size", "eval_every", "checkpoint_every",
            "checkpoint_retention",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        for name in ("dropout", "weight_decay"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")
        if not 0 < self.warmup_fraction < 1:
            raise ValidationError("warmup_fraction must lie in (0, 1)")

    def to_text(self) -> str:
        """Render as a flat key=value config document, one field per line."""
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str) -> "TrainConfig":
        """Parse a key=value config document; unknown keys are rejected."""
        types = {f.name: f.type for f in fields(cls)}
        values: dict = {}
        for lineno, line in enumerate(text.split("\n"), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"line {lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in types:
                raise ParseError(f"line {lineno}: unknown config key {key!r}")
            caster = int if types[key] == "int" else float
            try:
                values[key] = caster(raw.strip())
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad value for {key!r}: {raw.strip()!r}") from exc
        return cls(**values)


@dataclass(frozen=True)
class LoraAdapter:
    """Trainable low-rank pair attached to a frozen weight.

    ``up`` (out_dim, rank) and ``down`` (rank, in_dim) multiply to the
    update; ``alpha`` scales it.
    """

    up: np.ndarray
    down: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        up = np.asarray(self.up, dtype=float)
        down = np.asarray(self.down, dtype=float)
        if up.ndim != 2 or down.ndim != 2:
            raise ShapeError("adapter matrices must be 2-D")
        if up.shape[1] != down.shape[0]:
            raise ShapeError(
                f"rank mismatch: up is {up.shape}, down is {down.shape}"
            )
        if self.rank_limit(up.shape[0], down.shape[1]) < up.shape[1]:
            raise ValidationError(
                f"rank {up.shape[1]} exceeds min weight dimension "
                f"{self.rank_limit(up.shape[0], down.shape[1])}"
            )
        if not np.all(np.isfinite(up)) or not np.all(np.isfinite(down)):
            raise ValidationError("adapter matrices must be finite")
        if self.alpha <= 0:
            raise ValidationError("alpha must be positive")
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)

    @staticmethod
    def rank_limit(out_dim: int, in_dim: int) -> int:
        return min(out_dim, in_dim)

    @property
    def rank(self) -> int:
        return self.up.shape[1]

    @property
    def out_dim(self) -> int:
        return self.up.shape[0]

    @property
    def in_dim(self) -> int:
        return self.down.shape[1]


def init_adapter(dim: int, rank: int, alpha: float = 2.0, seed: int = 0) -> LoraAdapter:
    """Fresh square adapter: up ~ N(0, 0.02^2), down = 0, so the update starts at zero."""
    rng = np.random.default_rng(seed)
    return LoraAdapter(
        up=rng.normal(0.0, 0.02, size=(dim, rank)),
        down=np.zeros((rank, dim)),
        alpha=alpha,
    )


def delta_w(adapter: LoraAdapter) -> np.ndarray:
    """The weight update alpha * up @ down; rank is at most adapter.rank."""
    return adapter.alpha * (adapter.up @ adapter.down)


def effective_weight(base: np.ndarray, adapter: LoraAdapter) -> np.ndarray:
    """base + delta; the base stays frozen, only the adapter contributes change."""
    base = np.asarray(base, dtype=float)
    expected = (adapter.out_dim, adapter.in_dim)
    if base.shape != expected:
        raise ShapeError(f"base weight is {base.shape}, adapter update is {expected}")
    return base + delta_w(adapter)


def adapter_gradients(
    base: np.ndarray,
    adapter: LoraAdapter,
    input_vec: np.ndarray,
    loss_grad: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic loss gradients of y = (base + alpha*up@down) @ x w.r.t. the adapter.

    ``loss_grad`` is dL/dy. Returns (d_up, d_down); the frozen base receives
    no gradient. d_up = alpha * outer(loss_grad, down @ x) and
    d_down = alpha * outer(up.T @ loss_grad, x).
    """
    base = np.asarray(base, dtype=float)
    x = np.asarray(input_vec, dtype=float)
    g = np.asarray(loss_grad, dtype=float)
    if base.shape != (adapter.out_dim, adapter.in_dim):
        raise ShapeError(f"base weight is {base.shape}, expected {(adapter.out_dim, adapter.in_dim)}")
    if x.shape != (adapter.in_dim,):
        raise ShapeError(f"input vector is {x.shape}, expected ({adapter.in_dim},)")
    if g.shape != (adapter.out_dim,):
        raise ShapeError(f"loss gradient is {g.shape}, expected ({adapter.out_dim},)")
    d_up = adapter.alpha * np.outer(g, adapter.down @ x)
    d_down = adapter.alpha * np.outer(adapter.up.T @ g, x)
    return d_up, d_down


def warmup_lr(step: int, config: TrainConfig = TrainConfig()) -> float:
    """Linear warmup to the configured rate, then constant.

    The warmup window is ceil(warmup_fraction * max_steps) steps.
    """
    if step < 0:
        raise ValidationError(f"step {step} must be non-negative")
    if step > config.max_steps:
        raise ValidationError(f"step {step} exceeds max_steps {config.max_steps}")
    window = math.ceil(config.warmup_fraction * config.max_steps)
    if step < window:
        return config.learning_rate * (step / window)
    return config.learning_rate


def clip_gradient(g: np.ndarray, clip_norm: float) -> np.ndarray:
    """Rescale g onto the L2 ball of radius clip_norm; direction is preserved."""
    if clip_norm <= 0:
        raise ValidationError("clip_norm must be positive")
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise ValidationError("gradient has non-finite entries")
    norm = float(np.linalg.norm(g))
    if norm <= clip_norm:
        return g.copy()
    return g * (clip_norm / norm)
