"""Minimal dense-network engine: parameters, layers, exact backprop, Adam/SGD.

Everything is float64. Layers accept a single vector or a (batch, dim)
matrix; gradients accumulate into Param.grad until the optimizer step
applies and zeroes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TANH = "tanh"
RELU = "relu"
IDENTITY = "identity"
ACTIVATIONS = (TANH, RELU, IDENTITY)


@dataclass
class Param:
    value: np.ndarray
    grad: np.ndarray = field(default=None)  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self) -> None:
        self.value = np.asarray(self.value, dtype=np.float64)
        if self.grad is None:
            self.grad = np.zeros_like(self.value)

    def zero_grad(self) -> None:
        self.grad[...] = 0.0


def xavier_uniform(rng: np.random.Generator, out_dim: int, in_dim: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-bound, bound, size=(out_dim, in_dim))


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == TANH:
        return np.tanh(z)
    if name == RELU:
        return np.maximum(z, 0.0)
    return z


def act_grad_from_output(name: str, y: np.ndarray) -> np.ndarray:
    """d act/d z expressed through the activation output (holds for all three)."""
    if name == TANH:
        return 1.0 - y * y
    if name == RELU:
        return (y > 0).astype(np.float64)
    return np.ones_like(y)


class DenseLayer:
    """y = act(W x + b) with gradient accumulation on backward."""

    def __init__(self, w: Param, b: Param, activation: str = TANH):
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        if w.value.ndim != 2 or b.value.ndim != 1 or b.value.shape[0] != w.value.shape[0]:
            raise ValueError(
                f"shape mismatch: W {w.value.shape} incompatible with b {b.value.shape}"
            )
        self.w = w
        self.b = b
        self.activation = activation

    @classmethod
    def create(
        cls,
        rng: np.random.Generator,
        in_dim: int,
        out_dim: int,
        activation: str = TANH,
        name: str = "",
    ) -> "DenseLayer":
        w = Param(xavier_uniform(rng, out_dim, in_dim), name=f"{name}/w" if name else "w")
        b = Param(np.zeros(out_dim), name=f"{name}/b" if name else "b")
        return cls(w, b, activation)

    @property
    def in_dim(self) -> int:
        return self.w.value.shape[1]

    @property
    def out_dim(self) -> int:
        return self.w.value.shape[0]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, tuple]:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.in_dim:
            raise ValueError(
                f"input has dim {x.shape[-1]}, layer expects {self.in_dim}"
            )
        z = x @ self.w.value.T + self.b.value
        y = _act(self.activation, z)
        return y, (x, y)

    def backward(self, cache: tuple, dy: np.ndarray) -> np.ndarray:
        x, y = cache
        dy = np.asarray(dy, dtype=np.float64)
        if dy.shape != y.shape:
            raise ValueError(f"dy has shape {dy.shape}, expected {y.shape}")
        dz = dy * act_grad_from_output(self.activation, y)
        if x.ndim == 1:
            self.w.grad += np.outer(dz, x)
            self.b.grad += dz
        else:
            self.w.grad += dz.T @ x
            self.b.grad += dz.sum(axis=0)
        return dz @ self.w.value


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - np.max(logits, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - np.max(logits, axis=axis, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=axis, keepdims=True))


class Adam:
    """Bias-corrected Adam; step() applies the update and zeroes grads."""

    def __init__(
        self,
        params: list[Param],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.value) for p in self.params]
        self.v = [np.zeros_like(p.value) for p in self.params]

    def step(self) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, m, v in zip(self.params, self.m, self.v):
            g = p.grad
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.value -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
            p.zero_grad()


class SGD:
    def __init__(self, params: list[Param], lr: float = 1e-2):
        self.params = list(params)
        self.lr = lr
        self.t = 0

    def step(self) -> None:
        self.t += 1
        for p in self.params:
            p.value -= self.lr * p.grad
            p.zero_grad()
