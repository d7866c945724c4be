# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Dense tanh network with hand-written backpropagation, and the Adam optimizer."""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from . import constants
from .errors import ShapeError


@dataclass(eq=False)
class Mlp:
    """Fully connected network: tanh on hidden layers, linear output.

    weights[i] has shape (out, in), biases[i] shape (out,).
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("need one bias per weight matrix and at least one layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ShapeError(f"layer {i}: weight {w.shape} and bias {b.shape} do not match")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ShapeError(
                    f"layer {i} expects {w.shape[1]} inputs, previous layer gives "
                    f"{self.weights[i - 1].shape[0]}"
                )

    @classmethod
    def initialize(cls, sizes: Sequence[int], rng: np.random.Generator) -> "Mlp":
        """Uniform fan-in initialization: entries drawn from +-sqrt(1 / fan_in)."""
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = np.sqrt(1.0 / fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights=weights, biases=biases)

    @property
    def input_size(self) -> int:
        return int(self.weights[0].shape[1])

    @property
    def output_size(self) -> int:
        return int(self.weights[-1].shape[0])

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        return [tuple(int(d) for d in w.shape) for w in self.weights]

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
        """Return (output, cache); cache holds the input of every layer."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.input_size:
            raise ShapeError(
                f"input has dimension {x.shape[-1]}, network expects {self.input_size}"
            )
        cache = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            cache.append(h)
            h = h @ w.T + b
            if i < last:
                h = np.tanh(h)
        return h, cache

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(
        self, cache: List[np.ndarray], grad_out: np.ndarray
    ) -> Tuple[List[np.ndarray], np.ndarray]:
        """Gradients [dW0, db0, dW1, db1, ...] and the adjoint of the input, for a batch (B, in)."""
        grads: List[np.ndarray] = [None] * (2 * len(self.weights))
        grad = grad_out
        for i in range(len(self.weights) - 1, -1, -1):
            h_in = cache[i]
            grads[2 * i] = grad.T @ h_in
            grads[2 * i + 1] = grad.sum(axis=0)
            grad = grad @ self.weights[i]
            if i > 0:
                # h_in = tanh(z) for every layer after the first.
                grad = grad * (1.0 - h_in * h_in)
        return grads, grad

    def parameters(self) -> List[np.ndarray]:
        """Parameter arrays in optimizer order (views, not copies)."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.parameters()])

    def set_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for p in self.parameters():
            p[...] = flat[offset : offset + p.size].reshape(p.shape)
            offset += p.size
        if offset != flat.size:
            raise ShapeError(f"flat vector has {flat.size} entries, network has {offset}")

    def copy(self) -> "Mlp":
        return Mlp(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


def flatten(grads: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([g.ravel() for g in grads])


@dataclass
class Adam:
    """Adam with bias correction; updates parameter arrays in place."""

    learning_rate: float = constants.DEFAULT_LEARNING_RATE
    betas: Tuple[float, float] = constants.ADAM_BETAS
    eps: float = constants.ADAM_EPS
    steps: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        beta1, beta2 = self.betas
        self.steps += 1
        correction1 = 1.0 - beta1**self.steps
        correction2 = 1.0 - beta2**self.steps
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            p -= self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
