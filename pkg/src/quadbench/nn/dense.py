"""Minimal dense network: forward pass and exact reverse-mode gradients.

Float64 throughout. Only the fully connected / ELU family needed by the
trainer is supported; there is no general autodiff graph.
"""
from __future__ import annotations

import numpy as np


def elu(x):
    """Exponential linear unit: x for x > 0, exp(x) - 1 otherwise."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0.0, x, np.expm1(x))


def elu_grad(x):
    """Derivative of elu. Both one-sided limits at 0 equal 1."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0.0, 1.0, np.exp(x))


def _orthogonal(rows: int, cols: int, gain: float, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal-like init: QR of a Gaussian draw, sign-fixed, scaled by gain."""
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))  # make decomposition unique
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


class ShapeError(ValueError):
    """Input or gradient dimensions do not match the network."""


class DenseNet:
    """Fully connected net: (linear -> ELU) per hidden layer, linear output.

    Weights are (out, in) float64 matrices. The forward pass accepts a single
    vector (n,) or a batch (B, n). Instances are treated as immutable during
    rollout collection; parameter updates happen in a single-writer phase.
    """

    def __init__(self, layer_sizes, rng: np.random.Generator | None = None,
                 hidden_gain: float = 1.0, output_gain: float = 0.01):
        layer_sizes = [int(n) for n in layer_sizes]
        if len(layer_sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        if any(n <= 0 for n in layer_sizes):
            raise ValueError("layer sizes must be positive")
        self.layer_sizes = layer_sizes
        if rng is None:
            rng = np.random.default_rng(0)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        last = len(layer_sizes) - 2
        for i, (n_in, n_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
            gain = output_gain if i == last else hidden_gain
            self.weights.append(_orthogonal(n_out, n_in, gain, rng))
            self.biases.append(np.zeros(n_out, dtype=np.float64))

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        """Flat list [W0, b0, W1, b1, ...]; aliases the live arrays."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def set_parameters(self, params) -> None:
        expected = 2 * len(self.weights)
        if len(params) != expected:
            raise ShapeError(f"expected {expected} parameter arrays, got {len(params)}")
        for i in range(len(self.weights)):
            self.weights[i][...] = params[2 * i]
            self.biases[i][...] = params[2 * i + 1]

    def copy_parameters(self) -> list[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_inputs:
            raise ShapeError(
                f"input has {x.shape[-1]} features, network expects {self.n_inputs}")
        return x

    def forward(self, x):
        """Deterministic forward pass; batch dimension optional."""
        y, _ = self._forward_cached(x)
        return y

    def _forward_cached(self, x):
        x = self._check_input(x)
        pre = []   # pre-activation of each layer
        acts = [x]
        h = x
        n = len(self.weights)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.T + b
            pre.append(z)
            h = z if i == n - 1 else elu(z)
            acts.append(h)
        return h, (pre, acts)

    def backward(self, x, upstream_grad):
        """Exact gradients of upstream_grad . forward(x).

        Returns (weight_grads, bias_grads, input_grad). Batched inputs
        accumulate (sum) parameter gradients over the batch.
        """
        y, (pre, acts) = self._forward_cached(x)
        g = np.asarray(upstream_grad, dtype=np.float64)
        if g.shape != y.shape:
            raise ShapeError(f"upstream gradient shape {g.shape} != output shape {y.shape}")
        single = g.ndim == 1
        if single:
            g = g[None, :]
        weight_grads = [np.empty_like(w) for w in self.weights]
        bias_grads = [np.empty_like(b) for b in self.biases]
        delta = g
        for i in range(len(self.weights) - 1, -1, -1):
            a_in = acts[i]
            if a_in.ndim == 1:
                a_in = a_in[None, :]
            weight_grads[i][...] = delta.T @ a_in
            bias_grads[i][...] = delta.sum(axis=0)
            delta = delta @ self.weights[i]
            if i > 0:
                z = pre[i - 1]
                if z.ndim == 1:
                    z = z[None, :]
                delta = delta * elu_grad(z)
        input_grad = delta[0] if single else delta
        return weight_grads, bias_grads, input_grad
