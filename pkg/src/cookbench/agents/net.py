"""Flat-parameter MLP with a policy head and a value head, plus Adam.

Two tanh hidden layers shared by both heads. Everything operates on a single
float32 parameter vector so checkpoints serialize losslessly and optimizers
stay trivial.
"""

from __future__ import annotations

import numpy as np

N_ACTIONS = 6


def param_length(obs_len: int, hidden: int, n_actions: int = N_ACTIONS) -> int:
    """obs_len*h + h (layer 1) + h*h + h (layer 2) + h*A + A (policy) + h + 1 (value)."""
    return obs_len * hidden + hidden + hidden * hidden + hidden + hidden * n_actions + n_actions + hidden + 1


def unpack(theta: np.ndarray, obs_len: int, hidden: int, n_actions: int = N_ACTIONS):
    """Views into the flat vector: (W1, b1, W2, b2, Wp, bp, wv, bv)."""
    o = 0
    W1 = theta[o : o + obs_len * hidden].reshape(hidden, obs_len)
    o += obs_len * hidden
    b1 = theta[o : o + hidden]
    o += hidden
    W2 = theta[o : o + hidden * hidden].reshape(hidden, hidden)
    o += hidden * hidden
    b2 = theta[o : o + hidden]
    o += hidden
    Wp = theta[o : o + hidden * n_actions].reshape(n_actions, hidden)
    o += hidden * n_actions
    bp = theta[o : o + n_actions]
    o += n_actions
    wv = theta[o : o + hidden]
    o += hidden
    bv = theta[o : o + 1]
    return W1, b1, W2, b2, Wp, bp, wv, bv


def init_params(obs_len: int, hidden: int, rng: np.random.Generator, n_actions: int = N_ACTIONS) -> np.ndarray:
    theta = np.zeros(param_length(obs_len, hidden, n_actions), dtype=np.float32)
    W1, b1, W2, b2, Wp, bp, wv, bv = unpack(theta, obs_len, hidden, n_actions)
    W1[:] = rng.standard_normal(W1.shape, dtype=np.float32) / np.sqrt(obs_len)
    W2[:] = rng.standard_normal(W2.shape, dtype=np.float32) / np.sqrt(hidden)
    # Small policy head: near-uniform initial action distribution.
    Wp[:] = rng.standard_normal(Wp.shape, dtype=np.float32) * (0.01 / np.sqrt(hidden))
    wv[:] = rng.standard_normal(wv.shape, dtype=np.float32) / np.sqrt(hidden)
    return theta


def forward(theta: np.ndarray, X: np.ndarray, obs_len: int, hidden: int, n_actions: int = N_ACTIONS):
    """Batched forward pass. Returns (logits, values, h1, h2)."""
    W1, b1, W2, b2, Wp, bp, wv, bv = unpack(theta, obs_len, hidden, n_actions)
    h1 = np.tanh(X @ W1.T + b1)
    h2 = np.tanh(h1 @ W2.T + b2)
    logits = h2 @ Wp.T + bp
    values = h2 @ wv + bv[0]
    return logits, values, h1, h2


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def backward(
    theta: np.ndarray,
    X: np.ndarray,
    h1: np.ndarray,
    h2: np.ndarray,
    d_logits: np.ndarray,
    d_values: np.ndarray,
    obs_len: int,
    hidden: int,
    n_actions: int = N_ACTIONS,
) -> np.ndarray:
    """Accumulate gradients for upstream gradients d_logits (B, A) and
    d_values (B,). The caller owns any 1/B scaling."""
    W1, b1, W2, b2, Wp, bp, wv, bv = unpack(theta, obs_len, hidden, n_actions)
    grad = np.zeros_like(theta)
    gW1, gb1, gW2, gb2, gWp, gbp, gwv, gbv = unpack(grad, obs_len, hidden, n_actions)

    gWp[:] = d_logits.T @ h2
    gbp[:] = d_logits.sum(axis=0)
    gwv[:] = d_values @ h2
    gbv[0] = d_values.sum()

    d_h2 = d_logits @ Wp + d_values[:, None] * wv
    d_z2 = d_h2 * (1.0 - h2 * h2)
    gW2[:] = d_z2.T @ h1
    gb2[:] = d_z2.sum(axis=0)

    d_h1 = d_z2 @ W2
    d_z1 = d_h1 * (1.0 - h1 * h1)
    gW1[:] = d_z1.T @ X
    gb1[:] = d_z1.sum(axis=0)
    return grad


class Adam:
    """Plain Adam on a flat parameter vector; state is serializable."""

    def __init__(self, size: int, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(size, dtype=np.float32)
        self.v = np.zeros(size, dtype=np.float32)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        mhat = self.m / (1.0 - self.beta1**self.t)
        vhat = self.v / (1.0 - self.beta2**self.t)
        theta -= (self.lr * mhat / (np.sqrt(vhat) + self.eps)).astype(np.float32)


def clip_global_norm(grad: np.ndarray, max_norm: float) -> float:
    """In-place global-norm clip; returns the pre-clip norm."""
    norm = float(np.sqrt(np.sum(grad.astype(np.float64) ** 2)))
    if max_norm > 0 and norm > max_norm:
        grad *= np.float32(max_norm / (norm + 1e-12))
    return norm
