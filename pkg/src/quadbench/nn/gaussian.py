"""State-independent Gaussian action head with a learnable log-std vector."""
from __future__ import annotations

import numpy as np

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
_LOG_2PI = float(np.log(2.0 * np.pi))


class GaussianHead:
    """Diagonal Gaussian over actions: a = mean + exp(log_std) * eps.

    log_std is a learnable parameter, clamped to [LOG_STD_MIN, LOG_STD_MAX]
    after each optimizer step to avoid noise collapse or explosion.
    """

    def __init__(self, dim: int, init_log_std: float = 0.0):
        self.log_std = np.full(dim, float(init_log_std), dtype=np.float64)

    @property
    def dim(self) -> int:
        return self.log_std.shape[0]

    def std(self) -> np.ndarray:
        return np.exp(self.log_std)

    def sample(self, mean, rng: np.random.Generator) -> np.ndarray:
        mean = np.asarray(mean, dtype=np.float64)
        return mean + self.std() * rng.standard_normal(mean.shape)

    def log_prob(self, mean, action) -> np.ndarray:
        """Log density of a diagonal Gaussian; sums over the action axis."""
        mean = np.asarray(mean, dtype=np.float64)
        action = np.asarray(action, dtype=np.float64)
        z = (action - mean) / self.std()
        return -0.5 * np.sum(z * z + 2.0 * self.log_std + _LOG_2PI, axis=-1)

    def entropy(self) -> float:
        return float(np.sum(self.log_std + 0.5 * (_LOG_2PI + 1.0)))

    def log_prob_grads(self, mean, action):
        """d log_prob / d mean and / d log_std, per sample.

        Returns (grad_mean, grad_log_std) with grad_mean shaped like mean and
        grad_log_std shaped like (..., dim) before any batch reduction.
        """
        mean = np.asarray(mean, dtype=np.float64)
        action = np.asarray(action, dtype=np.float64)
        var = np.exp(2.0 * self.log_std)
        diff = action - mean
        grad_mean = diff / var
        grad_log_std = diff * diff / var - 1.0
        return grad_mean, grad_log_std

    def clamp(self) -> None:
        np.clip(self.log_std, LOG_STD_MIN, LOG_STD_MAX, out=self.log_std)
