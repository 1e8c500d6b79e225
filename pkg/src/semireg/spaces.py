"""Weighted discrete Lebesgue spaces on a finite grid.

A ``GridSpace`` is C^dim equipped with the norm

    ||x|| = (sum_i w_i |x_i|^p)^(1/p)      for finite p >= 1,
    ||x|| = max_i |x_i|                     for p = inf,

with strictly positive weights w (atom masses of the discrete measure;
they drop out of the sup norm).  All operator-norm and square-function
computations in the package measure vectors this way.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams

__all__ = ["GridSpace"]


@dataclass(frozen=True)
class GridSpace:
    dim: int
    weights: np.ndarray = field(repr=False)
    p: float

    def __init__(self, dim: int, weights=None, p: float = 2.0):
        if dim < 1:
            raise BadParams(f"space dimension must be >= 1, got {dim}")
        p = float(p)
        if not (p >= 1.0):
            raise BadParams(f"exponent p must satisfy p >= 1, got {p}")
        if weights is None:
            w = np.ones(dim)
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != (dim,):
            raise BadParams(f"weights shape {w.shape} does not match dim {dim}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise BadParams("weights must be finite and strictly positive")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "p", p)

    @classmethod
    def unit(cls, dim: int, p: float = 2.0) -> "GridSpace":
        return cls(dim, None, p)

    @property
    def is_sup(self) -> bool:
        return np.isinf(self.p)

    def norm(self, x) -> float:
        x = np.asarray(x).reshape(-1)
        if x.shape != (self.dim,):
            raise BadParams(f"vector length {x.size} does not match dim {self.dim}")
        if self.is_sup:
            return float(np.max(np.abs(x)))
        # Factoring out the peak keeps |x|^p inside double range for
        # arbitrarily large finite p.
        ax = np.abs(x)
        peak = float(np.max(ax)) if ax.size else 0.0
        if peak == 0.0:
            return 0.0
        return peak * float(
            np.sum(self.weights * (ax / peak) ** self.p) ** (1.0 / self.p))

    def norm_rows(self, rows: np.ndarray) -> np.ndarray:
        """Norm of each row of a (m, dim) array, vectorized."""
        rows = np.asarray(rows)
        if self.is_sup:
            return np.max(np.abs(rows), axis=-1)
        ar = np.abs(rows)
        peak = np.max(ar, axis=-1, keepdims=True)
        safe = np.where(peak > 0.0, peak, 1.0)
        scaled = ((ar / safe) ** self.p @ self.weights) ** (1.0 / self.p)
        return scaled * peak[..., 0]

    def with_p(self, p: float) -> "GridSpace":
        return GridSpace(self.dim, self.weights, p)
