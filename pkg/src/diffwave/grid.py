"""Uniform cell-centred grid on [0, L]."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid1D"]


@dataclass(frozen=True)
class Grid1D:
    L: float
    N: int

    def __post_init__(self):
        if self.N < 16:
            raise ValueError("grid needs at least 16 cells")
        if not self.L > 0:
            raise ValueError("domain length must be positive")

    @property
    def dx(self):
        return self.L / self.N

    @property
    def x(self):
        return (np.arange(self.N) + 0.5) * self.dx

    @property
    def faces(self):
        return np.arange(self.N + 1) * self.dx

    def cell_averages(self, func, order=5):
        """Cell averages of ``func`` by Gauss-Legendre quadrature in each cell."""
        nodes, weights = np.polynomial.legendre.leggauss(order)
        pts = self.x[:, None] + 0.5 * self.dx * nodes[None, :]
        return 0.5 * (np.asarray(func(pts), dtype=float) @ weights)
