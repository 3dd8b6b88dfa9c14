"""Quadrature rules on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> np.ndarray:
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))

    def mean_free(self, values) -> np.ndarray:
        values = np.asarray(values)
        return values - self.integrate(values)[..., None]


def gauss_legendre(panels: int = 32, order: int = 8) -> QuadratureGrid:
    """Open composite rule: `panels` equal panels with `order` nodes each."""
    if panels < 1 or order < 1:
        raise ValueError("need at least one panel and one node")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureGrid(nodes, weights)


def uniform(points: int = 65) -> QuadratureGrid:
    """Trapezoid rule on t = k / (points - 1), endpoints included."""
    if points < 2:
        raise ValueError("need at least two points")
    nodes = np.linspace(0.0, 1.0, points)
    weights = np.full(points, 1.0 / (points - 1))
    weights[[0, -1]] *= 0.5
    return QuadratureGrid(nodes, weights)


DEFAULT_GRID = gauss_legendre()
