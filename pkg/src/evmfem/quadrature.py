"""Tensor Gauss-Legendre rules on axis-aligned rectangles."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_1d(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_unit_square(n):
    """n x n tensor rule on [0, 1]^2 as flat arrays (xi, eta, w)."""
    x, w = gauss_1d(n)
    xi, eta = np.meshgrid(x, x, indexing="xy")
    ww = np.outer(w, w)
    return xi.ravel(), eta.ravel(), ww.ravel()


def rect_points(rects, n):
    """Quadrature points and weights on a batch of rectangles.

    Args:
        rects: (m, 4) array of (x0, y0, x1, y1).
        n: points per direction.

    Returns:
        X, Y, W arrays of shape (m, n*n); W already includes the area.
    """
    rects = np.asarray(rects, dtype=float).reshape(-1, 4)
    xi, eta, w = gauss_unit_square(n)
    dx = (rects[:, 2] - rects[:, 0])[:, None]
    dy = (rects[:, 3] - rects[:, 1])[:, None]
    X = rects[:, 0][:, None] + dx * xi[None, :]
    Y = rects[:, 1][:, None] + dy * eta[None, :]
    W = dx * dy * w[None, :]
    return X, Y, W


def segment_points(p0, p1, n):
    """Gauss points along a batch of segments p0 -> p1, weights include length."""
    p0 = np.asarray(p0, dtype=float).reshape(-1, 2)
    p1 = np.asarray(p1, dtype=float).reshape(-1, 2)
    t, w = gauss_1d(n)
    X = p0[:, 0][:, None] + (p1[:, 0] - p0[:, 0])[:, None] * t[None, :]
    Y = p0[:, 1][:, None] + (p1[:, 1] - p0[:, 1])[:, None] * t[None, :]
    length = np.hypot(p1[:, 0] - p0[:, 0], p1[:, 1] - p0[:, 1])
    W = length[:, None] * w[None, :]
    return X, Y, W
