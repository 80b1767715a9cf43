"""Quadrature for expectations over the complex standard Gaussian measure.

The measure is Dz = pi^{-1} exp(-|z|^2) dz.  Two rules are provided:

* ``QuadratureRule`` -- a tensor product of two real Gauss-Hermite rules,
  used for the double integrals of the 1-RSB system.
* ``radial_rule`` -- a 1-D rule in t = |z|^2 (density exp(-t)) built from
  a Gauss-Legendre panel up to each known kink plus a shifted
  Gauss-Laguerre tail.  Combined with the phase symmetry of the
  constraint sets, this evaluates the RS moment integrals to near
  machine precision even though the integrands have radial kinks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_laguerre


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor Gauss-Hermite rule for integrals against Dz."""

    nodes_per_axis: int
    axis_nodes: np.ndarray    # 1-D Gauss-Hermite nodes
    axis_weights: np.ndarray  # 1-D weights, normalized to sum to 1
    nodes: np.ndarray         # complex nodes, length nodes_per_axis**2
    weights: np.ndarray       # product weights, sum to 1

    @classmethod
    def complex_gaussian(cls, nodes_per_axis: int = 40) -> "QuadratureRule":
        x, w = hermgauss(nodes_per_axis)
        w = w / np.sqrt(np.pi)
        z = (x[:, None] + 1j * x[None, :]).ravel()
        wz = (w[:, None] * w[None, :]).ravel()
        return cls(nodes_per_axis, x, w, z, wz)

    def expect(self, values: np.ndarray) -> complex:
        """Weighted sum of integrand values at ``self.nodes``."""
        return np.sum(self.weights * values)


@lru_cache(maxsize=32)
def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


@lru_cache(maxsize=32)
def _lag(n: int) -> tuple[np.ndarray, np.ndarray]:
    return roots_laguerre(n)


def radial_rule(kinks: tuple[float, ...] = (), n_panel: int = 48,
                n_tail: int = 48,
                tail_start: float = 6.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for integrals of f(t) exp(-t) dt over t in [0, inf).

    ``kinks`` are |z| values where the integrand is non-smooth.  The rule
    is built in the radius r = sqrt(t): Gauss-Legendre panels with weight
    2 r exp(-r^2) split at the kink radii up to ``tail_start``, and a
    shifted Gauss-Laguerre rule in t covers the tail.  Working in r keeps
    the sqrt(t) factors of the moment integrands smooth at the origin.
    """
    breaks = sorted(r for r in kinks if np.isfinite(r) and 0.0 < r < 24.0)
    edges = [0.0] + breaks
    if edges[-1] < tail_start:
        edges.append(tail_start)
    nodes, weights = [], []
    xg, wg = _gl(n_panel)
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        r = mid + half * xg
        nodes.append(r * r)
        weights.append(half * wg * 2.0 * r * np.exp(-r * r))
    t0 = edges[-1] ** 2
    xl, wl = _lag(n_tail)
    nodes.append(t0 + xl)
    weights.append(wl * np.exp(-t0))
    return np.concatenate(nodes), np.concatenate(weights)
