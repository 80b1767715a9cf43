"""Channel ensembles, spectral transforms and system parameters.

The downlink has K single-antenna users and N transmit antennas
(inverse load factor alpha = N/K).  An ensemble is either the iid
Gaussian model (entries CN(0, 1/N), unit expected row norm) or an
empirical one described by the eigenvalues of the Gram matrix
R = H^dagger H.

The R-transform of the Gram spectrum drives all replica predictions.
For the iid ensemble it is alpha^{-1} / (1 - w); for an empirical
spectrum it is obtained by numerically inverting the Stieltjes
transform G(s) = mean(1/(s - lambda)) and evaluating G^{-1}(w) - 1/w.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc


@dataclass(frozen=True)
class SystemParams:
    """Scalar system parameters of the precoding rule."""

    gamma: float = 1.0      # received-signal scaling, > 0
    lam: float = 0.0        # power-control multiplier, >= 0
    sigma_u2: float = 1.0   # user-symbol variance, > 0
    sigma_n2: float = 0.0   # receiver noise variance, >= 0

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError("gamma must be nonnegative and finite")
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError("lam must be nonnegative and finite")
        if not (np.isfinite(self.sigma_u2) and self.sigma_u2 > 0):
            raise ValueError("sigma_u2 must be positive and finite")
        if not (np.isfinite(self.sigma_n2) and self.sigma_n2 >= 0):
            raise ValueError("sigma_n2 must be nonnegative and finite")


@dataclass(frozen=True, eq=False)
class ChannelEnsemble:
    """K x N channel ensemble with an analytic or empirical Gram spectrum."""

    K: int
    N: int
    eigenvalues: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.K < 1 or self.N < 1:
            raise ValueError("K and N must be >= 1")
        if self.eigenvalues is not None:
            ev = np.asarray(self.eigenvalues, dtype=float)
            if ev.size == 0 or np.any(ev < 0) or not np.all(np.isfinite(ev)):
                raise ValueError("empirical eigenvalues must be finite and nonnegative")
            object.__setattr__(self, "eigenvalues", ev)

    @classmethod
    def iid(cls, K: int, N: int) -> "ChannelEnsemble":
        return cls(K, N)

    @classmethod
    def empirical(cls, K: int, N: int, eigenvalues) -> "ChannelEnsemble":
        return cls(K, N, np.asarray(eigenvalues, dtype=float))

    @property
    def alpha(self) -> float:
        return self.N / self.K

    @property
    def is_iid(self) -> bool:
        return self.eigenvalues is None


def sample_channel(ens: ChannelEnsemble, seed: int) -> np.ndarray:
    """Draw a K x N matrix with iid CN(0, 1/N) entries, reproducibly."""
    if not ens.is_iid:
        raise ValueError("only the iid ensemble defines a matrix realization")
    rng = np.random.default_rng(seed)
    scale = np.sqrt(1.0 / (2.0 * ens.N))
    return scale * (rng.standard_normal((ens.K, ens.N))
                    + 1j * rng.standard_normal((ens.K, ens.N)))


def sample_symbols(K: int, sigma_u2: float, rng: np.random.Generator) -> np.ndarray:
    """User data vector u ~ CN(0, sigma_u2 I)."""
    scale = np.sqrt(sigma_u2 / 2.0)
    return scale * (rng.standard_normal(K) + 1j * rng.standard_normal(K))


class TransformDomainError(ValueError):
    """Argument outside the domain of the spectral transform."""


def _stieltjes(eigs: np.ndarray, s: float) -> float:
    return float(np.mean(1.0 / (s - eigs)))


def _invert_stieltjes(eigs: np.ndarray, w: float) -> float:
    """Solve mean(1/(s - lambda)) = w for s outside the spectrum support."""
    lo_ev = float(eigs.min())
    hi_ev = float(eigs.max())
    spread = max(hi_ev - lo_ev, 1.0)
    if w > 0:
        # branch s > max(lambda): G decreases from +inf to 0+
        a = hi_ev + 1e-12 * spread
        b = hi_ev + 1.0 / w + spread
        while _stieltjes(eigs, b) > w:
            b += b - hi_ev
            if b > 1e12:
                raise TransformDomainError("Stieltjes inversion bracket expansion failed")
        lo, hi = a, b
    else:
        # branch s < min(lambda): G decreases from 0- to -inf
        b = lo_ev - 1e-12 * spread
        a = lo_ev + 1.0 / w - spread  # w < 0 so 1/w < 0
        while _stieltjes(eigs, a) < w:
            a -= lo_ev - a + spread
            if a < -1e12:
                raise TransformDomainError("Stieltjes inversion bracket expansion failed")
        lo, hi = a, b
    return float(brentq(lambda s: _stieltjes(eigs, s) - w, lo, hi,
                        xtol=1e-14, rtol=1e-15, maxiter=300))


def r_transform(ens: ChannelEnsemble, w: float) -> float:
    """R-transform of the Gram spectrum of the ensemble at w."""
    w = float(w)
    if ens.is_iid:
        if w >= 1.0:
            raise TransformDomainError("iid R-transform requires w < 1")
        return (1.0 / ens.alpha) / (1.0 - w)
    eigs = ens.eigenvalues
    if w == 0.0:
        return float(np.mean(eigs))
    s = _invert_stieltjes(eigs, w)
    return s - 1.0 / w


def r_transform_derivative(ens: ChannelEnsemble, w: float) -> float:
    """d/dw of the R-transform; analytic for iid, central difference otherwise."""
    w = float(w)
    if ens.is_iid:
        if w >= 1.0:
            raise TransformDomainError("iid R-transform requires w < 1")
        return (1.0 / ens.alpha) / (1.0 - w) ** 2
    h = 1e-6 * max(1.0, abs(w))
    return (r_transform(ens, w + h) - r_transform(ens, w - h)) / (2.0 * h)


def gaussian_q(x) -> float | np.ndarray:
    """Standard Gaussian tail probability Q(x) = P(Z > x)."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))
    return float(out) if np.ndim(x) == 0 else out
