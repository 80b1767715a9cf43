"""Per-antenna signal alphabets and their scalar projection oracle.

Each transmit antenna is restricted to a set X of complex values.  Four
kinds are supported:

* ``unconstrained`` -- all of C
* ``disk``          -- |x|^2 <= P (instantaneous peak power P)
* ``circle``        -- |x|^2 == P (constant envelope)
* ``mpsk``          -- the M points sqrt(P) * exp(2j*pi*k/M), k = 1..M

The central operation is the scalar minimizer argmin_{x in X} |z - c*x|,
which every solver and fixed-point equation in this package is built on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNCONSTRAINED = "unconstrained"
DISK = "disk"
CIRCLE = "circle"
MPSK = "mpsk"


@dataclass(frozen=True)
class ConstraintSet:
    """A per-antenna alphabet with power parameter P and, for PSK, order M."""

    kind: str
    power: float = 1.0
    order: int = 0

    def __post_init__(self):
        if self.kind not in (UNCONSTRAINED, DISK, CIRCLE, MPSK):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind != UNCONSTRAINED and not self.power > 0:
            raise ValueError("power must be positive")
        if self.kind == MPSK and self.order < 2:
            raise ValueError("PSK order must be >= 2")

    # -- constructors ------------------------------------------------------

    @classmethod
    def unconstrained(cls) -> "ConstraintSet":
        return cls(UNCONSTRAINED)

    @classmethod
    def disk(cls, peak_power: float) -> "ConstraintSet":
        return cls(DISK, power=peak_power)

    @classmethod
    def circle(cls, power: float) -> "ConstraintSet":
        return cls(CIRCLE, power=power)

    @classmethod
    def mpsk(cls, order: int, power: float = 1.0) -> "ConstraintSet":
        return cls(MPSK, power=power, order=order)

    # -- basic queries -----------------------------------------------------

    @property
    def bounded(self) -> bool:
        return self.kind != UNCONSTRAINED

    @property
    def amplitude(self) -> float:
        """sqrt(P); meaningless for the unconstrained set."""
        return float(np.sqrt(self.power))

    def points(self) -> np.ndarray:
        """The M constellation points (PSK only), phase-sorted from 0."""
        if self.kind != MPSK:
            raise ValueError("points() is only defined for mpsk sets")
        k = np.arange(self.order)
        return self.amplitude * np.exp(2j * np.pi * k / self.order)

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        """Elementwise feasibility check within absolute tolerance."""
        x = np.asarray(x, dtype=complex)
        r = np.abs(x)
        if self.kind == UNCONSTRAINED:
            return np.isfinite(r)
        s = self.amplitude
        if self.kind == DISK:
            return r <= s + tol
        if self.kind == CIRCLE:
            return np.abs(r - s) <= tol
        # mpsk: membership in the finite point set
        pts = self.points()
        d = np.abs(x[..., None] - pts)
        return d.min(axis=-1) <= tol

    def minimize(self, z, c: float):
        """argmin_{x in X} |z - c*x|, elementwise over z, for scalar c > 0.

        Ties are broken toward the feasible point with smallest phase in
        [0, 2*pi).  The unconstrained set returns z / c exactly.
        """
        if not c > 0:
            raise ValueError("c must be positive")
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if self.kind == UNCONSTRAINED:
            out = z / c
        elif self.kind == DISK:
            r = np.abs(z)
            mag = np.minimum(self.amplitude, r / c)
            phase = np.where(r > 0, z / np.where(r > 0, r, 1.0), 1.0)
            out = phase * mag
        elif self.kind == CIRCLE:
            r = np.abs(z)
            phase = np.where(r > 0, z / np.where(r > 0, r, 1.0), 1.0)
            out = phase * self.amplitude
        else:  # mpsk: nearest phase, round-half-down so the smaller phase wins
            M = self.order
            theta = np.mod(np.angle(z), 2 * np.pi)
            k = np.ceil(theta * M / (2 * np.pi) - 0.5)
            k = np.mod(k, M)
            out = self.amplitude * np.exp(2j * np.pi * k / M)
        return out[0] if scalar else out

    # -- structure used by the replica quadrature --------------------------

    @property
    def rotation_invariant(self) -> bool:
        """True when e^{j phi} X = X for every phi."""
        return self.kind in (UNCONSTRAINED, DISK, CIRCLE)

    def radial_kinks(self, c: float) -> tuple[float, ...]:
        """|z| values where r -> minimize(r, c) is not smooth."""
        if self.kind == DISK:
            return (c * self.amplitude,)
        return ()
