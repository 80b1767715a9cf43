"""Replica-symmetric predictors of the asymptotic precoding distortion.

``rs_solve`` iterates the two coupled saddle-point equations

    chi = (1/f) * E[ Re{ xhat(z) z^* } ]
    q   = E[ |xhat(z)|^2 ]

with xhat(z) = argmin_{x in X} |z - c x|, c = (R(-chi) + lam) / f and
f = sqrt((q - chi*gamma*sigma_u^2) R'(-chi) + gamma*sigma_u^2 R(-chi)),
for a general constraint set and Gram spectrum.  The expectations over
the complex Gaussian measure are evaluated with a kink-aware radial rule
(see ``quadrature``), or with a tensor Gauss-Hermite rule when one is
passed explicitly.

``rs_peak_power`` and ``rs_psk`` are the closed-form specializations for
the iid ensemble (erfc-based peak-power system; explicit PSK formula);
they serve as independent cross-checks of the general solver.

For some parameters the fixed point escapes to chi -> infinity.  That is
the zero-distortion branch: the constraint leaves enough freedom to null
the residual exactly in the large-system limit.  Solvers return it as a
flagged solution with distortion 0 rather than failing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .channel import ChannelEnsemble, SystemParams, gaussian_q, r_transform, \
    r_transform_derivative
from .constraints import ConstraintSet
from .quadrature import QuadratureRule, radial_rule

CHI_DIVERGED = 1e9


class ReplicaConvergenceError(RuntimeError):
    """No convergent fixed point was found."""


class ReplicaValidityError(ValueError):
    """Closed-form solution left its validity region."""


@dataclass
class RSSolution:
    q: float
    chi: float
    f: float
    e: float
    distortion: float
    converged: bool
    residual: float
    diverged: bool = False
    candidates: tuple = field(default=(), repr=False)

    @property
    def distortion_db(self) -> float:
        return 10.0 * np.log10(self.distortion) if self.distortion > 0 else -np.inf


def rs_moments(cset: ConstraintSet, c: float,
               quad: QuadratureRule | None = None,
               n_radial: int = 48, n_angular: int = 48,
               rule: tuple[np.ndarray, np.ndarray] | None = None
               ) -> tuple[float, float]:
    """(E[Re{xhat(z) z^*}], E[|xhat(z)|^2]) for z ~ CN(0, 1).

    With ``quad`` given, the tensor Gauss-Hermite rule is used directly.
    Otherwise the integral is reduced to the radial direction using the
    phase symmetry of the set (full rotation invariance, or the M-fold
    sector symmetry of PSK) and evaluated with panels split at the
    radial kinks, which is accurate to near machine precision.
    """
    if quad is not None:
        xh = cset.minimize(quad.nodes, c)
        m1 = float(quad.expect((xh * np.conj(quad.nodes)).real))
        m2 = float(quad.expect(np.abs(xh) ** 2))
        return m1, m2
    if rule is None:
        rule = radial_rule(cset.radial_kinks(c), n_panel=n_radial,
                           n_tail=n_radial)
    t, wt = rule
    r = np.sqrt(t)
    if cset.rotation_invariant:
        xh = cset.minimize(r.astype(complex), c)
        m1 = float(np.sum(wt * (xh.real * r)))
        m2 = float(np.sum(wt * np.abs(xh) ** 2))
        return m1, m2
    # M-fold symmetry: one angular sector carries the full phase average
    M = cset.order
    xg, wg = leggauss(n_angular)
    theta = (np.pi / M) * xg
    wtheta = 0.5 * wg  # (pi/M) * wg * (M / (2 pi)) * M
    z = r[:, None] * np.exp(1j * theta[None, :])
    xh = cset.minimize(z, c)
    g1 = (xh * np.conj(z)).real
    g2 = np.abs(xh) ** 2
    m1 = float(np.sum(wt[:, None] * wtheta[None, :] * g1))
    m2 = float(np.sum(wt[:, None] * wtheta[None, :] * g2))
    return m1, m2


def rs_distortion(q: float, chi: float, ens: ChannelEnsemble,
                  params: SystemParams) -> float:
    """D = gamma*sigma_u^2 + alpha * d/dchi[(q - chi*gamma*sigma_u^2) chi R(-chi)]."""
    gs = params.gamma * params.sigma_u2
    if ens.is_iid:
        # expanding R(-chi) = alpha^{-1}/(1+chi) collapses to a rational form
        return (q + gs) / (1.0 + chi) ** 2
    h = 1e-6
    def g(x):
        return (q - x * gs) * x * r_transform(ens, -x)
    return gs + ens.alpha * (g(chi + h) - g(chi - h)) / (2.0 * h)


def _diverged_solution(q: float, params: SystemParams) -> RSSolution:
    return RSSolution(q=q, chi=np.inf, f=0.0, e=params.lam, distortion=0.0,
                      converged=True, residual=0.0, diverged=True)


def rs_solve(cset: ConstraintSet, ens: ChannelEnsemble, params: SystemParams,
             quad: QuadratureRule | None = None, tol: float = 1e-10,
             max_iter: int = 10_000, damping: float = 0.5,
             inits: tuple[tuple[float, float], ...] | None = None) -> RSSolution:
    """Solve the coupled equations by damped fixed-point iteration.

    Several (q0, chi0) initializations are run; distinct fixed points are
    collected in ``candidates`` and the largest-distortion one is
    returned (the free-energy maximizer is not computable here, and the
    physical saddle point maximizes the free energy, which grows with
    the minimum of the objective).
    """
    gs = params.gamma * params.sigma_u2
    if inits is None:
        grid = (0.1, 1.0, 10.0)
        inits = tuple((q0, c0) for q0 in grid for c0 in grid)

    found: list[RSSolution] = []
    diverged_hit = None
    # the radial rule only depends on c through the kink locations; when
    # the set has none it can be shared across all iterations
    fixed_rule = radial_rule(()) if quad is None and not cset.radial_kinks(1.0) \
        else None
    for q0, chi0 in inits:
        q, chi = float(q0), float(chi0)
        theta = damping
        res_prev = np.inf
        sol = None
        for _ in range(max_iter):
            rad = (q - chi * gs) * r_transform_derivative(ens, -chi) \
                + gs * r_transform(ens, -chi)
            if rad <= 0.0:
                theta *= 0.5
                chi = 0.5 * chi
                if theta < 1e-6:
                    break
                continue
            f = np.sqrt(rad)
            c = (r_transform(ens, -chi) + params.lam) / f
            m1, m2 = rs_moments(cset, c, quad=quad, rule=fixed_rule)
            chi_new = m1 / f
            q_new = m2
            res = max(abs(chi_new - chi), abs(q_new - q))
            if res > res_prev * 1.5 and theta > 1e-3:
                theta *= 0.5
            res_prev = res
            chi = theta * chi_new + (1.0 - theta) * chi
            q = theta * q_new + (1.0 - theta) * q
            if chi > CHI_DIVERGED:
                diverged_hit = _diverged_solution(q, params)
                break
            if res < tol:
                e = r_transform(ens, -chi) + params.lam
                sol = RSSolution(q=q, chi=chi, f=f, e=e,
                                 distortion=rs_distortion(q, chi, ens, params),
                                 converged=True, residual=res)
                break
        if sol is not None and not any(
                abs(sol.q - s.q) < 1e-6 * max(1.0, abs(s.q))
                and abs(sol.chi - s.chi) < 1e-6 * max(1.0, abs(s.chi))
                for s in found):
            found.append(sol)

    if not found:
        if diverged_hit is not None:
            return diverged_hit
        raise ReplicaConvergenceError(
            "no convergent RS fixed point for the given parameters")
    found.sort(key=lambda s: -s.distortion)
    best = found[0]
    best.candidates = tuple(found)
    return best


def rs_peak_power(ens: ChannelEnsemble, params: SystemParams, P: float,
                  tol: float = 1e-12, max_iter: int = 200_000,
                  damping: float = 0.5) -> RSSolution:
    """Closed-form RS system for the peak-power disk on the iid ensemble."""
    if not ens.is_iid:
        raise ValueError("peak-power closed forms hold for the iid ensemble only")
    if not P > 0:
        raise ValueError("P must be positive")
    alpha = ens.alpha
    gs = params.gamma * params.sigma_u2
    lam = params.lam
    q, chi = 0.5 * P, 1.0
    theta = damping
    res_prev = np.inf
    for _ in range(max_iter):
        c = np.sqrt(alpha * (q + gs)) / (alpha * lam * (1.0 + chi) + 1.0)
        expf = np.exp(-P / c ** 2)
        h = c - c * expf + np.sqrt(P * np.pi) * gaussian_q(np.sqrt(2.0 * P) / c)
        chi_new = np.sqrt(alpha / (q + gs)) * (1.0 + chi) * h
        q_new = c ** 2 * (1.0 - expf)
        res = max(abs(chi_new - chi) / max(1.0, abs(chi)),
                  abs(q_new - q) / max(1.0, abs(q)))
        if res > res_prev * 1.5 and theta > 1e-3:
            theta *= 0.5
        res_prev = res
        chi = theta * chi_new + (1.0 - theta) * chi
        q = theta * q_new + (1.0 - theta) * q
        if chi > CHI_DIVERGED:
            return _diverged_solution(q, params)
        if res < tol:
            f = np.sqrt((q + gs) / alpha) / (1.0 + chi)
            e = r_transform(ens, -chi) + lam
            return RSSolution(q=q, chi=chi, f=f, e=e,
                              distortion=(q + gs) / (1.0 + chi) ** 2,
                              converged=True, residual=res)
    raise ReplicaConvergenceError("peak-power RS iteration did not converge")


def rs_psk(M: int, ens: ChannelEnsemble, params: SystemParams) -> RSSolution:
    """Closed-form RS solution for M-PSK antennas (iid ensemble, q = 1).

    The formula is the lam -> 0 limit; lam does not enter it.
    """
    if not ens.is_iid:
        raise ValueError("PSK closed forms hold for the iid ensemble only")
    if M < 2:
        raise ValueError("M must be >= 2")
    alpha = ens.alpha
    gs = params.gamma * params.sigma_u2
    chi_inv = (2.0 / (M * np.sin(np.pi / M))) * np.sqrt(np.pi * (1.0 + gs) / alpha) - 1.0
    if chi_inv <= 0.0:
        raise ReplicaValidityError(
            f"PSK closed form invalid (chi^-1 = {chi_inv:.4g} <= 0): "
            "the fixed point escapes to the zero-distortion branch")
    chi = 1.0 / chi_inv
    q = 1.0
    f = np.sqrt((q + gs) / alpha) / (1.0 + chi)
    e = r_transform(ens, -chi)
    return RSSolution(q=q, chi=chi, f=f, e=e,
                      distortion=(1.0 + gs) / (1.0 + chi) ** 2,
                      converged=True, residual=0.0)


def rs_constant_envelope(ens: ChannelEnsemble, params: SystemParams,
                         P: float = 1.0) -> RSSolution:
    """RS solution for the constant-envelope circle on the iid ensemble.

    This is the M -> infinity limit of the PSK system with envelope
    power P (q = P exactly).  Returns the flagged zero-distortion branch
    when the fixed point escapes.
    """
    if not ens.is_iid:
        raise ValueError("constant-envelope closed form holds for the iid ensemble only")
    alpha = ens.alpha
    gs = params.gamma * params.sigma_u2
    a = 0.5 * np.sqrt(P * np.pi) / np.sqrt((P + gs) / alpha)  # chi/(1+chi)
    if a >= 1.0:
        return _diverged_solution(P, params)
    chi = a / (1.0 - a)
    f = np.sqrt((P + gs) / alpha) / (1.0 + chi)
    return RSSolution(q=P, chi=chi, f=f, e=r_transform(ens, -chi),
                      distortion=(P + gs) / (1.0 + chi) ** 2,
                      converged=True, residual=0.0)
