"""One-step replica-symmetry-breaking refinement of the distortion.

The system has four scalars (q1, p1, chi1, mu1) with eta1 = chi1 +
mu1 p1.  At fixed mu1, three moment equations determine (q1, p1, chi1)
through double Gaussian integrals over (z, y) with the tilted weight

    Y(y, z) = exp(-mu1 * min_x [ e1 |x|^2 - 2 Re{x (f1 z + g1 y)^*} ])

normalized over y for each z.  A fourth scalar equation fixes mu1.  The
symmetric solution p1 = 0 reproduces the plain replica-symmetric answer;
a root with p1 > 0 signals broken symmetry and replaces it.

The double integrals use a tensor Gauss-Hermite rule over the two
complex variables.  For the binary alphabet (2-PSK) every integrand
depends on Re z and Re y only, so the grid collapses to two real axes
and a much finer rule is affordable; that path is used automatically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq, root

from .channel import ChannelEnsemble, SystemParams, r_transform, \
    r_transform_derivative
from .constraints import ConstraintSet
from .replica import RSSolution, rs_solve

_P1_FLOOR = 1e-12
_CHI_FLOOR = 1e-12


@dataclass
class RSBSolution:
    q1: float
    p1: float
    chi1: float
    mu1: float
    eta1: float
    e1: float
    f1: float
    g1: float
    distortion: float
    converged: bool
    residual: float
    reduced_to_rs: bool = False
    candidates: tuple = field(default=(), repr=False)

    @property
    def distortion_db(self) -> float:
        return 10.0 * np.log10(self.distortion) if self.distortion > 0 else -np.inf


def rsb1_distortion(sol: RSBSolution, ens: ChannelEnsemble,
                    params: SystemParams) -> float:
    """Distortion at a 1-RSB point; equals the RS value when p1 = 0."""
    return _distortion(sol.q1, sol.p1, sol.chi1, sol.mu1, ens, params)


def _distortion(q1: float, p1: float, chi1: float, mu1: float,
                ens: ChannelEnsemble, params: SystemParams) -> float:
    gs = params.gamma * params.sigma_u2
    alpha = ens.alpha
    eta1 = chi1 + mu1 * p1
    r_chi = r_transform(ens, -chi1)
    r_eta = r_transform(ens, -eta1)
    rp_eta = r_transform_derivative(ens, -eta1)
    return (gs - (alpha * chi1 / mu1) * r_chi
            + alpha * (q1 + eta1 / mu1 - 2.0 * gs * eta1) * r_eta
            - alpha * eta1 * (q1 - gs * eta1) * rp_eta)


def _r_integral(ens: ChannelEnsemble, chi1: float, eta1: float,
                n: int = 64) -> float:
    """integral of R(-w) dw from chi1 to eta1."""
    if ens.is_iid:
        return np.log((1.0 + eta1) / (1.0 + chi1)) / ens.alpha
    xg, wg = leggauss(n)
    mid, half = 0.5 * (chi1 + eta1), 0.5 * (eta1 - chi1)
    w = mid + half * xg
    vals = np.array([r_transform(ens, -wi) for wi in w])
    return float(half * np.sum(wg * vals))


def _axes(cset: ConstraintSet, nodes_per_axis: int, binary_nodes: int):
    """(z nodes, z weights, y nodes, y weights) for the double integral.

    Binary alphabet: real axes (all integrands are even in the imaginary
    parts and the minimizer depends on the real part only).  Otherwise:
    full complex tensor grids.
    """
    if cset.kind == "mpsk" and cset.order == 2:
        # hermgauss overflows during the Newton refinement above ~350 nodes
        x, w = hermgauss(min(binary_nodes, 340))
        w = w / np.sqrt(np.pi)
        return x.astype(complex), w, x.astype(complex), w
    x, w = hermgauss(nodes_per_axis)
    w = w / np.sqrt(np.pi)
    z = (x[:, None] + 1j * x[None, :]).ravel()
    wz = (w[:, None] * w[None, :]).ravel()
    return z, wz, z.copy(), wz.copy()


class _System:
    """Moment integrals of the broken-symmetry saddle point at fixed mu1."""

    def __init__(self, cset, ens, params, nodes_per_axis=40, binary_nodes=120):
        self.cset = cset
        self.ens = ens
        self.params = params
        self.gs = params.gamma * params.sigma_u2
        self.zn, self.wz, self.yn, self.wy = _axes(cset, nodes_per_axis,
                                                   binary_nodes)

    def coefficients(self, q1, p1, chi1, mu1):
        ens, gs = self.ens, self.gs
        # keep trial points raised by the root finder inside the domain
        q1 = min(max(q1, 0.0), 1e9)
        chi1 = min(max(chi1, _CHI_FLOOR), 1e9)
        p1 = min(max(p1, 0.0), 1e9)
        eta1 = chi1 + mu1 * p1
        e1 = max(r_transform(ens, -chi1) + self.params.lam, 1e-300)
        if ens.is_iid:
            f1 = np.sqrt((q1 + gs) / ens.alpha) / (1.0 + eta1)
        else:
            rad = gs * r_transform(ens, -eta1) \
                + (q1 - gs * eta1) * r_transform_derivative(ens, -eta1)
            f1 = np.sqrt(max(rad, 1e-300))
        g1 = np.sqrt(max((r_transform(ens, -chi1)
                          - r_transform(ens, -eta1)) / mu1, 0.0))
        return eta1, e1, f1, g1

    def integrals(self, q1, p1, chi1, mu1):
        """(eta1, e1, f1, g1, Iz, Iabs, Iy, T) at the current point."""
        eta1, e1, f1, g1 = self.coefficients(q1, p1, chi1, mu1)
        W = f1 * self.zn[:, None] + g1 * self.yn[None, :]
        xh = self.cset.minimize(W, e1)
        m = e1 * np.abs(xh) ** 2 - 2.0 * (xh * np.conj(W)).real
        a = -mu1 * m
        amax = a.max(axis=1, keepdims=True)
        yw = np.exp(a - amax)
        norm = (yw * self.wy[None, :]).sum(axis=1, keepdims=True)
        yt = yw / norm
        ww = self.wz[:, None] * self.wy[None, :]
        iz = float(np.sum(ww * yt * (xh * np.conj(self.zn[:, None])).real))
        iabs = float(np.sum(ww * yt * np.abs(xh) ** 2))
        iy = float(np.sum(ww * yt * (xh * np.conj(self.yn[None, :])).real))
        t = float(np.sum(self.wz * (amax[:, 0] + np.log(norm[:, 0]))))
        return eta1, e1, f1, g1, iz, iabs, iy, t

    def step(self, q1, p1, chi1, mu1):
        """One update of (q1, p1, chi1) from the three moment equations."""
        eta1, e1, f1, g1, iz, iabs, iy, _ = self.integrals(q1, p1, chi1, mu1)
        eta_new = iz / f1
        total = iabs  # q1 + p1
        if g1 > 0:
            q_new = (iy / g1 - eta_new) / mu1
        else:
            q_new = total
        p_new = max(total - q_new, 0.0)
        chi_new = max(eta_new - mu1 * p_new, _CHI_FLOOR)
        q_new = total - p_new
        return q_new, p_new, chi_new

    def solve_inner(self, mu1, q0, p0, chi0, tol=1e-11, max_iter=800,
                    damping=0.5):
        """(q1, p1, chi1) at fixed mu1, by a quasi-Newton root with a
        damped-iteration fallback."""

        def fun(v):
            q1, p1, chi1 = abs(v[0]), np.exp(min(v[1], 25.0)), \
                np.exp(min(v[2], 25.0))
            qn, pn, cn = self.step(q1, p1, chi1, mu1)
            return [qn - q1, pn - p1, cn - chi1]

        v0 = [q0, np.log(max(p0, _P1_FLOOR)), np.log(max(chi0, _CHI_FLOOR))]
        try:
            sol = root(fun, v0, method="hybr", tol=1e-12)
            if sol.success and np.max(np.abs(sol.fun)) < 1e-8:
                q1, p1, chi1 = abs(sol.x[0]), np.exp(sol.x[1]), np.exp(sol.x[2])
                return q1, p1, chi1, True
        except (ValueError, FloatingPointError):
            pass
        q1, p1, chi1 = q0, max(p0, _P1_FLOOR), max(chi0, _CHI_FLOOR)
        theta = damping
        for _ in range(max_iter):
            qn, pn, cn = self.step(q1, p1, chi1, mu1)
            res = max(abs(qn - q1), abs(pn - p1), abs(cn - chi1))
            q1 = theta * qn + (1.0 - theta) * q1
            p1 = theta * pn + (1.0 - theta) * p1
            chi1 = theta * cn + (1.0 - theta) * chi1
            if res < tol:
                return q1, p1, chi1, True
        return q1, p1, chi1, False

    def mu_residual(self, q1, p1, chi1, mu1):
        """Scalar equation for mu1 (zero at a consistent saddle point).

        The double-integral term enters through T = E_z log E_y Y.  In
        the bracket multiplying R(-eta1), the chi1 mu1 gamma sigma_u^2
        term appears with a plus sign; with a minus sign the equation is
        never satisfied by the symmetric p1 -> 0 solution in the small
        mu1 limit, and its roots contradict the known coincidence of the
        broken and symmetric answers at small alpha.
        """
        ens, gs, lam = self.ens, self.gs, self.params.lam
        eta1, e1, f1, g1, iz, iabs, iy, t = self.integrals(q1, p1, chi1, mu1)
        r_chi = r_transform(ens, -chi1)
        r_eta = r_transform(ens, -eta1)
        rp_eta = r_transform_derivative(ens, -eta1)
        lhs = _r_integral(ens, chi1, eta1)
        rhs = (t - 2.0 * chi1 * r_chi
               + (mu1 * q1 + 2.0 * eta1 - 2.0 * mu1 * eta1 * gs
                  + 2.0 * chi1 * mu1 * gs) * r_eta
               - 2.0 * mu1 * eta1 * (q1 - gs * eta1) * rp_eta
               + lam * mu1 * (p1 + q1))
        return lhs - rhs


def _reduced_solution(rs: RSSolution, ens, params) -> RSBSolution:
    return RSBSolution(q1=rs.q, p1=0.0, chi1=rs.chi, mu1=1.0, eta1=rs.chi,
                       e1=rs.e, f1=rs.f, g1=0.0, distortion=rs.distortion,
                       converged=rs.converged, residual=rs.residual,
                       reduced_to_rs=True)


def rsb1_solve(cset: ConstraintSet, ens: ChannelEnsemble, params: SystemParams,
               nodes_per_axis: int = 40, binary_nodes: int = 200,
               mu_grid: np.ndarray | None = None,
               rs: RSSolution | None = None) -> RSBSolution:
    """Solve the 1-RSB system; fall back to the symmetric solution.

    The mu1 equation is scanned on a log grid; each sign change is
    refined by bisection with the inner three equations re-solved at
    every trial mu1 (warm started along the scan).  A broken-symmetry
    point (p1 > 0) is preferred when one exists, the largest-distortion
    one if there are several; otherwise the symmetric solution is
    returned flagged ``reduced_to_rs``.  All converged points are kept
    in ``candidates``.
    """
    if rs is None:
        rs = rs_solve(cset, ens, params)
    if rs.diverged:
        # the symmetric solution escaped to zero distortion; start the
        # broken-symmetry search from a generic point instead
        state0 = (1.0, 0.1, 1.0)
    else:
        state0 = (rs.q, 0.05 * max(rs.q, 1.0), rs.chi)
    sys_ = _System(cset, ens, params, nodes_per_axis, binary_nodes)
    if mu_grid is None:
        mu_grid = np.geomspace(1e-3, 1e3, 31)

    # scan the mu1 axis, tracking the inner solution as a warm start
    scan = []
    state = state0
    for mu1 in mu_grid:
        q1, p1, chi1, ok = sys_.solve_inner(mu1, *state)
        if not ok:
            continue
        state = (q1, max(p1, 1e-6), chi1)
        scan.append((mu1, q1, p1, chi1, sys_.mu_residual(q1, p1, chi1, mu1)))

    roots = []
    for (mua, qa, pa, ca, ra), (mub, qb, pb, cb, rb) in zip(scan, scan[1:]):
        if not (np.isfinite(ra) and np.isfinite(rb)) or ra * rb > 0:
            continue
        cache = {"state": (qa, max(pa, 1e-6), ca)}

        def fres(mu1):
            q1, p1, chi1, ok = sys_.solve_inner(mu1, *cache["state"])
            if ok:
                cache["state"] = (q1, max(p1, 1e-6), chi1)
            return sys_.mu_residual(q1, p1, chi1, mu1)

        try:
            mu_star = brentq(fres, mua, mub, xtol=1e-10, rtol=1e-12)
        except (ValueError, RuntimeError):
            continue
        q1, p1, chi1, ok = sys_.solve_inner(mu_star, *cache["state"])
        if not ok:
            continue
        res = sys_.mu_residual(q1, p1, chi1, mu_star)
        roots.append((mu_star, q1, p1, chi1, res))

    broken = []
    for mu1, q1, p1, chi1, res in roots:
        if p1 <= 1e-8:
            continue
        d = _distortion(q1, p1, chi1, mu1, ens, params)
        if not np.isfinite(d) or d < 0:
            continue
        eta1, e1, f1, g1 = sys_.coefficients(q1, p1, chi1, mu1)
        broken.append(RSBSolution(q1=q1, p1=p1, chi1=chi1, mu1=mu1, eta1=eta1,
                                  e1=e1, f1=f1, g1=g1, distortion=d,
                                  converged=True, residual=abs(res)))
    symmetric = _reduced_solution(rs, ens, params)
    if broken:
        broken.sort(key=lambda s: -s.distortion)
        best = broken[0]
        best.candidates = tuple(broken) + (symmetric,)
        return best
    symmetric.candidates = (symmetric,)
    return symmetric
