"""Solvers for the constrained least-square-error precoding problem.

All solvers minimize ||H v - sqrt(gamma) u||^2 + lam ||v||^2 over v in
X^N for a per-antenna alphabet X:

* ``rzf_precode``   -- closed form for the unconstrained set
  (regularized zero forcing).
* ``lse_disk``      -- accelerated projected gradient for the peak-power
  disk (convex, converges to the global minimum).
* ``lse_circle``    -- cyclic phase coordinate descent with restarts for
  the constant-envelope circle.
* ``lse_mpsk``      -- discrete cyclic coordinate descent with restarts.
* ``lse_bruteforce``-- exhaustive enumeration oracle for small PSK
  instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import SystemParams
from .constraints import ConstraintSet


@dataclass
class PrecodeResult:
    v: np.ndarray
    objective: float
    iterations: int
    converged: bool
    residual_norm: float
    objective_trace: np.ndarray | None = field(default=None, repr=False)


def objective(H: np.ndarray, u: np.ndarray, params: SystemParams,
              x: np.ndarray) -> float:
    """||H x - sqrt(gamma) u||^2 + lam ||x||^2."""
    H = np.asarray(H)
    u = np.asarray(u)
    x = np.asarray(x)
    if H.shape != (u.shape[0], x.shape[0]):
        raise ValueError(f"dimension mismatch: H {H.shape}, u {u.shape}, x {x.shape}")
    r = H @ x - np.sqrt(params.gamma) * u
    return float(np.vdot(r, r).real + params.lam * np.vdot(x, x).real)


def _result(H, u, params, v, iterations, converged, trace=None) -> PrecodeResult:
    r = H @ v - np.sqrt(params.gamma) * u
    return PrecodeResult(
        v=v,
        objective=objective(H, u, params, v),
        iterations=iterations,
        converged=converged,
        residual_norm=float(np.linalg.norm(r)),
        objective_trace=None if trace is None else np.asarray(trace),
    )


def rzf_precode(H: np.ndarray, u: np.ndarray, params: SystemParams) -> PrecodeResult:
    """Regularized zero-forcing: v = sqrt(gamma) H^dag (H H^dag + lam I)^{-1} u."""
    H = np.asarray(H, dtype=complex)
    u = np.asarray(u, dtype=complex)
    K = H.shape[0]
    A = H @ H.conj().T + params.lam * np.eye(K)
    try:
        y = np.linalg.solve(A, u)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "singular system: H H^dag is rank deficient and lam = 0") from exc
    v = np.sqrt(params.gamma) * (H.conj().T @ y)
    return _result(H, u, params, v, iterations=1, converged=True)


def _spectral_norm_sq(H: np.ndarray, iters: int = 50, tol: float = 1e-8) -> float:
    """sigma_max(H)^2 by power iteration on H^dag H."""
    rng = np.random.default_rng(0)
    N = H.shape[1]
    x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    x /= np.linalg.norm(x)
    lam_prev = 0.0
    for _ in range(iters):
        y = H.conj().T @ (H @ x)
        lam = float(np.linalg.norm(y))
        if lam == 0.0:
            return 0.0
        x = y / lam
        if abs(lam - lam_prev) <= tol * lam:
            break
        lam_prev = lam
    return lam


def lse_disk(H: np.ndarray, u: np.ndarray, params: SystemParams, P: float,
             tol: float = 1e-10, max_iter: int = 100_000) -> PrecodeResult:
    """Peak-power precoding by Nesterov-accelerated projected gradient.

    The problem is convex, so the returned point is a global minimizer up
    to the stopping tolerance (relative objective change below ``tol``).
    """
    if not P > 0:
        raise ValueError("P must be positive")
    H = np.asarray(H, dtype=complex)
    u = np.asarray(u, dtype=complex)
    cset = ConstraintSet.disk(P)
    b = np.sqrt(params.gamma) * u
    L = 2.0 * (_spectral_norm_sq(H) + params.lam)
    step = 1.0 / L

    def project(x):
        r = np.abs(x)
        scale = np.minimum(1.0, cset.amplitude / np.where(r > 0, r, 1.0))
        return x * scale

    warm_params = SystemParams(params.gamma, max(params.lam, 1e-12),
                               params.sigma_u2, params.sigma_n2)
    v = project(rzf_precode(H, u, warm_params).v)
    y = v.copy()
    t_mom = 1.0
    f_prev = objective(H, u, params, v)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        grad = 2.0 * (H.conj().T @ (H @ y - b)) + 2.0 * params.lam * y
        v_new = project(y - step * grad)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom ** 2))
        y = v_new + ((t_mom - 1.0) / t_new) * (v_new - v)
        v, t_mom = v_new, t_new
        f = objective(H, u, params, v)
        if f > f_prev:  # monotone restart of the momentum sequence
            y = v.copy()
            t_mom = 1.0
        if abs(f - f_prev) <= tol * max(1.0, abs(f_prev)):
            converged = True
            f_prev = f
            break
        f_prev = f
    return _result(H, u, params, v, iterations=it, converged=converged)


def _coordinate_descent(H, b, params, update, v0, tol, max_iter):
    """Cyclic coordinate descent skeleton shared by circle and PSK solvers.

    ``update(hcol, rfull)`` returns the optimal scalar for one coordinate
    given the residual with that coordinate removed.
    """
    v = v0.copy()
    r = b - H @ v
    const = params.lam * float(np.vdot(v, v).real)  # |v_i| fixed per set
    f = float(np.vdot(r, r).real) + const
    trace = [f]
    N = v.shape[0]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        for i in range(N):
            hcol = H[:, i]
            rfull = r + hcol * v[i]
            vi = update(hcol, rfull)
            r = rfull - hcol * vi
            v[i] = vi
        f_new = float(np.vdot(r, r).real) + const
        trace.append(f_new)
        if abs(f - f_new) <= tol * max(1.0, abs(f)):
            converged = True
            f = f_new
            break
        f = f_new
    return v, sweeps, converged, trace


def _restart_starts(cset, H, u, params, restarts, seed):
    """RZF-projected warm start followed by seeded random starts."""
    N = H.shape[1]
    starts = []
    try:
        warm = rzf_precode(H, u, SystemParams(params.gamma, max(params.lam, 1e-9),
                                              params.sigma_u2, params.sigma_n2)).v
        starts.append(cset.minimize(warm, 1.0))
    except np.linalg.LinAlgError:
        pass
    master = np.random.SeedSequence(seed)
    for child in master.spawn(max(restarts - len(starts), 0)):
        rng = np.random.default_rng(child)
        z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        starts.append(cset.minimize(z, 1.0))
    return starts


def lse_circle(H: np.ndarray, u: np.ndarray, params: SystemParams, P: float,
               tol: float = 1e-10, max_iter: int = 1000, restarts: int = 8,
               seed: int = 0) -> PrecodeResult:
    """Constant-envelope precoding by cyclic phase coordinate descent.

    Each coordinate update aligns v_i with the matched-filtered residual,
    which is the exact scalar minimizer on the circle; the objective is
    therefore non-increasing.  The best of ``restarts`` runs is returned.
    """
    if not P > 0:
        raise ValueError("P must be positive")
    H = np.asarray(H, dtype=complex)
    u = np.asarray(u, dtype=complex)
    cset = ConstraintSet.circle(P)
    b = np.sqrt(params.gamma) * u
    amp = cset.amplitude

    def update(hcol, rfull):
        z = np.vdot(hcol, rfull)  # h_i^dag r
        a = np.abs(z)
        return amp * (z / a) if a > 0 else amp

    best = None
    for v0 in _restart_starts(cset, H, u, params, restarts, seed):
        v, sweeps, conv, trace = _coordinate_descent(H, b, params, update, v0,
                                                     tol, max_iter)
        res = _result(H, u, params, v, sweeps, conv, trace)
        if best is None or res.objective < best.objective:
            best = res
    return best


def lse_mpsk(H: np.ndarray, u: np.ndarray, params: SystemParams, M: int,
             P: float = 1.0, tol: float = 0.0, max_iter: int = 1000,
             restarts: int = 32, seed: int = 0) -> PrecodeResult:
    """M-PSK precoding by discrete cyclic coordinate descent with restarts.

    Each run terminates at a 1-opt point: no single-coordinate symbol
    change can lower the objective.  The best run is returned.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    H = np.asarray(H, dtype=complex)
    u = np.asarray(u, dtype=complex)
    cset = ConstraintSet.mpsk(M, P)
    b = np.sqrt(params.gamma) * u
    pts = cset.points()

    def update(hcol, rfull):
        # |h_i x|^2 and lam |x|^2 are symbol-independent on the PSK ring,
        # so the best symbol maximizes Re{x^* h_i^dag r}: enumerate all M.
        z = np.vdot(hcol, rfull)
        scores = (np.conj(pts) * z).real
        return pts[int(np.argmax(scores))]

    best = None
    for v0 in _restart_starts(cset, H, u, params, restarts, seed):
        v, sweeps, conv, trace = _coordinate_descent(H, b, params, update, v0,
                                                     tol, max_iter)
        res = _result(H, u, params, v, sweeps, conv, trace)
        if best is None or res.objective < best.objective:
            best = res
    return best


def lse_bruteforce(H: np.ndarray, u: np.ndarray, params: SystemParams,
                   cset: ConstraintSet, limit: int = 2 ** 24,
                   batch: int = 1 << 14) -> PrecodeResult:
    """Exact global minimizer over a PSK alphabet by full enumeration."""
    if cset.kind != "mpsk":
        raise ValueError("brute force requires a finite (mpsk) alphabet")
    H = np.asarray(H, dtype=complex)
    u = np.asarray(u, dtype=complex)
    N = H.shape[1]
    M = cset.order
    total = M ** N
    if total > limit:
        raise ValueError(f"instance too large: {M}^{N} = {total} > limit {limit}")
    pts = cset.points()
    b = np.sqrt(params.gamma) * u
    best_obj = np.inf
    best_v = None
    idx = np.arange(total)
    for start in range(0, total, batch):
        chunk = idx[start:start + batch]
        digits = (chunk[:, None] // M ** np.arange(N)[None, :]) % M
        V = pts[digits]  # (batch, N)
        R = V @ H.T - b[None, :]
        obj = np.einsum("ij,ij->i", R, R.conj()).real
        obj += params.lam * np.einsum("ij,ij->i", V, V.conj()).real
        j = int(np.argmin(obj))
        if obj[j] < best_obj:
            best_obj = float(obj[j])
            best_v = V[j].copy()
    return _result(H, u, params, best_v, iterations=total, converged=True)
