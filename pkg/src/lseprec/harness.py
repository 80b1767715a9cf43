"""Monte Carlo validation, rate bounds and the OFDM equivalence check.

The empirical distortion of a precoder run on sampled channels is the
quantity the replica predictors are supposed to match.  Trials are
seeded from (seed, trial index) so different constraint sets can be
compared on identical channel and data realizations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import ks_2samp

from .channel import ChannelEnsemble, SystemParams, sample_symbols
from .constraints import ConstraintSet
from .replica import ReplicaConvergenceError, RSSolution


@dataclass
class EmpiricalResult:
    mean: float
    stderr: float
    samples: np.ndarray
    nonconverged: int

    @property
    def mean_db(self) -> float:
        return 10.0 * np.log10(self.mean) if self.mean > 0 else -np.inf


@dataclass
class SweepResult:
    axis: np.ndarray
    predicted: np.ndarray
    empirical_mean: np.ndarray
    empirical_stderr: np.ndarray
    trials: int
    seed: int


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, identical across constraint sets."""
    return np.random.default_rng(np.random.SeedSequence((seed, trial)))


def sample_trial(ens: ChannelEnsemble, params: SystemParams, seed: int,
                 trial: int) -> tuple[np.ndarray, np.ndarray]:
    """(H, u) for one trial of the given ensemble."""
    if not ens.is_iid:
        raise ValueError("only the iid ensemble defines a matrix realization")
    rng = trial_rng(seed, trial)
    scale = np.sqrt(1.0 / (2.0 * ens.N))
    H = scale * (rng.standard_normal((ens.K, ens.N))
                 + 1j * rng.standard_normal((ens.K, ens.N)))
    u = sample_symbols(ens.K, params.sigma_u2, rng)
    return H, u


def empirical_distortion(solver, cset: ConstraintSet, ens: ChannelEnsemble,
                         params: SystemParams, trials: int,
                         seed: int) -> EmpiricalResult:
    """Sample mean and standard error of ||H v - sqrt(gamma) u||^2 / K.

    ``solver(H, u, params)`` must return an object with fields ``v`` and
    ``converged``.  Trials with an infeasible or nonconvergent result
    still contribute (the objective value is what it is) but are counted
    in ``nonconverged``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    vals = np.empty(trials)
    bad = 0
    for t in range(trials):
        H, u = sample_trial(ens, params, seed, t)
        res = solver(H, u, params)
        if not res.converged or not np.all(cset.contains(res.v, tol=1e-6)):
            bad += 1
        r = H @ res.v - np.sqrt(params.gamma) * u
        vals[t] = np.vdot(r, r).real / ens.K
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return EmpiricalResult(mean=mean, stderr=stderr, samples=vals,
                           nonconverged=bad)


def rate_lower_bound(D: float, params: SystemParams) -> float:
    """Per-user ergodic rate bound log2(1 + gamma sigma_u^2/(sigma_n^2 + D))."""
    if D < 0:
        raise ValueError("distortion must be nonnegative")
    denom = params.sigma_n2 + D
    if denom <= 0:
        raise ValueError("sigma_n^2 + D must be positive")
    return float(np.log2(1.0 + params.gamma * params.sigma_u2 / denom))


def optimize_gamma(predictor, params: SystemParams,
                   bracket: tuple[float, float],
                   tol: float = 1e-4) -> tuple[float, float]:
    """Golden-section maximization of the rate bound over gamma.

    ``predictor(gamma)`` returns the predicted distortion at that gamma
    (with any power pinning handled inside the predictor).  Returns
    (gamma*, rate*).  ``tol`` is relative in gamma.
    """
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")

    def rate(g):
        d = predictor(g)
        return rate_lower_bound(d, replace(params, gamma=g))

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d_ = a + invphi * (b - a)
    fc, fd = rate(c), rate(d_)
    while (b - a) > tol * max(1.0, abs(b)):
        if fc > fd:
            b, d_, fd = d_, c, fc
            c = b - invphi * (b - a)
            fc = rate(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + invphi * (b - a)
            fd = rate(d_)
    g_star = 0.5 * (a + b)
    return g_star, rate(g_star)


def pin_lambda_for_power(rs_fn, target_q: float, lam_max: float = 1e4,
                         tol: float = 1e-9,
                         max_iter: int = 200) -> tuple[float, RSSolution]:
    """Bisection on lam >= 0 so the fixed point's q matches target_q.

    ``rs_fn(lam)`` returns an RS-type solution whose q decreases in lam.
    When even lam = 0 gives q below the target (the constraint caps the
    average power), the slack solution at lam = 0 is returned.
    """
    try:
        sol0 = rs_fn(0.0)
    except ReplicaConvergenceError:
        sol0 = None  # marginal growth at lam = 0; the power is unbounded
    if sol0 is not None and sol0.q <= target_q + tol:
        return 0.0, sol0
    lo, hi = 0.0, 1.0
    sol_hi = rs_fn(hi)
    while sol_hi.q > target_q and hi < lam_max:
        hi *= 4.0
        sol_hi = rs_fn(hi)
    if sol_hi.q > target_q:
        return hi, sol_hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        sol = rs_fn(mid)
        if abs(sol.q - target_q) < tol or (hi - lo) < 1e-14 * max(1.0, hi):
            return mid, sol
        if sol.q > target_q:
            lo = mid
        else:
            hi = mid
    return mid, sol


def ofdm_equivalent_channel(H_list) -> np.ndarray:
    """Frequency-flat equivalent of a frequency-selective OFDM channel.

    ``H_list`` holds the K x N subcarrier matrices H_1..H_L.  The stacked
    KL x NL matrix H_t places column i of H_k in rows of subcarrier
    block k and column i*L + k, and the equivalent channel is
    H_t W_t^dagger with W_t block-diagonal built from the unitary L-point
    IFFT matrix W.  Its Gram spectrum matches the per-subcarrier one.
    """
    H_list = [np.asarray(H, dtype=complex) for H in H_list]
    L = len(H_list)
    if L == 0:
        raise ValueError("need at least one subcarrier matrix")
    K, N = H_list[0].shape
    if any(H.shape != (K, N) for H in H_list):
        raise ValueError("all subcarrier matrices must share dimensions")
    Ht = np.zeros((K * L, N * L), dtype=complex)
    for k, Hk in enumerate(H_list):
        for i in range(N):
            Ht[k * K:(k + 1) * K, i * L + k] = Hk[:, i]
    # unitary IFFT matrix: W[a, b] = exp(2j pi a b / L) / sqrt(L)
    a = np.arange(L)
    W = np.exp(2j * np.pi * np.outer(a, a) / L) / np.sqrt(L)
    err = np.max(np.abs(W @ W.conj().T - np.eye(L)))
    if err > 1e-10:
        raise FloatingPointError(f"IFFT matrix not unitary to 1e-10 (got {err:.2e})")
    Wt = np.kron(np.eye(N), W)
    return Ht @ Wt.conj().T


def ofdm_gram_eigenvalues(H_list, direct: bool = False) -> np.ndarray:
    """Eigenvalues of the equivalent channel's Gram matrix.

    With ``direct`` the dense equivalent channel is built and its Gram
    matrix diagonalized; this is O((NL)^3) and only sensible at small
    sizes.  The default path uses two exact reductions: the Gram matrix
    is unitarily similar to H_t^dagger H_t (W_t is unitary), which a row
    and column permutation turns into a block diagonal of the
    per-subcarrier Gram matrices.  The spectrum is therefore the union
    of the L small spectra, at O(L N^3) cost.
    """
    if direct:
        Heq = ofdm_equivalent_channel(H_list)
        return np.linalg.eigvalsh(Heq.conj().T @ Heq)
    H_list = [np.asarray(H, dtype=complex) for H in H_list]
    out = [np.linalg.eigvalsh(H.conj().T @ H) for H in H_list]
    return np.sort(np.concatenate(out))


def eigen_cdf_compare(eigs_a, eigs_b) -> float:
    """Kolmogorov-Smirnov distance between two empirical eigenvalue CDFs."""
    a = np.asarray(eigs_a, dtype=float).ravel()
    b = np.asarray(eigs_b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("empty eigenvalue list")
    return float(ks_2samp(a, b).statistic)
