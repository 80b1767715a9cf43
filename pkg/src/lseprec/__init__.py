"""Constrained least-square-error precoding and its replica analysis."""

__version__ = "0.1.0"

from .channel import ChannelEnsemble, SystemParams, r_transform, \
    r_transform_derivative
from .constraints import ConstraintSet
from .harness import (EmpiricalResult, SweepResult, eigen_cdf_compare,
                      empirical_distortion, ofdm_equivalent_channel,
                      ofdm_gram_eigenvalues, optimize_gamma,
                      pin_lambda_for_power, rate_lower_bound)
from .precoders import (PrecodeResult, lse_bruteforce, lse_circle, lse_disk,
                        lse_mpsk, objective, rzf_precode)
from .quadrature import QuadratureRule, radial_rule
from .replica import (ReplicaConvergenceError, ReplicaValidityError,
                      RSSolution, rs_constant_envelope, rs_distortion,
                      rs_moments, rs_peak_power, rs_psk, rs_solve)
from .rsb import RSBSolution, rsb1_distortion, rsb1_solve

__all__ = [
    "ChannelEnsemble", "SystemParams", "r_transform", "r_transform_derivative",
    "ConstraintSet", "EmpiricalResult", "SweepResult", "eigen_cdf_compare",
    "empirical_distortion", "ofdm_equivalent_channel", "ofdm_gram_eigenvalues",
    "optimize_gamma", "pin_lambda_for_power", "rate_lower_bound",
    "PrecodeResult", "lse_bruteforce", "lse_circle", "lse_disk", "lse_mpsk",
    "objective", "rzf_precode", "QuadratureRule", "radial_rule",
    "ReplicaConvergenceError", "ReplicaValidityError", "RSSolution",
    "rs_constant_envelope", "rs_distortion", "rs_moments", "rs_peak_power",
    "rs_psk", "rs_solve", "RSBSolution", "rsb1_distortion", "rsb1_solve",
    "__version__",
]
