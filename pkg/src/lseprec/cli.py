"""Command line front end for predictions, simulations and sweeps.

Subcommands:

  rs          replica-symmetric distortion prediction over an alpha range
  rsb         one-step symmetry-breaking prediction (adds p1, mu1, eta1)
  simulate    Monte Carlo precoder runs next to the RS prediction
  rate        gamma-optimized ergodic-rate lower bound per alpha
  ofdm-check  eigenvalue-CDF agreement of the OFDM equivalent channel
  sweep       rs + simulate combined over an alpha range

Output is CSV (default) or JSON with a fixed column set; missing fields
are left empty.  Runs are deterministic for a given config and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .channel import ChannelEnsemble, SystemParams
from .constraints import ConstraintSet
from .harness import (empirical_distortion, eigen_cdf_compare,
                      ofdm_gram_eigenvalues, optimize_gamma,
                      pin_lambda_for_power, rate_lower_bound)
from .precoders import lse_circle, lse_disk, lse_mpsk, rzf_precode
from .replica import (ReplicaConvergenceError, ReplicaValidityError,
                      rs_constant_envelope, rs_peak_power, rs_solve)
from .rsb import rsb1_solve

COLUMNS = ["alpha", "q", "chi", "D_linear", "D_dB", "p1", "mu1", "eta1",
           "D_emp_mean", "D_emp_stderr", "rate_bits", "gamma_opt", "converged"]


def parse_constraint(spec: str) -> ConstraintSet:
    """none | disk:P | circle:P | psk:M[:P]"""
    parts = spec.lower().split(":")
    kind = parts[0]
    try:
        if kind == "none":
            return ConstraintSet.unconstrained()
        if kind == "disk":
            return ConstraintSet.disk(float(parts[1]))
        if kind == "circle":
            return ConstraintSet.circle(float(parts[1]))
        if kind == "psk":
            power = float(parts[2]) if len(parts) > 2 else 1.0
            return ConstraintSet.mpsk(int(parts[1]), power)
    except (IndexError, ValueError) as exc:
        raise argparse.ArgumentTypeError(
            f"bad constraint {spec!r}: expected none, disk:P, circle:P "
            f"or psk:M[:P] ({exc})") from exc
    raise argparse.ArgumentTypeError(f"unknown constraint kind {kind!r}")


def parse_alpha(spec: str) -> np.ndarray:
    """single value or start:stop:steps (inclusive, linear)."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if steps < 1 or stop < start:
                raise ValueError("need steps >= 1 and stop >= start")
            return np.linspace(start, stop, steps)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad alpha range {spec!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(f"bad alpha range {spec!r}")


def _ensemble(alpha: float, K: int) -> ChannelEnsemble:
    return ChannelEnsemble.iid(K, max(int(round(alpha * K)), 1))


def _solver_for(cset: ConstraintSet):
    if cset.kind == "unconstrained":
        return rzf_precode
    if cset.kind == "disk":
        return lambda H, u, p: lse_disk(H, u, p, cset.power)
    if cset.kind == "circle":
        return lambda H, u, p: lse_circle(H, u, p, cset.power)
    return lambda H, u, p: lse_mpsk(H, u, p, cset.order, cset.power)


def _blank_row(alpha: float) -> dict:
    row = {c: "" for c in COLUMNS}
    row["alpha"] = alpha
    return row


def _fill_rs(row: dict, sol) -> None:
    row["q"] = sol.q
    row["chi"] = sol.chi if np.isfinite(sol.chi) else "inf"
    row["D_linear"] = sol.distortion
    row["D_dB"] = sol.distortion_db if sol.distortion > 0 else ""
    row["converged"] = bool(sol.converged)


def _pinned_rs(cset, ens, params, target_q):
    """RS solution, with lam retuned to hit a target average power."""

    def rs_at(lam):
        p = SystemParams(gamma=params.gamma, lam=lam,
                         sigma_u2=params.sigma_u2, sigma_n2=params.sigma_n2)
        if cset.kind == "disk" and ens.is_iid:
            return rs_peak_power(ens, p, cset.power)
        return rs_solve(cset, ens, p)

    if target_q is None:
        return params.lam, rs_at(params.lam)
    return pin_lambda_for_power(rs_at, target_q)


def _run_rs(args, alphas, cset, params):
    rows = []
    for alpha in alphas:
        row = _blank_row(alpha)
        try:
            _, sol = _pinned_rs(cset, _ensemble(alpha, args.K), params,
                                args.target_q)
            _fill_rs(row, sol)
        except (ReplicaConvergenceError, ReplicaValidityError):
            row["converged"] = False
        rows.append(row)
    return rows


def _run_rsb(args, alphas, cset, params):
    rows = []
    for alpha in alphas:
        row = _blank_row(alpha)
        try:
            sol = rsb1_solve(cset, _ensemble(alpha, args.K), params)
            row["q"] = sol.q1
            row["chi"] = sol.chi1
            row["p1"] = sol.p1
            row["mu1"] = sol.mu1
            row["eta1"] = sol.eta1
            row["D_linear"] = sol.distortion
            row["D_dB"] = sol.distortion_db if sol.distortion > 0 else ""
            row["converged"] = bool(sol.converged)
        except (ReplicaConvergenceError, ReplicaValidityError):
            row["converged"] = False
        rows.append(row)
    return rows


def _run_simulate(args, alphas, cset, params):
    solver = _solver_for(cset)
    rows = []
    for alpha in alphas:
        row = _blank_row(alpha)
        ens = _ensemble(alpha, args.K)
        run_params = params
        try:
            lam, sol = _pinned_rs(cset, ens, params, args.target_q)
            if args.target_q is not None:
                run_params = SystemParams(gamma=params.gamma, lam=lam,
                                          sigma_u2=params.sigma_u2,
                                          sigma_n2=params.sigma_n2)
            _fill_rs(row, sol)
        except (ReplicaConvergenceError, ReplicaValidityError):
            row["converged"] = False
        emp = empirical_distortion(solver, cset, ens, run_params, args.trials,
                                   args.seed)
        row["D_emp_mean"] = emp.mean
        row["D_emp_stderr"] = emp.stderr
        if emp.nonconverged:
            row["converged"] = False
        rows.append(row)
    return rows


def _rate_predictor(cset, ens, target_q):
    """distortion as a function of gamma, with the average power pinned."""

    def predict(gamma):
        def rs_at(lam):
            p = SystemParams(gamma=gamma, lam=lam)
            if cset.kind == "disk":
                return rs_peak_power(ens, p, cset.power)
            return rs_solve(cset, ens, p)

        if cset.kind == "circle":
            sol = rs_constant_envelope(ens, SystemParams(gamma=gamma),
                                       cset.power)
        elif target_q is not None:
            _, sol = pin_lambda_for_power(rs_at, target_q)
        else:
            sol = rs_at(0.0)
        return sol.distortion

    return predict


def _run_rate(args, alphas, cset, params):
    rows = []
    for alpha in alphas:
        row = _blank_row(alpha)
        ens = _ensemble(alpha, args.K)
        pred = _rate_predictor(cset, ens, args.target_q)
        try:
            g_star, r_star = optimize_gamma(pred, params,
                                            (args.gamma_lo, args.gamma_hi))
            row["rate_bits"] = r_star
            row["gamma_opt"] = g_star
            row["D_linear"] = pred(g_star)
            row["converged"] = True
        except (ReplicaConvergenceError, ReplicaValidityError, ValueError):
            row["converged"] = False
        rows.append(row)
    return rows


def _run_ofdm(args):
    worst = 0.0
    for s in range(args.seeds):
        rng = np.random.default_rng(np.random.SeedSequence((args.seed, s)))
        scale = np.sqrt(1.0 / (2.0 * args.N))
        Hs = [scale * (rng.standard_normal((args.K, args.N))
                       + 1j * rng.standard_normal((args.K, args.N)))
              for _ in range(args.L)]
        ev_eq = ofdm_gram_eigenvalues(Hs)
        ev_one = np.linalg.eigvalsh(Hs[0].conj().T @ Hs[0])
        worst = max(worst, eigen_cdf_compare(ev_eq, ev_one))
    print(f"ks_statistic={worst:.6f} threshold={args.ks_threshold}")
    return 0 if worst <= args.ks_threshold else 1


def _meta(args, cset) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "constraint": getattr(args, "constraint_spec", ""),
        "seed": getattr(args, "seed", None),
        "quadrature_nodes": 48,
        "fixed_point_tol": 1e-10,
    }


def _emit(rows, meta, fmt, path):
    if fmt == "json":
        text = json.dumps({"meta": meta, "rows": rows}, indent=2,
                          default=float) + "\n"
    else:
        lines = [f"# {k}={v}" for k, v in meta.items()]
        lines.append(",".join(COLUMNS))
        for row in rows:
            lines.append(",".join(_fmt_cell(row[c]) for c in COLUMNS))
        text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt_cell(v):
    if v == "":
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or isinstance(v, np.floating):
        return repr(float(v))
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lseprec",
        description="constrained precoding predictions and simulations")
    ap.add_argument("--config", help="JSON file with defaults for any flag")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, trials=False):
        p.add_argument("--constraint", dest="constraint_spec", default="none",
                       help="none | disk:P | circle:P | psk:M[:P]")
        p.add_argument("--alpha", default="1", help="value or start:stop:steps")
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--lam", type=float, default=0.0)
        p.add_argument("--sigma-u2", type=float, default=1.0)
        p.add_argument("--sigma-n2", type=float, default=0.0)
        p.add_argument("--papr-db", type=float, default=None,
                       help="peak-to-average ratio in dB; with --target-q "
                            "overrides a disk constraint power P = q 10^(papr/10)")
        p.add_argument("--target-q", type=float, default=None,
                       help="pin the average power by retuning lam")
        p.add_argument("--K", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=None, help="file path or - for stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if trials:
            p.add_argument("--trials", type=int, default=50)

    common(sub.add_parser("rs", help="replica-symmetric prediction"))
    common(sub.add_parser("rsb", help="1-step RSB prediction"))
    common(sub.add_parser("simulate", help="Monte Carlo + prediction"),
           trials=True)
    pr = sub.add_parser("rate", help="gamma-optimized rate bound")
    common(pr)
    pr.add_argument("--gamma-lo", type=float, default=0.05)
    pr.add_argument("--gamma-hi", type=float, default=100.0)
    common(sub.add_parser("sweep", help="prediction + simulation sweep"),
           trials=True)

    po = sub.add_parser("ofdm-check", help="OFDM equivalent-channel spectrum test")
    po.add_argument("--L", type=int, default=32)
    po.add_argument("--K", type=int, default=100)
    po.add_argument("--N", type=int, default=100)
    po.add_argument("--seeds", type=int, default=5)
    po.add_argument("--seed", type=int, default=0)
    po.add_argument("--ks-threshold", type=float, default=0.05)
    return ap


def _apply_config(ap, argv):
    """Merge a JSON config file under the command line flags."""
    path = None
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 < len(argv):
            path = argv[i + 1]
        argv = argv[:i] + argv[i + 2:]
    elif any(a.startswith("--config=") for a in argv):
        i = next(j for j, a in enumerate(argv) if a.startswith("--config="))
        path = argv[i].split("=", 1)[1]
        argv = argv[:i] + argv[i + 1:]
    if path is None:
        return argv
    with open(path) as fh:
        cfg = json.load(fh)
    extra = []
    cmd = cfg.pop("command", None)
    for key, val in cfg.items():
        flag = "--" + key.replace("_", "-")
        extra.extend([flag, str(val)])
    # config-provided flags go first so explicit argv wins
    if cmd and (not argv or argv[0].startswith("-")):
        argv = [cmd] + argv
    head, tail = argv[:1], argv[1:]
    return head + extra + tail


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        argv = _apply_config(ap, argv)
        args = ap.parse_args(argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "ofdm-check":
        return _run_ofdm(args)

    try:
        cset = parse_constraint(args.constraint_spec)
        alphas = parse_alpha(args.alpha)
        if args.papr_db is not None:
            if args.target_q is None:
                raise argparse.ArgumentTypeError(
                    "--papr-db needs --target-q to fix the peak power")
            P = args.target_q * 10.0 ** (args.papr_db / 10.0)
            cset = ConstraintSet.disk(P)
        params = SystemParams(gamma=args.gamma, lam=args.lam,
                              sigma_u2=args.sigma_u2, sigma_n2=args.sigma_n2)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "rs":
        rows = _run_rs(args, alphas, cset, params)
    elif args.command == "rsb":
        rows = _run_rsb(args, alphas, cset, params)
    elif args.command == "simulate":
        rows = _run_simulate(args, alphas, cset, params)
    elif args.command == "rate":
        rows = _run_rate(args, alphas, cset, params)
    elif args.command == "sweep":
        rows = _run_simulate(args, alphas, cset, params)
    else:  # pragma: no cover
        print(f"error: unknown command {args.command}", file=sys.stderr)
        return 2

    _emit(rows, _meta(args, cset), args.format, args.output)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
