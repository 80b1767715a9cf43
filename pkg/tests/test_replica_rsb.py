import numpy as np
import pytest

from lseprec.channel import ChannelEnsemble, SystemParams
from lseprec.constraints import ConstraintSet
from lseprec.replica import rs_psk, rs_solve
from lseprec.rsb import RSBSolution, _System, _axes, rsb1_distortion, rsb1_solve

P0 = SystemParams(gamma=1.0, lam=0.0)
BPSK = ConstraintSet.mpsk(2, 1.0)


def iid(alpha, K=100):
    return ChannelEnsemble.iid(K, int(round(alpha * K)))


def test_p1_zero_reduces_to_rs_distortion():
    ens = iid(2.0)
    rs = rs_solve(BPSK, ens, P0)
    for mu1 in (0.5, 1.0, 10.0):
        sol = RSBSolution(q1=rs.q, p1=0.0, chi1=rs.chi, mu1=mu1, eta1=rs.chi,
                          e1=rs.e, f1=rs.f, g1=0.0, distortion=0.0,
                          converged=True, residual=0.0)
        assert rsb1_distortion(sol, ens, P0) == pytest.approx(
            rs.distortion, abs=1e-6)


def test_p1_zero_reduction_on_empirical_spectrum():
    ens = ChannelEnsemble.empirical(100, 200, np.full(200, 1.3))
    sol = RSBSolution(q1=0.7, p1=0.0, chi1=0.9, mu1=3.0, eta1=0.9,
                      e1=0.0, f1=0.0, g1=0.0, distortion=0.0,
                      converged=True, residual=0.0)
    from lseprec.replica import rs_distortion
    assert rsb1_distortion(sol, ens, P0) == pytest.approx(
        rs_distortion(0.7, 0.9, ens, P0), abs=1e-5)


def test_inner_moments_reduce_to_rs_at_small_p1():
    # with p1 ~ 0 the tilt vanishes and the first two moment equations
    # collapse to the plain replica-symmetric ones (the third is a 0/0
    # degeneracy there and carries no constraint)
    ens = iid(2.0)
    rs = rs_solve(BPSK, ens, P0)
    sys_ = _System(BPSK, ens, P0)
    _, e1, f1, _, iz, iabs, _, _ = sys_.integrals(rs.q, 1e-12, rs.chi, 2.0)
    # same-grid single integral: the tilt is flat so y marginalizes away
    xh = BPSK.minimize(f1 * sys_.zn, e1)
    ref = np.sum(sys_.wz * np.real(xh * np.conj(sys_.zn)))
    assert iz == pytest.approx(ref, rel=1e-8)
    assert iz / f1 == pytest.approx(rs.chi, rel=1e-2)  # grid-level accuracy
    assert iabs == pytest.approx(1.0, abs=1e-9)


def test_binary_axes_are_one_dimensional():
    zn, wz, yn, wy = _axes(BPSK, 40, 64)
    assert zn.shape == (64,)
    assert np.sum(wz) == pytest.approx(1.0, abs=1e-12)
    zn4, wz4, _, _ = _axes(ConstraintSet.mpsk(4, 1.0), 20, 64)
    assert zn4.shape == (400,)
    assert np.sum(wz4) == pytest.approx(1.0, abs=1e-12)


def test_binary_and_generic_grids_agree():
    # the full complex tensor grid must reproduce the collapsed binary
    # grid's integrals for the binary alphabet
    ens = iid(2.0)
    fine = _System(BPSK, ens, P0, binary_nodes=200)
    coarse = _System(BPSK, ens, P0)
    coarse.zn, coarse.wz, coarse.yn, coarse.wy = _axes(
        ConstraintSet.mpsk(4, 1.0), 40, 0)  # complex grids, 40 per axis
    point = (0.88, 0.12, 0.011, 11.5)
    a = fine.integrals(*point)
    b = coarse.integrals(*point)
    for va, vb in zip(a[4:], b[4:]):  # Iz, Iabs, Iy, T
        assert vb == pytest.approx(va, rel=2e-2, abs=2e-2)


def test_rsb_solution_near_rs_at_small_alpha():
    ens = iid(1.0)
    sol = rsb1_solve(BPSK, ens, P0)
    rs = rs_psk(2, ens, P0)
    assert abs(sol.distortion_db - rs.distortion_db) < 0.05
    assert sol.candidates  # all fixed points reported


def test_rsb_broken_solution_at_large_alpha():
    # past the RS validity edge a finite broken-symmetry point remains
    ens = iid(5.0)
    sol = rsb1_solve(BPSK, ens, P0)
    assert not sol.reduced_to_rs
    assert sol.p1 > 0.05
    assert sol.q1 + sol.p1 == pytest.approx(1.0, abs=1e-6)
    rs = rs_psk(2, ens, P0)
    assert sol.distortion_db > rs.distortion_db  # less optimistic than RS
    assert sol.residual < 1e-8
    assert sol.distortion == pytest.approx(
        rsb1_distortion(sol, ens, P0), rel=1e-12)
