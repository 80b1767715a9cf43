import numpy as np
import pytest

from lseprec.channel import (ChannelEnsemble, SystemParams,
                             TransformDomainError, gaussian_q, r_transform,
                             r_transform_derivative, sample_channel,
                             sample_symbols)


def test_params_validation():
    SystemParams()  # defaults are valid
    with pytest.raises(ValueError):
        SystemParams(gamma=-1.0)
    with pytest.raises(ValueError):
        SystemParams(lam=-0.1)
    with pytest.raises(ValueError):
        SystemParams(sigma_u2=0.0)
    with pytest.raises(ValueError):
        SystemParams(sigma_n2=-1.0)


def test_ensemble_basics():
    ens = ChannelEnsemble.iid(100, 250)
    assert ens.alpha == pytest.approx(2.5)
    assert ens.is_iid
    emp = ChannelEnsemble.empirical(10, 20, [1.0, 2.0, 3.0])
    assert not emp.is_iid
    with pytest.raises(ValueError):
        ChannelEnsemble.empirical(10, 20, [-1.0])
    with pytest.raises(ValueError):
        ChannelEnsemble.iid(0, 5)


def test_sample_channel_scaling():
    ens = ChannelEnsemble.iid(50, 400)
    H = sample_channel(ens, seed=0)
    assert H.shape == (50, 400)
    # E|H_ij|^2 = 1/N so expected squared row norm is 1
    row_power = np.mean(np.sum(np.abs(H) ** 2, axis=1))
    assert row_power == pytest.approx(1.0, rel=0.1)
    assert np.allclose(H, sample_channel(ens, seed=0))


def test_sample_symbols_variance():
    rng = np.random.default_rng(5)
    u = sample_symbols(20000, 3.0, rng)
    assert np.mean(np.abs(u) ** 2) == pytest.approx(3.0, rel=0.05)


def test_iid_r_transform_closed_form():
    ens = ChannelEnsemble.iid(100, 200)
    for w in (-5.0, -0.5, 0.0, 0.9):
        assert r_transform(ens, w) == pytest.approx(0.5 / (1 - w))
        assert r_transform_derivative(ens, w) == pytest.approx(
            0.5 / (1 - w) ** 2)
    with pytest.raises(TransformDomainError):
        r_transform(ens, 1.0)


def test_point_mass_r_transform():
    # spectrum concentrated at mu has R(w) = mu for every w
    mu = 2.5
    ens = ChannelEnsemble.empirical(10, 10, np.full(50, mu))
    for w in (-3.0, -0.2, 0.4):
        assert r_transform(ens, w) == pytest.approx(mu, abs=1e-8)
    assert r_transform(ens, 0.0) == pytest.approx(mu)


def test_empirical_r_transform_matches_iid_on_sampled_spectrum():
    # eigenvalues of a sampled Gram matrix follow the iid law
    ens = ChannelEnsemble.iid(500, 1000)
    H = sample_channel(ens, seed=1)
    eigs = np.linalg.eigvalsh(H @ H.conj().T)  # K nonzero eigenvalues
    # Gram spectrum of H^dag H: N - K zeros plus the K values above
    full = np.concatenate([np.zeros(ens.N - ens.K), eigs])
    emp = ChannelEnsemble.empirical(ens.K, ens.N, full)
    for w in (-2.0, -0.5, 0.5):
        assert r_transform(emp, w) == pytest.approx(
            r_transform(ens, w), rel=0.02)


def test_empirical_r_transform_derivative_consistent():
    ens = ChannelEnsemble.empirical(10, 20, [0.5, 1.0, 1.5, 3.0])
    w = -0.7
    h = 1e-5
    fd = (r_transform(ens, w + h) - r_transform(ens, w - h)) / (2 * h)
    assert r_transform_derivative(ens, w) == pytest.approx(fd, rel=1e-3)


def test_gaussian_q_values():
    assert gaussian_q(0.0) == pytest.approx(0.5)
    assert gaussian_q(1.6448536269514722) == pytest.approx(0.05, abs=1e-6)
    x = np.array([-1.0, 0.0, 1.0])
    q = gaussian_q(x)
    assert q[0] + q[2] == pytest.approx(1.0)
