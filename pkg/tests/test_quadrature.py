import numpy as np
import pytest

from lseprec.quadrature import QuadratureRule, radial_rule


def test_tensor_rule_normalization():
    q = QuadratureRule.complex_gaussian(20)
    assert q.nodes.shape == (400,)
    assert np.sum(q.weights) == pytest.approx(1.0, abs=1e-12)


def test_tensor_rule_gaussian_moments():
    q = QuadratureRule.complex_gaussian(30)
    # z ~ CN(0,1): E z = 0, E|z|^2 = 1, E z^2 = 0, E|z|^4 = 2
    assert abs(q.expect(q.nodes)) < 1e-12
    assert q.expect(np.abs(q.nodes) ** 2) == pytest.approx(1.0, abs=1e-10)
    assert abs(q.expect(q.nodes ** 2)) < 1e-10
    assert q.expect(np.abs(q.nodes) ** 4) == pytest.approx(2.0, abs=1e-8)


def test_radial_rule_smooth_moments():
    t, w = radial_rule()
    assert np.sum(w) == pytest.approx(1.0, abs=1e-13)
    assert np.sum(w * t) == pytest.approx(1.0, abs=1e-12)       # E t
    assert np.sum(w * t ** 2) == pytest.approx(2.0, abs=1e-11)  # E t^2
    # E sqrt(t) = Gamma(3/2): the hard case, kinked density at the origin
    assert np.sum(w * np.sqrt(t)) == pytest.approx(
        np.sqrt(np.pi) / 2, abs=1e-12)


@pytest.mark.parametrize("a", [0.3, 1.0, 4.0])
def test_radial_rule_kinked_integrand(a):
    # integral of min(a, t) exp(-t) dt = 1 - exp(-a), kink at t = a
    t, w = radial_rule(kinks=(np.sqrt(a),))
    val = np.sum(w * np.minimum(a, t))
    assert val == pytest.approx(1.0 - np.exp(-a), abs=1e-13)


def test_radial_rule_kinked_sqrt_integrand():
    # integral of min(sqrt(a), sqrt(t)) exp(-t) dt, kink radius sqrt(a)
    a = 2.0
    t, w = radial_rule(kinks=(np.sqrt(a),))
    val = np.sum(w * np.minimum(np.sqrt(a), np.sqrt(t)))
    # reference by fine panel integration
    import scipy.integrate as si
    ref, _ = si.quad(lambda x: min(np.sqrt(a), np.sqrt(x)) * np.exp(-x),
                     0, 60, points=[a], limit=200)
    assert val == pytest.approx(ref, abs=1e-12)


def test_radial_rule_ignores_far_kinks():
    t1, w1 = radial_rule()
    t2, w2 = radial_rule(kinks=(1e6,))
    assert np.sum(w1 * t1) == pytest.approx(np.sum(w2 * t2), abs=1e-12)
