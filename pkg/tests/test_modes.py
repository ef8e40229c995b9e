import numpy as np
import pytest

from src.errors import SingularOmega
from src.modes import A_n, G_n, G_n_scaled, H_n, linearized_operator, mode_coefficients, omega_hat, singular_set
from src.profile import Profile


def test_omega_hat_closed_forms(quadratic, abundance, scarcity):
    assert omega_hat(quadratic, 1) == pytest.approx(-1.0 / 12.0, abs=1e-14)
    assert omega_hat(abundance, 10) == pytest.approx(-0.75 + 143.0 / 2640.0, abs=1e-14)
    assert omega_hat(scarcity, 3) == pytest.approx(0.3345, abs=1e-14)


def test_omega_hat_rejects_mode_zero(quadratic):
    with pytest.raises(ValueError):
        omega_hat(quadratic, 0)


def test_constant_profile_limit_recovers_patch_values():
    p = Profile.polynomial([1.0, 1e-8])
    for n in (1, 2, 5, 9):
        assert omega_hat(p, n) == pytest.approx((n - 1) / (2 * n), abs=1e-7)


def test_omega_hat_monotone_toward_kappa2(quadratic, abundance):
    up = [omega_hat(quadratic, n) for n in range(1, 65)]
    down = [omega_hat(abundance, n) for n in range(1, 65)]
    assert np.all(np.diff(up) > 0)
    assert np.all(np.diff(down) < 0)
    assert min(down) > abundance.constants().kappa2


def test_omega_hat_asymptotics(abundance):
    c = abundance.constants()
    for n in range(8, 65):
        leading = c.kappa2 - c.f0_at_1 / (2 * n)
        assert n * n * abs(omega_hat(abundance, n) - leading) <= 1.0


def test_singular_set(abundance, quadratic):
    values = singular_set(abundance, 10, 3)
    assert len(values) == 4
    assert values[0] == pytest.approx(omega_hat(abundance, 10))
    assert values[1] == pytest.approx(omega_hat(abundance, 20))
    assert values[-1] == pytest.approx(-0.75)
    assert np.all(np.diff(values) < 0)

    values = singular_set(quadratic, 1, 2)
    assert values[0] == pytest.approx(-1.0 / 12.0)
    assert values[-1] == pytest.approx(0.75)
    assert np.all(np.diff(values) > 0)


def test_G_n_boundary_value(quadratic, scarcity):
    assert G_n(quadratic, 0.0, 1, 1.0) == pytest.approx(1.0 / 12.0, abs=1e-13)
    assert G_n(scarcity, 0.4, 3, 1.0) == pytest.approx(3 * (0.4 - 0.3345), abs=1e-13)
    oh = omega_hat(quadratic, 4)
    assert G_n(quadratic, oh, 4, 1.0) == pytest.approx(0.0, abs=1e-13)


def test_mode_coefficients(scarcity):
    coeffs = mode_coefficients(scarcity, 3, 0.4)
    assert coeffs.omega_hat == pytest.approx(0.3345)
    assert coeffs.boundary_gap == pytest.approx(G_n(scarcity, 0.4, 3, 1.0), abs=1e-13)


def test_G_n_scaled_matches_definition(quadratic):
    from scipy.integrate import quad

    omega, n = 0.3, 3
    for r in (0.2, 0.7, 1.0):
        a, _ = quad(lambda s: s * quadratic.f0(s), 0.0, r)
        b, _ = quad(lambda s: s ** (2 * n + 1) * quadratic.f0(s), 0.0, r)
        k2 = quadratic.constants().kappa2
        expected = n * omega * r ** (n + 1) + r ** (n - 1) * (k2 - (n + 1) * a) + (n + 1) * r ** (-n - 1) * b
        assert G_n(quadratic, omega, n, r) == pytest.approx(expected, abs=1e-12)
    assert G_n_scaled(quadratic, omega, n, 0.0) == pytest.approx(quadratic.constants().kappa2)


def test_H_n_values():
    for n in (1, 3, 8):
        assert H_n(lambda s: s**n, n, 1.0) == pytest.approx(1.0 / (2 * n + 2), abs=1e-12)
    assert H_n(lambda s: s, 1, 1.0) == pytest.approx(0.25, abs=1e-12)
    np.testing.assert_allclose(H_n(lambda s: 0.0, 2, np.array([0.0, 0.5, 1.0])), 0.0)


def test_H_n_interior_value():
    # h = 1, n = 1: r^2 (1 - r) + r^3 / 3
    r = 0.4
    assert H_n(lambda s: 1.0, 1, r) == pytest.approx(r**2 * (1 - r) + r**3 / 3, abs=1e-12)


def test_A_n_closed_form(quadratic):
    assert A_n(quadratic, 0.0, 1, lambda s: s) == pytest.approx(-1.5, abs=1e-12)
    assert A_n(quadratic, 0.0, 1, lambda s: 0.0) == 0.0


@pytest.mark.parametrize("n", [1, 2, 5])
def test_A_n_forms_agree(quadratic, n):
    rng = np.random.default_rng(n)
    coeffs = rng.normal(size=4)

    def h(s):
        return float(np.polyval(coeffs, s))

    direct = A_n(quadratic, 0.2, n, h)
    via_g = -float(H_n(h, n, 1.0)) / (2.0 * G_n(quadratic, 0.2, n, 1.0))
    assert direct == pytest.approx(via_g, rel=1e-10, abs=1e-12)


def test_A_n_singular(quadratic):
    with pytest.raises(SingularOmega):
        A_n(quadratic, omega_hat(quadratic, 2), 2, lambda s: s)


def test_linearized_operator_is_linear(quadratic):
    r = np.array([0.25, 0.5, 0.9])
    one = linearized_operator(quadratic, 0.0, 2, lambda s: s**2, r)
    two = linearized_operator(quadratic, 0.0, 2, lambda s: 2 * s**2, r)
    np.testing.assert_allclose(two, 2 * one, rtol=1e-10)
    radial = linearized_operator(quadratic, 0.0, 0, lambda s: 1.0, 0.5)
    assert np.isfinite(radial)
    with pytest.raises(ValueError):
        linearized_operator(quadratic, 0.0, 1, lambda s: s, 0.0)
