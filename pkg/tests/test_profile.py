import json

import numpy as np
import pytest
from scipy.interpolate import PchipInterpolator, PPoly

from src.errors import BadTable, ConfigError, ForbiddenOmega, NonMonotone, SignChange, WrongRegime
from src.numerics import chebyshev_grid
from src.profile import Profile, load_profile
from src.profile.profile import is_c1


def test_increasing_positive_profile_is_accepted(quadratic):
    report = quadratic.validate_hypotheses()
    assert report.accepted
    assert report.sign == "positive"
    assert report.min_slope_ratio == pytest.approx(2.0, abs=1e-14)


def test_constant_profile_is_rejected_as_non_monotone():
    report = Profile.polynomial([1.0]).validate_hypotheses()
    assert not report.accepted
    assert report.failures[0][0] == "NonMonotone"
    with pytest.raises(NonMonotone):
        report.raise_for_failure()


def test_negative_profile_sign(abundance):
    report = abundance.validate_hypotheses()
    assert report.accepted
    assert report.sign == "negative"
    assert abundance.sign == "negative"


def test_sign_change_is_rejected():
    p = Profile.polynomial([-0.5, 1.0])
    report = p.validate_hypotheses()
    assert [name for name, _ in report.failures] == ["SignChange"]
    with pytest.raises(SignChange):
        _ = p.sign


def test_validation_grid_must_be_large_enough(quadratic):
    with pytest.raises(ValueError):
        quadratic.validate_hypotheses(grid_size=8)


@pytest.mark.parametrize(
    "coeffs, kappa1, kappa2",
    [([1.0, 1.0], 0.5, 0.75), ([-2.0, 1.0], -1.0, -0.75), ([1.0, 0.01], 0.5, 0.5025)],
)
def test_constants(coeffs, kappa1, kappa2):
    c = Profile.polynomial(coeffs).constants()
    assert c.kappa1 == pytest.approx(kappa1, abs=1e-14)
    assert c.kappa2 == pytest.approx(kappa2, abs=1e-14)


def test_amplitude(scarcity):
    assert scarcity.constants().amplitude == pytest.approx(1.01, abs=1e-14)


def test_inner_mean(quadratic):
    c = quadratic.constants()
    assert quadratic.inner_mean(0.0) == pytest.approx(c.kappa1, abs=1e-15)
    assert quadratic.inner_mean(1.0) == pytest.approx(c.kappa2, abs=1e-15)
    assert quadratic.inner_mean(0.5) == pytest.approx(0.5625, abs=1e-15)
    values = quadratic.inner_mean(chebyshev_grid(64))
    assert np.all(np.diff(values) >= 0)


def test_mu0_values_and_limit(quadratic):
    assert quadratic.mu0(0.0, 1.0) == pytest.approx(-8.0 / 3.0, abs=1e-13)
    assert quadratic.mu0(0.0, 0.0) == pytest.approx(-4.0, abs=1e-13)
    assert quadratic.mu0(0.0, 1e-8) == pytest.approx(-4.0, abs=1e-12)


def test_mu0_rejects_forbidden_omega(quadratic):
    with pytest.raises(ForbiddenOmega):
        quadratic.mu0(0.6, 0.5)
    with pytest.raises(ForbiddenOmega):
        quadratic.nu(0.75, 0.5)


def test_nu_is_positive_in_both_regimes(quadratic):
    r = chebyshev_grid(64)
    assert quadratic.nu(0.0, 1.0) == pytest.approx(8.0 / 3.0, abs=1e-13)
    assert np.all(np.asarray(quadratic.nu(0.0, r)) > 0)
    assert np.all(np.asarray(quadratic.nu(1.0, r)) > 0)
    assert np.all(np.asarray(quadratic.mu0(1.0, r)) > 0)


def test_nu_lower_bound_in_focusing_regime(abundance):
    assert abundance.nu(-0.5, 0.0) == pytest.approx(4.0, abs=1e-13)
    values = np.asarray(abundance.nu(-0.5, chebyshev_grid(128)))
    assert np.all(values >= 4.0 - 1e-12)


@pytest.mark.parametrize("omega", [-1.0, 0.2, 0.9, 3.0])
def test_nu_identity(quadratic, omega):
    r = np.linspace(1e-3, 1.0, 50)
    sigma = quadratic.sigma(omega)
    lhs = np.asarray(quadratic.nu(omega, r)) * (omega - np.asarray(quadratic.inner_mean(r))) * sigma
    np.testing.assert_allclose(lhs, quadratic.slope_ratio(r), atol=1e-10)


def test_polynomial_moments_match_quadrature(scarcity):
    from scipy.integrate import quad

    for k in (0, 1, 4):
        expected, _ = quad(lambda s: s ** (2 * k + 1) * scarcity.f0(s), 0.0, 1.0, epsabs=1e-14)
        assert scarcity.moment(k) == pytest.approx(expected, abs=1e-12)


def test_tabulated_linear_table_matches_polynomial():
    x = np.linspace(0.0, 1.0, 11)
    table = Profile.tabulated(x, 1.0 + x)
    poly = Profile.polynomial([1.0, 1.0])
    assert table.constants().kappa2 == pytest.approx(0.75, abs=1e-10)
    r = np.linspace(0.0, 1.0, 17)
    np.testing.assert_allclose(table.f0(r), poly.f0(r), atol=1e-12)
    np.testing.assert_allclose(table.inner_mean(r), poly.inner_mean(r), atol=1e-10)
    np.testing.assert_allclose(table.scaled_moment(2, r), poly.scaled_moment(2, r), atol=1e-9)
    assert table.slope_moment() == pytest.approx(poly.slope_moment(), abs=1e-12)


def test_tabulated_rejects_unsorted_samples():
    with pytest.raises(BadTable):
        Profile.tabulated([0.0, 0.5, 0.4, 1.0], [1.0, 1.1, 1.2, 1.3])


def test_tabulated_must_span_unit_interval():
    with pytest.raises(BadTable):
        Profile.tabulated([0.0, 0.2, 0.4, 0.8], [1.0, 1.1, 1.2, 1.3])


def test_tabulated_smoothness_flags_come_from_the_table():
    x = np.linspace(0.0, 1.0, 21)
    report = Profile.tabulated(x, 1.0 + x + 0.5 * x**2).validate_hypotheses()
    assert report.smooth["strictly_increasing_x"] is True
    assert report.smooth["c1_interpolant"] is True
    assert report.accepted


def test_c1_check_detects_a_kink():
    kink = PPoly(np.array([[1.0, -1.0], [0.0, 1.0]]), np.array([0.0, 1.0, 2.0]))
    assert not is_c1(kink)
    x = np.linspace(0.0, 1.0, 9)
    assert is_c1(PchipInterpolator(x, np.sqrt(x + 0.1)))


def test_from_config_and_round_trip(scarcity):
    assert Profile.from_config(scarcity.to_config()) == scarcity
    with pytest.raises(ConfigError):
        Profile.from_config({"kind": "polynomial"})
    with pytest.raises(ConfigError):
        Profile.from_config({"kind": "spline", "coeffs": [1.0]})


def test_load_profile_toml_json_and_csv(tmp_path):
    (tmp_path / "p.toml").write_text('kind = "polynomial"\ncoeffs = [1.0, 0.01]\n')
    (tmp_path / "p.json").write_text(json.dumps({"kind": "polynomial", "coeffs": [-2.0, 1.0]}))
    (tmp_path / "t.csv").write_text("x,f0\n0.0,1.0\n0.25,1.25\n0.5,1.5\n0.75,1.75\n1.0,2.0\n")
    (tmp_path / "t.json").write_text(json.dumps({"kind": "tabulated", "table_csv": "t.csv"}))

    assert load_profile(tmp_path / "p.toml").constants().kappa2 == pytest.approx(0.5025)
    assert load_profile(tmp_path / "p.json").sign == "negative"
    assert load_profile(tmp_path / "t.json").constants().kappa2 == pytest.approx(0.75, abs=1e-10)


def test_load_profile_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_profile(path)


def test_estimate_c0_bounds_nu(abundance):
    omega = -0.6
    c0 = abundance.estimate_c0(omega, theta=1.0)
    r = chebyshev_grid(256)
    gap = omega - abundance.constants().kappa2
    bound = c0 * np.asarray(abundance.slope_ratio(r)) / gap
    assert np.all(np.asarray(abundance.nu(omega, r)) <= bound * (1 + 1e-12))
    with pytest.raises(WrongRegime):
        abundance.estimate_c0(-2.0)
