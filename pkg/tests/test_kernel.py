import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.errors import NotARoot, WrongRegime
from src.kernel import (
    d_star,
    asymptotic_limit,
    kappa_constant,
    kernel_generator,
    range_density,
    range_membership,
    transversality,
    transversality_profile,
    verify_kernel_ode,
)
from src.modes import linearized_operator
from src.profile import Profile


@pytest.fixture(scope="module")
def scarcity_kernel(scarcity, scarcity_root):
    return kernel_generator(scarcity, 3, scarcity_root)


class TestKernelGenerator:
    def test_vanishes_at_boundary(self, scarcity_kernel):
        assert scarcity_kernel.h_star[-1] == 0.0
        assert scarcity_kernel.grid[0] == 0.0
        assert scarcity_kernel.grid[-1] == 1.0

    def test_normalization(self, scarcity_kernel):
        assert scarcity_kernel.normalization_check == pytest.approx(0.125, abs=1e-6)
        assert scarcity_kernel.to_dict()["expected_normalization"] == 0.125

    def test_residual(self, scarcity_kernel):
        assert scarcity_kernel.kernel_residual <= 1e-6

    def test_independent_ode_resolve(self, scarcity, scarcity_root, scarcity_kernel):
        assert verify_kernel_ode(scarcity, 3, scarcity_root, kg=scarcity_kernel) <= 1e-6

    def test_evaluate_matches_samples(self, scarcity_kernel):
        r = scarcity_kernel.grid[1:-1]
        np.testing.assert_allclose(scarcity_kernel.evaluate(r), scarcity_kernel.h_star[1:-1])

    def test_frame(self, scarcity_kernel):
        frame = scarcity_kernel.to_frame()
        assert list(frame.columns) == ["r", "h_star"]
        assert len(frame) == 512

    def test_not_a_root(self, scarcity):
        with pytest.raises(NotARoot) as info:
            kernel_generator(scarcity, 3, 0.2)
        assert info.value.details["m"] == 3

    def test_abundance_normalization(self, abundance, abundance_root):
        m, omega = abundance_root
        kg = kernel_generator(abundance, m, omega, grid_size=129)
        assert kg.normalization_check == pytest.approx(1.0 / (2 * (m + 1)), abs=1e-6)
        assert kg.h_star[-1] == 0.0


class TestRange:
    def test_density_vanishes_at_origin(self, scarcity, scarcity_root):
        assert range_density(scarcity, 3, scarcity_root, 0.0) == 0.0

    def test_density_positive_defocusing(self, scarcity, scarcity_root):
        r = np.linspace(0.05, 0.95, 10)
        assert np.all(range_density(scarcity, 3, scarcity_root, r) > 0)

    def test_density_positive_focusing(self, abundance, abundance_root):
        m, omega = abundance_root
        r = np.linspace(0.05, 0.95, 10)
        assert np.all(range_density(abundance, m, omega, r) > 0)

    def test_zero_datum(self, scarcity, scarcity_root):
        assert range_membership(scarcity, 3, scarcity_root, np.zeros_like) == 0.0

    def test_image_of_linearized_operator(self, scarcity, scarcity_root):
        def h(r):
            return r**3 * (1.0 - 0.5 * r * r)

        def image(r):
            return linearized_operator(scarcity, scarcity_root, 3, h, r)

        generic = range_membership(scarcity, 3, scarcity_root, lambda r: r**3)
        assert generic > 0
        assert abs(range_membership(scarcity, 3, scarcity_root, image)) <= 1e-5 * generic

    def test_not_a_root(self, scarcity):
        with pytest.raises(NotARoot):
            range_membership(scarcity, 3, 0.2, lambda r: r)


class TestTransversality:
    def test_scarcity_verdict(self, scarcity, scarcity_root):
        report = transversality(scarcity, 3, scarcity_root)
        assert report.I_m > 0
        assert report.verdict
        assert abs(report.I_m) > 10 * report.error_bar
        assert report.I_m == pytest.approx(sum(report.parts))
        assert report.kappa is None
        assert report.asymptotic_ratio is None

    def test_membership_of_d_star_is_I_m(self, scarcity, scarcity_root):
        report = transversality(scarcity, 3, scarcity_root)
        value = 4 * (3 + 1) * range_membership(
            scarcity, 3, scarcity_root, lambda r: d_star(scarcity, 3, scarcity_root, r)
        )
        assert value == pytest.approx(report.I_m, rel=1e-6)

    def test_pointwise_integrand_positive(self, scarcity, scarcity_root):
        frame = transversality_profile(scarcity, 3, scarcity_root)
        assert list(frame.columns) == ["r", "H_1", "H_2", "H_3", "total"]
        assert (frame.loc[frame.r > 1e-2, "total"] > 0).all()
        np.testing.assert_allclose(frame.total, frame.H_1 + frame.H_2 + frame.H_3)

    @pytest.mark.parametrize("column", ["H_1", "H_2", "H_3"])
    def test_profile_columns_integrate_to_parts(self, scarcity, scarcity_root, column):
        report = transversality(scarcity, 3, scarcity_root)
        frame = transversality_profile(scarcity, 3, scarcity_root, grid_size=513)
        index = int(column[-1]) - 1
        r = np.concatenate([[0.0], frame.r, [1.0]])
        h = np.concatenate([[0.0], frame[column], [frame[column].iloc[-1]]])
        scale = max(abs(report.parts[index]), trapezoid(np.abs(h), r))
        assert trapezoid(h, r) == pytest.approx(report.parts[index], abs=1e-3 * scale)

    def test_abundance_report(self, abundance, abundance_root):
        m, omega = abundance_root
        report = transversality(abundance, m, omega)
        kappa, _ = kappa_constant(abundance)
        assert report.kappa == pytest.approx(kappa)
        assert report.kappa_laplace == pytest.approx(kappa, abs=1e-10)
        assert report.asymptotic_ratio is not None and np.isfinite(report.asymptotic_ratio)
        assert report.dominance >= 0
        assert report.asymptotic_limit == pytest.approx(2.0 * (2.0 * kappa - 1.0) / (2.0 * kappa))
        assert report.asymptotic_limit == pytest.approx(asymptotic_limit(abundance))
        assert report.to_dict()["asymptotic_band"] == 0.25

    def test_I_m_grows_from_40_to_60(self, abundance, abundance_roots):
        reports = {m: transversality(abundance, m, omega) for m, omega in abundance_roots.items()}
        for report in reports.values():
            assert report.verdict
        assert abs(reports[60].I_m) > abs(reports[40].I_m)

    def test_asymptotic_ratio_approaches_limit(self, abundance, abundance_roots):
        ratios = {}
        for m, omega in abundance_roots.items():
            report = transversality(abundance, m, omega)
            ratios[m] = report.asymptotic_ratio / report.asymptotic_limit
        for value in ratios.values():
            assert 0.25 < value < 1.25
        assert abs(ratios[60] - 1.0) <= abs(ratios[40] - 1.0) + 0.02

    def test_not_a_root(self, scarcity):
        with pytest.raises(NotARoot):
            transversality(scarcity, 3, 0.2)


class TestKappa:
    def test_forms_agree(self, abundance):
        direct, laplace = kappa_constant(abundance)
        assert direct == pytest.approx(laplace, abs=1e-10)
        assert direct > 0.5

    def test_large_mu_limit(self):
        # mu = -f0(1)/a is about 2e4 here
        direct, laplace = kappa_constant(Profile.polynomial([-1.0, 1e-4]))
        assert laplace == pytest.approx(0.5, abs=1e-4)
        assert direct == pytest.approx(laplace, abs=1e-10)

    def test_positive_profile(self, scarcity):
        with pytest.raises(WrongRegime):
            kappa_constant(scarcity)
