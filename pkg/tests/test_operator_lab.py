import numpy as np
import pytest
from scipy.integrate import quad

from src.errors import ForbiddenOmega
from src.operator_lab import (
    condition_number,
    discretize,
    hilbert_schmidt_norm,
    operator_norm,
    quadratic_form,
    reduced_quadratic_form,
    smallest_eigenvalue,
    solve_id_minus_L,
    spectrum,
)


def _random_polynomial(seed):
    coeffs = np.random.default_rng(seed).normal(size=5)
    return lambda s: np.polyval(coeffs, s)


def test_quadratic_form_of_identity_function(quadratic):
    op = discretize(quadratic, 0.0, 1, 32)
    assert quadratic_form(op, op.nodes) == pytest.approx(1.0 / 24.0, abs=1e-11)
    assert reduced_quadratic_form(lambda r: r, 1) == pytest.approx(1.0 / 24.0, abs=1e-10)
    assert quadratic_form(op, np.zeros(op.size)) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_quadratic_form_matches_reduced_form(quadratic, seed):
    h = _random_polynomial(seed)
    op = discretize(quadratic, 0.0, 2, 256)
    value = quadratic_form(op, h(op.nodes))
    assert value > 0
    assert value == pytest.approx(reduced_quadratic_form(h, 2), abs=1e-7)


def _apply_by_quadrature(p, omega, n, h, s):
    """
    L_n h(s) = nu(s) s^n [B / 2n + int_s^1 r^(1-n) m(r) dr],
    B = int_0^1 t^(n+1) h dt, m(r) = int_0^1 u^(n+1) h(r u) du.
    """
    boundary, _ = quad(lambda t: t ** (n + 1) * h(t), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)

    def scaled_moment(r):
        value, _ = quad(lambda u: u ** (n + 1) * h(r * u), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
        return value

    tail, _ = quad(lambda r: r ** (1 - n) * scaled_moment(r), s, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return float(p.nu(omega, s)) * s**n * (boundary / (2 * n) + tail)


@pytest.mark.parametrize("n", [1, 3])
@pytest.mark.parametrize("fixture, omega", [("quadratic", 0.0), ("quadratic", 2.0), ("abundance", -0.5)])
def test_operator_matches_integral_form(request, fixture, omega, n):
    p = request.getfixturevalue(fixture)
    h = _random_polynomial(3)
    op = discretize(p, omega, n, 64)
    applied = op.apply(h(op.nodes))
    picks = range(4, op.size, 8)
    expected = np.array([_apply_by_quadrature(p, omega, n, h, op.nodes[i]) for i in picks])
    np.testing.assert_allclose(applied[list(picks)], expected, rtol=1e-8, atol=1e-10 * np.max(np.abs(expected)))


def test_quadratic_form_needs_nonradial_mode(quadratic):
    op = discretize(quadratic, 0.0, 0, 16)
    with pytest.raises(ValueError):
        quadratic_form(op, op.nodes)


def test_symmetry_and_self_adjointness(quadratic):
    op = discretize(quadratic, 0.0, 3, 64)
    sym = op.symmetric_matrix()
    assert np.max(np.abs(sym - sym.T)) <= 1e-13 * np.max(np.abs(sym))
    rng = np.random.default_rng(7)
    h, g = rng.normal(size=op.size), rng.normal(size=op.size)
    lhs, rhs = op.inner(op.apply(h), g), op.inner(h, op.apply(g))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
    assert np.all(op.weights > 0)
    assert np.all(np.diff(op.nodes) > 0)


def test_zero_maps_to_zero(quadratic):
    op = discretize(quadratic, 0.0, 2, 32)
    np.testing.assert_array_equal(op.apply(np.zeros(op.size)), 0.0)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
@pytest.mark.parametrize("omega", [-1.0, 0.0, 0.3, 0.9, 1.5, 4.0])
def test_smallest_eigenvalue_positive(quadratic, n, omega):
    assert smallest_eigenvalue(discretize(quadratic, omega, n, 64)) > 0


def test_leading_spectrum_stable_under_refinement(quadratic):
    coarse = spectrum(discretize(quadratic, 0.0, 1, 128), k=3)
    fine = spectrum(discretize(quadratic, 0.0, 1, 256), k=3)
    np.testing.assert_allclose(coarse, fine, rtol=1e-5)
    assert np.all(np.diff(coarse) < 0)
    assert operator_norm(discretize(quadratic, 0.0, 1, 128)) == pytest.approx(coarse[0])


def test_hilbert_schmidt_norm_bounded(quadratic):
    values = [hilbert_schmidt_norm(discretize(quadratic, 0.0, 1, N)) for N in (32, 64, 128)]
    assert np.all(np.isfinite(values))
    assert values[-1] == pytest.approx(values[-2], rel=1e-3)


def test_norm_decreases_with_mode(quadratic):
    norms = [operator_norm(discretize(quadratic, 1.5, n, 64)) for n in (4, 8, 16, 32, 64)]
    assert np.all(np.diff(norms) < 0)
    gap = 1.5 - quadratic.constants().kappa2
    scaled = [norm * n * gap for norm, n in zip(norms, (4, 8, 16, 32, 64))]
    assert max(scaled) < 10.0


def test_solve_defocusing(quadratic):
    op = discretize(quadratic, 0.0, 2, 64)
    assert op.sigma == -1
    rhs = np.cos(3 * op.nodes)
    h = solve_id_minus_L(op, rhs)
    np.testing.assert_allclose(h + op.apply(h), rhs, atol=1e-10)
    np.testing.assert_array_equal(solve_id_minus_L(op, np.zeros(op.size)), 0.0)
    assert condition_number(op) >= 1.0


def test_discretize_validation(quadratic):
    with pytest.raises(ValueError):
        discretize(quadratic, 0.0, 1, 8)
    with pytest.raises(ForbiddenOmega):
        discretize(quadratic, 0.6, 1, 32)
