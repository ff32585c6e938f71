import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from spde_sdk.errors import DomainError, NumericError
from spde_sdk.spectral_core import (
    SQRT2,
    EnsembleField,
    SpectralField,
    besov_norm_ensemble,
    block_count,
    block_range,
    collocation_nonlinearity,
    constant_one_projection,
    dyadic_block,
    eigenvalue,
    evaluate_on_grid,
    galerkin_nonlinearity,
    grid_nodes,
    lp_norm_ensemble,
    phi_factors,
    phi_filter_apply,
    project_truncate,
    semigroup_apply,
    sine_interpolate,
    sobolev_norm,
)


def test_eigenvalue_values():
    assert eigenvalue(1) == pytest.approx(9.8696044, rel=1e-8)
    assert eigenvalue(3) == pytest.approx(9 * math.pi ** 2)
    with pytest.raises(DomainError):
        eigenvalue(0)


def test_spectral_field_rejects_non_finite():
    with pytest.raises(DomainError):
        SpectralField([1.0, math.nan])
    with pytest.raises(DomainError):
        SpectralField([])


def test_spectral_field_is_read_only_and_pads():
    v = SpectralField([1.0, 2.0])
    with pytest.raises(ValueError):
        v.coeffs[0] = 3.0
    w = SpectralField([1.0, 1.0, 1.0])
    assert_array_equal((w - v).coeffs, [0.0, -1.0, 1.0])
    assert_array_equal((2 * v).coeffs, [2.0, 4.0])


def test_parseval(rng):
    v = SpectralField(rng.standard_normal(257))
    assert sobolev_norm(v, 0) == pytest.approx(float(np.linalg.norm(v.coeffs)), rel=1e-13)


def test_sobolev_norm_of_single_mode():
    v = SpectralField.mode(3, 5)
    assert sobolev_norm(v, 1) == pytest.approx(3 * math.pi, rel=1e-14)
    assert sobolev_norm(v, -0.5) == pytest.approx((3 * math.pi) ** -0.5, rel=1e-14)


def test_sobolev_norm_rejects_out_of_range_exponent():
    with pytest.raises(DomainError):
        sobolev_norm(SpectralField([1.0]), 2.5)


@pytest.mark.parametrize("s, s0", [(2.0, -2.0), (1.0, 0.0), (0.5, -0.5), (0.0, 0.0)])
def test_inverse_inequality_on_random_fields(rng, s, s0):
    for M in (5, 64, 300):
        for _ in range(20):
            v = SpectralField(rng.standard_normal(M))
            assert sobolev_norm(v, s) <= (M * math.pi) ** (s - s0) * sobolev_norm(v, s0) * (1 + 1e-12)


def test_block_ranges():
    assert list(block_range(1)) == [1]
    assert list(block_range(3)) == [4, 5, 6, 7]
    assert block_count(1) == 1
    assert block_count(7) == 3
    assert block_count(8) == 4


def test_dyadic_blocks_partition_the_field(rng):
    v = SpectralField(rng.standard_normal(20))
    total = SpectralField.zeros(20)
    for j in range(1, block_count(20) + 1):
        total = total + dyadic_block(v, j)
    assert_array_equal(total.coeffs, v.coeffs)


def test_dyadic_blocks_are_orthogonal(rng):
    v = SpectralField(rng.standard_normal(16))
    a, b = dyadic_block(v, 2), dyadic_block(v, 4)
    assert float(np.dot(a.coeffs, b.coeffs)) == 0.0
    assert not dyadic_block(v, 7).coeffs.any()


def test_besov_norm_of_single_block_field_is_independent_of_q(rng):
    samples = []
    for _ in range(6):
        coeffs = np.zeros(16)
        coeffs[3:7] = rng.standard_normal(4)
        samples.append(SpectralField(coeffs))
    ensemble = EnsembleField(samples)
    expected = lp_norm_ensemble(ensemble, 0.5, 2)
    for q in (1, 2, math.inf):
        assert besov_norm_ensemble(ensemble, 0.5, 2, q) == pytest.approx(expected, rel=1e-13)


def test_besov_norm_rejects_bad_arguments():
    ensemble = EnsembleField([SpectralField([1.0])])
    with pytest.raises(DomainError):
        besov_norm_ensemble(EnsembleField([]), 0.0)
    with pytest.raises(DomainError):
        besov_norm_ensemble(ensemble, 0.0, p=3)
    with pytest.raises(DomainError):
        besov_norm_ensemble(ensemble, 0.0, q=0.5)


def test_ensemble_requires_shared_mode_count():
    with pytest.raises(DomainError):
        EnsembleField([SpectralField([1.0]), SpectralField([1.0, 2.0])])


def test_project_truncate():
    v = SpectralField([1.0, 2.0, 3.0])
    assert_array_equal(project_truncate(v, 1).coeffs, [1.0])
    assert_array_equal(project_truncate(v, 5).coeffs, [1.0, 2.0, 3.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        project_truncate(v, 0)


def test_truncation_error_bound(rng):
    M, s = 16, 1.0
    k = np.arange(1, 129)
    v = SpectralField(rng.standard_normal(128) / k ** 2)
    err = sobolev_norm(project_truncate(v, M) - v, 0)
    assert err <= eigenvalue(M + 1) ** (-s / 2) * sobolev_norm(v, s)


def test_sine_interpolate_recovers_first_mode():
    M = 9
    nodal = np.sin(math.pi * grid_nodes(M))
    expected = np.zeros(M)
    expected[0] = 1.0 / SQRT2
    assert_allclose(sine_interpolate(nodal).coeffs, expected, atol=1e-15)


def test_sine_interpolate_matches_direct_summation(rng):
    M = 7
    g = rng.standard_normal(M)
    m = np.arange(1, M + 1)
    direct = np.array([2.0 / (M + 1) * np.sum(g * np.sin(k * m * math.pi / (M + 1)))
                       for k in range(1, M + 1)]) / SQRT2
    assert_allclose(sine_interpolate(g).coeffs, direct, rtol=0, atol=1e-12)


def test_interpolation_round_trip(rng):
    v = SpectralField(rng.standard_normal(33))
    assert_allclose(sine_interpolate(evaluate_on_grid(v)).coeffs, v.coeffs, atol=1e-12)
    g = rng.standard_normal(33)
    assert_allclose(evaluate_on_grid(sine_interpolate(g)), g, atol=1e-12)


def test_evaluate_on_grid_is_linear(rng):
    v = SpectralField(rng.standard_normal(10))
    w = SpectralField(rng.standard_normal(10))
    assert_allclose(evaluate_on_grid(2.0 * v + w * -3.0),
                    2.0 * evaluate_on_grid(v) - 3.0 * evaluate_on_grid(w), atol=1e-13)


def test_sine_interpolate_rejects_non_finite():
    with pytest.raises(DomainError):
        sine_interpolate([0.0, math.inf])


def test_constant_one_projection():
    p = constant_one_projection(4).coeffs
    assert p[0] == pytest.approx(0.90031631615710606, rel=1e-14)
    assert p[1] == 0.0
    assert p[2] == pytest.approx(2 * SQRT2 / (3 * math.pi), rel=1e-14)
    assert p[3] == 0.0


def test_collocation_identity_is_exact(rng):
    v = SpectralField(rng.standard_normal(16))
    assert_allclose(collocation_nonlinearity(v, lambda u: u).coeffs, v.coeffs, atol=1e-13)


def test_collocation_constant_and_shifted_drift():
    v = SpectralField.zeros(8)
    c = collocation_nonlinearity(v, lambda u: np.full_like(u, 2.5))
    assert_allclose(c.coeffs, 2.5 * constant_one_projection(8).coeffs, atol=1e-15)
    s = collocation_nonlinearity(v, lambda u: np.sqrt(1 + u * u))
    assert_allclose(s.coeffs, constant_one_projection(8).coeffs, atol=1e-15)


def test_collocation_reports_failing_node():
    v = SpectralField([1.0, 0.0, 0.0])

    def explode(u):
        out = np.zeros_like(u)
        out[u > 1.2] = math.inf
        return out

    with pytest.raises(NumericError) as info:
        collocation_nonlinearity(v, explode)
    assert info.value.node == 2


def test_galerkin_identity_is_exact(rng):
    v = SpectralField(rng.standard_normal(16))
    assert_allclose(galerkin_nonlinearity(v, lambda u: u, 4).coeffs, v.coeffs, atol=1e-12)


def test_galerkin_square_of_first_mode():
    # (sqrt(2) sin(pi x))^2 = 1 - cos(2 pi x): even modes vanish,
    # odd modes are -8 sqrt(2) / (pi k (k^2 - 4))
    out = galerkin_nonlinearity(SpectralField.mode(1, 8), lambda u: u * u, 8).coeffs
    assert abs(out[1]) < 1e-10
    assert abs(out[3]) < 1e-10
    for k in (1, 3, 5):
        exact = -8 * SQRT2 / (math.pi * k * (k * k - 4))
        assert out[k - 1] == pytest.approx(exact, abs=1e-4)


def test_galerkin_and_collocation_agree_on_smooth_fields():
    Ms = (16, 32, 64, 128, 256)
    gaps = []
    for M in Ms:
        v = 0.5 * SpectralField.mode(1, M) + 0.2 * SpectralField.mode(2, M)
        f = lambda u: np.sqrt(1 + u * u)  # noqa: E731
        gaps.append(np.linalg.norm(galerkin_nonlinearity(v, f).coeffs
                                   - collocation_nonlinearity(v, f).coeffs))
    assert np.all(np.diff(gaps) < 0)
    slope = np.polyfit(np.log2(Ms), np.log2(gaps), 1)[0]
    assert slope <= -0.9


def test_galerkin_rejects_low_oversampling():
    with pytest.raises(DomainError):
        galerkin_nonlinearity(SpectralField([1.0]), lambda u: u, 1)


def test_semigroup():
    v = SpectralField.mode(1, 3)
    assert_array_equal(semigroup_apply(v, 0.0).coeffs, v.coeffs)
    assert semigroup_apply(v, 1.0).coeffs[0] == pytest.approx(math.exp(-math.pi ** 2), rel=1e-14)
    with pytest.raises(DomainError):
        semigroup_apply(v, -1.0)


def test_semigroup_law(rng):
    v = SpectralField(rng.standard_normal(6))
    two_steps = semigroup_apply(semigroup_apply(v, 0.25), 0.5).coeffs
    assert_allclose(two_steps, semigroup_apply(v, 0.75).coeffs, rtol=1e-13)


def test_smoothing_estimate(rng):
    v = SpectralField(rng.standard_normal(200))
    for t in (1e-4, 1e-2, 0.3):
        for r in (0.25, 0.5, 1.0):
            lhs = sobolev_norm(semigroup_apply(v, t), 2 * r - 1.0)
            assert lhs <= (r / (math.e * t)) ** r * sobolev_norm(v, -1.0) * (1 + 1e-12)


def test_phi_factors():
    lam = math.pi ** 2
    assert phi_factors(1, 0.1)[0] == pytest.approx((1 - math.exp(-0.1 * lam)) / lam, rel=1e-14)
    assert phi_factors(1, 1e3)[0] == pytest.approx(1 / lam, rel=1e-14)
    tau = 1e-8 / lam
    assert phi_factors(1, tau)[0] == pytest.approx(tau, rel=1e-7)
    with pytest.raises(DomainError):
        phi_factors(1, 0.0)


def test_phi_filter_apply():
    v = SpectralField([2.0, 0.0])
    assert phi_filter_apply(v, 0.1).coeffs[0] == pytest.approx(2 * phi_factors(1, 0.1)[0])
