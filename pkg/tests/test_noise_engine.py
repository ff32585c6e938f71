import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from spde_sdk.errors import DomainError, ValidationError
from spde_sdk.noise_engine import (
    aggregate_increments,
    besov_block_bound_exact,
    besov_block_profile,
    coarsen_pack,
    convolution_increment,
    convolution_l2_sq_exact,
    increment_scaling_exact,
    increment_variances,
    sample_increments,
    sobolev_series_partial,
)
from spde_sdk.noise_spectra import PowerNoise, TraceClassNoise, WhiteNoise
from spde_sdk.spectral_core import eigenvalues
from spde_sdk.time_mesh import graded_mesh


@pytest.fixture
def fine_mesh():
    return graded_mesh(0.5, 32, 0.7)


def test_sample_increments_is_deterministic(fine_mesh):
    a = sample_increments(fine_mesh, 16, 5, 0)
    b = sample_increments(fine_mesh, 16, 5, 0)
    c = sample_increments(fine_mesh, 16, 5, 1)
    assert a.xi.shape == (32, 16)
    assert_array_equal(a.xi, b.xi)
    assert not np.array_equal(a.xi, c.xi)
    with pytest.raises(ValueError):
        a.xi[0, 0] = 0.0


def test_more_modes_extend_the_same_draws(fine_mesh):
    narrow = sample_increments(fine_mesh, 8, 5, 3)
    wide = sample_increments(fine_mesh, 32, 5, 3)
    assert_array_equal(narrow.xi, wide.xi[:, :8])


def test_convolution_increment_scales(fine_mesh):
    spectrum = PowerNoise(0.5)
    pack = sample_increments(fine_mesh, 8, 5, 0)
    n = 4
    inc = convolution_increment(pack, n, spectrum, 8)
    lam = eigenvalues(8)
    tau = fine_mesh.step(n)
    expected = np.sqrt(spectrum.weights(8) * (1 - np.exp(-2 * tau * lam)) / (2 * lam)) * pack.xi[n - 1]
    assert_allclose(inc.coeffs, expected, rtol=1e-13)
    with pytest.raises(DomainError):
        convolution_increment(pack, 0, spectrum, 8)
    with pytest.raises(DomainError):
        convolution_increment(pack, 1, spectrum, 9)


def test_single_step_aggregate_is_the_increment(fine_mesh):
    spectrum = WhiteNoise()
    pack = sample_increments(fine_mesh, 8, 5, 0)
    for n in (0, 7, 31):
        assert_array_equal(aggregate_increments(pack, spectrum, n, 1, 8).coeffs,
                           convolution_increment(pack, n + 1, spectrum, 8).coeffs)


def test_aggregate_span_is_checked(fine_mesh):
    pack = sample_increments(fine_mesh, 4, 5, 0)
    with pytest.raises(DomainError):
        aggregate_increments(pack, WhiteNoise(), 30, 4, 4)
    with pytest.raises(DomainError):
        aggregate_increments(pack, WhiteNoise(), 0, 0, 4)


def test_aggregation_weights_reproduce_the_coarse_variance(fine_mesh):
    # Sum of squared aggregation weights times fine variances equals the
    # variance of the coarse increment.
    spectrum = WhiteNoise()
    M = 12
    coarse = graded_mesh(0.5, 8, 0.7)
    lam = eigenvalues(M)
    fine_var = increment_variances(fine_mesh, spectrum, M)
    coarse_var = increment_variances(coarse, spectrum, M)
    levels = fine_mesh.levels
    for c in range(coarse.N):
        n, m = 4 * c, 4
        total = sum(np.exp(-2 * (levels[n + m] - levels[n + j]) * lam) * fine_var[n + j - 1]
                    for j in range(1, m + 1))
        assert_allclose(total, coarse_var[c], rtol=1e-12)


def test_coarsened_pack_rows_are_aggregates(fine_mesh):
    spectrum = TraceClassNoise()
    pack = sample_increments(fine_mesh, 8, 5, 2)
    coarse = graded_mesh(0.5, 8, 0.7)
    coarsened = coarsen_pack(pack, coarse)
    assert coarsened.factor == 4
    assert coarsened.sample_index == 2
    incs = coarsened.increments(spectrum, 8)
    assert incs.shape == (8, 8)
    for c in range(8):
        assert_array_equal(incs[c], aggregate_increments(pack, spectrum, 4 * c, 4, 8).coeffs)
    assert coarsened.to_dict()["factor"] == 4


def test_identity_coarsening_is_bit_exact(fine_mesh):
    spectrum = WhiteNoise()
    pack = sample_increments(fine_mesh, 8, 5, 0)
    assert_array_equal(coarsen_pack(pack, fine_mesh).increments(spectrum, 8),
                       pack.increments(spectrum, 8))


def test_coarsening_requires_nesting(fine_mesh):
    pack = sample_increments(fine_mesh, 4, 5, 0)
    with pytest.raises(ValidationError):
        coarsen_pack(pack, graded_mesh(0.5, 12, 0.7))
    with pytest.raises(ValidationError):
        coarsen_pack(pack, graded_mesh(0.5, 8, 0.6))


def test_convolution_l2_small_time_asymptotics():
    t = 1e-6
    result = convolution_l2_sq_exact(t, WhiteNoise(), 2 ** 16)
    assert result.value == pytest.approx(math.sqrt(t / (2 * math.pi)), rel=1e-2)
    assert result.tail_bound == pytest.approx(1 / (2 * math.pi ** 2 * 2 ** 16))


def test_convolution_l2_saturates():
    result = convolution_l2_sq_exact(10.0, WhiteNoise(), 2 ** 18)
    assert result.value == pytest.approx(1 / 12, rel=1e-5)


def test_convolution_l2_tail_bound_brackets_the_series():
    spectrum = PowerNoise(0.5)
    coarse = convolution_l2_sq_exact(0.01, spectrum, 2 ** 10)
    fine = convolution_l2_sq_exact(0.01, spectrum, 2 ** 14)
    assert coarse.value <= fine.value <= coarse.value + coarse.tail_bound


def test_convolution_l2_rejects_bad_arguments():
    with pytest.raises(DomainError):
        convolution_l2_sq_exact(0.0, WhiteNoise(), 10)
    with pytest.raises(DomainError):
        convolution_l2_sq_exact(0.1, WhiteNoise(), 0)


def test_increment_scaling_depends_on_the_gap():
    spectrum = WhiteNoise()
    a = increment_scaling_exact(0.75, 0.5, spectrum, 2 ** 12)
    b = increment_scaling_exact(0.5, 0.25, spectrum, 2 ** 12)
    assert a == b
    with pytest.raises(DomainError):
        increment_scaling_exact(0.2, 0.2, spectrum, 10)


def test_besov_block_bound():
    # white noise, alpha = 1/2, saturated: block j = 1 holds only k = 1
    assert besov_block_bound_exact(10.0, 0.5, WhiteNoise(), 1) == pytest.approx(
        math.sqrt(1 / (2 * math.pi)), rel=1e-12)
    profile = besov_block_profile(0.01, 0.75, PowerNoise(0.5), 10)
    for j in (1, 4, 10):
        assert profile[j - 1] == pytest.approx(
            besov_block_bound_exact(0.01, 0.75, PowerNoise(0.5), j), rel=1e-14)
    with pytest.raises(DomainError):
        besov_block_bound_exact(0.1, 0.5, WhiteNoise(), 0)


def test_sobolev_series_partial():
    harmonic = 1 + 1 / 2 + 1 / 3 + 1 / 4
    assert sobolev_series_partial(0.5, WhiteNoise(), 4) == pytest.approx(harmonic / math.pi)


def test_pack_provenance(fine_mesh):
    data = sample_increments(fine_mesh, 4, 5, 9).to_dict()
    assert data == {"master_seed": 5, "sample_index": 9, "N": 32, "M": 4}


@pytest.mark.slow
def test_first_mode_variance_matches_the_closed_form():
    mesh = graded_mesh(0.01, 1, 0.0)
    spectrum = WhiteNoise()
    draws = np.array([
        convolution_increment(sample_increments(mesh, 1, 31, i), 1, spectrum, 1).coeffs[0]
        for i in range(100_000)
    ])
    lam = math.pi ** 2
    exact = -math.expm1(-2.0 * 0.01 * lam) / (2.0 * lam)
    assert increment_variances(mesh, spectrum, 1)[0, 0] == pytest.approx(exact, rel=1e-14)
    assert abs(draws.var() / exact - 1.0) <= 0.03
