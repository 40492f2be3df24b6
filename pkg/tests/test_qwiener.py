import numpy as np
import pytest

from auxflow import qwiener
from auxflow.errors import ConfigurationError, UsageError
from auxflow.spectral import Grid, SpectralOps


def make_basis(j=4, eps=1e-4, n=16, boundary="dirichlet"):
    spec = qwiener.NoiseSpec(modes_per_dim=j, epsilon=eps, grid_size=n,
                             boundary=boundary)
    return qwiener.build_noise_basis(spec)


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        qwiener.NoiseSpec(modes_per_dim=0, epsilon=1e-4, grid_size=16)
    with pytest.raises(ConfigurationError):
        qwiener.NoiseSpec(modes_per_dim=4, epsilon=0.0, grid_size=16)
    with pytest.raises(ConfigurationError):
        qwiener.NoiseSpec(modes_per_dim=4, epsilon=1e-4, grid_size=3)
    with pytest.raises(ConfigurationError):
        qwiener.NoiseSpec(modes_per_dim=8, epsilon=1e-4, grid_size=12)
    with pytest.raises(ConfigurationError):
        qwiener.NoiseSpec(modes_per_dim=4, epsilon=1e-4, grid_size=16,
                          boundary="neumann")


def test_amplitudes():
    basis = make_basis(j=4, eps=1e-4)
    # sigma_{1,1} = 2^{-(1+eps/2)}
    assert abs(basis.amplitudes[0] - 2.0 ** (-(1.0 + 0.5e-4))) < 1e-15
    assert abs(basis.amplitudes[0] - 0.4999827) < 1e-7
    # strictly decreasing in j1+j2
    j = np.arange(1, 5)
    total = j[:, None] + j[None, :]
    order = np.argsort(total.ravel(), kind="stable")
    sorted_amps = basis.amplitudes[order]
    sorted_total = total.ravel()[order]
    for a, b in zip(range(len(order) - 1), range(1, len(order))):
        if sorted_total[a] < sorted_total[b]:
            assert sorted_amps[a] > sorted_amps[b]
    # trace-class surrogate: finite sum of squares
    assert np.isfinite(np.sum(basis.amplitudes ** 2))


def test_mode_shapes_closed_form():
    basis = make_basis(j=1, eps=1.0, n=8)
    # e_{1,1}(0.5, 0.5) = sin(pi/2)^2 = 1 on both components
    f = qwiener.increment_field(basis, np.array([1.0 / basis.amplitudes[0]]))
    assert abs(f[0][4, 4] - 1.0) < 1e-14
    assert abs(f[1][4, 4] - 1.0) < 1e-14
    # every mode vanishes on the boundary
    basis4 = make_basis(j=4, n=16)
    for m in range(basis4.n_modes):
        s = basis4.shapes[m]
        assert np.max(np.abs(s[0, :])) < 1e-14
        assert np.max(np.abs(s[-1, :])) < 1e-14
        assert np.max(np.abs(s[:, 0])) < 1e-14
        assert np.max(np.abs(s[:, -1])) < 1e-14


def test_mode_orthogonality():
    basis = make_basis(j=4, n=16)
    ops = SpectralOps(Grid(16, boundary="dirichlet"))
    for a in range(basis.n_modes):
        for b in range(a + 1, basis.n_modes):
            ip = ops.inner_product(basis.shapes[a], basis.shapes[b])
            assert abs(ip) < 1e-10


def test_increment_field_zero_and_shape_check():
    basis = make_basis(j=2, n=8)
    f = qwiener.increment_field(basis, np.zeros(4))
    assert f.shape == (2, 9, 9)
    assert np.all(f == 0.0)
    with pytest.raises(UsageError):
        qwiener.increment_field(basis, np.zeros(3))


def test_sample_increment_moments():
    basis = make_basis(j=1, eps=1.0, n=8)
    dt = 0.01
    rng = np.random.default_rng(1234)
    n_draws = 30000
    vals = np.empty(n_draws)
    for i in range(n_draws):
        f = qwiener.sample_increment(basis, dt, rng)
        vals[i] = f[0][4, 4]
    sigma = basis.amplitudes[0]
    var_exact = sigma ** 2 * dt
    # mean within 4 standard errors, variance within 5%
    assert abs(np.mean(vals)) < 4.0 * np.sqrt(var_exact / n_draws)
    assert abs(np.var(vals) - var_exact) < 0.05 * var_exact


def test_table_reproducible_and_variance():
    basis = make_basis(j=2, n=8)
    t1 = qwiener.make_brownian_table(basis, 4000, 1e-3, seed=77)
    t2 = qwiener.make_brownian_table(basis, 4000, 1e-3, seed=77)
    assert np.array_equal(t1.increments, t2.increments)
    t3 = qwiener.make_brownian_table(basis, 4000, 1e-3, seed=78)
    assert not np.array_equal(t1.increments, t3.increments)
    v = np.var(t1.increments, axis=1)
    assert np.all(np.abs(v - 1e-3) < 0.15e-3)
    assert abs(np.mean(v) - 1e-3) < 0.03e-3


def test_aggregation():
    basis = make_basis(j=2, n=8)
    table = qwiener.make_brownian_table(basis, 64, 0.5 ** 10, seed=5)
    # k=1 is the fine increment itself
    for m in (0, 31, 63):
        assert np.array_equal(qwiener.aggregate_increment(table, 1, m),
                              table.increments[:, m])
    # k=8 equals the left-to-right sum, bit for bit
    for m in range(8):
        expect = table.increments[:, 8 * m].copy()
        for i in range(1, 8):
            expect = expect + table.increments[:, 8 * m + i]
        assert np.array_equal(qwiener.aggregate_increment(table, 8, m), expect)
    # telescoping: sum of aggregates at any level matches the fine total
    fine_total = np.sum(table.increments, axis=1)
    for k in (2, 4, 16, 64):
        total = np.zeros(basis.n_modes)
        for m in range(64 // k):
            total += qwiener.aggregate_increment(table, k, m)
        assert np.allclose(total, fine_total, rtol=0.0, atol=1e-14)
    with pytest.raises(ConfigurationError):
        qwiener.aggregate_increment(table, 7, 0)
    with pytest.raises(UsageError):
        qwiener.aggregate_increment(table, 8, 8)


def test_table_validation():
    basis = make_basis(j=2, n=8)
    with pytest.raises(ConfigurationError):
        qwiener.make_brownian_table(basis, 0, 1e-3, seed=1)
    with pytest.raises(ConfigurationError):
        qwiener.make_brownian_table(basis, 16, 0.0, seed=1)
