import numpy as np

from auxflow import flows
from auxflow.spectral import Grid, SpectralOps


def test_polynomial_vortex():
    grid = Grid(48, boundary="dirichlet")
    ops = SpectralOps(grid)
    u = flows.polynomial_vortex(grid)
    # no-slip boundary
    for c in u:
        assert np.max(np.abs(c[0, :])) == 0.0
        assert np.max(np.abs(c[-1, :])) == 0.0
        assert np.max(np.abs(c[:, 0])) == 0.0
        assert np.max(np.abs(c[:, -1])) == 0.0
    # exact squared norm: 2 * 128^2 * (1/630) * (1/210)
    exact = 2.0 * 128.0 ** 2 / (630.0 * 210.0)
    quad = ops.inner_product(u[0], u[0]) + ops.inner_product(u[1], u[1])
    assert abs(quad - exact) < 5e-3 * exact
    # curl of a stream function: weak divergence is quadrature error only,
    # so it decays under refinement and vanishes after projection
    wd = [SpectralOps(Grid(n, boundary="dirichlet")).weak_divergence(
        flows.polynomial_vortex(Grid(n, boundary="dirichlet")))
        for n in (24, 48, 96)]
    assert wd[1] < 0.6 * wd[0] and wd[2] < 0.6 * wd[1]
    assert wd[1] < 0.03
    assert ops.weak_divergence(ops.leray_project(u)) < 1e-12


def test_taylor_green_solves_navier_stokes():
    grid = Grid(48, boundary="periodic")
    ops = SpectralOps(grid)
    nu = 0.7
    u, p = flows.taylor_green(grid, t=0.0, viscosity=nu)
    # du/dt = -8 pi^2 nu u, and conv + grad p - nu lap u must cancel it
    dudt = -8.0 * np.pi ** 2 * nu * u
    conv = ops.convection(u, u)
    gp = ops.gradient(p)
    lap = np.stack([ops.laplacian(u[0]), ops.laplacian(u[1])])
    resid = dudt + conv + gp - nu * lap
    assert np.max(np.abs(resid)) < 1e-9
    assert ops.l2_norm(ops.divergence(u)) < 1e-12


def test_taylor_green_decay_scaling():
    grid = Grid(32, boundary="periodic")
    u0, p0 = flows.taylor_green(grid, t=0.0, viscosity=0.01)
    ut, pt = flows.taylor_green(grid, t=0.3, viscosity=0.01)
    a = flows.taylor_green_decay(0.3, 0.01)
    assert np.allclose(ut, a * u0, atol=1e-14)
    assert np.allclose(pt, a * a * p0, atol=1e-14)


def test_shear_layer():
    grid = Grid(128, boundary="periodic")
    ops = SpectralOps(grid)
    u = flows.shear_layer(grid)
    assert np.max(np.abs(u[1])) <= 0.05 + 1e-15
    # layers match across the seam y=0.5 and the periodic wrap
    x, y = grid.mesh()
    assert np.max(np.abs(u[0][:, 0] - np.tanh(-7.5))) < 1e-12
    # total circulation on the torus is zero
    w = ops.vorticity(u)
    assert abs(np.mean(w)) < 1e-10
    assert np.max(np.abs(w)) < 40.0
