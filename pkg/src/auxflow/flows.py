"""Reference flows: initial conditions for the experiments and closed-form
solutions used as test oracles."""

import numpy as np

__all__ = [
    "polynomial_vortex",
    "taylor_green",
    "taylor_green_decay",
    "shear_layer",
]


def polynomial_vortex(grid):
    """Polynomial vortex on [0,1]^2 with no-slip boundary.

    Curl of the stream function 64 x^2(x-1)^2 y^2(y-1)^2: divergence-free,
    vanishes on the boundary together with its normal derivative.
    """
    x, y = grid.mesh()
    u1 = -128.0 * x ** 2 * (x - 1.0) ** 2 * y * (y - 1.0) * (2.0 * y - 1.0)
    u2 = 128.0 * y ** 2 * (y - 1.0) ** 2 * x * (x - 1.0) * (2.0 * x - 1.0)
    return np.stack([u1, u2])


def taylor_green_decay(t, viscosity):
    return np.exp(-8.0 * np.pi ** 2 * viscosity * t)


def taylor_green(grid, t=0.0, viscosity=1.0):
    """Decaying vortex array on the periodic unit square.

    Returns (u, p).  The velocity is an eigenfunction of the Stokes
    operator, so u(t) = A(t) u(0) with A = exp(-8 pi^2 nu t), and the
    convection term is exactly balanced by grad p with
    p = A^2 (cos 4 pi x + cos 4 pi y) / 4.
    """
    x, y = grid.mesh()
    a = taylor_green_decay(t, viscosity)
    u1 = a * np.sin(2.0 * np.pi * x) * np.cos(2.0 * np.pi * y)
    u2 = -a * np.cos(2.0 * np.pi * x) * np.sin(2.0 * np.pi * y)
    p = a * a * (np.cos(4.0 * np.pi * x) + np.cos(4.0 * np.pi * y)) / 4.0
    return np.stack([u1, u2]), p


def shear_layer(grid, width=30.0, perturbation=0.05):
    """Double shear layer with a sinusoidal cross perturbation (periodic)."""
    x, y = grid.mesh()
    u1 = np.where(y <= 0.5,
                  np.tanh(width * (y - 0.25)),
                  np.tanh(width * (0.75 - y)))
    u2 = perturbation * np.sin(2.0 * np.pi * x)
    return np.stack([u1, u2])
