"""Truncated trace-class noise: sine-product modes with algebraically
decaying amplitudes, increment sampling, and refinement-coupled Brownian
increment tables for strong-error studies.

The driving process is W(t) = sum_{j1,j2=1..J} sigma_{j1 j2} e_{j1 j2}(x)
beta_{j1 j2}(t) with sigma_{j1 j2} = (j1+j2)^(-(1+eps/2)) and
e_{j1 j2}(x) = (sin(j1 pi x1) sin(j2 pi x2), sin(j1 pi x1) sin(j2 pi x2)).
Each mode carries one scalar Brownian motion driving both velocity
components identically.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, UsageError
from .spectral import Grid

__all__ = [
    "NoiseSpec",
    "NoiseBasis",
    "BrownianTable",
    "build_noise_basis",
    "sample_increment",
    "increment_field",
    "make_brownian_table",
    "aggregate_increment",
]


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters of the truncated expansion.

    modes_per_dim: J, so J^2 scalar modes in total.
    epsilon: decay regularizer in the amplitude exponent 1 + eps/2.
    grid_size: points per dimension of the grid the shapes are sampled on.
    boundary: grid type the shapes are sampled for.
    """

    modes_per_dim: int
    epsilon: float
    grid_size: int
    boundary: str = "dirichlet"

    def __post_init__(self):
        if not isinstance(self.modes_per_dim, (int, np.integer)) or self.modes_per_dim < 1:
            raise ConfigurationError("modes_per_dim must be a positive integer")
        if not self.epsilon > 0.0:
            raise ConfigurationError("epsilon must be positive")
        if self.grid_size < 4:
            raise ConfigurationError("grid_size must be at least 4")
        if self.grid_size < 2 * self.modes_per_dim:
            raise ConfigurationError(
                "grid_size must be at least 2*modes_per_dim to resolve the modes")
        if self.boundary not in ("dirichlet", "periodic"):
            raise ConfigurationError("boundary must be 'dirichlet' or 'periodic'")


@dataclass(frozen=True)
class NoiseBasis:
    """Sampled mode shapes and amplitudes; immutable, shareable.

    shapes[m] is the scalar factor sin(j1 pi x) sin(j2 pi y) of mode
    m = (j1-1)*J + (j2-1); both vector components use the same factor.
    """

    spec: NoiseSpec
    shapes: np.ndarray
    amplitudes: np.ndarray

    @property
    def n_modes(self):
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class BrownianTable:
    """Per-mode fine Brownian increments for one sample path.

    increments has shape (n_modes, n_fine); entry (m, i) is the increment
    of mode m's Brownian motion over the i-th fine interval, already scaled
    by sqrt(dt_fine).  Write-once: aggregation only reads.
    """

    n_fine: int
    dt_fine: float
    increments: np.ndarray = field(repr=False)
    seed: object = None


def build_noise_basis(spec):
    grid = Grid(spec.grid_size, boundary=spec.boundary)
    x, y = grid.mesh()
    jmax = spec.modes_per_dim
    shapes = np.empty((jmax * jmax,) + grid.shape)
    amps = np.empty(jmax * jmax)
    expo = 1.0 + 0.5 * spec.epsilon
    for j1 in range(1, jmax + 1):
        sx = np.sin(j1 * np.pi * x)
        for j2 in range(1, jmax + 1):
            m = (j1 - 1) * jmax + (j2 - 1)
            shapes[m] = sx * np.sin(j2 * np.pi * y)
            amps[m] = float(j1 + j2) ** (-expo)
    shapes.setflags(write=False)
    amps.setflags(write=False)
    return NoiseBasis(spec=spec, shapes=shapes, amplitudes=amps)


def increment_field(basis, per_mode):
    """Vector field sum_m sigma_m * per_mode[m] * e_m(x)."""
    per_mode = np.asarray(per_mode, dtype=float)
    if per_mode.shape != (basis.n_modes,):
        raise UsageError(
            "per_mode must have shape (%d,), got %r"
            % (basis.n_modes, per_mode.shape))
    scalar = np.tensordot(basis.amplitudes * per_mode, basis.shapes, axes=1)
    return np.stack([scalar, scalar])


def sample_increment(basis, dt, rng):
    """One increment field over a step of size dt, drawn from rng."""
    if not dt > 0.0:
        raise UsageError("dt must be positive")
    draws = rng.standard_normal(basis.n_modes) * np.sqrt(dt)
    return increment_field(basis, draws)


def make_brownian_table(basis, n_fine, dt_fine, seed):
    """Draw all fine increments for one path up front.

    Uses a counter-based generator so the table is a pure function of the
    seed, independent of execution order elsewhere.  seed may be anything
    numpy's SeedSequence accepts (int or a sequence of ints).
    """
    if not isinstance(n_fine, (int, np.integer)) or n_fine < 1:
        raise ConfigurationError("n_fine must be a positive integer")
    if not dt_fine > 0.0:
        raise ConfigurationError("dt_fine must be positive")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    inc = rng.standard_normal((basis.n_modes, n_fine)) * np.sqrt(dt_fine)
    inc.setflags(write=False)
    return BrownianTable(n_fine=int(n_fine), dt_fine=float(dt_fine),
                         increments=inc, seed=seed)


def aggregate_increment(table, k, m):
    """Per-mode increment over the m-th coarse interval of k fine steps.

    Summation is left to right over the fine increments, so the value for
    level k is bit-identical to what a coarse path consuming the same fine
    increments in order would accumulate.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigurationError("level factor k must be a positive integer")
    if table.n_fine % k != 0:
        raise ConfigurationError(
            "level factor %d does not divide n_fine=%d" % (k, table.n_fine))
    n_coarse = table.n_fine // k
    if not 0 <= m < n_coarse:
        raise UsageError("coarse step index %d out of range [0, %d)" % (m, n_coarse))
    lo = m * k
    out = table.increments[:, lo].copy()
    for i in range(1, k):
        out += table.increments[:, lo + i]
    return out
