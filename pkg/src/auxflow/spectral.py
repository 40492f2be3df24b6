"""Spectral fields and operators on the unit square.

Two discretizations are supported:

* ``dirichlet``: an (n+1) x (n+1) uniform grid including the boundary.
  Velocity-like fields live in the sine basis sin(j*pi*x)*sin(k*pi*y)
  (zero trace), pressure-like fields in the cosine basis (zero normal
  derivative).  Transforms are DST-I / DCT-I.
* ``periodic``: an n x n uniform grid with full Fourier expansions.

Scalar fields are real arrays indexed ``f[i, j] = f(x_i, y_j)`` (x along
axis -2, y along axis -1); vector fields carry a leading component axis of
length 2.  Transforms (`to_coeffs`/`to_values`) are faithful round trips.
Differential operators and solvers act in the retained-mode space of the
grid: modes above ``grid.modes`` are discarded, and for periodic grids the
Nyquist modes are always dropped so that gradient, divergence, and
Laplacian stay mutually consistent in the discrete inner product.

Inner products are trapezoid quadrature (dirichlet) or the rectangle rule
(periodic); both are exact for the trigonometric polynomials the solvers
produce.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import UsageError, ConfigurationError

_PI = np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0,1]^2.

    n is the number of intervals per direction (dirichlet) or the number
    of points per direction (periodic).  modes caps the retained spectral
    modes per direction; None means "as many as the grid supports".
    """

    n: int
    boundary: str = "dirichlet"
    modes: int | None = None

    def __post_init__(self):
        if self.boundary not in ("dirichlet", "periodic"):
            raise ConfigurationError(
                "grid.boundary must be 'dirichlet' or 'periodic', got %r" % (self.boundary,))
        if not isinstance(self.n, (int, np.integer)) or self.n < 4:
            raise ConfigurationError("grid.n must be an integer >= 4, got %r" % (self.n,))
        cap = self.max_modes
        if self.modes is not None:
            if not isinstance(self.modes, (int, np.integer)) or not (1 <= self.modes <= cap):
                raise ConfigurationError(
                    "grid.modes must lie in [1, %d] for n=%d, got %r"
                    % (cap, self.n, self.modes))

    @property
    def max_modes(self):
        # dirichlet: distinct interior sine modes; periodic: below Nyquist
        return self.n - 1 if self.boundary == "dirichlet" else self.n // 2 - 1

    @property
    def npts(self):
        return self.n + 1 if self.boundary == "dirichlet" else self.n

    @property
    def shape(self):
        return (self.npts, self.npts)

    @property
    def h(self):
        return 1.0 / self.n

    @property
    def nodes(self):
        return np.arange(self.npts) / self.n

    def mesh(self):
        x = self.nodes
        return np.meshgrid(x, x, indexing="ij")


@dataclass
class SpectralField:
    """Coefficient-space view of a field: basis kind plus coefficient array."""

    basis: str
    coeffs: np.ndarray
    grid: Grid


def _dst1(a, axis):
    return scipy.fft.dst(a, type=1, axis=axis)


def _dct1(a, axis):
    return scipy.fft.dct(a, type=1, axis=axis)


def _axslice(a, axis, sl):
    idx = [slice(None)] * a.ndim
    idx[axis] = sl
    return a[tuple(idx)]


def _pad_along(a, length, axis):
    """Zero-pad array a to the given length along axis."""
    if a.shape[axis] == length:
        return a
    shape = list(a.shape)
    shape[axis] = length
    out = np.zeros(shape, dtype=a.dtype)
    idx = [slice(None)] * a.ndim
    idx[axis] = slice(0, a.shape[axis])
    out[tuple(idx)] = a
    return out


class SpectralOps:
    """Per-grid workspace: precomputed wavenumbers, masks, and quadrature.

    All methods accept plain ndarrays whose last two axes are the grid.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        n = grid.n
        self.m = grid.modes if grid.modes is not None else grid.max_modes
        if grid.boundary == "dirichlet":
            j = np.arange(1, self.m + 1, dtype=float)
            jc = np.arange(0, self.m + 1, dtype=float)
            self.lam_sin = _PI ** 2 * (j[:, None] ** 2 + j[None, :] ** 2)
            self.lam_cos = _PI ** 2 * (jc[:, None] ** 2 + jc[None, :] ** 2)
            self._jpi = _PI * j
            self._jcpi = _PI * jc
            # integral of cos(j pi x)^2 over [0,1]
            gam = np.where(jc == 0, 1.0, 0.5)
            self._gam = gam
            self._cos_w2 = gam[:, None] * gam[None, :]
            self._cos_gradw = _PI ** 2 * (
                jc[:, None] ** 2 * 0.5 * gam[None, :]
                + jc[None, :] ** 2 * 0.5 * gam[:, None])
            w = np.full(n + 1, grid.h)
            w[0] *= 0.5
            w[-1] *= 0.5
            self.quad_w2 = w[:, None] * w[None, :]
        else:
            kint = np.fft.fftfreq(n, 1.0 / n)
            keep1 = np.abs(kint) <= self.m
            self.trunc_mask = keep1[:, None] & keep1[None, :]
            keep_d = np.abs(kint) <= n // 3
            self.dealias_mask = self.trunc_mask & (keep_d[:, None] & keep_d[None, :])
            self.kx = 2.0 * _PI * kint[:, None] * np.ones((1, n))
            self.ky = 2.0 * _PI * np.ones((n, 1)) * kint[None, :]
            self.k2 = self.kx ** 2 + self.ky ** 2
            self._k2_safe = np.where(self.k2 == 0.0, 1.0, self.k2)
            self.quad_w2 = np.full((n, n), grid.h ** 2)

    # ---------------------------------------------------------------- dirichlet
    def _require(self, boundary):
        if self.grid.boundary != boundary:
            raise UsageError("operation requires a %s grid" % boundary)

    def _sin_analyze(self, vals, axis):
        n = self.grid.n
        c = _dst1(_axslice(vals, axis, slice(1, n)), axis) / n
        return _axslice(c, axis, slice(0, self.m))

    def _sin_synth(self, coeffs, axis):
        n = self.grid.n
        interior = _dst1(_pad_along(coeffs, n - 1, axis), axis) / 2.0
        shape = list(interior.shape)
        shape[axis] = n + 1
        out = np.zeros(shape)
        idx = [slice(None)] * interior.ndim
        idx[axis] = slice(1, n)
        out[tuple(idx)] = interior
        return out

    def _cos_analyze(self, vals, axis):
        n = self.grid.n
        c = _dct1(vals, axis) / n
        ends = [slice(None)] * c.ndim
        for e in (0, n):
            ends[axis] = e
            c[tuple(ends)] *= 0.5
        return _axslice(c, axis, slice(0, self.m + 1))

    def _cos_synth(self, coeffs, axis):
        n = self.grid.n
        z = _pad_along(coeffs, n + 1, axis).copy()
        idx = [slice(None)] * z.ndim
        idx[axis] = slice(1, n)
        z[tuple(idx)] *= 0.5
        return _dct1(z, axis)

    def sin2(self, vals):
        """Sine coefficients (modes 1..m per direction) of grid values."""
        self._require("dirichlet")
        return self._sin_analyze(self._sin_analyze(vals, -1), -2)

    def isin2(self, coeffs):
        """Grid values of a sine-coefficient array (zero on the boundary)."""
        self._require("dirichlet")
        return self._sin_synth(self._sin_synth(coeffs, -1), -2)

    def cos2(self, vals):
        """Cosine coefficients (modes 0..m per direction) of grid values."""
        self._require("dirichlet")
        return self._cos_analyze(self._cos_analyze(vals, -1), -2)

    def icos2(self, coeffs):
        self._require("dirichlet")
        return self._cos_synth(self._cos_synth(coeffs, -1), -2)

    # mixed-basis synthesis of first derivatives of sine fields
    def dsin_dx_vals(self, a):
        """Values of d/dx of the sine field with coefficients a (..., m, m)."""
        b = _PI * np.arange(1, self.m + 1)[:, None] * a
        # cos_x modes 1..m -> prepend the zero mode
        shape = list(b.shape)
        shape[-2] = self.m + 1
        full = np.zeros(shape)
        full[..., 1:, :] = b
        return self._cos_synth(self._sin_synth(full, -1), -2)

    def dsin_dy_vals(self, a):
        b = _PI * np.arange(1, self.m + 1)[None, :] * a
        shape = list(b.shape)
        shape[-1] = self.m + 1
        full = np.zeros(shape)
        full[..., :, 1:] = b
        return self._sin_synth(self._cos_synth(full, -1), -2)

    def div_sin_vals(self, avec):
        """Grid values of the divergence of a sine vector field (2, m, m)."""
        return self.dsin_dx_vals(avec[0]) + self.dsin_dy_vals(avec[1])

    def dcos_dx_vals(self, c):
        """Values of d/dx of the cosine field with coefficients c (..., m+1, m+1)."""
        b = -self._jpi[:, None] * c[..., 1:, :]
        return self._cos_synth(self._sin_synth(b, -2), -1)

    def dcos_dy_vals(self, c):
        b = -self._jpi[None, :] * c[..., :, 1:]
        return self._cos_synth(self._sin_synth(b, -1), -2)

    def cos_grad_vals(self, c):
        return np.stack([self.dcos_dx_vals(c), self.dcos_dy_vals(c)])

    def cos_dxx_vals(self, c):
        return self.icos2(-(self._jcpi[:, None] ** 2) * c)

    def cos_dyy_vals(self, c):
        return self.icos2(-(self._jcpi[None, :] ** 2) * c)

    def cos_dxy_vals(self, c):
        b = self._jpi[:, None] * self._jpi[None, :] * c[..., 1:, 1:]
        return self.isin2(b)

    # coefficient-space inner products (exact L2 of the represented fields)
    def sin_ip(self, a, b):
        return 0.25 * float(np.sum(a * b))

    def sin_grad_ip(self, a, b):
        return 0.25 * float(np.sum(a * b * self.lam_sin))

    def cos_norm2(self, c):
        return float(np.sum(c * c * self._cos_w2))

    def cos_grad_norm2(self, c):
        return float(np.sum(c * c * self._cos_gradw))

    # ---------------------------------------------------------------- periodic
    def hat(self, vals):
        self._require("periodic")
        return np.fft.fft2(vals)

    def unhat(self, hats):
        return np.fft.ifft2(hats).real

    def hip(self, fh, gh):
        """Quadrature inner product of two fields given by their DFTs."""
        n4 = float(self.grid.n) ** 4
        return float(np.sum((fh * np.conj(gh)).real)) / n4

    def hnorm2(self, fh):
        n4 = float(self.grid.n) ** 4
        return float(np.sum((fh * np.conj(fh)).real)) / n4

    def hgrad_ip(self, fh, gh):
        n4 = float(self.grid.n) ** 4
        return float(np.sum(self.k2 * (fh * np.conj(gh)).real)) / n4

    def grad_hat(self, fh):
        return np.stack([1j * self.kx * fh, 1j * self.ky * fh])

    def div_hat(self, vech):
        return 1j * self.kx * vech[0] + 1j * self.ky * vech[1]

    # ---------------------------------------------------------------- public ops
    def _default_basis(self):
        return "fourier" if self.grid.boundary == "periodic" else "sine"

    def _check_basis(self, basis):
        if basis is None:
            return self._default_basis()
        ok = ("fourier",) if self.grid.boundary == "periodic" else ("sine", "cosine")
        if basis not in ok:
            raise UsageError(
                "basis %r is not valid on a %s grid" % (basis, self.grid.boundary))
        return basis

    def _check_field(self, vals):
        vals = np.asarray(vals)
        if vals.shape[-2:] != self.grid.shape:
            raise UsageError(
                "field shape %r does not match grid shape %r"
                % (vals.shape, self.grid.shape))
        return vals

    def to_coeffs(self, vals, basis=None):
        """Faithful transform to coefficient space (no mode truncation)."""
        basis = self._check_basis(basis)
        vals = self._check_field(vals)
        n = self.grid.n
        if basis == "fourier":
            return SpectralField(basis, np.fft.fft2(vals), self.grid)
        if basis == "sine":
            c = _dst1(_dst1(vals[..., 1:n, 1:n], -1), -2) / n ** 2
            return SpectralField(basis, c, self.grid)
        c = _dct1(_dct1(vals, -1), -2) / n ** 2
        for ax in (-2, -1):
            for e in (0, n):
                idx = [slice(None)] * c.ndim
                idx[ax] = e
                c[tuple(idx)] *= 0.5
        return SpectralField(basis, c, self.grid)

    def to_values(self, field: SpectralField):
        """Inverse of to_coeffs."""
        if field.grid.boundary != self.grid.boundary or field.grid.n != self.grid.n:
            raise UsageError("field grid does not match these ops")
        c = field.coeffs
        n = self.grid.n
        if field.basis == "fourier":
            return np.fft.ifft2(c).real
        if field.basis == "sine":
            interior = _dst1(_dst1(c, -1), -2) / 4.0
            out = np.zeros(c.shape[:-2] + self.grid.shape)
            out[..., 1:n, 1:n] = interior
            return out
        z = c.copy()
        for ax in (-2, -1):
            idx = [slice(None)] * z.ndim
            idx[ax] = slice(1, n)
            z[tuple(idx)] *= 0.5
        return _dct1(_dct1(z, -1), -2)

    def laplacian(self, vals, basis=None):
        basis = self._check_basis(basis)
        vals = self._check_field(vals)
        if basis == "fourier":
            return self.unhat(-self.k2 * self.trunc_mask * self.hat(vals))
        if basis == "sine":
            return self.isin2(-self.lam_sin * self.sin2(vals))
        return self.icos2(-self.lam_cos * self.cos2(vals))

    def gradient(self, vals, basis=None):
        basis = self._check_basis(basis)
        vals = self._check_field(vals)
        if basis == "fourier":
            fh = self.hat(vals) * self.trunc_mask
            return np.stack([self.unhat(1j * self.kx * fh),
                             self.unhat(1j * self.ky * fh)])
        if basis == "sine":
            a = self.sin2(vals)
            return np.stack([self.dsin_dx_vals(a), self.dsin_dy_vals(a)])
        return self.cos_grad_vals(self.cos2(vals))

    def divergence(self, vec, basis=None):
        basis = self._check_basis(basis)
        vec = self._check_field(vec)
        if vec.shape[0] != 2:
            raise UsageError("divergence expects a 2-component vector field")
        if basis == "fourier":
            vh = self.hat(vec) * self.trunc_mask
            return self.unhat(self.div_hat(vh))
        if basis != "sine":
            raise UsageError("divergence on a dirichlet grid uses the sine basis")
        return self.div_sin_vals(self.sin2(vec))

    def vorticity(self, vec, basis=None):
        """Scalar curl d(v2)/dx - d(v1)/dy."""
        basis = self._check_basis(basis)
        vec = self._check_field(vec)
        if vec.shape[0] != 2:
            raise UsageError("vorticity expects a 2-component vector field")
        if basis == "fourier":
            vh = self.hat(vec) * self.trunc_mask
            return self.unhat(1j * self.kx * vh[1] - 1j * self.ky * vh[0])
        a = self.sin2(vec)
        return self.dsin_dx_vals(a[1]) - self.dsin_dy_vals(a[0])

    def solve_helmholtz(self, rhs, alpha, basis=None):
        """Solve (I - alpha*Lap) u = rhs in the retained-mode space."""
        if alpha < 0:
            raise UsageError("helmholtz coefficient alpha must be >= 0")
        basis = self._check_basis(basis)
        rhs = self._check_field(rhs)
        if basis == "fourier":
            return self.unhat(self.hat(rhs) * self.trunc_mask / (1.0 + alpha * self.k2))
        if basis == "sine":
            return self.isin2(self.sin2(rhs) / (1.0 + alpha * self.lam_sin))
        return self.icos2(self.cos2(rhs) / (1.0 + alpha * self.lam_cos))

    def pressure_poisson_solve(self, div_vals, tau):
        """Return phi with Lap(phi) = div_vals / tau and zero mean."""
        if tau <= 0:
            raise UsageError("tau must be positive")
        div_vals = self._check_field(div_vals)
        if self.grid.boundary == "periodic":
            dh = self.hat(div_vals) * self.trunc_mask
            ph = -dh / (self._k2_safe * tau)
            ph[..., 0, 0] = 0.0
            return self.unhat(ph)
        c = self.cos2(div_vals)
        lam = np.where(self.lam_cos == 0.0, 1.0, self.lam_cos)
        pc = -c / (lam * tau)
        pc[..., 0, 0] = 0.0
        return self.icos2(pc)

    def leray_project(self, vec):
        """Project onto discretely divergence-free fields."""
        vec = self._check_field(vec)
        if vec.shape[0] != 2:
            raise UsageError("leray_project expects a 2-component vector field")
        if self.grid.boundary == "periodic":
            vh = self.hat(vec) * self.trunc_mask
            kdotv = self.kx * vh[0] + self.ky * vh[1]
            factor = kdotv / self._k2_safe
            vh[0] -= self.kx * factor
            vh[1] -= self.ky * factor
            return self.unhat(vh)
        a = self.sin2(vec)
        d = self.div_sin_vals(a)
        c = self.cos2(d)
        lam = np.where(self.lam_cos == 0.0, 1.0, self.lam_cos)
        pc = -c / lam
        pc[..., 0, 0] = 0.0
        return self.isin2(a) - self.cos_grad_vals(pc)

    def weak_divergence(self, vec):
        """L2 norm of the divergence measured against the pressure space.

        Periodic grids: the usual spectral divergence (exact).  Dirichlet
        grids: the quadrature functionals D_jk = -(vec, grad q_jk) over the
        retained cosine modes q_jk, a representation-free measure that is
        machine-zero for fields produced by the pressure projection.
        """
        vec = self._check_field(vec)
        if vec.shape[0] != 2:
            raise UsageError("weak_divergence expects a 2-component vector field")
        if self.grid.boundary == "periodic":
            return self.l2_norm(self.divergence(vec))
        # (v1, sin_j cos_k)_quad = 0.5*gamma_k*A1[j,k] by discrete orthogonality
        a1 = self._sin_analyze(self._cos_analyze(vec[0], -1), -2)
        a2 = self._cos_analyze(self._sin_analyze(vec[1], -1), -2)
        gam = self._gam
        d = np.zeros((self.m + 1, self.m + 1))
        d[1:, :] += self._jpi[:, None] * 0.5 * gam[None, :] * a1
        d[:, 1:] += self._jpi[None, :] * 0.5 * gam[:, None] * a2
        # D_jk = (div vec, q_jk); projected divergence norm^2 = sum D^2/(g_j g_k)
        return float(np.sqrt(np.sum(d * d / (gam[:, None] * gam[None, :]))))

    def convection(self, v, u, basis=None):
        """Pointwise advection (v . grad) u, gradients in the retained basis."""
        v = self._check_field(v)
        u = self._check_field(u)
        if v.shape[0] != 2 or u.shape[0] != 2:
            raise UsageError("convection expects 2-component vector fields")
        basis = self._check_basis(basis)
        if basis == "fourier":
            uh = self.hat(u) * self.trunc_mask
            dux = self.unhat(1j * self.kx * uh)
            duy = self.unhat(1j * self.ky * uh)
        else:
            a = self.sin2(u)
            dux = np.stack([self.dsin_dx_vals(a[0]), self.dsin_dx_vals(a[1])])
            duy = np.stack([self.dsin_dy_vals(a[0]), self.dsin_dy_vals(a[1])])
        return v[0] * dux + v[1] * duy

    def trilinear(self, v, u, w):
        """Quadrature value of ((v . grad) u, w)."""
        return self.inner_product(self.convection(v, u), w)

    def inner_product(self, f, g):
        """Trapezoid/rectangle quadrature of f*g, summed over all axes."""
        f = self._check_field(f)
        g = self._check_field(g)
        if f.shape != g.shape:
            raise UsageError("inner_product operands must have equal shapes")
        return float(np.sum(f * g * self.quad_w2))

    def l2_norm(self, f):
        return float(np.sqrt(self.inner_product(f, f)))

    def h1_seminorm(self, f, basis=None):
        f = self._check_field(f)
        if f.ndim == 2:
            comps = [f]
        else:
            comps = list(f)
        total = 0.0
        for c in comps:
            grad = self.gradient(c, basis=basis)
            total += self.inner_product(grad, grad)
        return float(np.sqrt(total))
