"""One step of the fully explicit two-auxiliary-variable pressure-correction
scheme for the stochastic incompressible Navier-Stokes equations.

Update for one step of size tau, driven by a noise increment field dW:

    tilde_u - u = tau*nu*Lap(tilde_u) - tau*xi'*(a.grad)u - tau*grad(p)
                  + eta'*g(u)*dW,          tilde_u|boundary = 0
    u' = tilde_u - tau*(grad p' - grad p),   div u' = 0
    xi' - xi  = tau*((a.grad)u, tilde_u)
    eta' - eta = -(g(u)*dW, tilde_u - u - g(u)*dW)

with a = u (nonlinear) or a caller-supplied advector (linearized variant).
The step splits into three Helmholtz solves for tilde_u1/2/3, three
pressure projections, and one 2x2 system for (xi', eta'), assembled in a
symmetric positive-definite form.  The viscosity nu multiplies the
Laplacian; the gradient terms of the 2x2 system carry the matching tau*nu
weight so the coefficient identities stay exact.

Dirichlet runs keep the velocity in split form u = S - tau*grad(psi) with
S a sine-coefficient field and psi a cosine-coefficient field: spatial
derivatives are then exact, and the divergence and energy identities hold
to rounding.  Periodic runs work directly on truncated Fourier
coefficients.  The noise increment enters through its projection onto the
retained velocity space; every inner product that involves it uses the
projected field, which keeps the 2x2 assembly and the auxiliary update
identities mutually consistent.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, ConfigurationError, UsageError
from .spectral import Grid, SpectralOps

__all__ = [
    "SchemeConfig",
    "SchemeState",
    "AuxSystem",
    "StepDiagnostics",
    "apply_g",
    "init_state",
    "compute_tilde_fields",
    "project_fields",
    "assemble_aux_system",
    "step",
    "step_linearized",
]

_G_KINDS = ("identity_one", "two_minus_cos", "constant")


@dataclass
class SchemeConfig:
    """Step size, viscosity, grid, and noise coupling for one run."""

    grid: Grid
    tau: float
    viscosity: float = 1.0
    g_kind: str = "identity_one"
    g_value: float = 1.0
    dealias: bool = True

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ConfigurationError("tau must be positive")
        if not self.viscosity > 0.0:
            raise ConfigurationError("viscosity must be positive")
        if self.g_kind not in _G_KINDS:
            raise ConfigurationError(
                "g_kind must be one of %r, got %r" % (_G_KINDS, self.g_kind))
        self.ops = SpectralOps(self.grid)


def apply_g(u, g_kind, g_value=1.0):
    """Pointwise noise multiplier: 1, componentwise 2 - cos(u), or a constant."""
    u = np.asarray(u)
    if g_kind == "identity_one":
        return np.ones_like(u)
    if g_kind == "two_minus_cos":
        return 2.0 - np.cos(u)
    if g_kind == "constant":
        return np.full_like(u, g_value)
    raise ConfigurationError("unknown g_kind %r" % (g_kind,))


@dataclass
class AuxSystem:
    """The 2x2 system A (xi', eta')^T = b."""

    a11: float
    a12: float
    a21: float
    a22: float
    b1: float
    b2: float

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def solve(self):
        d = self.det()
        xi = (self.b1 * self.a22 - self.b2 * self.a12) / d
        eta = (self.a11 * self.b2 - self.a21 * self.b1) / d
        return xi, eta


@dataclass
class StepDiagnostics:
    energy_identity_residual: float
    divergence_norm: float
    aux_pair: tuple
    tilde_minus_u_norm: float


class _DirichletRep:
    """Split state u = S - tau*grad(psi): sine coeffs S, cosine coeffs psi, p."""

    __slots__ = ("tilde_sin", "psi_cos", "p_cos")

    def __init__(self, tilde_sin, psi_cos, p_cos):
        self.tilde_sin = tilde_sin
        self.psi_cos = psi_cos
        self.p_cos = p_cos

    def u_values(self, ops, tau):
        return ops.isin2(self.tilde_sin) - tau * np.stack([
            ops.dcos_dx_vals(self.psi_cos), ops.dcos_dy_vals(self.psi_cos)])

    def p_values(self, ops):
        return ops.icos2(self.p_cos)

    def jacobian_values(self, ops, tau):
        s = self.tilde_sin
        psi = self.psi_cos
        dxu1 = ops.dsin_dx_vals(s[0]) - tau * ops.cos_dxx_vals(psi)
        dyu1 = ops.dsin_dy_vals(s[0]) - tau * ops.cos_dxy_vals(psi)
        dxu2 = ops.dsin_dx_vals(s[1]) - tau * ops.cos_dxy_vals(psi)
        dyu2 = ops.dsin_dy_vals(s[1]) - tau * ops.cos_dyy_vals(psi)
        return dxu1, dyu1, dxu2, dyu2


class _PeriodicRep:
    """Truncated Fourier coefficients of u and p."""

    __slots__ = ("u_hat", "p_hat")

    def __init__(self, u_hat, p_hat):
        self.u_hat = u_hat
        self.p_hat = p_hat

    def u_values(self, ops):
        return np.stack([ops.unhat(self.u_hat[0]), ops.unhat(self.u_hat[1])])

    def p_values(self, ops):
        return ops.unhat(self.p_hat)

    def jacobian_values(self, ops):
        uh = self.u_hat
        dxu1 = ops.unhat(1j * ops.kx * uh[0])
        dyu1 = ops.unhat(1j * ops.ky * uh[0])
        dxu2 = ops.unhat(1j * ops.kx * uh[1])
        dyu2 = ops.unhat(1j * ops.ky * uh[1])
        return dxu1, dyu1, dxu2, dyu2


@dataclass
class SchemeState:
    """Velocity, pressure, auxiliary pair, and step bookkeeping.

    u and p are grid values (u weakly divergence-free, p zero-mean); rep
    carries the coefficient representation the stepper advances exactly.
    """

    u: np.ndarray
    p: np.ndarray
    xi: float
    eta: float
    step_index: int
    t: float
    rep: object = field(repr=False, default=None)


def init_state(cfg, u0=None):
    """Project the initial velocity and start with p=0, xi=eta=1."""
    ops = cfg.ops
    grid = cfg.grid
    if u0 is None:
        u0 = np.zeros((2,) + grid.shape)
    else:
        u0 = np.asarray(u0, dtype=float)
        if u0.shape != (2,) + grid.shape:
            raise UsageError(
                "u0 must have shape %r, got %r" % ((2,) + grid.shape, u0.shape))
    if grid.boundary == "dirichlet":
        s0 = ops.sin2(u0)
        d_cos = ops.cos2(ops.div_sin_vals(s0))
        lam = np.where(ops.lam_cos == 0.0, 1.0, ops.lam_cos)
        psi0 = -(d_cos / lam) / cfg.tau
        psi0[0, 0] = 0.0
        p_cos = np.zeros_like(psi0)
        rep = _DirichletRep(s0, psi0, p_cos)
        u = rep.u_values(ops, cfg.tau)
        p = rep.p_values(ops)
    else:
        uh = ops.hat(u0) * ops.trunc_mask
        kdotu = ops.kx * uh[0] + ops.ky * uh[1]
        factor = kdotu / ops._k2_safe
        uh[0] -= ops.kx * factor
        uh[1] -= ops.ky * factor
        rep = _PeriodicRep(uh, np.zeros_like(uh[0]))
        u = rep.u_values(ops)
        p = rep.p_values(ops)
    return SchemeState(u=u, p=p, xi=1.0, eta=1.0, step_index=0, t=0.0, rep=rep)


class _StepWork:
    """Everything one step computes, shared by the public decomposition ops."""

    __slots__ = ("conv", "z", "r1", "r2", "r3", "tilde", "phi", "sym")

    def __init__(self):
        self.sym = None


def _noise_term(state, dW, cfg):
    if dW is None:
        return np.zeros_like(state.u)
    dW = np.asarray(dW, dtype=float)
    if dW.shape != state.u.shape:
        raise UsageError(
            "dW must have shape %r, got %r" % (state.u.shape, dW.shape))
    return apply_g(state.u, cfg.g_kind, cfg.g_value) * dW


def _advector_values(state, advector):
    if advector is None:
        return state.u
    advector = np.asarray(advector, dtype=float)
    if advector.shape != state.u.shape:
        raise UsageError("advector must have shape %r, got %r"
                         % (state.u.shape, advector.shape))
    return advector


def _prepare_dirichlet(state, dW, cfg, advector):
    ops = cfg.ops
    tau = cfg.tau
    nu = cfg.viscosity
    rep = state.rep
    a = _advector_values(state, advector)
    dxu1, dyu1, dxu2, dyu2 = rep.jacobian_values(ops, tau)
    conv = np.stack([a[0] * dxu1 + a[1] * dyu1,
                     a[0] * dxu2 + a[1] * dyu2])
    z_raw = _noise_term(state, dW, cfg)

    w = _StepWork()
    gradp = np.stack([ops.dcos_dx_vals(rep.p_cos), ops.dcos_dy_vals(rep.p_cos)])
    r1 = ops.sin2(state.u - tau * gradp)
    r2 = ops.sin2(-tau * conv)
    r3 = ops.sin2(z_raw)
    helm = 1.0 + tau * nu * ops.lam_sin
    w.r1, w.r2, w.r3 = r1, r2, r3
    w.tilde = (r1 / helm, r2 / helm, r3 / helm)
    # noise enters all inner products through its retained-space projection
    w.z = ops.isin2(r3)
    w.conv = conv
    lam = np.where(ops.lam_cos == 0.0, 1.0, ops.lam_cos)
    phi = []
    for ti in w.tilde:
        c = ops.cos2(ops.div_sin_vals(ti))
        f = -c / (tau * lam)
        f[0, 0] = 0.0
        phi.append(f)
    w.phi = tuple(phi)
    return w


def _prepare_periodic(state, dW, cfg, advector):
    ops = cfg.ops
    tau = cfg.tau
    nu = cfg.viscosity
    rep = state.rep
    a = _advector_values(state, advector)
    dxu1, dyu1, dxu2, dyu2 = rep.jacobian_values(ops)
    conv = np.stack([a[0] * dxu1 + a[1] * dyu1,
                     a[0] * dxu2 + a[1] * dyu2])
    mask = ops.dealias_mask if cfg.dealias else ops.trunc_mask
    conv_hat = np.stack([ops.hat(conv[0]) * mask, ops.hat(conv[1]) * mask])
    z_raw = _noise_term(state, dW, cfg)
    z_hat = np.stack([ops.hat(z_raw[0]) * ops.trunc_mask,
                      ops.hat(z_raw[1]) * ops.trunc_mask])

    w = _StepWork()
    r1 = rep.u_hat - tau * np.stack([1j * ops.kx * rep.p_hat,
                                     1j * ops.ky * rep.p_hat])
    r2 = -tau * conv_hat
    r3 = z_hat
    helm = 1.0 + tau * nu * ops.k2
    w.r1, w.r2, w.r3 = r1, r2, r3
    w.tilde = (r1 / helm, r2 / helm, r3 / helm)
    w.z = z_hat
    w.conv = np.stack([ops.unhat(conv_hat[0]), ops.unhat(conv_hat[1])])
    phi = []
    for ti in w.tilde:
        dh = ops.div_hat(ti)
        f = -dh / (tau * ops._k2_safe)
        f[..., 0, 0] = 0.0
        phi.append(f)
    w.phi = tuple(phi)
    return w


def _assemble_dirichlet(w, state, cfg):
    ops = cfg.ops
    tau = cfg.tau
    nu = cfg.viscosity
    t1, t2, t3 = w.tilde
    a11 = 1.0 + tau * nu * ops.sin_grad_ip(t2, t2) + ops.sin_ip(t2, t2)
    a22 = 1.0 + tau * nu * ops.sin_grad_ip(t3, t3) + ops.sin_ip(t3, t3)
    a12 = tau * nu * ops.sin_grad_ip(t2, t3) + ops.sin_ip(t2, t3)
    # (conv, t1) = -sin_ip(r2, t1)/tau since r2 holds -tau*P(conv)
    b1 = state.xi - ops.sin_ip(w.r2, t1)
    z_dot_t1 = ops.sin_ip(w.r3, t1)
    z_dot_u = ops.inner_product(w.z, state.u)
    z_dot_z = ops.inner_product(w.z, w.z)
    b2 = state.eta - (z_dot_t1 - z_dot_u - z_dot_z)
    return AuxSystem(a11=a11, a12=a12, a21=a12, a22=a22, b1=b1, b2=b2)


def _assemble_periodic(w, state, cfg):
    ops = cfg.ops
    tau = cfg.tau
    nu = cfg.viscosity
    t1, t2, t3 = w.tilde

    def vip(fh, gh):
        return ops.hip(fh[0], gh[0]) + ops.hip(fh[1], gh[1])

    def vgrad(fh, gh):
        return ops.hgrad_ip(fh[0], gh[0]) + ops.hgrad_ip(fh[1], gh[1])

    a11 = 1.0 + tau * nu * vgrad(t2, t2) + vip(t2, t2)
    a22 = 1.0 + tau * nu * vgrad(t3, t3) + vip(t3, t3)
    a12 = tau * nu * vgrad(t2, t3) + vip(t2, t3)
    b1 = state.xi - vip(w.r2, t1)
    b2 = state.eta - (vip(w.z, t1) - vip(w.z, state.rep.u_hat) - vip(w.z, w.z))
    return AuxSystem(a11=a11, a12=a12, a21=a12, a22=a22, b1=b1, b2=b2)


def _finish_dirichlet(w, sym, state, cfg):
    ops = cfg.ops
    tau = cfg.tau
    xi, eta = sym.solve()
    t1, t2, t3 = w.tilde
    f1, f2, f3 = w.phi
    tilde_new = t1 + xi * t2 + eta * t3
    psi_new = f1 + xi * f2 + eta * f3
    p_cos = state.rep.p_cos + psi_new
    rep = _DirichletRep(tilde_new, psi_new, p_cos)
    u_new = rep.u_values(ops, tau)
    p_new = rep.p_values(ops)
    tilde_vals = ops.isin2(tilde_new)
    return xi, eta, rep, u_new, p_new, tilde_vals, state.p


def _finish_periodic(w, sym, state, cfg):
    ops = cfg.ops
    tau = cfg.tau
    xi, eta = sym.solve()
    t1, t2, t3 = w.tilde
    f1, f2, f3 = w.phi
    tilde_new = t1 + xi * t2 + eta * t3
    psi_new = f1 + xi * f2 + eta * f3
    grad_psi = np.stack([1j * ops.kx * psi_new, 1j * ops.ky * psi_new])
    u_hat = tilde_new - tau * grad_psi
    p_hat = state.rep.p_hat + psi_new
    rep = _PeriodicRep(u_hat, p_hat)
    u_new = rep.u_values(ops)
    p_new = rep.p_values(ops)
    tilde_vals = np.stack([ops.unhat(tilde_new[0]), ops.unhat(tilde_new[1])])
    return xi, eta, rep, u_new, p_new, tilde_vals, state.p


def _vec_ip(ops, f, g):
    return ops.inner_product(f[0], g[0]) + ops.inner_product(f[1], g[1])


def _diagnostics(state, cfg, xi, eta, u_new, p_new, tilde_vals, p_old_vals):
    """Energy identity and divergence, measured from values by quadrature
    (independent of the coefficient arithmetic that built the step)."""
    ops = cfg.ops
    tau = cfg.tau
    if cfg.grid.boundary == "dirichlet":
        gp_new = ops.gradient(p_new, basis="cosine")
        gp_old = ops.gradient(p_old_vals, basis="cosine")
    else:
        gp_new = ops.gradient(p_new)
        gp_old = ops.gradient(p_old_vals)
    lhs = _vec_ip(ops, u_new, u_new) + tau ** 2 * _vec_ip(ops, gp_new, gp_new)
    rhs = (_vec_ip(ops, tilde_vals, tilde_vals)
           + 2.0 * tau * _vec_ip(ops, tilde_vals, gp_old)
           + tau ** 2 * _vec_ip(ops, gp_old, gp_old))
    energy_resid = abs(lhs - rhs) / max(1.0, abs(lhs))
    div_norm = ops.weak_divergence(u_new)
    diff = tilde_vals - u_new
    return StepDiagnostics(
        energy_identity_residual=energy_resid,
        divergence_norm=div_norm,
        aux_pair=(xi, eta),
        tilde_minus_u_norm=np.sqrt(max(_vec_ip(ops, diff, diff), 0.0)),
    )


def _step_impl(state, dW, cfg, advector):
    if state.rep is None:
        raise UsageError("state has no representation; build it with init_state")
    if cfg.grid.boundary == "dirichlet":
        w = _prepare_dirichlet(state, dW, cfg, advector)
        sym = _assemble_dirichlet(w, state, cfg)
        xi, eta, rep, u_new, p_new, tilde_vals, p_old = \
            _finish_dirichlet(w, sym, state, cfg)
    else:
        w = _prepare_periodic(state, dW, cfg, advector)
        sym = _assemble_periodic(w, state, cfg)
        xi, eta, rep, u_new, p_new, tilde_vals, p_old = \
            _finish_periodic(w, sym, state, cfg)
    if not (np.isfinite(xi) and np.isfinite(eta) and
            np.all(np.isfinite(u_new))):
        raise BlowUpError("non-finite state after step %d (t=%.6g)"
                          % (state.step_index, state.t),
                          step_index=state.step_index, t=state.t)
    diag = _diagnostics(state, cfg, xi, eta, u_new, p_new, tilde_vals, p_old)
    new_state = SchemeState(u=u_new, p=p_new, xi=xi, eta=eta,
                            step_index=state.step_index + 1,
                            t=state.t + cfg.tau, rep=rep)
    return new_state, diag


def step(state, dW, cfg):
    """Advance one step with the velocity itself as advector."""
    return _step_impl(state, dW, cfg, None)


def step_linearized(state, v, dW, cfg):
    """Advance one step with a caller-supplied divergence-free advector v."""
    return _step_impl(state, dW, cfg, v)


# ------------------------------------------------------------------ public
# decomposition ops: value-space views of the internal pipeline, used by
# tests to check each displayed relation independently.

def convection_values(state, cfg, advector=None):
    """Values of ((a.grad) u) for the state's u, with exact derivatives.

    a defaults to u itself; pass an advector for the linearized variant.
    Periodic grids return the field after the product filter (truncation,
    or the 2/3 rule when cfg.dealias is set), i.e. exactly what the step
    consumes.
    """
    ops = cfg.ops
    a = _advector_values(state, advector)
    if cfg.grid.boundary == "dirichlet":
        dxu1, dyu1, dxu2, dyu2 = state.rep.jacobian_values(ops, cfg.tau)
        return np.stack([a[0] * dxu1 + a[1] * dyu1,
                         a[0] * dxu2 + a[1] * dyu2])
    dxu1, dyu1, dxu2, dyu2 = state.rep.jacobian_values(ops)
    conv = np.stack([a[0] * dxu1 + a[1] * dyu1,
                     a[0] * dxu2 + a[1] * dyu2])
    mask = ops.dealias_mask if cfg.dealias else ops.trunc_mask
    return np.stack([ops.unhat(ops.hat(conv[0]) * mask),
                     ops.unhat(ops.hat(conv[1]) * mask)])


def compute_tilde_fields(state, dW, cfg, advector=None):
    """Values of the three Helmholtz solves (tilde_u1, tilde_u2, tilde_u3)."""
    ops = cfg.ops
    if cfg.grid.boundary == "dirichlet":
        w = _prepare_dirichlet(state, dW, cfg, advector)
        return tuple(ops.isin2(t) for t in w.tilde)
    w = _prepare_periodic(state, dW, cfg, advector)
    return tuple(np.stack([ops.unhat(t[0]), ops.unhat(t[1])]) for t in w.tilde)


def project_fields(state, dW, cfg, advector=None):
    """Pressure-projected pieces ((u_i, p_i) for i=1,2,3) as grid values.

    p_1 includes the old pressure (u_1 - tilde_u1 + tau grad(p_1 - p) = 0);
    p_2, p_3 are built from zero base pressure.
    """
    ops = cfg.ops
    tau = cfg.tau
    if cfg.grid.boundary == "dirichlet":
        w = _prepare_dirichlet(state, dW, cfg, advector)
        out = []
        for i, (ti, fi) in enumerate(zip(w.tilde, w.phi)):
            grad = np.stack([ops.dcos_dx_vals(fi), ops.dcos_dy_vals(fi)])
            ui = ops.isin2(ti) - tau * grad
            pc = fi if i > 0 else fi + state.rep.p_cos
            out.append((ui, ops.icos2(pc)))
        return tuple(out)
    w = _prepare_periodic(state, dW, cfg, advector)
    out = []
    for i, (ti, fi) in enumerate(zip(w.tilde, w.phi)):
        grad = np.stack([1j * ops.kx * fi, 1j * ops.ky * fi])
        uh = ti - tau * grad
        ph = fi if i > 0 else fi + state.rep.p_hat
        out.append((np.stack([ops.unhat(uh[0]), ops.unhat(uh[1])]),
                    ops.unhat(ph)))
    return tuple(out)


def assemble_aux_system(state, dW, cfg, advector=None, form="spd"):
    """The 2x2 system for (xi', eta').

    form="spd" is the symmetric positive-definite assembly the stepper
    uses; form="raw" evaluates the defining inner products
    (1 - tau*(conv, tilde_u2), ...) directly by quadrature.  The two must
    agree entrywise; keeping both routes makes that testable.
    """
    ops = cfg.ops
    tau = cfg.tau
    if cfg.grid.boundary == "dirichlet":
        w = _prepare_dirichlet(state, dW, cfg, advector)
        sym = _assemble_dirichlet(w, state, cfg)
        if form == "spd":
            return sym
        if form != "raw":
            raise UsageError("form must be 'spd' or 'raw'")
        t1, t2, t3 = (ops.isin2(t) for t in w.tilde)
        a11 = 1.0 - tau * _vec_ip(ops, w.conv, t2)
        a12 = -tau * _vec_ip(ops, w.conv, t3)
        a21 = _vec_ip(ops, w.z, t2)
        a22 = 1.0 + _vec_ip(ops, w.z, t3)
        b1 = state.xi + tau * _vec_ip(ops, w.conv, t1)
        b2 = state.eta - (_vec_ip(ops, w.z, t1) - _vec_ip(ops, w.z, state.u)
                          - _vec_ip(ops, w.z, w.z))
        return AuxSystem(a11=a11, a12=a12, a21=a21, a22=a22, b1=b1, b2=b2)
    w = _prepare_periodic(state, dW, cfg, advector)
    sym = _assemble_periodic(w, state, cfg)
    if form == "spd":
        return sym
    if form != "raw":
        raise UsageError("form must be 'spd' or 'raw'")
    zv = np.stack([ops.unhat(w.z[0]), ops.unhat(w.z[1])])
    tv = [np.stack([ops.unhat(t[0]), ops.unhat(t[1])]) for t in w.tilde]
    a11 = 1.0 - tau * _vec_ip(ops, w.conv, tv[1])
    a12 = -tau * _vec_ip(ops, w.conv, tv[2])
    a21 = _vec_ip(ops, zv, tv[1])
    a22 = 1.0 + _vec_ip(ops, zv, tv[2])
    b1 = state.xi + tau * _vec_ip(ops, w.conv, tv[0])
    b2 = state.eta - (_vec_ip(ops, zv, tv[0]) - _vec_ip(ops, zv, state.u)
                      - _vec_ip(ops, zv, zv))
    return AuxSystem(a11=a11, a12=a12, a21=a21, a22=a22, b1=b1, b2=b2)
