"""Similarity transform between the modulated and constant-coefficient systems.

A solution A_j(zeta) of the constant-coefficient system
mu_j A_j = -A_j'' + sum_k G_jk |A_k|^2 A_j is carried to the modulated
equation by psi_j = rho(x,t) exp(i eta(x,t)) A_j(zeta(x,t)) with

    xi = x / chi(t),   zeta = F(xi),   rho = 1 / sqrt(chi F'(xi)),
    eta = (chi'/(4 chi)) x^2 + a(t),

which forces three compatibility constraints on (rho, eta, zeta):

    continuity   rho rho_t + (rho^2 eta_x)_x = 0
    advection    zeta_t + 2 eta_x zeta_x = 0
    flux         (rho^2 zeta_x)_x = 0

and fixes the trap and couplings as

    v_j = rho_xx/rho - eta_t - eta_x^2 - mu_j zeta_x^2
    g_jk = G_jk zeta_x^2 / rho^2 = G_jk F'(xi)^3 / chi.

Everything here is closed-form in (xi, chi, chi', chi'', a'); the
verify_constraints routine additionally recomputes the three constraints by
finite differences on a space-time lattice as an independent check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import LatticeTooCoarseError
from .modulation import drive_f
from .specfun import erf, erfi

_SQRT_PI = math.sqrt(math.pi)
_SQRT3 = math.sqrt(3.0)
_EXP_CLIP = 700.0

STRETCH_KINDS = ("gaussian", "inverse_gaussian", "flat_bump")


def _clipped_exp(arg):
    return np.exp(np.minimum(arg, _EXP_CLIP))


@dataclass(frozen=True)
class StretchSpec:
    """Spatial stretch zeta = F(x/chi), defined through F' > 0.

    gaussian            F' = exp(-xi^2)            (localizing, bounded zeta)
    inverse_gaussian    F' = exp(+xi^2 / 3 gamma^2) (anti-localizing)
    flat_bump           F' = 1 + lam exp(-xi^2)     (asymptotically identity)
    """

    kind: str
    gamma: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in STRETCH_KINDS:
            raise ValueError(f"StretchSpec: unknown kind {self.kind!r}")
        if self.kind == "inverse_gaussian" and not self.gamma > 0:
            raise ValueError("StretchSpec: gamma must be positive")
        if self.kind == "flat_bump" and not self.lam > -1.0:
            raise ValueError("StretchSpec: lam must exceed -1 to keep F' > 0")

    def fprime(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-xi * xi)
        if self.kind == "inverse_gaussian":
            return _clipped_exp(xi * xi / (3.0 * self.gamma**2))
        return 1.0 + self.lam * np.exp(-xi * xi)

    def fprime_squared(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-2.0 * xi * xi)
        if self.kind == "inverse_gaussian":
            return _clipped_exp(2.0 * xi * xi / (3.0 * self.gamma**2))
        return self.fprime(xi) ** 2

    def fprime_cubed(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-3.0 * xi * xi)
        if self.kind == "inverse_gaussian":
            return _clipped_exp(xi * xi / self.gamma**2)
        return self.fprime(xi) ** 3

    def zeta(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "gaussian":
            return 0.5 * _SQRT_PI * (1.0 + erf(xi))
        if self.kind == "inverse_gaussian":
            return 0.5 * self.gamma * math.sqrt(3.0 * math.pi) * erfi(
                xi / (self.gamma * _SQRT3)
            )
        return xi + 0.5 * _SQRT_PI * self.lam * erf(xi)

    def curvature_term(self, xi):
        """chi^2 rho_xx / rho as a function of xi alone."""
        xi = np.asarray(xi, dtype=float)
        if self.kind == "gaussian":
            return 1.0 + xi * xi
        if self.kind == "inverse_gaussian":
            g2 = self.gamma**2
            return xi * xi / (9.0 * g2 * g2) - 1.0 / (3.0 * g2)
        e = self.lam * np.exp(-xi * xi)
        w = 1.0 + e
        return (e / w) * (1.0 + (e - 2.0) * xi * xi / w)


def xi_of(x, chi):
    if not np.all(np.asarray(chi) > 0):
        raise ValueError("xi_of: chi must be positive")
    return np.asarray(x, dtype=float) / chi


def rho_of(stretch: StretchSpec, x, chi):
    """Amplitude envelope 1 / sqrt(chi F'(x/chi))."""
    return 1.0 / np.sqrt(chi * stretch.fprime(xi_of(x, chi)))


def zeta_of(stretch: StretchSpec, x, chi):
    return stretch.zeta(xi_of(x, chi))


def eta_of(x, chi, dchi_dt, a):
    x = np.asarray(x, dtype=float)
    return (dchi_dt / (4.0 * chi)) * x * x + a


def g_of(stretch: StretchSpec, g_matrix, x, chi):
    """Coupling profiles g_jk = G_jk F'(xi)^3 / chi, shape (2, 2, nx)."""
    prof = stretch.fprime_cubed(xi_of(x, chi)) / chi
    g = np.asarray(g_matrix, dtype=float)
    return g[:, :, None] * prof[None, None, :]


def potential_from_transform(family, trace, x, t):
    """Trap from the transform algebra; no per-family shortcuts.

    v_j = rho_xx/rho - (chi''/(4 chi)) x^2 - a' - mu_j F'(xi)^2 / chi^2,
    valid because eta_t + eta_x^2 telescopes to (chi''/(4 chi)) x^2 + a'.
    """
    x = np.asarray(x, dtype=float)
    chi = trace.chi_at(t)
    d2chi = trace.d2chi_dt2_at(t)
    adot = trace.adot_at(t)
    xi = x / chi
    s = family.stretch
    base = s.curvature_term(xi) / chi**2 - (d2chi / (4.0 * chi)) * x * x - adot
    zx2 = s.fprime_squared(xi) / chi**2
    return np.stack([base - mu_j * zx2 for mu_j in family.mu])


def potential(family, trace, x, t):
    """Trap profiles v_1, v_2 at time t, shape (2, nx); published closed forms.

    gaussian stretch: the width equation collapses everything to f(t) x^2.
    inverse_gaussian: harmonic part plus a shifted-Gaussian well per component.
    flat_bump: harmonic part plus a localized dip independent of component.
    """
    x = np.asarray(x, dtype=float)
    chi = trace.chi_at(t)
    s = family.stretch
    if s.kind == "gaussian":
        f = drive_f(trace.drive_kind, t, trace.epsilon, trace.omega0)
        v = f * x * x
        return np.stack([v, v])
    d2chi = trace.d2chi_dt2_at(t)
    if s.kind == "inverse_gaussian":
        g2 = s.gamma**2
        xi = x / chi
        quad = (1.0 / (9.0 * g2 * g2 * chi**4) - d2chi / (4.0 * chi)) * x * x
        const = -1.0 / (3.0 * g2 * chi**2) - trace.adot_at(t)
        well = _clipped_exp(2.0 * xi * xi / (3.0 * g2)) / chi**2
        return np.stack([quad + const - mu_j * well for mu_j in family.mu])
    # flat_bump: mu = 0 for both components, a = 0
    xi = x / chi
    e = s.lam * np.exp(-xi * xi)
    w = 1.0 + e
    s1 = -d2chi / (4.0 * chi)
    s2 = (e / (chi**2 * w)) * (1.0 + (e - 2.0) * xi * xi / w)
    v = s1 * x * x + s2
    return np.stack([v, v])


class CoefficientSampler:
    """Samples v_j(x, t) and g_jk(x, t) for a family along a width trace."""

    def __init__(self, family, trace):
        self.family = family
        self.trace = trace

    def potential(self, x, t):
        return potential(self.family, self.trace, x, t)

    def couplings(self, x, t):
        chi = self.trace.chi_at(t)
        return g_of(self.family.stretch, self.family.g_matrix, x, chi)

    def coefficients(self, x, t):
        return self.potential(x, t), self.couplings(x, t)


def sample_transform_lattice(family, trace, x, t):
    """rho, eta, zeta on the (t, x) lattice, each of shape (nt, nx)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    s = family.stretch
    chi = np.atleast_1d(trace.chi_at(t))
    dchi = np.atleast_1d(trace.dchi_dt_at(t))
    a = np.atleast_1d(trace.a_at(t))
    xi = x[None, :] / chi[:, None]
    rho = 1.0 / np.sqrt(chi[:, None] * s.fprime(xi))
    eta = (dchi[:, None] / (4.0 * chi[:, None])) * x[None, :] ** 2 + a[:, None]
    zeta = s.zeta(xi)
    return {"rho": rho, "eta": eta, "zeta": zeta, "chi": chi, "x": x, "t": t}


def _d1(f, h, axis):
    """Fourth-order first derivative, nan on the two-deep edges."""
    out = np.full_like(f, np.nan)
    sl = [slice(None)] * f.ndim
    def ix(k):
        s = sl.copy()
        s[axis] = slice(2 + k, f.shape[axis] - 2 + k or None)
        return tuple(s)
    core = sl.copy()
    core[axis] = slice(2, -2)
    out[tuple(core)] = (
        -f[ix(2)] + 8.0 * f[ix(1)] - 8.0 * f[ix(-1)] + f[ix(-2)]
    ) / (12.0 * h)
    return out


def _d2(f, h, axis):
    """Fourth-order second derivative, nan on the two-deep edges."""
    out = np.full_like(f, np.nan)
    sl = [slice(None)] * f.ndim
    def ix(k):
        s = sl.copy()
        s[axis] = slice(2 + k, f.shape[axis] - 2 + k or None)
        return tuple(s)
    core = sl.copy()
    core[axis] = slice(2, -2)
    out[tuple(core)] = (
        -f[ix(2)] + 16.0 * f[ix(1)] - 30.0 * f[ix(0)]
        + 16.0 * f[ix(-1)] - f[ix(-2)]
    ) / (12.0 * h * h)
    return out


@dataclass(frozen=True)
class ConstraintResiduals:
    continuity: float      # rho rho_t + (rho^2 eta_x)_x
    advection: float       # zeta_t + 2 eta_x zeta_x
    flux: float            # (rho^2 zeta_x)_x

    @property
    def worst(self):
        return max(self.continuity, self.advection, self.flux)


def verify_constraints(family, trace, x, t, corrupt_rho=0.0) -> ConstraintResiduals:
    """Finite-difference residuals of the three transform constraints.

    x and t must be uniform lattices, at least 256 x 64 points; residuals are
    maximized over the interior (4 points trimmed in x, 2 in t to clear the
    fourth-order stencils).  corrupt_rho multiplies the envelope by
    (1 + corrupt_rho * x), a deliberate defect used to demonstrate that the
    check has teeth.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if len(x) < 256 or len(t) < 64:
        raise LatticeTooCoarseError(
            f"constraint lattice {len(x)} x {len(t)} below the 256 x 64 floor"
        )
    hx, ht = np.diff(x), np.diff(t)
    if np.max(np.abs(hx - hx[0])) > 1e-9 * hx[0] or np.max(np.abs(ht - ht[0])) > 1e-9 * ht[0]:
        raise ValueError("verify_constraints: lattices must be uniform")
    lat = sample_transform_lattice(family, trace, x, t)
    rho, eta, zeta = lat["rho"], lat["eta"], lat["zeta"]
    if corrupt_rho:
        rho = rho * (1.0 + corrupt_rho * x[None, :])
    hx, ht = float(hx[0]), float(ht[0])

    rho_t = _d1(rho, ht, axis=0)
    eta_x = _d1(eta, hx, axis=1)
    zeta_t = _d1(zeta, ht, axis=0)
    zeta_x = _d1(zeta, hx, axis=1)

    r7 = rho * rho_t + _d1(rho * rho * eta_x, hx, axis=1)
    r8 = zeta_t + 2.0 * eta_x * zeta_x
    r9 = _d1(rho * rho * zeta_x, hx, axis=1)

    def worst(r):
        core = r[2:-2, 4:-4]
        return float(np.nanmax(np.abs(core)))

    return ConstraintResiduals(worst(r7), worst(r8), worst(r9))


def potential_identity_check(family, trace, x, t, dt=1e-4):
    """Max gap between the closed-form trap and its finite-difference origin.

    Rebuilds v_j = rho_xx/rho - eta_t - eta_x^2 - mu_j zeta_x^2 with
    fourth-order stencils (five time levels around t) and compares with
    potential(...) on the interior of x.
    """
    x = np.asarray(x, dtype=float)
    ts = t + dt * np.arange(-2.0, 3.0)
    lat = sample_transform_lattice(family, trace, x, ts)
    rho, eta, zeta = lat["rho"], lat["eta"], lat["zeta"]
    hx = float(x[1] - x[0])

    rho_xx = _d2(rho, hx, axis=1)[2]
    eta_x = _d1(eta, hx, axis=1)[2]
    zeta_x = _d1(zeta, hx, axis=1)[2]
    # five-level fourth-order time derivative at the middle level
    eta_t = (eta[0] - 8.0 * eta[1] + 8.0 * eta[3] - eta[4]) / (12.0 * dt)

    base = rho_xx / rho[2] - eta_t - eta_x**2
    v_fd = np.stack([base - mu_j * zeta_x**2 for mu_j in family.mu])
    v_cf = potential(family, trace, x, t)
    gap = np.abs(v_fd - v_cf)[:, 4:-4]
    return float(np.nanmax(gap))
