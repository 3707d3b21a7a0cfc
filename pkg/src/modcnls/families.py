"""Exact two-component solution families of the modulated coupled system.

Each family fixes the constant-coefficient data (mu_j, G_jk), a stretch
F'(xi), and a pair of reduced amplitudes A_j(zeta) solving
mu_j A_j = -A_j'' + sum_k G_jk |A_k|^2 A_j.  The physical fields follow from
the similarity transform: psi_j = rho e^{i eta} A_j(zeta).

elliptic      bounded zeta window (0, sqrt(pi)); A_j built from Jacobi
              sn/dn at modulus 1/sqrt(2), with the amplitude quantized so an
              integer number of arches fits in the window.  Both components
              are proportional, psi_2 = psi_1 / sqrt(2).
sech          bright-bright pair sech zeta (1, 1/sqrt(2)) on an unbounded
              zeta range reached through an anti-localizing stretch; the
              envelope rho decays as a Gaussian, so the fields stay
              normalizable.
dark_bright   tanh/sech pair on a near-identity stretch; the first component
              carries a nonvanishing background |psi_1|^2 -> 1/(2 chi).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .grid import SpatialGrid
from .modulation import (
    ModulationTrace,
    closed_form_trace,
    explicit_trace,
    mathieu_trace,
)
from .specfun import ellip_k, erfc, erfcx, jacobi_elliptic
from .transform import StretchSpec, eta_of, rho_of, zeta_of

_SQRT_PI = math.sqrt(math.pi)
_SQRT2 = math.sqrt(2.0)
_ELLIPTIC_MODULUS = 1.0 / _SQRT2
_TAIL_XI = 4.0

FAMILY_KINDS = ("elliptic", "sech", "dark_bright")


@dataclass(frozen=True, eq=False)
class FamilySpec:
    kind: str
    mu: tuple
    g_matrix: np.ndarray
    stretch: StretchSpec
    n: int = 1

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValidationError(f"FamilySpec: unknown kind {self.kind!r}")
        g = np.asarray(self.g_matrix, dtype=float)
        if g.shape != (2, 2) or not np.isfinite(g).all():
            raise ValidationError("FamilySpec: g_matrix must be a finite 2x2 matrix")
        if len(self.mu) != 2:
            raise ValidationError("FamilySpec: mu must have two entries")


def elliptic_family(n=1) -> FamilySpec:
    """Proportional Jacobi-elliptic pair under the localizing stretch."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError("elliptic_family: n must be a positive integer")
    return FamilySpec(
        kind="elliptic",
        mu=(0.0, 0.0),
        g_matrix=np.array([[-0.5, -1.0], [-0.5, -1.0]]),
        stretch=StretchSpec("gaussian"),
        n=int(n),
    )


def sech_family(gamma=6.0) -> FamilySpec:
    """Bright-bright sech pair under the anti-localizing stretch."""
    if not (np.isfinite(gamma) and gamma > 0):
        raise ValidationError("sech_family: gamma must be positive")
    return FamilySpec(
        kind="sech",
        mu=(-1.0, -1.0),
        g_matrix=np.array([[-1.0, -2.0], [-2.0, 0.0]]),
        stretch=StretchSpec("inverse_gaussian", gamma=float(gamma)),
    )


def dark_bright_family(lam=0.5) -> FamilySpec:
    """Dark-bright tanh/sech pair under the near-identity stretch."""
    if not (np.isfinite(lam) and lam > -1.0):
        raise ValidationError("dark_bright_family: lam must exceed -1")
    return FamilySpec(
        kind="dark_bright",
        mu=(0.0, 0.0),
        g_matrix=np.array([[0.0, -2.0], [2.0, -1.0]]),
        stretch=StretchSpec("flat_bump", lam=float(lam)),
    )


def amplitude_a0(n=1):
    """Elliptic amplitude 2 n K(1/sqrt2) / sqrt(pi): n arches fill the window."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError("amplitude_a0: n must be a positive integer")
    return 2.0 * n * ellip_k(_ELLIPTIC_MODULUS) / _SQRT_PI


def _sech(z):
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def reduced_amplitudes(family: FamilySpec, zeta):
    """A_1, A_2 on the reduced coordinate; see the family table above."""
    zeta = np.asarray(zeta, dtype=float)
    if family.kind == "elliptic":
        a0 = amplitude_a0(family.n)
        sn, _, dn = jacobi_elliptic(a0 * zeta, _ELLIPTIC_MODULUS)
        a1 = (a0 / _SQRT2) * sn / dn
        return a1, a1 / _SQRT2
    if family.kind == "sech":
        s = _sech(zeta)
        return s, s / _SQRT2
    return np.tanh(zeta) / _SQRT2, _sech(zeta)


@dataclass
class FieldPair:
    """Two complex fields on a common grid at one instant."""

    x: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    t: float = 0.0

    def abs2(self):
        return np.abs(self.psi1) ** 2, np.abs(self.psi2) ** 2

    def norms(self):
        dx = float(self.x[1] - self.x[0])
        return (
            float(np.sum(np.abs(self.psi1) ** 2) * dx),
            float(np.sum(np.abs(self.psi2) ** 2) * dx),
        )


def tail_envelope(xi, chi, n=1):
    """Stable |rho A_1| on the far elliptic tail, |xi| >= 4, with its sign.

    Direct evaluation dies out there: rho grows like exp(xi^2/2) while the
    sn factor shrinks like erfc(|xi|), and in double precision the product
    turns to rounding noise once erf saturates.  Rewriting rho * sn through
    erfcx keeps every factor of modest size:

        delta = (A0 sqrt(pi)/2) erfc(|xi|)
        rho sn(.) / dn(.) = (A0 sqrt(pi)/2) exp(-xi^2/2) erfcx(|xi|)
                            / sqrt(chi) * (sn(delta)/delta) / dn(delta)

    Returns (envelope, sign) where envelope = rho |A_1| and the sign is that
    of A_1: +1 on the left tail, (-1)^(n+1) on the right.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi) < _TAIL_XI):
        raise ValidationError(f"tail_envelope: only valid for |xi| >= {_TAIL_XI}")
    ax = np.abs(xi)
    a0 = amplitude_a0(n)
    half = 0.5 * a0 * _SQRT_PI
    delta = half * erfc(ax)
    ratio = np.ones_like(ax)
    dn = np.ones_like(ax)
    m = delta > 1e-290
    if np.any(m):
        sn_d, _, dn_d = jacobi_elliptic(delta[m], _ELLIPTIC_MODULUS)
        ratio[m] = sn_d / delta[m]
        dn[m] = dn_d
    env = (
        (a0 / _SQRT2) * half * np.exp(-0.5 * xi * xi) * erfcx(ax)
        / math.sqrt(chi) * ratio / dn
    )
    sign = np.where(xi > 0, (-1.0) ** (n + 1), 1.0)
    return env, sign


def assemble(family: FamilySpec, trace: ModulationTrace, x, t) -> FieldPair:
    """Physical fields psi_1, psi_2 at time t on the grid x."""
    x = np.asarray(x, dtype=float)
    chi = trace.chi_at(t)
    dchi = trace.dchi_dt_at(t)
    a = trace.a_at(t)
    xi = x / chi
    phase = np.exp(1j * eta_of(x, chi, dchi, a))

    if family.kind == "elliptic":
        mag1 = np.empty_like(xi)
        inner = np.abs(xi) < _TAIL_XI
        if np.any(inner):
            rho_in = rho_of(family.stretch, x[inner], chi)
            zeta_in = zeta_of(family.stretch, x[inner], chi)
            a1_in, _ = reduced_amplitudes(family, zeta_in)
            mag1[inner] = rho_in * a1_in
        if np.any(~inner):
            env, sign = tail_envelope(xi[~inner], chi, family.n)
            mag1[~inner] = env * sign
        psi1 = mag1 * phase
        return FieldPair(x, psi1, psi1 / _SQRT2, float(t))

    rho = rho_of(family.stretch, x, chi)
    zeta = zeta_of(family.stretch, x, chi)
    a1, a2 = reduced_amplitudes(family, zeta)
    return FieldPair(x, rho * a1 * phase, rho * a2 * phase, float(t))


def default_grid(family: FamilySpec, purpose="export", n_points=1024,
                 drive="periodic") -> SpatialGrid:
    """Half-widths sized so the fields fit the box for the given use.

    elliptic fields die off super-Gaussianly (L = 10 suffices for export;
    12 gives propagation headroom while chi breathes), sech fields need
    L = 20 at the default gamma = 6, and the dark-bright pair flattens onto
    its background within L = 15.  The residual purpose serves the spectral
    equation check, whose box must keep edge values below roughly 1e-7 or
    wraparound ringing in the second derivative dominates; the
    quasiperiodic drive stretches chi to about 2.75, so those boxes are
    wider.  The dark-bright residual box is narrower than its export box:
    there the second derivative is a finite difference and a tighter box
    buys resolution.
    """
    if purpose not in ("export", "propagate", "residual"):
        raise ValidationError(f"default_grid: unknown purpose {purpose!r}")
    quasi = drive == "quasiperiodic"
    if family.kind == "elliptic":
        if purpose == "export":
            half = 10.0
        elif purpose == "propagate":
            half = 16.0 if quasi else 12.0
        else:
            half = 16.0 if quasi else 14.0
    elif family.kind == "sech":
        if purpose == "residual":
            half = 32.0 if quasi else 25.0
        else:
            half = 24.0 if quasi else 20.0
    else:
        half = 12.0 if purpose == "residual" else 15.0
    return SpatialGrid(half, n_points)


def default_trace(family: FamilySpec, drive="periodic", t_end=10.0,
                  epsilon=0.5, omega0=1.0, alpha=0.3, beta=0.2, dt=1e-4
                  ) -> ModulationTrace:
    """The width trace each family is normally run with.

    periodic: constant drive, served by the closed form.  quasiperiodic:
    cosine-modulated drive, served by the oscillator integration.  The
    dark-bright family always uses its prescribed two-tone width.
    """
    if family.kind == "dark_bright":
        return explicit_trace(alpha, beta, t_end)
    if drive == "periodic":
        return closed_form_trace(t_end)
    if drive == "quasiperiodic":
        return mathieu_trace("quasiperiodic", t_end, dt=dt,
                             epsilon=epsilon, omega0=omega0)
    raise ValidationError(f"default_trace: unknown drive {drive!r}")
