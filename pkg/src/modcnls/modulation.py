"""Time-dependent width scale chi(t), its derivatives, and the phase offset a(t).

The width obeys the Ermakov-Pinney equation chi'' + 4 f(t) chi = 4/chi^3 and
is built from two independent solutions of the linear parametric oscillator
z'' + 4 f(t) z = 0 (a Mathieu-type equation for the cosine drives used here)
as chi = sqrt(2 z1^2 + 2 z2^2 / W^2), W the Wronskian.  With z1(0) = sqrt(2),
z1'(0) = 0 the constant drive f = 1 gives the closed form
chi = sqrt(1 + 15 cos^2 2t) / 2, which is also wired in directly as the fast
path.  A third source is an explicitly prescribed two-tone width used by the
dark-bright family.

Conventions fixed here and relied on elsewhere:

* default initial data z1 = (sqrt(2), 0), z2 = (0, 1), so W = sqrt(2);
  chi is invariant under rescaling z2 since z2 enters as z2/W.
* a(t) = int_0^t chi^-2 ds for the oscillator-driven sources (it cancels the
  constant term of the harmonic-trap potential); a identically 0 for the
  explicit two-tone source.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

_SQRT2 = math.sqrt(2.0)
DRIVE_KINDS = ("constant", "quasiperiodic")
TRACE_SOURCES = ("closed_form_f1", "mathieu", "explicit_ex3")


def drive_f(kind, t, epsilon=0.5, omega0=1.0):
    """Trap-strength drive: f = 1 (constant) or f = 1 + epsilon cos(omega0 t)."""
    if kind not in DRIVE_KINDS:
        raise ValueError(f"drive_f: unknown kind {kind!r}")
    t = np.asarray(t, dtype=float)
    if kind == "constant":
        out = np.ones_like(t)
    else:
        if not (np.isfinite(epsilon) and np.isfinite(omega0)):
            raise ValueError("drive_f: epsilon and omega0 must be finite")
        out = 1.0 + epsilon * np.cos(omega0 * t)
    return float(out) if out.ndim == 0 else out


def make_drive(kind, epsilon=0.5, omega0=1.0) -> Callable:
    if kind not in DRIVE_KINDS:
        raise ValueError(f"make_drive: unknown kind {kind!r}")
    if kind == "constant":
        return lambda t: 1.0
    eps, w0 = float(epsilon), float(omega0)
    return lambda t: 1.0 + eps * math.cos(w0 * t)


@dataclass(frozen=True)
class MathieuState:
    t: float
    z1: float
    dz1: float
    z2: float
    dz2: float

    @property
    def wronskian(self):
        return self.z1 * self.dz2 - self.dz1 * self.z2


@dataclass
class MathieuPath:
    """Trajectory of the parametric oscillator pair on a uniform time grid."""

    times: np.ndarray
    z1: np.ndarray
    dz1: np.ndarray
    z2: np.ndarray
    dz2: np.ndarray
    w: float

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> MathieuState:
        return MathieuState(
            float(self.times[i]), float(self.z1[i]), float(self.dz1[i]),
            float(self.z2[i]), float(self.dz2[i]),
        )

    @property
    def wronskian(self):
        return self.z1 * self.dz2 - self.dz1 * self.z2


def integrate_mathieu(f, t_end, dt=1e-4, z1_init=(_SQRT2, 0.0), z2_init=(0.0, 1.0)):
    """Classical RK4 for z'' + 4 f(t) z = 0, both solutions at once.

    Returns a MathieuPath sampled at 0, dt, ..., n dt with n dt >= t_end.
    """
    if not (t_end > 0 and dt > 0):
        raise ValueError("integrate_mathieu: t_end and dt must be positive")
    n = int(math.ceil(t_end / dt - 1e-12))
    times = dt * np.arange(n + 1)
    z1 = np.empty(n + 1); v1 = np.empty(n + 1)
    z2 = np.empty(n + 1); v2 = np.empty(n + 1)
    a1, b1 = float(z1_init[0]), float(z1_init[1])
    a2, b2 = float(z2_init[0]), float(z2_init[1])
    z1[0], v1[0], z2[0], v2[0] = a1, b1, a2, b2
    w = a1 * b2 - b1 * a2
    if abs(w) < 1e-12:
        raise ValueError("integrate_mathieu: initial data are linearly dependent")
    h = dt
    f0 = float(f(0.0))
    for i in range(n):
        t = times[i]
        fm = float(f(t + 0.5 * h))
        f1 = float(f(t + h))
        # k-stage slopes for (z, v) with v' = -4 f z
        k1z, k1v = b1, -4.0 * f0 * a1
        l1z, l1v = b2, -4.0 * f0 * a2
        k2z, k2v = b1 + 0.5 * h * k1v, -4.0 * fm * (a1 + 0.5 * h * k1z)
        l2z, l2v = b2 + 0.5 * h * l1v, -4.0 * fm * (a2 + 0.5 * h * l1z)
        k3z, k3v = b1 + 0.5 * h * k2v, -4.0 * fm * (a1 + 0.5 * h * k2z)
        l3z, l3v = b2 + 0.5 * h * l2v, -4.0 * fm * (a2 + 0.5 * h * l2z)
        k4z, k4v = b1 + h * k3v, -4.0 * f1 * (a1 + h * k3z)
        l4z, l4v = b2 + h * l3v, -4.0 * f1 * (a2 + h * l3z)
        a1 += h * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0
        b1 += h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        a2 += h * (l1z + 2.0 * l2z + 2.0 * l3z + l4z) / 6.0
        b2 += h * (l1v + 2.0 * l2v + 2.0 * l3v + l4v) / 6.0
        z1[i + 1], v1[i + 1], z2[i + 1], v2[i + 1] = a1, b1, a2, b2
        f0 = f1
    return MathieuPath(times, z1, v1, z2, v2, w)


def chi_from_mathieu(state: MathieuState, w: Optional[float] = None):
    """Width from an oscillator state: sqrt(2 z1^2 + 2 z2^2 / W^2)."""
    w = state.wronskian if w is None else float(w)
    if abs(w) < 1e-12:
        raise ValueError("chi_from_mathieu: Wronskian vanished")
    return math.sqrt(2.0 * state.z1**2 + 2.0 * state.z2**2 / w**2)


def _cumulative_simpson(y, h):
    """Cumulative integral on a uniform grid, composite Simpson (O(h^4))."""
    n = len(y)
    if n < 3:
        raise ValueError("cumulative Simpson needs at least 3 samples")
    out = np.empty(n)
    out[0] = 0.0
    # odd indices: quadratic through the three nearest nodes
    odd = np.arange(1, n, 2)
    inner = odd[odd <= n - 2]
    out[inner] = (h / 12.0) * (5.0 * y[inner - 1] + 8.0 * y[inner] - y[inner + 1])
    # even indices: standard Simpson pairs, accumulated
    even = np.arange(2, n, 2)
    if len(even):
        pair = (h / 3.0) * (y[even - 2] + 4.0 * y[even - 1] + y[even])
        out[even] = np.cumsum(pair)
    out[inner] += out[inner - 1]
    if (n - 1) % 2 == 1:
        out[n - 1] = out[n - 2] + (h / 12.0) * (-y[n - 3] + 8.0 * y[n - 2] + 5.0 * y[n - 1])
    return out


@dataclass
class ModulationTrace:
    """Sampled chi(t), derivatives, and phase offset, plus exact evaluators.

    The sample arrays are what gets exported; the *_at query methods are what
    the propagator and residual suites call, and they do not interpolate the
    samples for the analytic sources (closed_form_f1, explicit_ex3).  For the
    mathieu source queries go through cubic Hermite interpolation of the
    oscillator trajectory itself, after which chi and its derivatives follow
    from exact algebra, with z'' = -4 f(t) z supplying the second derivative.
    """

    times: np.ndarray
    chi: np.ndarray
    dchi_dt: np.ndarray
    d2chi_dt2: np.ndarray
    a: np.ndarray
    source: str
    path: Optional[MathieuPath] = None
    f: Optional[Callable] = None
    alpha: float = 0.0
    beta: float = 0.0
    drive_kind: str = "constant"
    epsilon: float = 0.0
    omega0: float = 1.0
    ddz1: np.ndarray = field(default=None, repr=False)
    ddz2: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.source not in TRACE_SOURCES:
            raise ValueError(f"ModulationTrace: unknown source {self.source!r}")
        if np.any(self.chi <= 0) or not np.isfinite(self.chi).all():
            raise ValueError("ModulationTrace: chi samples must be positive and finite")
        if abs(float(self.a[0])) > 1e-15:
            raise ValueError("ModulationTrace: a must start at 0")
        if self.source == "mathieu" and self.path is not None and self.ddz1 is None:
            fn = np.asarray([self.f(t) for t in self.path.times])
            self.ddz1 = -4.0 * fn * self.path.z1
            self.ddz2 = -4.0 * fn * self.path.z2

    @property
    def t_end(self):
        return float(self.times[-1])

    def _check_range(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = float(self.times[0]), float(self.times[-1])
        if self.source != "mathieu":
            return t  # analytic sources extend to all t
        if np.any(t < lo - 1e-9) or np.any(t > hi + 1e-9):
            raise ValueError(
                f"trace query t outside [{lo:.6g}, {hi:.6g}]; integrate further first"
            )
        return np.clip(t, lo, hi)

    def _hermite(self, t, y, dy):
        ts = self.path.times
        h = float(ts[1] - ts[0])
        j = np.clip((np.floor((t - ts[0]) / h)).astype(int), 0, len(ts) - 2)
        th = (t - ts[j]) / h
        om = 1.0 - th
        h00 = (1.0 + 2.0 * th) * om * om
        h10 = th * om * om
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        return h00 * y[j] + h * h10 * dy[j] + h01 * y[j + 1] + h * h11 * dy[j + 1]

    def _mathieu_point(self, t):
        p = self.path
        z1 = self._hermite(t, p.z1, p.dz1)
        dz1 = self._hermite(t, p.dz1, self.ddz1)
        z2 = self._hermite(t, p.z2, p.dz2)
        dz2 = self._hermite(t, p.dz2, self.ddz2)
        return z1, dz1, z2, dz2

    def chi_at(self, t):
        t = self._check_range(t)
        if self.source == "closed_form_f1":
            c = np.cos(2.0 * t)
            out = np.sqrt(1.0 + 15.0 * c * c) / 2.0
        elif self.source == "explicit_ex3":
            out = 1.0 + self.alpha * np.sin(t) + self.beta * np.sin(_SQRT2 * t)
        else:
            z1, _, z2, _ = self._mathieu_point(t)
            out = np.sqrt(2.0 * z1 * z1 + 2.0 * z2 * z2 / self.path.w**2)
        return float(out) if np.ndim(out) == 0 else out

    def dchi_dt_at(self, t):
        t = self._check_range(t)
        if self.source == "closed_form_f1":
            out = -(15.0 / 4.0) * np.sin(4.0 * t) / self.chi_at(t)
        elif self.source == "explicit_ex3":
            out = self.alpha * np.cos(t) + _SQRT2 * self.beta * np.cos(_SQRT2 * t)
        else:
            z1, dz1, z2, dz2 = self._mathieu_point(t)
            w2 = self.path.w**2
            chi = np.sqrt(2.0 * z1 * z1 + 2.0 * z2 * z2 / w2)
            out = (2.0 * z1 * dz1 + 2.0 * z2 * dz2 / w2) / chi
        return float(out) if np.ndim(out) == 0 else out

    def d2chi_dt2_at(self, t):
        t = self._check_range(t)
        if self.source == "closed_form_f1":
            chi = self.chi_at(t)
            s4 = np.sin(4.0 * t)
            out = -15.0 * np.cos(4.0 * t) / chi - (225.0 / 16.0) * s4 * s4 / chi**3
        elif self.source == "explicit_ex3":
            out = -self.alpha * np.sin(t) - 2.0 * self.beta * np.sin(_SQRT2 * t)
        else:
            z1, dz1, z2, dz2 = self._mathieu_point(t)
            ft = np.asarray([self.f(s) for s in np.atleast_1d(t)])
            ft = ft[0] if np.ndim(t) == 0 else ft
            ddz1 = -4.0 * ft * z1
            ddz2 = -4.0 * ft * z2
            w2 = self.path.w**2
            chi = np.sqrt(2.0 * z1 * z1 + 2.0 * z2 * z2 / w2)
            dchi = (2.0 * z1 * dz1 + 2.0 * z2 * dz2 / w2) / chi
            out = (
                2.0 * dz1 * dz1 + 2.0 * z1 * ddz1
                + (2.0 * dz2 * dz2 + 2.0 * z2 * ddz2) / w2
            ) / chi - dchi * dchi / chi
        return float(out) if np.ndim(out) == 0 else out

    def a_at(self, t):
        t = self._check_range(t)
        if self.source == "closed_form_f1":
            # int_0^t 4 ds / (1 + 15 cos^2 2s); the arctan form is pole-free
            # because 5 + 3 cos 4t never vanishes
            out = t - 0.5 * np.arctan(3.0 * np.sin(4.0 * t) / (5.0 + 3.0 * np.cos(4.0 * t)))
        elif self.source == "explicit_ex3":
            out = np.zeros_like(np.asarray(t, dtype=float))
        else:
            inv2 = 1.0 / self.chi**2
            out = self._hermite_on_times(t, self.a, inv2)
        return float(out) if np.ndim(out) == 0 else out

    def _hermite_on_times(self, t, y, dy):
        ts = self.times
        h = float(ts[1] - ts[0])
        j = np.clip((np.floor((t - ts[0]) / h)).astype(int), 0, len(ts) - 2)
        th = (t - ts[j]) / h
        om = 1.0 - th
        h00 = (1.0 + 2.0 * th) * om * om
        h10 = th * om * om
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        return h00 * y[j] + h * h10 * dy[j] + h01 * y[j + 1] + h * h11 * dy[j + 1]

    def adot_at(self, t):
        if self.source == "explicit_ex3":
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            return float(out) if t.ndim == 0 else out
        chi = self.chi_at(t)
        return 1.0 / (chi * chi)


def accumulate_a(trace: ModulationTrace) -> ModulationTrace:
    """Fill the phase offset a = int chi^-2 dt by cumulative Simpson."""
    if np.any(trace.chi <= 0):
        raise ValueError("accumulate_a: chi samples must be positive")
    dts = np.diff(trace.times)
    if np.max(np.abs(dts - dts[0])) > 1e-9 * dts[0]:
        raise ValueError("accumulate_a: time grid must be uniform")
    a = _cumulative_simpson(1.0 / trace.chi**2, float(dts[0]))
    return replace(trace, a=a)


def eta(x, chi, dchi_dt, a):
    """Quadratic phase (dchi/dt / 4 chi) x^2 + a."""
    if not np.all(np.asarray(chi) > 0):
        raise ValueError("eta: chi must be positive")
    x = np.asarray(x, dtype=float)
    out = (dchi_dt / (4.0 * chi)) * x * x + a
    return float(out) if out.ndim == 0 else out


def chi_explicit_ex3(alpha, beta, t):
    """Two-tone width 1 + alpha sin t + beta sin(sqrt2 t); needs |alpha|+|beta| < 1."""
    if abs(alpha) + abs(beta) >= 1.0:
        raise ValueError("chi_explicit_ex3: requires |alpha| + |beta| < 1")
    t = np.asarray(t, dtype=float)
    out = 1.0 + alpha * np.sin(t) + beta * np.sin(_SQRT2 * t)
    return float(out) if out.ndim == 0 else out


def closed_form_trace(t_end, dt=1e-3) -> ModulationTrace:
    """Analytic trace for the constant drive f = 1."""
    tr = ModulationTrace(
        times=np.array([0.0, dt]), chi=np.array([2.0, 2.0]),
        dchi_dt=np.zeros(2), d2chi_dt2=np.zeros(2), a=np.zeros(2),
        source="closed_form_f1", drive_kind="constant",
    )
    n = int(math.ceil(t_end / dt - 1e-12))
    times = dt * np.arange(n + 1)
    tr.times = times
    tr.chi = tr.chi_at(times)
    tr.dchi_dt = tr.dchi_dt_at(times)
    tr.d2chi_dt2 = tr.d2chi_dt2_at(times)
    tr.a = tr.a_at(times)
    return tr


def mathieu_trace(kind, t_end, dt=1e-4, epsilon=0.5, omega0=1.0,
                  z1_init=(_SQRT2, 0.0), z2_init=(0.0, 1.0)) -> ModulationTrace:
    """Trace built by integrating the parametric oscillator for any drive."""
    f = make_drive(kind, epsilon, omega0)
    path = integrate_mathieu(f, t_end, dt, z1_init, z2_init)
    w2 = path.w**2
    chi = np.sqrt(2.0 * path.z1**2 + 2.0 * path.z2**2 / w2)
    dchi = (2.0 * path.z1 * path.dz1 + 2.0 * path.z2 * path.dz2 / w2) / chi
    fn = np.asarray([f(t) for t in path.times])
    ddz1 = -4.0 * fn * path.z1
    ddz2 = -4.0 * fn * path.z2
    d2chi = (
        2.0 * path.dz1**2 + 2.0 * path.z1 * ddz1
        + (2.0 * path.dz2**2 + 2.0 * path.z2 * ddz2) / w2
    ) / chi - dchi**2 / chi
    tr = ModulationTrace(
        times=path.times, chi=chi, dchi_dt=dchi, d2chi_dt2=d2chi,
        a=np.zeros_like(chi), source="mathieu", path=path, f=f,
        drive_kind=kind, epsilon=float(epsilon), omega0=float(omega0),
        ddz1=ddz1, ddz2=ddz2,
    )
    return accumulate_a(tr)


def explicit_trace(alpha, beta, t_end, dt=1e-3) -> ModulationTrace:
    """Analytic trace for the prescribed two-tone width (phase offset 0)."""
    if abs(alpha) + abs(beta) >= 1.0:
        raise ValueError("explicit_trace: requires |alpha| + |beta| < 1")
    n = int(math.ceil(t_end / dt - 1e-12))
    times = dt * np.arange(n + 1)
    tr = ModulationTrace(
        times=times, chi=np.ones_like(times), dchi_dt=np.zeros_like(times),
        d2chi_dt2=np.zeros_like(times), a=np.zeros_like(times),
        source="explicit_ex3", alpha=float(alpha), beta=float(beta),
    )
    tr.chi = tr.chi_at(times)
    tr.dchi_dt = tr.dchi_dt_at(times)
    tr.d2chi_dt2 = tr.d2chi_dt2_at(times)
    return tr
