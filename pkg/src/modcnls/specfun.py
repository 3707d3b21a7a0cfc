"""Self-contained special functions: the error-function family, the complete
elliptic integral of the first kind, and the Jacobi elliptic functions.

No scipy.  Everything accepts floats or numpy arrays and returns the same
kind.  Algorithms:

* erf: Maclaurin series on |x| <= 2 (terms fall below 1e-18 within ~40
  terms there), continued fraction for the complement beyond.
* erfc / erfcx: Laplace continued fraction for x > 2, evaluated backward
  at fixed depth; the scaled form erfcx = exp(x^2) erfc(x) is the primary
  quantity so the tail never underflows.
* erfi: term-recurrence series (all terms positive, condition number 1);
  overflows to +/-inf past x^2 ~ 700 like exp(x^2) itself.
* ellip_k: arithmetic-geometric mean, K = pi / (2 AGM(1, k')).
* jacobi_elliptic: descending Landen/AGM phase recurrence
  (dlmf.nist.gov/22.20.ii) after argument reduction modulo 4K; dn is
  recovered from 1 - k^2 sn^2, which keeps the identity exact.
"""

from typing import NamedTuple

import numpy as np

_SQRT_PI = float(np.sqrt(np.pi))
_SERIES_CUT = 2.0
_CF_DEPTH = 64
_EXP_OVERFLOW = 700.0


class EllipticTriple(NamedTuple):
    sn: object
    cn: object
    dn: object


def _prepare(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.isfinite(arr).all():
        raise ValueError(f"{name}: non-finite input")
    return arr, arr.ndim == 0


def _finish(arr, scalar):
    return float(arr) if scalar else arr


def _erf_series(ax):
    """Maclaurin sum of erf on |x| <= _SERIES_CUT (ax nonnegative)."""
    x2 = ax * ax
    term = ax.copy()
    total = ax.copy()
    for n in range(1, 48):
        term = term * (-x2) * (2 * n - 1) / (n * (2 * n + 1))
        total += term
    return (2.0 / _SQRT_PI) * total


def _erfcx_cf(x):
    """Scaled complement erfcx on x >= _SERIES_CUT via the Laplace continued
    fraction, evaluated backward at fixed depth."""
    half_inv_x2 = 0.5 / (x * x)
    t = np.ones_like(x)
    for n in range(_CF_DEPTH, 0, -1):
        t = 1.0 + n * half_inv_x2 / t
    return 1.0 / (t * x * _SQRT_PI)


def erf(x):
    """Error function, odd by construction, +/-1 to machine precision for
    |x| > 6."""
    arr, scalar = _prepare(x, "erf")
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _SERIES_CUT
    if small.any():
        out[small] = _erf_series(ax[small])
    big = ~small
    if big.any():
        xb = ax[big]
        out[big] = 1.0 - np.exp(-xb * xb) * _erfcx_cf(xb)
    out = np.copysign(out, arr)
    return _finish(out, scalar)


def erfc(x):
    """Complement 1 - erf(x), computed directly in the tail (no subtraction
    of nearly equal quantities for x > 2)."""
    arr, scalar = _prepare(x, "erfc")
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _SERIES_CUT
    if small.any():
        out[small] = 1.0 - _erf_series(ax[small])
    big = ~small
    if big.any():
        xb = ax[big]
        out[big] = np.exp(-xb * xb) * _erfcx_cf(xb)
    neg = arr < 0
    out[neg] = 2.0 - out[neg]
    return _finish(out, scalar)


def erfcx(x):
    """Scaled complement exp(x^2) erfc(x).  Decays like 1/(x sqrt(pi)) for
    large positive x; overflows to +inf for x < -sqrt(700) or so, where
    exp(x^2) itself overflows."""
    arr, scalar = _prepare(x, "erfcx")
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _SERIES_CUT
    if small.any():
        xs = ax[small]
        out[small] = np.exp(xs * xs) * (1.0 - _erf_series(xs))
    big = ~small
    if big.any():
        out[big] = _erfcx_cf(ax[big])
    neg = arr < 0
    if neg.any():
        xn = ax[neg]
        x2 = xn * xn
        with np.errstate(over="ignore"):
            doubled = np.where(x2 < _EXP_OVERFLOW, 2.0 * np.exp(x2), np.inf)
        out[neg] = doubled - out[neg]
    return _finish(out, scalar)


def erfi(x):
    """Imaginary error function erfi(x) = -i erf(ix), real for real x.

    All series terms share one sign, so the sum is perfectly conditioned;
    the result overflows to +/-inf once exp(x^2) would."""
    arr, scalar = _prepare(x, "erfi")
    ax = np.abs(arr)
    out = np.empty_like(ax)
    over = ax * ax > _EXP_OVERFLOW
    out[over] = np.inf
    ok = ~over
    if ok.any():
        xs = ax[ok]
        x2 = xs * xs
        term = xs.copy()
        total = xs.copy()
        x2max = float(x2.max()) if x2.size else 0.0
        n_max = int(x2max + 12.0 * np.sqrt(x2max + 4.0)) + 48
        for n in range(1, n_max):
            term = term * x2 * (2 * n - 1) / (n * (2 * n + 1))
            total += term
            if n % 16 == 0 and bool(np.all(term <= 1e-17 * total + 1e-300)):
                break
        out[ok] = (2.0 / _SQRT_PI) * total
    out = np.copysign(out, arr)
    return _finish(out, scalar)


def ellip_k(k):
    """Complete elliptic integral of the first kind, modulus convention
    K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), for 0 <= k < 1."""
    k = float(k)
    if not np.isfinite(k) or k < 0.0 or k >= 1.0:
        raise ValueError("ellip_k: modulus must satisfy 0 <= k < 1")
    a, b = 1.0, float(np.sqrt((1.0 - k) * (1.0 + k)))
    for _ in range(40):
        if abs(a - b) <= 2e-16 * a:
            break
        a, b = 0.5 * (a + b), float(np.sqrt(a * b))
    return np.pi / (2.0 * a)


def jacobi_elliptic(u, k):
    """Jacobi sn, cn, dn at real argument u and scalar modulus k in [0, 1].

    Uses the descending AGM phase recurrence with argument reduction modulo
    the full period 4K; exact circular (k=0) and hyperbolic (k=1) limits.
    """
    arr, scalar = _prepare(u, "jacobi_elliptic")
    k = float(k)
    if not np.isfinite(k) or k < 0.0 or k > 1.0:
        raise ValueError("jacobi_elliptic: modulus must satisfy 0 <= k <= 1")
    if k < 1e-12:
        sn, cn, dn = np.sin(arr), np.cos(arr), np.ones_like(arr)
        return EllipticTriple(_finish(sn, scalar), _finish(cn, scalar), _finish(dn, scalar))
    if k > 1.0 - 1e-12:
        e = np.exp(-np.abs(arr))
        sech = 2.0 * e / (1.0 + e * e)
        sn, cn, dn = np.tanh(arr), sech, sech.copy()
        return EllipticTriple(_finish(sn, scalar), _finish(cn, scalar), _finish(dn, scalar))

    big_k = ellip_k(k)
    period = 4.0 * big_k
    u_red = arr - period * np.round(arr / period)

    a_list, b_list, c_list = [1.0], [float(np.sqrt((1.0 - k) * (1.0 + k)))], [k]
    while abs(c_list[-1]) > 1e-17 and len(a_list) < 40:
        an, bn = a_list[-1], b_list[-1]
        a_list.append(0.5 * (an + bn))
        b_list.append(float(np.sqrt(an * bn)))
        c_list.append(0.5 * (an - bn))
    n_stages = len(a_list) - 1

    phi = (2.0**n_stages) * a_list[n_stages] * u_red
    for n in range(n_stages, 0, -1):
        ratio = c_list[n] / a_list[n]
        phi = 0.5 * (phi + np.arcsin(np.clip(ratio * np.sin(phi), -1.0, 1.0)))

    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - (k * sn) * (k * sn))
    return EllipticTriple(_finish(sn, scalar), _finish(cn, scalar), _finish(dn, scalar))
