"""Similarity-transform layer: stretches, coefficient maps, constraint checks.

The closed-form coefficient expressions are cross-checked two independent
ways: against the generic transform algebra evaluated per stretch, and
against finite-difference reconstruction from the (rho, eta, zeta) lattices.
"""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from modcnls.errors import LatticeTooCoarseError
from modcnls.families import (
    dark_bright_family,
    default_trace,
    elliptic_family,
    sech_family,
)
from modcnls.modulation import closed_form_trace, drive_f
from modcnls.transform import (
    CoefficientSampler,
    StretchSpec,
    g_of,
    potential,
    potential_from_transform,
    potential_identity_check,
    rho_of,
    sample_transform_lattice,
    verify_constraints,
    xi_of,
    zeta_of,
)

SQRT_PI = math.sqrt(math.pi)


def all_family_trace_pairs(t_end=2.0):
    return [
        (elliptic_family(1), default_trace(elliptic_family(1), "periodic", t_end)),
        (elliptic_family(1), default_trace(elliptic_family(1), "quasiperiodic", t_end)),
        (sech_family(), default_trace(sech_family(), "periodic", t_end)),
        (sech_family(), default_trace(sech_family(), "quasiperiodic", t_end)),
        (dark_bright_family(0.5), default_trace(dark_bright_family(0.5), t_end=t_end)),
        (dark_bright_family(-0.5), default_trace(dark_bright_family(-0.5), t_end=t_end)),
    ]


class TestStretchSpec:
    def test_gaussian_zeta_window(self):
        s = StretchSpec("gaussian")
        xi = np.linspace(-30, 30, 1001)
        z = s.zeta(xi)
        assert np.all(z >= 0) and np.all(z <= SQRT_PI)
        assert np.all(np.diff(z) >= 0)
        assert s.zeta(0.0) == pytest.approx(SQRT_PI / 2.0)

    def test_inverse_gaussian_odd_superlinear(self):
        s = StretchSpec("inverse_gaussian", gamma=6.0)
        xi = np.linspace(0.5, 25, 50)
        z = s.zeta(xi)
        np.testing.assert_allclose(s.zeta(-xi), -z, rtol=1e-13)
        assert np.all(z > xi)  # F' > 1 away from the origin

    def test_flat_bump_asymptotic_identity(self):
        s = StretchSpec("flat_bump", lam=0.5)
        assert s.zeta(8.0) == pytest.approx(8.0 + 0.5 * SQRT_PI / 2.0, abs=1e-12)
        assert s.zeta(-8.0) == pytest.approx(-8.0 - 0.5 * SQRT_PI / 2.0, abs=1e-12)
        # negative bump slows the map down around the origin
        s2 = StretchSpec("flat_bump", lam=-0.5)
        assert s2.zeta(1.0) < 1.0 < s.zeta(1.0)

    def test_fprime_positive_everywhere(self):
        xi = np.linspace(-12, 12, 401)
        for s in (
            StretchSpec("gaussian"),
            StretchSpec("inverse_gaussian", gamma=2.0),
            StretchSpec("flat_bump", lam=-0.9),
        ):
            assert np.all(s.fprime(xi) > 0)

    def test_zeta_slope_is_fprime(self):
        h = 1e-6
        for s in (
            StretchSpec("gaussian"),
            StretchSpec("inverse_gaussian", gamma=3.0),
            StretchSpec("flat_bump", lam=0.7),
        ):
            for xi in (-2.3, 0.0, 1.7):
                fd = (s.zeta(xi + h) - s.zeta(xi - h)) / (2 * h)
                assert fd == pytest.approx(float(s.fprime(xi)), rel=1e-8), s.kind

    def test_power_consistency(self):
        xi = np.linspace(-5, 5, 101)
        for s in (
            StretchSpec("gaussian"),
            StretchSpec("inverse_gaussian", gamma=4.0),
            StretchSpec("flat_bump", lam=0.3),
        ):
            f = s.fprime(xi)
            np.testing.assert_allclose(s.fprime_squared(xi), f * f, rtol=1e-13)
            np.testing.assert_allclose(s.fprime_cubed(xi), f**3, rtol=1e-13)

    def test_clipping_keeps_finite(self):
        s = StretchSpec("inverse_gaussian", gamma=1.0)
        out = s.fprime_cubed(np.array([50.0]))
        assert np.isfinite(out).all() and out[0] > 1e300

    def test_validation(self):
        with pytest.raises(ValueError):
            StretchSpec("spline")
        with pytest.raises(ValueError):
            StretchSpec("inverse_gaussian", gamma=0.0)
        with pytest.raises(ValueError):
            StretchSpec("flat_bump", lam=-1.0)


class TestCoefficientMaps:
    def test_coupling_two_expressions_agree(self):
        # G zeta_x^2 / rho^2 must equal G F'^3 / chi
        x = np.linspace(-8, 8, 257)
        for fam, tr in all_family_trace_pairs():
            chi = tr.chi_at(0.7)
            s = fam.stretch
            zeta_x = s.fprime(xi_of(x, chi)) / chi
            rho = rho_of(s, x, chi)
            direct = fam.g_matrix[:, :, None] * (zeta_x**2 / rho**2)[None, None, :]
            packed = g_of(s, fam.g_matrix, x, chi)
            # atol floor: the localizing stretch underflows both routes far out
            np.testing.assert_allclose(packed, direct, rtol=1e-12, atol=1e-200), fam.kind

    def test_rho_positive(self):
        x = np.linspace(-10, 10, 101)
        for fam, tr in all_family_trace_pairs():
            assert np.all(rho_of(fam.stretch, x, tr.chi_at(1.1)) > 0)

    def test_xi_requires_positive_chi(self):
        with pytest.raises(ValueError):
            xi_of(np.arange(3.0), 0.0)

    def test_printed_potential_matches_transform_algebra(self):
        for fam, tr in all_family_trace_pairs():
            half = {"elliptic": 10.0, "sech": 20.0, "dark_bright": 15.0}[fam.kind]
            x = np.linspace(-half, half, 512)
            for t in (0.0, 0.9, 1.8):
                vp = potential(fam, tr, x, t)
                vt = potential_from_transform(fam, tr, x, t)
                gap = np.abs(vp - vt).max()
                assert gap < 1e-10, f"{fam.kind} t={t}: gap {gap:.2e}"

    def test_harmonic_trap_strength_follows_drive(self):
        # localizing stretch: v = f(t) x^2 exactly, for either drive
        fam = elliptic_family(1)
        x = np.linspace(-3, 3, 61)
        for drive in ("periodic", "quasiperiodic"):
            tr = default_trace(fam, drive, 3.0)
            for t in (0.4, 2.2):
                f = drive_f(tr.drive_kind, t, tr.epsilon, tr.omega0)
                v = potential(fam, tr, x, t)
                np.testing.assert_allclose(v[0], f * x * x, rtol=0, atol=1e-12)
                np.testing.assert_allclose(v[1], v[0], rtol=0)

    def test_sampler_bundles_both(self):
        fam = sech_family()
        tr = default_trace(fam, "periodic", 2.0)
        sam = CoefficientSampler(fam, tr)
        x = np.linspace(-20, 20, 128)
        v, g = sam.coefficients(x, 1.0)
        assert v.shape == (2, 128) and g.shape == (2, 2, 128)
        np.testing.assert_array_equal(v, sam.potential(x, 1.0))
        np.testing.assert_array_equal(g, sam.couplings(x, 1.0))
        # zero diagonal entry of G stays zero everywhere
        assert np.all(g[1, 1] == 0.0)

    def test_potential_identity_against_finite_differences(self):
        for fam, tr in all_family_trace_pairs():
            half = {"elliptic": 10.0, "sech": 20.0, "dark_bright": 15.0}[fam.kind]
            x = np.linspace(-half, half, 768)
            gap = potential_identity_check(fam, tr, x, 1.3)
            assert gap < 1e-4, f"{fam.kind}: identity gap {gap:.2e}"


class TestLattice:
    def test_shapes_and_consistency(self):
        fam = dark_bright_family(0.5)
        tr = default_trace(fam, t_end=2.0)
        x = np.linspace(-15, 15, 300)
        t = np.linspace(0, 2, 70)
        lat = sample_transform_lattice(fam, tr, x, t)
        assert lat["rho"].shape == (70, 300)
        assert lat["eta"].shape == (70, 300)
        assert lat["zeta"].shape == (70, 300)
        np.testing.assert_allclose(
            lat["rho"][13], rho_of(fam.stretch, x, tr.chi_at(float(t[13]))), rtol=1e-14
        )
        np.testing.assert_allclose(
            lat["zeta"][51], zeta_of(fam.stretch, x, tr.chi_at(float(t[51]))), rtol=1e-14
        )


class TestVerifyConstraints:
    def test_residuals_small_all_families(self):
        cases = [
            (elliptic_family(1), "periodic", 1.0, 1024, 2048),
            (sech_family(), "periodic", 5.0, 512, 1536),
            (sech_family(), "quasiperiodic", 5.0, 768, 1536),
            (dark_bright_family(0.5), None, 5.0, 512, 512),
        ]
        for fam, drive, half, nx, nt in cases:
            tr = default_trace(fam, drive or "periodic", 1.0)
            x = np.linspace(-1.0, 1.0, nx) if fam.kind == "elliptic" else np.linspace(-5.0, 5.0, nx)
            t = np.linspace(0.0, 1.0, nt)
            r = verify_constraints(fam, tr, x, t)
            assert r.worst < 1e-5, f"{fam.kind}/{drive}: {r}"

    def test_dense_lattice_for_hard_squeeze(self):
        # quasiperiodic drive squeezes harder; residual budget needs the
        # denser lattice
        fam = elliptic_family(1)
        tr = default_trace(fam, "quasiperiodic", 1.0)
        x = np.linspace(-1.0, 1.0, 2560)
        t = np.linspace(0.0, 1.0, 6144)
        r = verify_constraints(fam, tr, x, t)
        assert r.worst < 1e-5, str(r)

    def test_corrupted_envelope_is_caught(self):
        fam = elliptic_family(1)
        tr = default_trace(fam, "periodic", 1.0)
        x = np.linspace(-1.0, 1.0, 768)
        t = np.linspace(0.0, 1.0, 1536)
        r = verify_constraints(fam, tr, x, t, corrupt_rho=0.01)
        assert r.continuity > 1e-2 and r.flux > 1e-2
        assert r.worst == max(r.continuity, r.advection, r.flux)

    def test_coarse_lattice_refused(self):
        fam = sech_family()
        tr = default_trace(fam, "periodic", 1.0)
        with pytest.raises(LatticeTooCoarseError):
            verify_constraints(fam, tr, np.linspace(-5, 5, 128), np.linspace(0, 1, 70))
        with pytest.raises(LatticeTooCoarseError):
            verify_constraints(fam, tr, np.linspace(-5, 5, 300), np.linspace(0, 1, 32))

    def test_nonuniform_lattice_refused(self):
        fam = sech_family()
        tr = default_trace(fam, "periodic", 1.0)
        x = np.linspace(-5, 5, 300) ** 3 / 25.0
        with pytest.raises(ValueError):
            verify_constraints(fam, tr, x, np.linspace(0, 1, 70))

    def test_duck_typed_family(self):
        # any object with stretch, mu, g_matrix will do
        fam = SimpleNamespace(
            stretch=StretchSpec("flat_bump", lam=0.3),
            mu=(0.0, 0.0),
            g_matrix=np.eye(2),
        )
        tr = closed_form_trace(1.0)
        x = np.linspace(-4, 4, 640)
        t = np.linspace(0, 1, 512)
        r = verify_constraints(fam, tr, x, t)
        assert r.worst < 1e-4
