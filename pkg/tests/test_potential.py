import math

import mpmath as mp
import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from pwshift import specfun
from pwshift.errors import DomainError
from pwshift.potential import (
    ALPHA,
    HBARC,
    Composite,
    Coulomb,
    MatrixElementKernel,
    RadialProfile,
    ScatteringScenario,
    SphericalStep,
    coulomb_basis_matrix_element,
    coulomb_eta,
    free_matrix_element,
    reduced_mass,
    scenario_parameters,
    step_free_kernel_limit,
    step_free_kernel_line,
)

R_HE = 1.3 * 4 ** (1 / 3)  # fm


def he4_scenario(**kw):
    base = dict(p=237.0, V0=-30.2, R=R_HE, Z_t=2, Z_p=1, reduced_mass=749.0)
    base.update(kw)
    return ScatteringScenario(**base)


def quad_free_kernel(l, kappa, x):
    """(pi/lam) V_l(p, p(1+x)) by adaptive quadrature in s = r/R (p = 1, R = kappa)."""
    k2 = 1 + x

    def integrand(s):
        r = s * kappa
        y1 = math.sqrt(2 / math.pi) * r * sc.spherical_jn(l, r)
        y2 = math.sqrt(2 / math.pi) * k2 * r * sc.spherical_jn(l, k2 * r)
        return y1 * y2

    val, _ = si.quad(integrand, 0, 1, limit=400, epsabs=1e-14, epsrel=1e-13)
    # V = lam/R on [0, R], r = s R: (pi/lam) * (lam/R) * R * int ds
    return math.pi * val


class TestScenario:
    def test_reduced_mass(self):
        assert reduced_mass(3727.38, 938.27) == pytest.approx(749, abs=1.0)

    def test_derived_parameters(self):
        par = he4_scenario().params
        assert round(par.kappa, 2) == 2.48
        assert round(par.lam, 3) == -0.316
        assert round(par.eta_c, 4) == 0.0461
        assert par.eta_plus == pytest.approx(-1.0, abs=0.01)

    def test_units(self):
        sc_ = he4_scenario()
        assert sc_.radius == pytest.approx(R_HE / HBARC)
        assert coulomb_eta(2, 749.0, 237.0) == pytest.approx(sc_.params.eta_c, rel=1e-15)
        assert sc_.params.eta_c == pytest.approx(2 * ALPHA * 749 / 237, rel=1e-15)

    def test_mass_inputs(self):
        a = ScatteringScenario(p=237.0, V0=-30.2, R=R_HE, m_target=3727.38, m_projectile=938.27)
        assert a.mu == pytest.approx(reduced_mass(3727.38, 938.27))
        par = scenario_parameters(3727.38, 938.27, 237.0, a.potential)
        assert par.mu == a.mu

    @pytest.mark.parametrize(
        "kw",
        [
            dict(m_target=1.0),
            dict(m_target=1.0, m_projectile=1.0),
            dict(reduced_mass=-1.0),
            dict(R=0.0),
            dict(p=-1.0),
        ],
    )
    def test_invalid(self, kw):
        base = dict(p=237.0, V0=-30.2, R=R_HE, reduced_mass=749.0)
        base.update(kw)
        with pytest.raises(DomainError):
            ScatteringScenario(**base)

    def test_step_validation(self):
        with pytest.raises(DomainError):
            SphericalStep(1.0, 0.0)


class TestFreeKernel:
    def test_zero_potential(self):
        assert free_matrix_element(SphericalStep(0.0, 1.0), 3, 2.0, 5.0) == 0.0
        k = MatrixElementKernel("free", SphericalStep(0.0, 1.0), 2)
        assert k(1.0, 2.0) == 0.0
        assert np.all(k.line(1.0)(np.linspace(0.1, 3, 5)) == 0)

    @pytest.mark.parametrize("kappa", [2.48, 10.0])
    def test_l0_diagonal(self, kappa):
        lam, p = 0.7, 3.0
        R = kappa / p
        well = SphericalStep(lam / R, R)
        # direct integral (2/pi) (lam/R) int_0^R sin^2(p r) dr
        ref = float(2 / mp.pi * (lam / R) * mp.quad(lambda r: mp.sin(p * r) ** 2, [0, R]))
        assert free_matrix_element(well, 0, p, p) == pytest.approx(ref, rel=1e-12)
        assert ref == pytest.approx(lam / math.pi * (1 - math.sin(2 * kappa) / (2 * kappa)), rel=1e-14)

    def test_richardson_limit(self):
        avg = 0.5 * (step_free_kernel_line(5, 10.0, 1e-6) + step_free_kernel_line(5, 10.0, -1e-6))
        assert step_free_kernel_limit(5, 10.0) == pytest.approx(float(avg), abs=1e-8)

    @pytest.mark.parametrize("l", [0, 1, 5])
    @pytest.mark.parametrize("kappa", [2.48, 10.0])
    def test_closed_form_vs_quadrature(self, l, kappa):
        for x in np.linspace(-0.99, 3.0, 23):
            if abs(x) < 1e-3:
                continue
            got = float(step_free_kernel_line(l, kappa, x))
            assert got == pytest.approx(quad_free_kernel(l, kappa, x), abs=1e-9)

    @pytest.mark.parametrize("l", [0, 1, 5])
    def test_kernel_object_matches_closed_form(self, l):
        kappa, p = 10.0, 2.0
        well = SphericalStep(0.3, kappa / p)
        k = MatrixElementKernel("free", well, l)
        z = np.array([0.3, 0.99999, 1.0, 1.00002, 1.7, 4.0])
        line = k.line(p)(z)
        for zi, v in zip(z, line):
            assert v == pytest.approx(quad_free_kernel(l, kappa, zi - 1), abs=1e-9)

    @given(k1=st.floats(0.01, 5), k2=st.floats(0.01, 5), l=st.integers(0, 6))
    def test_symmetry(self, k1, k2, l):
        k = MatrixElementKernel("free", SphericalStep(-2.0, 1.3), l)
        a, b = k(k1, k2), k(k2, k1)
        assert abs(a - b) <= 1e-10 * max(1, abs(a))

    @pytest.mark.parametrize("l", [0, 2])
    def test_zero_momentum(self, l):
        k = MatrixElementKernel("free", SphericalStep(1.0, 1.0), l)
        vals = [abs(k(3.0, 3.0 * e)) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-3

    def test_coulomb_rejected(self):
        with pytest.raises(DomainError, match="diverge"):
            free_matrix_element(Coulomb(2, 1), 0, 1.0, 1.0)
        with pytest.raises(DomainError):
            free_matrix_element(Composite(Coulomb(2, 1), SphericalStep(1.0, 1.0)), 0, 1.0, 2.0)

    def test_general_profile(self):
        prof = RadialProfile(lambda r: np.exp(-r * r), support=8.0, lam=1.0)
        got = free_matrix_element(prof, 1, 0.8, 1.3)
        ref, _ = si.quad(
            lambda r: (2 / math.pi) * 0.8 * 1.3 * r * r * sc.spherical_jn(1, 0.8 * r)
            * sc.spherical_jn(1, 1.3 * r) * math.exp(-r * r),
            0,
            8,
            epsabs=1e-14,
        )
        assert got == pytest.approx(ref, rel=1e-9)


class TestCoulombKernel:
    def test_needs_composite(self):
        with pytest.raises(DomainError):
            MatrixElementKernel("coulomb", SphericalStep(1.0, 1.0), 0)
        with pytest.raises(DomainError):
            coulomb_basis_matrix_element(SphericalStep(1.0, 1.0), 0, 1.0, 1.0, 1.0)

    def test_endpoint(self):
        comp = he4_scenario().potential
        with pytest.raises(DomainError):
            coulomb_basis_matrix_element(comp, 0, 0.0, 1.0, 749.0)

    @pytest.mark.parametrize("l", [0, 1, 3])
    def test_wronskian_vs_quadrature(self, l):
        comp = he4_scenario().potential
        p = 237.0
        for z in (0.05, 0.5, 0.9, 1.2, 2.5, 9.0):
            w = coulomb_basis_matrix_element(comp, l, p, p * z, 749.0)
            q = coulomb_basis_matrix_element(comp, l, p, p * z, 749.0, method="quad")
            assert w == pytest.approx(q, rel=1e-10, abs=1e-13)

    def test_lambda_independent(self):
        a = Composite(Coulomb(2, 1), SphericalStep(-0.15, 0.01))
        b = Composite(Coulomb(2, 1), SphericalStep(-0.6, 0.01))
        for k2 in (100.0, 237.0, 400.0):
            va = coulomb_basis_matrix_element(a, 1, 237.0, k2, 749.0)
            vb = coulomb_basis_matrix_element(b, 1, 237.0, k2, 749.0)
            assert va == pytest.approx(vb, rel=1e-13)

    def test_zero_charge_reduces_to_free(self):
        step = SphericalStep(-0.3, 0.0104)
        comp = Composite(Coulomb(0, 1), step)
        for l in (0, 2):
            fk = MatrixElementKernel("free", step, l)
            ck = MatrixElementKernel("coulomb", comp, l, mass=749.0)
            for k2 in (50.0, 236.9, 237.0, 500.0):
                assert ck(237.0, k2) == pytest.approx(fk(237.0, k2), rel=1e-9, abs=1e-12)

    def test_continuity_in_charge(self):
        step = SphericalStep(-0.3, 0.0104)
        fk = MatrixElementKernel("free", step, 0)
        diffs, etas = [], []
        for zz in (1, 2, 4, 8):
            comp = Composite(Coulomb(zz, 1), step)
            ck = MatrixElementKernel("coulomb", comp, 0, mass=749.0)
            diffs.append(abs(ck(237.0, 237.0) - fk(237.0, 237.0)))
            etas.append(coulomb_eta(zz, 749.0, 237.0))
        ratios = np.array(diffs) / np.array(etas)
        assert np.max(ratios) < 2 * np.min(ratios)

    @given(z1=st.floats(0.05, 5), z2=st.floats(0.05, 5), l=st.integers(0, 4))
    def test_symmetry(self, z1, z2, l):
        comp = he4_scenario().potential
        k = MatrixElementKernel("coulomb", comp, l, mass=749.0)
        a, b = k(237.0 * z1, 237.0 * z2), k(237.0 * z2, 237.0 * z1)
        assert abs(a - b) <= 1e-10 * max(1, abs(a))

    def test_zero_momentum(self):
        comp = he4_scenario().potential
        k = MatrixElementKernel("coulomb", comp, 0, mass=749.0)
        vals = [abs(k(237.0, 237.0 * e)) for e in (1e-1, 1e-2, 1e-3)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-3

    def test_line_matches_pointwise(self):
        comp = he4_scenario().potential
        k = MatrixElementKernel("coulomb", comp, 1, mass=749.0)
        z = np.array([1e-7, 0.2, 0.99995, 1.0, 1.3, 6.0])
        line = k.line(237.0)(z)
        assert line[0] == 0.0
        for zi, v in zip(z[1:], line[1:]):
            assert v == pytest.approx(k(237.0, 237.0 * zi), rel=1e-12)

    def test_scenario_first_order(self):
        sc_ = he4_scenario()
        par = sc_.params
        k = MatrixElementKernel("coulomb", sc_.potential, 0, mass=par.mu)
        assert -par.eta_plus * k(par.p, par.p) == pytest.approx(1.230, abs=0.01)

    def test_general_profile_quadrature(self):
        # step written as a profile must agree with the Wronskian fast path
        R = 0.0104
        prof = RadialProfile(lambda r: np.where(r < R, -30.2, 0.0), support=R, lam=-30.2 * R)
        a = Composite(Coulomb(2, 1), prof)
        b = Composite(Coulomb(2, 1), SphericalStep(-30.2, R))
        va = coulomb_basis_matrix_element(a, 0, 237.0, 300.0, 749.0)
        vb = coulomb_basis_matrix_element(b, 0, 237.0, 300.0, 749.0)
        assert va == pytest.approx(vb, rel=1e-9)
