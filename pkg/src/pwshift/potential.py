"""Potential definitions, scattering scenarios and matrix-element kernels.

Natural units (hbar = c = 1) with energies and momenta in MeV and lengths in
MeV^-1 are used throughout; :class:`ScatteringScenario` takes the usual
MeV / fm inputs and converts with a single ``HBARC`` constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import specfun
from .errors import DomainError
from .pvquad import DEFAULT_SPEC, QuadratureSpec, integrate

HBARC = 197.3269804  # MeV fm
ALPHA = 1.0 / 137.035999084


@dataclass(frozen=True)
class SphericalStep:
    """Constant potential ``height`` on ``0 < r < radius``, zero outside.

    ``height`` is an energy and ``radius`` a length in natural units, so the
    dimensionless coupling is ``lam = height * radius``.
    """

    height: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("SphericalStep radius must be positive")

    @property
    def lam(self):
        return self.height * self.radius

    @property
    def support(self):
        return self.radius

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.radius, self.height, 0.0)


@dataclass(frozen=True)
class RadialProfile:
    """A general short-range potential ``V(r)`` vanishing beyond ``support``.

    ``lam`` only fixes the normalisation of the dimensionless kernel
    ``v = (pi/lam) V``; phase shifts do not depend on it.
    """

    func: Callable
    support: float
    lam: float = 1.0

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))


ShortRange = Union[SphericalStep, RadialProfile]


@dataclass(frozen=True)
class Coulomb:
    z_target: int
    z_projectile: int

    @property
    def charge_product(self):
        return self.z_target * self.z_projectile


@dataclass(frozen=True)
class Composite:
    """Point Coulomb potential plus a short-range perturbation."""

    coulomb: Coulomb
    short_range: ShortRange

    @property
    def lam(self):
        return self.short_range.lam


PotentialSpec = Union[SphericalStep, RadialProfile, Coulomb, Composite]


# ---------------------------------------------------------------------------
# scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioParams:
    """Derived dimensionless parameters of a two-body scattering scenario."""

    mu: float  # reduced mass, MeV
    p: float  # momentum, MeV
    radius: float  # short-range radius, MeV^-1
    kappa: float
    lam: float
    eta_plus: float
    eta_c: float


@dataclass(frozen=True)
class ScatteringScenario:
    """Projectile on target with Coulomb plus a spherical step, in MeV / fm.

    Give either both ``m_target`` and ``m_projectile`` or ``reduced_mass``.
    """

    p: float
    V0: float
    R: float
    Z_t: int = 0
    Z_p: int = 0
    m_target: Optional[float] = None
    m_projectile: Optional[float] = None
    reduced_mass: Optional[float] = None
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        pair = self.m_target is not None and self.m_projectile is not None
        if pair == (self.reduced_mass is not None):
            raise DomainError("give either (m_target, m_projectile) or reduced_mass")
        if (self.m_target is None) != (self.m_projectile is None):
            raise DomainError("m_target and m_projectile must be given together")
        if self.mu <= 0 or self.p <= 0 or self.R <= 0:
            raise DomainError("masses, momentum and radius must be positive")

    @property
    def mu(self):
        if self.reduced_mass is not None:
            return float(self.reduced_mass)
        return self.m_target * self.m_projectile / (self.m_target + self.m_projectile)

    @property
    def radius(self):
        return self.R / HBARC

    @property
    def step(self):
        return SphericalStep(self.V0, self.radius)

    @property
    def potential(self):
        if self.Z_t * self.Z_p == 0:
            return self.step
        return Composite(Coulomb(self.Z_t, self.Z_p), self.step)

    @property
    def params(self):
        return scenario_parameters(self.mu, None, self.p, self.potential, reduced=True)


def reduced_mass(m_target, m_projectile):
    return m_target * m_projectile / (m_target + m_projectile)


def scenario_parameters(m_target, m_projectile, p, spec, reduced=False):
    """Reduced mass, ``kappa = pR``, ``lam = V0 R``, ``eta+ = lam/(p/mu)`` and
    ``eta_C = Z_t Z_p alpha / (p/mu)``.

    Masses and ``p`` are in MeV; ``spec`` carries the radius in MeV^-1.  With
    ``reduced=True`` the first argument is already the reduced mass.
    """
    if reduced:
        mu = float(m_target)
    else:
        if m_target <= 0 or m_projectile <= 0:
            raise DomainError("masses must be positive")
        mu = reduced_mass(m_target, m_projectile)
    if p <= 0:
        raise DomainError("momentum must be positive")
    zz = 0
    short = spec
    if isinstance(spec, Composite):
        zz = spec.coulomb.charge_product
        short = spec.short_range
    elif isinstance(spec, Coulomb):
        zz = spec.charge_product
        short = None
    radius = short.support if short is not None else 0.0
    lam = short.lam if short is not None else 0.0
    velocity = p / mu
    return ScenarioParams(
        mu=mu,
        p=p,
        radius=radius,
        kappa=p * radius,
        lam=lam,
        eta_plus=lam / velocity,
        eta_c=zz * ALPHA / velocity,
    )


def coulomb_eta(charge_product, mass, k):
    """Sommerfeld parameter ``Z_t Z_p alpha m / k``."""
    return charge_product * ALPHA * mass / k


# ---------------------------------------------------------------------------
# free-basis matrix elements
# ---------------------------------------------------------------------------

_NEAR_DIAGONAL = 1e-4


def _step_overlap_free(l, a, b, R):
    """``int_0^R r^2 j_l(a r) j_l(b r) dr`` in closed form (``a != b``)."""
    A, B = a * R, b * R
    num = b * specfun.spherical_bessel_j_lm1(l, B) * specfun.spherical_bessel_j(l, A)
    num = num - a * specfun.spherical_bessel_j_lm1(l, A) * specfun.spherical_bessel_j(l, B)
    return R * R * num / (a * a - b * b)


def _radial_quad(integrand, support, kmax, spec):
    panels = max(2, math.ceil(kmax * support / math.pi / 4))
    return integrate(integrand, 0.0, support, spec, panels)[0]


def _free_wave(l, k, r):
    return specfun.SQRT_2_OVER_PI * k * r * specfun.spherical_bessel_j(l, k * r)


def free_matrix_element(spec, l, k1, k2, quad=DEFAULT_SPEC):
    """Free-basis matrix element ``V_l(k1, k2) = int y_l(r,k1) V(r) y_l(r,k2) dr``.

    The spherical step uses the closed-form overlap of spherical Bessel
    functions away from the diagonal and quadrature within a relative
    distance of 1e-4 of it.  ``k2`` may be an array.
    """
    if isinstance(spec, (Coulomb, Composite)):
        raise DomainError(
            "free-basis matrix elements of the Coulomb potential diverge: "
            "V_0(p, p) ~ ln((k1+k2)^2/(k1-k2)^2); use the Coulomb basis"
        )
    if k1 < 0 or np.any(np.asarray(k2) < 0):
        raise DomainError("momenta must be nonnegative")
    if spec.lam == 0 and isinstance(spec, SphericalStep):
        return 0.0 if np.ndim(k2) == 0 else np.zeros(np.shape(k2))
    k2a = np.atleast_1d(np.asarray(k2, dtype=float))
    out = np.zeros_like(k2a)
    if isinstance(spec, SphericalStep):
        R = spec.radius
        pref = spec.height * (2.0 / math.pi) * k1 * k2a
        near = np.abs(k2a - k1) <= _NEAR_DIAGONAL * max(k1, 1e-300)
        far = ~near & (k2a > 0) & (k1 > 0)
        if far.any():
            out[far] = pref[far] * _step_overlap_free(l, k1, k2a[far], R)
        for i in np.flatnonzero(near & (k2a > 0)):
            kk = k2a[i]
            out[i] = spec.height * _radial_quad(
                lambda r: _free_wave(l, k1, r) * _free_wave(l, kk, r), R, k1 + kk, quad
            )
    else:
        for i, kk in enumerate(k2a):
            out[i] = _radial_quad(
                lambda r: _free_wave(l, k1, r) * spec(r) * _free_wave(l, kk, r),
                spec.support,
                k1 + kk,
                quad,
            )
    return float(out[0]) if np.ndim(k2) == 0 else out


def step_free_kernel_line(l, kappa, x):
    """Dimensionless ``v_l(p, p(1+x))`` for a spherical step, from the
    closed form in ``kappa = pR``; independent of the coupling."""
    x = np.asarray(x, dtype=float)
    a = kappa
    b = kappa * (1 + x)
    jl_a = specfun.spherical_bessel_j(l, a)
    jm_a = specfun.spherical_bessel_j_lm1(l, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        bb = np.where(b > 0, b, 1.0)
        jl_b = specfun.spherical_bessel_j(l, bb)
        jm_b = specfun.spherical_bessel_j_lm1(l, bb)
        val = 2 * kappa * (1 + x) / (2 + x) * ((jm_a * jl_b - jm_b * jl_a) / x - jm_b * jl_a)
    val = np.where(b > 0, val, 0.0)
    return val


def step_free_kernel_limit(l, kappa):
    """Diagonal value ``v_l(p, p)`` from the ``x -> 0`` limit of the closed form,
    by fourth-order central Richardson extrapolation."""
    h = 1e-3

    def avg(hh):
        return 0.5 * (step_free_kernel_line(l, kappa, hh) + step_free_kernel_line(l, kappa, -hh))

    return float((4 * avg(h) - avg(2 * h)) / 3)


# ---------------------------------------------------------------------------
# Coulomb-basis matrix elements
# ---------------------------------------------------------------------------


def _coulomb_wave_r(l, zz, mass, k, r):
    return specfun.coulomb_wave(l, coulomb_eta(zz, mass, k), k * np.asarray(r, dtype=float))


def coulomb_basis_matrix_element(spec, l, k1, k2, mass, quad=DEFAULT_SPEC, method="auto"):
    """Normalised Coulomb-basis matrix element
    ``(pi/lam) int_0^R y^(C)(r,k1) V+(r) y^(C)(r,k2) dr``.

    For a spherical step the integral follows from the Wronskian of the two
    Coulomb waves at ``r = R`` (both solve the same radial equation at
    different energies); near the diagonal, for general profiles, or with
    ``method="quad"`` it is evaluated by Gauss-Legendre panels.
    """
    if not isinstance(spec, Composite):
        raise DomainError("coulomb_basis_matrix_element needs a Composite potential")
    if k1 <= 0 or k2 <= 0:
        raise DomainError("Coulomb-basis matrix elements need k1, k2 > 0 (k = 0 is an endpoint)")
    short = spec.short_range
    if short.lam == 0:
        return 0.0
    zz = spec.coulomb.charge_product
    use_wronskian = (
        method != "quad"
        and isinstance(short, SphericalStep)
        and abs(k1 - k2) > _NEAR_DIAGONAL * max(k1, k2)
    )
    if use_wronskian:
        R = short.radius
        F1, dF1 = specfun.regular_coulomb(l, coulomb_eta(zz, mass, k1), k1 * R)
        F2, dF2 = specfun.regular_coulomb(l, coulomb_eta(zz, mass, k2), k2 * R)
        return 2.0 / R * (k2 * F1 * dF2 - k1 * dF1 * F2) / (k1 * k1 - k2 * k2)

    def integrand(r):
        return _coulomb_wave_r(l, zz, mass, k1, r) * short(r) * _coulomb_wave_r(l, zz, mass, k2, r)

    return math.pi / short.lam * _radial_quad(integrand, short.support, k1 + k2, quad)


# ---------------------------------------------------------------------------
# kernel object
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixElementKernel:
    """Dimensionless matrix-element kernel ``v_l(k1, k2)`` for one partial wave.

    ``basis="free"`` gives ``(pi/lam) V_l`` of the potential; ``basis="coulomb"``
    gives the Coulomb-distorted kernel of the short-range part of a
    :class:`Composite`.  ``mass`` (MeV) enters only through ``eta_C(k)``.
    """

    basis: str
    potential: PotentialSpec
    l: int
    mass: float = 1.0
    quad: QuadratureSpec = DEFAULT_SPEC
    k_floor: float = 1e-6

    def __post_init__(self):
        if self.basis not in ("free", "coulomb"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.basis == "coulomb" and not isinstance(self.potential, Composite):
            raise DomainError("the Coulomb basis needs a Composite potential")

    @property
    def short_range(self):
        if isinstance(self.potential, Composite):
            return self.potential.short_range
        return self.potential

    @property
    def lam(self):
        return self.short_range.lam

    def __call__(self, k1, k2):
        if self.lam == 0:
            return 0.0
        if self.basis == "free":
            return math.pi / self.lam * free_matrix_element(self.potential, self.l, k1, k2, self.quad)
        return coulomb_basis_matrix_element(self.potential, self.l, k1, k2, self.mass, self.quad)

    def line(self, p):
        """Vectorised ``z -> v_l(p, p z)``; points below ``k_floor * p`` give 0."""
        diag = self(p, p)

        def kern(z):
            z = np.asarray(z, dtype=float)
            out = np.empty(z.shape)
            flat = z.ravel()
            res = out.ravel()
            if self.lam == 0:
                res[:] = 0.0
                return out
            if self.basis == "free" and isinstance(self.short_range, SphericalStep):
                kappa = p * self.short_range.radius
                res[:] = step_free_kernel_line(self.l, kappa, flat - 1)
                small = np.abs(flat - 1) <= _NEAR_DIAGONAL
                if small.any():
                    res[small] = [self(p, p * zz) for zz in flat[small]]
            elif self.basis == "coulomb" and isinstance(self.short_range, SphericalStep):
                res[:] = self._coulomb_step_line(p, flat)
                near = (np.abs(flat - 1) <= _NEAR_DIAGONAL) & (flat != 1.0)
                if near.any():
                    res[near] = [self(p, p * zz) for zz in flat[near]]
                res[flat == 1.0] = diag
                res[flat <= self.k_floor] = 0.0
            else:
                for i, zz in enumerate(flat):
                    if zz <= self.k_floor:
                        res[i] = 0.0
                    elif zz == 1.0:
                        res[i] = diag
                    else:
                        res[i] = self(p, p * zz)
            return out

        return kern

    def _coulomb_step_line(self, p, z):
        # Wronskian form of the step overlap, batched over all ratios
        R = self.short_range.radius
        zz = self.potential.coulomb.charge_product
        k2 = p * np.maximum(z, self.k_floor)
        F1, dF1 = specfun.regular_coulomb(self.l, coulomb_eta(zz, self.mass, p), p * R)
        F2, dF2 = specfun.regular_coulomb(self.l, coulomb_eta(zz, self.mass, k2), k2 * R)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2.0 / R * (k2 * F1 * dF2 - p * dF1 * F2) / (p * p - k2 * k2)
