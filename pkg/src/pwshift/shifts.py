"""First- and second-order phase shifts, and the exact spherical-step oracle.

Perturbative shifts only need a :class:`~pwshift.potential.MatrixElementKernel`
and the dimensionless coupling ``eta``:

    delta1 = -eta * v(p, p)
    delta2 = eta**2 * (Delta_- + Delta_+ + Delta_inf)

In the Coulomb basis ``eta`` is ``eta+`` of the short-range part and the kernel
is the Coulomb-distorted one; the formulas are otherwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import specfun
from .errors import DomainError, NumericError
from .potential import (
    Composite,
    MatrixElementKernel,
    ScatteringScenario,
    ScenarioParams,
    SphericalStep,
)
from .pvquad import DEFAULT_SPEC, QuadratureSpec, SecondOrderTerms, second_order_terms

L_MAX_CAP = 25
L_MAX_THRESHOLD = 1e-4


def first_order_shift(kernel: MatrixElementKernel, p: float, eta: float) -> float:
    """``-eta * v_l(p, p)``."""
    if p <= 0:
        raise DomainError("momentum must be positive")
    if eta == 0:
        return 0.0
    return -eta * float(kernel(p, p))


def second_order_shift(kernel: MatrixElementKernel, p: float, eta: float, spec=DEFAULT_SPEC):
    """``eta**2 * (Delta_- + Delta_+ + Delta_inf)`` and its components."""
    if p <= 0:
        raise DomainError("momentum must be positive")
    if eta == 0:
        return 0.0, SecondOrderTerms(0.0, 0.0, 0.0, 0.0)
    radius = getattr(kernel.short_range, "support", 0.0)
    terms = second_order_terms(kernel.line(p), spec, wavenumber=p * radius)
    return eta * eta * terms.total, terms


# ---------------------------------------------------------------------------
# exact spherical step
# ---------------------------------------------------------------------------


def exact_step_phase(l: int, kappa: float, eta: float) -> float:
    """Exact phase shift of a spherical step in dimensionless form.

    ``kappa = pR`` and ``eta = lam / (p/m)``; the interior wavenumber obeys
    ``kappa'^2 = kappa^2 - 2 eta kappa``.  Returns ``Arg(A - iB)`` in
    ``(-pi, pi]``; the physical shift is only defined modulo ``pi``.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    if eta == 0:
        return 0.0
    jk = specfun.spherical_bessel_j(l, kappa)
    jdk = specfun.spherical_bessel_jd(l, kappa)
    nk = specfun.spherical_bessel_n(l, kappa)
    ndk = specfun.spherical_bessel_nd(l, kappa)
    kp2 = kappa * kappa - 2.0 * eta * kappa
    if kp2 > 0:
        kp = math.sqrt(kp2)
        u = specfun.spherical_bessel_j(l, kp)
        du = kp * specfun.spherical_bessel_jd(l, kp)
    elif kp2 < 0:
        # kappa' = i t: j_l(i t) = i^l i_l(t); the common i^l drops out of B/A
        t = math.sqrt(-kp2)
        il, dil = specfun.scaled_modified_bessel_i(l, t)
        u, du = il, t * dil
    else:
        # kappa' -> 0: only the ratio kappa' j_l'(kappa') / j_l(kappa') = l survives
        u, du = 1.0, float(l)
    A = kappa * kappa * u * ndk - kappa * du * nk
    B = kappa * du * jk - kappa * kappa * u * jdk
    return math.atan2(-B, A)


def exact_step_shift(well: SphericalStep, l: int, p: float, mass: float) -> float:
    """Exact phase shift of ``well`` at momentum ``p`` for a particle of ``mass``.

    Principal value of ``Arg(A - iB)`` in ``(-pi, pi]``.
    """
    if p <= 0 or mass <= 0:
        raise DomainError("p and mass must be positive")
    kappa = p * well.radius
    eta = well.lam * mass / p
    return exact_step_phase(l, kappa, eta)


def exact_step_phase_continued(l: int, kappa: float, eta: float, steps: Optional[int] = None) -> float:
    """:func:`exact_step_phase` made continuous in the coupling, starting at 0.

    The phase is sampled along ``eta' in [0, eta]`` and unwrapped with period
    ``pi``, so the result is the branch that perturbation theory tracks.
    """
    if eta == 0:
        return 0.0
    if steps is None:
        steps = 64 + int(32 * (abs(eta) + math.sqrt(abs(eta) * kappa)))
    path = np.linspace(0.0, eta, steps + 1)
    vals = np.array([exact_step_phase(l, kappa, e) for e in path])
    return float(np.unwrap(vals, period=math.pi)[-1])


def relative_error(approx: float, exact: float) -> float:
    """``|(approx - exact) / exact|``."""
    if exact == 0:
        raise DomainError("relative error undefined for exact == 0")
    return abs((approx - exact) / exact)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseShiftRecord:
    l: int
    delta1: float
    delta2: float
    sigma: float
    oracle_exact: Optional[float] = None
    terms: Optional[SecondOrderTerms] = None

    @property
    def total(self):
        return self.sigma + self.delta1 + self.delta2

    @property
    def nuclear(self):
        return self.delta1 + self.delta2


@dataclass(frozen=True)
class PhaseShiftTable:
    """Per-``l`` shifts for one scenario.

    ``basis`` is ``"coulomb"`` when the scenario has a Coulomb part (shifts
    are then the short-range corrections on top of ``sigma``) and ``"free"``
    otherwise, with ``sigma = 0``.
    """

    scenario: ScenarioParams
    basis: str
    records: List[PhaseShiftRecord] = field(default_factory=list)

    @property
    def l_max(self):
        return len(self.records) - 1

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def has_exact(self):
        return all(r.oracle_exact is not None for r in self.records)


def _default_l_max(first_order):
    for l in range(L_MAX_CAP + 1):
        if abs(first_order(l)) < L_MAX_THRESHOLD:
            return l
    return L_MAX_CAP


def phase_shift_table(
    scenario: ScatteringScenario,
    l_max: Optional[int] = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
    exact: bool = True,
) -> PhaseShiftTable:
    """Assemble ``sigma_l``, ``delta1``, ``delta2`` and the exact step column.

    With ``l_max=None`` the table stops at the first ``l`` whose first-order
    shift is below 1e-4 in magnitude, capped at 25.  The exact column is the
    step alone (no Coulomb), continued in the coupling from zero.
    """
    if l_max is not None and l_max < 0:
        raise DomainError("l_max must be nonnegative")
    params = scenario.params
    pot = scenario.potential
    basis = "coulomb" if isinstance(pot, Composite) else "free"
    p, eta = params.p, params.eta_plus

    kernels = {}

    def kernel(l):
        if l not in kernels:
            kernels[l] = MatrixElementKernel(basis, pot, l, mass=params.mu, quad=spec)
        return kernels[l]

    first = {}

    def d1(l):
        if l not in first:
            first[l] = first_order_shift(kernel(l), p, eta)
        return first[l]

    if l_max is None:
        l_max = _default_l_max(d1)

    records = []
    for l in range(l_max + 1):
        try:
            delta1 = d1(l)
            delta2, terms = second_order_shift(kernel(l), p, eta, spec)
            sigma = specfun.coulomb_sigma(l, params.eta_c) if basis == "coulomb" else 0.0
            oracle = None
            if exact and isinstance(scenario.step, SphericalStep):
                oracle = exact_step_phase_continued(l, params.kappa, eta)
        except NumericError as exc:
            raise type(exc)(f"partial wave l={l}: {exc}") from exc
        records.append(PhaseShiftRecord(l, delta1, delta2, sigma, oracle, terms))
    return PhaseShiftTable(params, basis, records)
