"""Differential cross sections from phase-shift tables.

The Coulomb partial-wave sum does not converge for plane waves.  A Gaussian
wavepacket of relative momentum width ``epsilon`` damps partial wave ``l`` by
``exp(-2 epsilon^2 (l + 1/2)^2)`` and keeps the forward cross section finite.
Nuclear phases are added through ``exp(2i delta) = 1 + 2i exp(i delta) sin(delta)``
so the short-range part is summed separately from the (much larger) Coulomb
part and the two amplitudes are combined before squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import specfun
from .errors import ConvergenceError, DomainError
from .potential import HBARC
from .shifts import PhaseShiftTable

# 1 MeV^-2 = (hbar c)^2 fm^2 = 389.379 b; the customary rounded factor is kept
BARN_PER_INV_MEV2 = 389.0
BARN_PER_INV_MEV2_EXACT = HBARC**2 / 100.0
TRUNCATION_TOL = 1e-12


@dataclass(frozen=True)
class WavepacketSpec:
    """Relative momentum width ``epsilon = sigma_p / p`` of the incident packet."""

    epsilon: float = 0.001

    def __post_init__(self):
        if not (0 < self.epsilon < 0.5):
            raise DomainError("wavepacket epsilon must lie in (0, 0.5)")

    @property
    def l_cutoff(self):
        return math.ceil(4.0 / self.epsilon)

    def damping(self, l):
        l = np.asarray(l, dtype=float)
        return np.exp(-2.0 * self.epsilon**2 * (l + 0.5) ** 2)


@dataclass(frozen=True)
class CrossSectionCurve:
    """``dsigma/dOmega`` sampled on ``theta`` (radians)."""

    theta: np.ndarray
    dsigma_natural: np.ndarray  # MeV^-2 / sr
    dsigma_barns: np.ndarray  # b / sr
    l_max_used: int
    truncation_residual: float = 0.0


def to_barn(dsigma_natural):
    """Convert ``MeV^-2`` to barn."""
    return np.asarray(dsigma_natural, dtype=float) * BARN_PER_INV_MEV2


def default_theta_grid(n=600, theta_min=1e-4):
    """Geometric grid on ``[theta_min, pi]``; dense near the forward direction."""
    return np.geomspace(theta_min, math.pi, n)


def _curve(theta, natural, l_max, residual=0.0):
    natural = np.asarray(natural, dtype=float)
    return CrossSectionCurve(np.asarray(theta, dtype=float), natural, to_barn(natural), l_max, residual)


def _check_theta(theta, allow_zero=True):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    lo_ok = theta >= 0 if allow_zero else theta > 0
    if not np.all(lo_ok & (theta <= math.pi)):
        raise DomainError("scattering angles must lie in (0, pi]" if not allow_zero else "angles must lie in [0, pi]")
    return theta


def legendre_p(l, x):
    """Legendre polynomial ``P_l(x)`` by upward recurrence."""
    if int(l) != l or l < 0:
        raise DomainError("l must be a nonnegative integer")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1):
        raise DomainError("legendre_p requires |x| <= 1")
    pm1, pl = np.ones_like(xa), xa.copy()
    if l == 0:
        pl = pm1
    for n in range(1, int(l)):
        pm1, pl = pl, ((2 * n + 1) * xa * pl - n * pm1) / (n + 1)
    return float(pl) if np.ndim(x) == 0 else pl


class _Compensated:
    """Neumaier summation, elementwise over arrays."""

    def __init__(self, shape):
        self.s = np.zeros(shape)
        self.c = np.zeros(shape)

    def add(self, x):
        t = self.s + x
        self.c += np.where(np.abs(self.s) >= np.abs(x), (self.s - t) + x, (x - t) + self.s)
        self.s = t

    @property
    def value(self):
        return self.s + self.c


def _coulomb_sigmas(eta_c, l_max):
    # sigma_{l+1} - sigma_l = atan2(eta, l + 1), summed from sigma_0
    steps = np.arctan2(eta_c, np.arange(1, l_max + 1, dtype=float))
    return specfun.coulomb_sigma(0, eta_c) + np.concatenate(([0.0], np.cumsum(steps)))


def _wavepacket_amplitudes(theta, sigmas, nuclear, damping):
    """Coulomb and nuclear partial sums, ``sum_l (2l+1) g_l e^{2i sigma_l} [1 | 2i e^{i d} sin d] P_l``."""
    x = np.cos(theta)
    n_nuc = len(nuclear)
    c_re, c_im = _Compensated(x.shape), _Compensated(x.shape)
    n_re, n_im = _Compensated(x.shape), _Compensated(x.shape)
    pm1 = np.ones_like(x)
    pl = np.ones_like(x)
    for l in range(len(sigmas)):
        if l == 1:
            pl = x.copy()
        elif l > 1:
            pm1, pl = pl, ((2 * l - 1) * x * pl - (l - 1) * pm1) / l
        w = (2 * l + 1) * damping[l] * pl
        ph = 2.0 * sigmas[l]
        c_re.add(w * math.cos(ph))
        c_im.add(w * math.sin(ph))
        if l < n_nuc and nuclear[l] != 0.0:
            d = nuclear[l]
            corr = 2j * np.exp(1j * (ph + d)) * math.sin(d)
            n_re.add(w * corr.real)
            n_im.add(w * corr.imag)
    coul = c_re.value + 1j * c_im.value
    nuc = n_re.value + 1j * n_im.value
    return coul, nuc


def _resolve_l_max(wp, l_max):
    if l_max is None:
        l_max = wp.l_cutoff
    residual = float(np.exp(-2.0 * wp.epsilon**2 * (l_max + 0.5) ** 2))
    if residual > TRUNCATION_TOL:
        raise ConvergenceError(
            f"wavepacket sum truncated at l_max={l_max} leaves relative tail {residual:.2e}"
        )
    return l_max, residual


def wavepacket_cross_section(p, eta_c, nuclear_shifts, wp=WavepacketSpec(), theta=None, l_max=None):
    """Wavepacket-regularised ``dsigma/dOmega`` for Coulomb phases ``sigma_l(eta_c)``
    plus short-range shifts ``nuclear_shifts[l]`` (zero beyond their length)."""
    if p <= 0:
        raise DomainError("momentum must be positive")
    theta = default_theta_grid() if theta is None else _check_theta(theta)
    l_max, residual = _resolve_l_max(wp, l_max)
    nuclear = np.asarray(nuclear_shifts, dtype=float)
    if not np.all(np.isfinite(nuclear)):
        raise DomainError("nuclear phase shifts must be finite")
    ls = np.arange(l_max + 1)
    sigmas = _coulomb_sigmas(eta_c, l_max) if eta_c != 0 else np.zeros(l_max + 1)
    coul, nuc = _wavepacket_amplitudes(theta, sigmas, nuclear[: l_max + 1], wp.damping(ls))
    amp = coul + nuc
    natural = (amp.real**2 + amp.imag**2) / (4.0 * p * p)
    return _curve(theta, natural, l_max, residual)


def composite_cross_section(table: PhaseShiftTable, wp=WavepacketSpec(), theta=None, l_max=None, shifts="perturbative"):
    """Coulomb plus short-range cross section from a phase-shift table.

    ``shifts="perturbative"`` uses ``delta1 + delta2``; ``shifts="exact"`` uses
    the exact step column.  A free-basis table has no Coulomb phases.
    """
    if shifts == "perturbative":
        nuclear = table.column("nuclear")
    elif shifts == "exact":
        if not table.has_exact:
            raise DomainError("table carries no exact phase shifts")
        nuclear = table.column("oracle_exact")
    else:
        raise ValueError(f"unknown shift source {shifts!r}")
    eta_c = table.scenario.eta_c if table.basis == "coulomb" else 0.0
    return wavepacket_cross_section(table.scenario.p, eta_c, nuclear, wp, theta, l_max)


def coulomb_only_cross_section(p, eta_c, wp=WavepacketSpec(), theta=None, l_max=None):
    """Wavepacket cross section of the pure Coulomb problem."""
    return wavepacket_cross_section(p, eta_c, [], wp, theta, l_max)


def nuclear_only_cross_section(exact_shifts, p, l_max=None, theta=None):
    """``(1/p^2) |sum_l (2l+1) e^{i delta_l} sin(delta_l) P_l(cos theta)|^2``.

    ``exact_shifts`` is a :class:`PhaseShiftTable` (its exact column is used)
    or a plain sequence of phase shifts.  The narrow forward peak is not
    included; see :func:`forward_peak`.
    """
    if p <= 0:
        raise DomainError("momentum must be positive")
    if isinstance(exact_shifts, PhaseShiftTable):
        if not exact_shifts.has_exact:
            raise DomainError("table carries no exact phase shifts")
        deltas = exact_shifts.column("oracle_exact")
    else:
        deltas = np.asarray(exact_shifts, dtype=float)
    if l_max is None:
        l_max = len(deltas) - 1
    if l_max >= len(deltas):
        raise DomainError(f"shifts available only up to l={len(deltas) - 1}")
    theta = default_theta_grid() if theta is None else _check_theta(theta)
    x = np.cos(theta)
    re, im = _Compensated(x.shape), _Compensated(x.shape)
    pm1, pl = np.ones_like(x), np.ones_like(x)
    for l in range(l_max + 1):
        if l == 1:
            pl = x.copy()
        elif l > 1:
            pm1, pl = pl, ((2 * l - 1) * x * pl - (l - 1) * pm1) / l
        d = deltas[l]
        w = (2 * l + 1) * math.sin(d) * pl
        re.add(w * math.cos(d))
        im.add(w * math.sin(d))
    amp2 = re.value**2 + im.value**2
    return _curve(theta, amp2 / (p * p), l_max)


def forward_peak(p, wp, theta):
    """Narrow forward peak ``exp(-theta^2 / 4 eps^2) / (16 p^2 eps^4)`` in MeV^-2."""
    if p <= 0:
        raise DomainError("momentum must be positive")
    eps = wp.epsilon
    theta = np.asarray(theta, dtype=float)
    val = np.exp(-(theta**2) / (4 * eps * eps)) / (16.0 * p * p * eps**4)
    return float(val) if np.ndim(theta) == 0 else val


def rutherford_reference(p, eta_c, theta=None):
    """Rutherford ``eta_c^2 / (4 p^2 sin^4(theta/2))``; undefined at ``theta = 0``."""
    if p <= 0:
        raise DomainError("momentum must be positive")
    theta = default_theta_grid() if theta is None else np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(theta <= 0) or np.any(theta > math.pi):
        raise DomainError("the Rutherford cross section diverges at theta = 0; use 0 < theta <= pi")
    natural = eta_c**2 / (4.0 * np.sin(theta / 2) ** 4) / (p * p)
    return _curve(theta, natural, 0)
