"""Gauss-Legendre panel quadrature, principal-value rules and the second-order
integrals Delta_-, Delta_+, Delta_inf.

Principal-value integrals over ``[-1, 1]`` are evaluated by folding the
integrand onto ``[0, 1]``: the odd part, which carries any simple pole at the
origin, integrates to zero, and the even part is regular.  Gauss-Legendre
nodes never sit on ``x = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError

GL_ORDER = 64


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for panel quadrature."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_panels: int = 4096
    tail_zmax: float = 1e6

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_panels < 4:
            raise ValueError("max_panels must be at least 4")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class SecondOrderTerms:
    """Components of the second-order phase shift ``eta**2 * (dm + dp + dinf)``."""

    delta_minus: float
    delta_plus: float
    delta_inf: float
    tail_estimate: float

    @property
    def total(self):
        return self.delta_minus + self.delta_plus + self.delta_inf


@lru_cache(maxsize=None)
def _gl_rule(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_nodes(a, b, panels, order=GL_ORDER):
    """Nodes and weights of a composite Gauss-Legendre rule with equal panels."""
    x, w = _gl_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate(f, a, b, spec=DEFAULT_SPEC, min_panels=1, order=GL_ORDER):
    """Integrate a vectorised ``f`` over ``[a, b]`` with dyadic panel refinement.

    Returns ``(value, error_estimate)``; the estimate is the change between the
    last two refinement levels.
    """
    panels = max(1, int(min_panels))
    nodes, weights = panel_nodes(a, b, panels, order)
    prev = float(np.dot(weights, f(nodes)))
    while True:
        panels *= 2
        if panels > spec.max_panels:
            raise ConvergenceError(
                f"panel refinement on [{a:g}, {b:g}] stalled at {panels // 2} panels"
            )
        nodes, weights = panel_nodes(a, b, panels, order)
        cur = float(np.dot(weights, f(nodes)))
        err = abs(cur - prev)
        if err <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return cur, err
        prev = cur


def principal_value_symmetric(f, spec=DEFAULT_SPEC, min_panels=1):
    """``P int_{-1}^{1} f(x) dx`` for ``f`` with at most a simple pole at 0."""
    return integrate(lambda x: f(x) + f(-x), 0.0, 1.0, spec, min_panels)[0]


def principal_value_epsilon(f, eps, spec=DEFAULT_SPEC):
    """Symmetric excision ``int_{-1}^{-eps} + int_{eps}^{1}`` at a finite ``eps``.

    Retained as an independent check of :func:`principal_value_symmetric`.
    """
    left = integrate(f, -1.0, -eps, spec, min_panels=8)[0]
    right = integrate(f, eps, 1.0, spec, min_panels=8)[0]
    return left + right


def _fold_panels(wavenumber):
    # 64 nodes comfortably resolve ~8 half-periods
    return max(1, math.ceil(wavenumber / (8 * math.pi)))


def delta_minus(kernel, spec=DEFAULT_SPEC, wavenumber=0.0):
    """``(2/pi) int_{-1}^{1} [K(1+x)^2 - K(1-x)^2] / (x (4 - x^2)) dx``.

    ``kernel(z)`` is the matrix element ``v_l(p, p z)`` as a function of the
    momentum ratio ``z``.  The integrand is even, so it is folded onto ``[0, 1]``.
    """

    def g(x):
        return (kernel(1 + x) ** 2 - kernel(1 - x) ** 2) / (x * (4 - x * x))

    val, _ = integrate(g, 0.0, 1.0, spec, _fold_panels(wavenumber))
    return 4.0 / math.pi * val


def delta_plus(kernel, spec=DEFAULT_SPEC, wavenumber=0.0):
    """``-(1/pi) int_{-1}^{1} [K(1+x)^2 + K(1-x)^2] / (4 - x^2) dx``."""

    def g(x):
        return (kernel(1 + x) ** 2 + kernel(1 - x) ** 2) / (4 - x * x)

    val, _ = integrate(g, 0.0, 1.0, spec, _fold_panels(wavenumber))
    return -2.0 / math.pi * val


def delta_infinity(kernel, spec=DEFAULT_SPEC, wavenumber=0.0):
    """``(2/pi) int_2^inf K(z)^2 / (z^2 - 1) dz`` with a certified tail bound.

    The range is covered by octaves ``[2,4], [4,8], ...``.  After each octave
    the remainder is bounded by fitting ``C / z^3`` to the octave's absolute
    integral, giving ``tail = |I_octave| / 3``; integration stops once that
    bound is within tolerance.  Returns ``(value, tail_estimate)``.
    """

    def g(z):
        return kernel(z) ** 2 / (z * z - 1)

    total = 0.0
    lo = 2.0
    while True:
        hi = 2.0 * lo
        panels = max(1, math.ceil(wavenumber * (hi - lo) / (8 * math.pi)))
        val, _ = integrate(g, lo, hi, spec, panels)
        absval, _ = integrate(lambda z: np.abs(g(z)), lo, hi, spec, panels)
        total += val
        tail = absval / 3.0
        if tail <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            break
        if hi >= spec.tail_zmax:
            raise ConvergenceError(
                f"Delta_inf tail not certified by z = {hi:g} (bound {tail:.3e})"
            )
        lo = hi
    return 2.0 / math.pi * total, 2.0 / math.pi * tail


def second_order_terms(kernel, spec=DEFAULT_SPEC, wavenumber=0.0):
    """All three second-order integrals for one kernel line ``K(z) = v(p, p z)``."""
    dm = delta_minus(kernel, spec, wavenumber)
    dp = delta_plus(kernel, spec, wavenumber)
    di, tail = delta_infinity(kernel, spec, wavenumber)
    return SecondOrderTerms(dm, dp, di, tail)


def sinc_delta_sequence(kappa, f_even, spec=DEFAULT_SPEC):
    """``int_{-1}^{1} sin(kappa x)/x f(x) dx`` for even ``f``; tends to ``pi f(0)``."""
    if kappa == 0:
        return 0.0

    def g(x):
        return 2.0 * kappa * np.sinc(kappa * x / math.pi) * f_even(x)

    return integrate(g, 0.0, 1.0, spec, _fold_panels(abs(kappa)))[0]


def asymptotic_pv_integral(f, p, r, l, spec=DEFAULT_SPEC, trig="sin", kmax_factor=40.0):
    """``P int_0^inf sqrt(2/pi) trig(k r - l pi/2) f(k) / (k^2 - p^2) dk``.

    ``[0, 2p]`` is mapped to ``k = p(1+x)`` and handled by the symmetric
    principal-value rule; ``[2p, kmax_factor * p]`` is regular.  ``f`` must
    decay so that the truncated remainder is negligible.
    """
    fn = np.sin if trig == "sin" else np.cos
    c = math.sqrt(2.0 / math.pi)

    def inner(x):
        k = p * (1 + x)
        return c * fn(k * r - l * math.pi / 2) * f(k) / (p * x * (2 + x))

    panels = _fold_panels(p * r)
    near = integrate(lambda x: inner(x) + inner(-x), 0.0, 1.0, spec, panels)[0]

    def outer(k):
        return c * fn(k * r - l * math.pi / 2) * f(k) / (k * k - p * p)

    hi = kmax_factor * p
    far = integrate(outer, 2 * p, hi, spec, _fold_panels(r * (hi - 2 * p)))[0]
    return near + far
