"""Radial basis functions and complex-gamma machinery.

Spherical Bessel/Neumann functions, the regular Coulomb wavefunction and its
normalisation, the Coulomb phase ``sigma_l = arg Gamma(l + 1 + i eta)`` and the
digamma function needed by the stationary-phase diagnostic.

All functions are pure.  Radial arguments may be scalars or numpy arrays;
angular momenta and Coulomb parameters are scalars.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, RangeError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

_TINY = 1e-300
_RESCALE = 1e200

# Bernoulli numbers B_2 ... B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_STIRLING_SHIFT = 8.0


def _check_l(l):
    if int(l) != l or l < 0:
        raise DomainError(f"angular momentum must be a nonnegative integer, got {l!r}")
    return int(l)


# ---------------------------------------------------------------------------
# spherical Bessel functions
# ---------------------------------------------------------------------------


def _sph_j_table(lmax, z):
    """Return ``j_0 .. j_lmax`` at every point of ``z`` (shape ``(lmax+1,) + z.shape``).

    Upward recurrence above the turning point, Miller's downward recurrence
    below it.
    """
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.reshape(-1)
    out = np.zeros((lmax + 1,) + z.shape)
    zero = z == 0.0
    out[0][zero] = 1.0

    up = z >= max(lmax, 1)
    if up.any():
        zu = z[up]
        s, c = np.sin(zu), np.cos(zu)
        jm1 = s / zu
        out[0][up] = jm1
        if lmax >= 1:
            j = (s / zu - c) / zu
            out[1][up] = j
            for n in range(1, lmax):
                jm1, j = j, (2 * n + 1) / zu * j - jm1
                out[n + 1][up] = j

    down = ~(up | zero)
    if down.any():
        zd = z[down]
        start = lmax + 25 + int(10 * math.sqrt(lmax + 1))
        tab = np.zeros((lmax + 1, zd.size))
        fp1 = np.zeros_like(zd)
        f = np.full_like(zd, 1e-30)
        for n in range(start, 0, -1):
            fm1 = (2 * n + 1) / zd * f - fp1
            fp1, f = f, fm1
            if n - 1 <= lmax:
                tab[n - 1] = f
            big = np.abs(f) > _RESCALE
            if big.any():
                scale = np.where(big, 1.0 / _RESCALE, 1.0)
                f = f * scale
                fp1 = fp1 * scale
                tab *= scale
        # normalise against whichever of j_0, j_1 is better conditioned
        j0 = np.sin(zd) / zd
        use_j0 = (np.abs(j0) > 0.1) | (lmax == 0)
        if lmax >= 1:
            # fp1 holds the Miller j_1 after the loop
            j1_true = np.where(
                zd < 1e-3,
                zd / 3.0 - zd**3 / 30.0 + zd**5 / 840.0,
                (np.sin(zd) / zd - np.cos(zd)) / zd,
            )
            norm = np.where(use_j0, j0 / tab[0], j1_true / np.where(use_j0, 1.0, fp1))
        else:
            norm = j0 / tab[0]
        out[:, down] = tab * norm
    return out.reshape((lmax + 1,) + shape)


def _sph_n_table(lmax, z):
    z = np.asarray(z, dtype=float)
    out = np.empty((lmax + 1,) + z.shape)
    s, c = np.sin(z), np.cos(z)
    nm1 = -c / z
    out[0] = nm1
    if lmax >= 1:
        n = -c / z**2 - s / z
        out[1] = n
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(1, lmax):
                nm1, n = n, (2 * k + 1) / z * n - nm1
                out[k + 1] = n
    return out


def spherical_bessel_j(l, z):
    """Spherical Bessel function of the first kind ``j_l(z)`` for ``z >= 0``."""
    l = _check_l(l)
    za = np.asarray(z, dtype=float)
    if np.any(za < 0):
        raise DomainError("spherical_bessel_j requires z >= 0")
    val = _sph_j_table(l, za)[l]
    return float(val) if np.ndim(z) == 0 else val


def spherical_bessel_n(l, z):
    """Spherical Neumann function ``n_l(z)`` for ``z > 0`` (``n_0 = -cos z / z``)."""
    l = _check_l(l)
    za = np.asarray(z, dtype=float)
    if np.any(za <= 0):
        raise DomainError("spherical_bessel_n diverges at z = 0 and is defined here for z > 0")
    val = _sph_n_table(l, za)[l]
    return float(val) if np.ndim(z) == 0 else val


def spherical_bessel_j_lm1(l, z):
    """``j_{l-1}(z)``, with the convention ``j_{-1}(z) = -n_0(z) = cos z / z``."""
    if l == 0:
        return -spherical_bessel_n(0, z)
    return spherical_bessel_j(l - 1, z)


def spherical_bessel_jd(l, z):
    """Derivative ``j_l'(z)`` from ``j_l' = j_{l-1} - (l+1) j_l / z``."""
    l = _check_l(l)
    za = np.asarray(z, dtype=float)
    tab = _sph_j_table(l + 1, za)
    if l == 0:
        val = -tab[1]
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            val = tab[l - 1] - (l + 1) * tab[l] / za
        val = np.where(za == 0.0, 1.0 / 3.0 if l == 1 else 0.0, val)
    return float(val) if np.ndim(z) == 0 else val


def spherical_bessel_nd(l, z):
    """Derivative ``n_l'(z)`` for ``z > 0``."""
    l = _check_l(l)
    za = np.asarray(z, dtype=float)
    if np.any(za <= 0):
        raise DomainError("spherical_bessel_nd requires z > 0")
    tab = _sph_n_table(l + 1, za)
    val = -tab[1] if l == 0 else tab[l - 1] - (l + 1) * tab[l] / za
    return float(val) if np.ndim(z) == 0 else val


def scaled_modified_bessel_i(l, t):
    """Return ``exp(-t) i_l(t)`` and ``exp(-t) i_l'(t)`` for scalar ``t > 0``.

    ``i_l`` is the modified spherical Bessel function of the first kind,
    ``j_l(i t) = i**l * i_l(t)``.  Downward recurrence is stable for all ``l``.
    """
    l = _check_l(l)
    t = float(t)
    if t <= 0:
        raise DomainError("scaled_modified_bessel_i requires t > 0")
    start = l + 30 + int(10 * math.sqrt(l + 1 + t))
    vals = [0.0] * (l + 2)
    fp1, f = 0.0, 1e-30
    for n in range(start, 0, -1):
        fm1 = fp1 + (2 * n + 1) / t * f
        fp1, f = f, fm1
        if n - 1 <= l + 1:
            vals[n - 1] = f
        if abs(f) > _RESCALE:
            f /= _RESCALE
            fp1 /= _RESCALE
            vals = [v / _RESCALE for v in vals]
    i0 = -math.expm1(-2.0 * t) / (2.0 * t)
    norm = i0 / vals[0]
    il = vals[l] * norm
    if l == 0:
        dil = vals[1] * norm
    else:
        dil = vals[l - 1] * norm - (l + 1) / t * il
    return il, dil


# ---------------------------------------------------------------------------
# complex gamma / digamma
# ---------------------------------------------------------------------------


def _check_pole(z):
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.floor(z.real))
    if np.any(bad):
        raise DomainError("Gamma has a pole at a nonpositive integer")


def log_gamma_complex(z):
    """Log-gamma on the branch analytic off the negative real axis.

    The argument is shifted with ``Gamma(z+1) = z Gamma(z)`` until
    ``Re z >= 8`` and the Stirling series is summed there.  The shift
    subtracts a sum of principal logarithms, so the imaginary part is
    continuous along any line ``Re z = const > 0``.  Accepts arrays.
    """
    scalar = np.ndim(z) == 0
    z = np.array(z, dtype=complex, ndmin=1)
    _check_pole(z)
    shift = np.zeros_like(z)
    low = z.real < _STIRLING_SHIFT
    while low.any():
        shift[low] += np.log(z[low])
        z = np.where(low, z + 1.0, z)
        low = z.real < _STIRLING_SHIFT
    zi = 1.0 / z
    zi2 = zi * zi
    series = np.zeros_like(z)
    term = zi
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k * (2 * k - 1)) * term
        term = term * zi2
    out = (z - 0.5) * np.log(z) - z + 0.5 * math.log(2 * math.pi) + series - shift
    return complex(out[0]) if scalar else out


def digamma_complex(z):
    """Digamma ``psi(z) = Gamma'(z)/Gamma(z)`` via recurrence plus asymptotic series."""
    z = complex(z)
    _check_pole(np.array([z]))
    acc = 0j
    while z.real < _STIRLING_SHIFT:
        acc -= 1.0 / z
        z += 1.0
    zi2 = 1.0 / (z * z)
    series = 0j
    term = zi2
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k) * term
        term *= zi2
    return acc + np.log(z) - 0.5 / z - series


def coulomb_sigma(l, eta_c):
    """Coulomb phase shift ``sigma_l(eta) = arg Gamma(l + 1 + i eta)``.

    Returned as the continuous branch (zero at ``eta = 0``), so that
    ``sigma_{l+1} - sigma_l = atan2(eta, l + 1)`` holds exactly.
    """
    l = _check_l(l)
    if np.ndim(eta_c) == 0:
        if eta_c == 0:
            return 0.0
        return float(log_gamma_complex(complex(l + 1, eta_c)).imag)
    eta = np.asarray(eta_c, dtype=float)
    return log_gamma_complex(l + 1 + 1j * eta).imag


# ---------------------------------------------------------------------------
# Coulomb normalisation and regular wavefunction
# ---------------------------------------------------------------------------


def _log_c0_squared(eta):
    eta = np.asarray(eta, dtype=float)
    x = 2 * math.pi * eta
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        # x/(e^x - 1) = |x| e^{-x}/(1 - e^{-|x|}) for x > 0, |x|/(1 - e^{-|x|}) for x < 0
        general = np.log(ax) - np.maximum(x, 0.0) - np.log(-np.expm1(-ax))
        # removable singularity: x/(e^x - 1) = 1 - x/2 + x^2/12 + O(x^4)
        taylor = np.log1p(-x / 2 + x * x / 12)
    return np.where(np.abs(eta) < 1e-6, taylor, general)


def _log_c(l, eta):
    """``log C_l(eta)`` without overflow guard; ``C_l > 0`` always."""
    eta = np.asarray(eta, dtype=float)
    val = 0.5 * _log_c0_squared(eta)
    for s in range(1, l + 1):
        val = val + 0.5 * np.log1p((eta / s) ** 2) - math.log(2 * s + 1)
    return val


def coulomb_c_coefficient(l, eta_c):
    """Normalisation ``c_l(eta)`` of the regular Coulomb function.

    ``c_0 = sqrt(2 pi eta / (exp(2 pi eta) - 1))`` and
    ``c_l = c_0 / (2l+1)!! * prod_{s=1..l} sqrt(1 + eta^2/s^2)``.
    """
    l = _check_l(l)
    if eta_c < -30:
        raise RangeError(
            f"coulomb_c_coefficient: strongly attractive eta = {eta_c:g} < -30 is outside "
            "the supported range"
        )
    return float(np.exp(_log_c(l, eta_c)))


def _coulomb_series(l, eta, rho):
    """Power series of ``F_l`` and ``F_l'`` about the origin (elementwise ``eta``)."""
    coeffs = [np.ones_like(rho), eta / (l + 1)]
    peak = np.maximum(1.0, np.abs(coeffs[1]) * rho)
    mags = [np.ones_like(rho), np.abs(coeffs[1]) * rho]
    n = 1
    while True:
        n += 1
        a = (2 * eta * coeffs[-1] - coeffs[-2]) / (n * (n + 2 * l + 1))
        coeffs.append(a)
        mags.append(np.abs(a) * rho**n)
        peak = np.maximum(peak, mags[-1])
        if n > 4 and np.all((mags[-1] < 1e-18 * peak) & (mags[-2] < 1e-18 * peak)):
            break
        if n > 3000:
            raise RangeError("Coulomb power series did not terminate")
    poly = np.zeros_like(rho)
    dpoly = np.zeros_like(rho)
    for k in range(len(coeffs) - 1, -1, -1):
        poly = poly * rho + coeffs[k]
        dpoly = dpoly * rho + (l + 1 + k) * coeffs[k]
    logc = _log_c(l, eta)
    with np.errstate(divide="ignore", over="ignore"):
        logr = np.log(rho)
        F = np.exp(logc + (l + 1) * logr) * poly
        dF = (np.exp(logc + l * logr) if l > 0 else np.exp(logc)) * dpoly
    return F, dF


def _coulomb_asymptotic(l, eta, rho):
    """Asymptotic expansion of ``F_l`` and ``F_l'`` for large ``rho``.

    Returns ``(F, dF, ok)`` where ``ok`` flags points whose smallest series
    term fell below double precision.
    """
    f = np.ones_like(rho)
    g = np.zeros_like(rho)
    fs = np.zeros_like(rho)
    gs = 1.0 - eta / rho
    fk, gk, fsk, gsk = f.copy(), g.copy(), fs.copy(), gs.copy()
    prev = np.abs(fk) + np.abs(gk) + np.abs(fsk) + np.abs(gsk)
    active = np.ones(rho.shape, dtype=bool)
    ok = np.zeros(rho.shape, dtype=bool)
    ll = l * (l + 1) + eta * eta
    for k in range(80):
        a = (2 * k + 1) * eta / ((2 * k + 2) * rho)
        b = (ll - k * (k + 1)) / ((2 * k + 2) * rho)
        fk1 = a * fk - b * gk
        gk1 = a * gk + b * fk
        fsk1 = a * fsk - b * gsk - fk1 / rho
        gsk1 = a * gsk + b * fsk - gk1 / rho
        size = np.abs(fk1) + np.abs(gk1) + np.abs(fsk1) + np.abs(gsk1)
        active &= size < prev
        f = np.where(active, f + fk1, f)
        g = np.where(active, g + gk1, g)
        fs = np.where(active, fs + fsk1, fs)
        gs = np.where(active, gs + gsk1, gs)
        ok |= active & (size < 1e-16)
        active &= ~ok
        if not active.any():
            break
        fk, gk, fsk, gsk, prev = fk1, gk1, fsk1, gsk1, size
    theta = rho - eta * np.log(2 * rho) - l * math.pi / 2 + coulomb_sigma(l, eta)
    c, s = np.cos(theta), np.sin(theta)
    return g * c + f * s, gs * c + fs * s, ok


def _coulomb_steed(l, eta, rho):
    """Steed's method: CF1 for ``F_l'/F_l``, downward recurrence to ``l = 0``,
    CF2 for ``H_0^+'/H_0^+`` and Wronskian normalisation."""
    tiny = 1e-300

    def S(L):
        return L / rho + eta / L

    def R2(L):
        return 1.0 + (eta / L) ** 2

    # CF1 (modified Lentz); the sign of the denominators tracks sign(F_l)
    f = S(l + 1).copy()
    f[f == 0] = tiny
    C = f.copy()
    D = np.zeros_like(rho)
    sign = np.ones_like(rho)
    done = np.zeros(rho.shape, dtype=bool)
    for n in range(1, 100000):
        a = -R2(l + n)
        b = S(l + n) + S(l + n + 1)
        D = b + a * D
        D[D == 0] = tiny
        C = b + a / C
        C[C == 0] = tiny
        D = 1.0 / D
        delta = np.where(done, 1.0, C * D)
        f *= delta
        sign = np.where(done, sign, sign * np.sign(D))
        done |= np.abs(delta - 1.0) < 1e-16
        if done.all():
            break
    else:
        raise ConvergenceError("Coulomb CF1 failed to converge")

    Fl = sign * 1e-30
    dFl = f * Fl
    F, dF = Fl.copy(), dFl.copy()
    scale = np.ones_like(rho)
    for L in range(l, 0, -1):
        RL = np.sqrt(R2(L))
        SL = S(L)
        Fm = (SL * F + dF) / RL
        dF = SL * Fm - RL * F
        F = Fm
        big = np.abs(F) > _RESCALE
        if big.any():
            fac = np.where(big, 1.0 / _RESCALE, 1.0)
            F, dF, scale = F * fac, dF * fac, scale * fac
    f0 = dF / F

    # CF2 at L = 0
    K = np.full(rho.shape, tiny, dtype=complex)
    Cc = K.copy()
    Dc = np.zeros(rho.shape, dtype=complex)
    done = np.zeros(rho.shape, dtype=bool)
    for n in range(1, 100000):
        a = (1j * eta + n - 1) * (1j * eta + n)
        b = 2.0 * (rho - eta + n * 1j)
        Dc = b + a * Dc
        Dc[Dc == 0] = tiny
        Cc = b + a / Cc
        Cc[Cc == 0] = tiny
        Dc = 1.0 / Dc
        delta = np.where(done, 1.0, Cc * Dc)
        K *= delta
        done |= np.abs(delta - 1.0) < 1e-16
        if done.all():
            break
    else:
        raise ConvergenceError("Coulomb CF2 failed to converge")
    pq = 1j * (1.0 - eta / rho) + 1j / rho * K
    p, q = pq.real, pq.imag
    F0 = np.sign(F) * np.sqrt(q / ((f0 - p) ** 2 + q * q))
    norm = F0 / F * scale
    return Fl * norm, dFl * norm


_RHO_SERIES = 8.0
_RHO_SERIES_CAP = 60.0


def regular_coulomb(l, eta, rho):
    """Regular Coulomb function ``F_l(eta, rho)`` and its derivative in ``rho``.

    ``eta`` and ``rho`` broadcast against each other.  Series about the
    origin for small ``rho`` (or inside the classically forbidden region), the
    asymptotic expansion where it converges to double precision, Steed's
    continued fractions in between.
    """
    l = _check_l(l)
    scalar = np.ndim(rho) == 0 and np.ndim(eta) == 0
    e, r = np.broadcast_arrays(np.asarray(eta, dtype=float), np.asarray(rho, dtype=float))
    shape = r.shape
    e = e.ravel().copy()
    r = r.ravel().copy()
    if np.any(r < 0) or not np.all(np.isfinite(r)) or not np.all(np.isfinite(e)):
        raise DomainError("regular_coulomb requires finite rho >= 0 and finite eta")
    F = np.zeros_like(r)
    dF = np.zeros_like(r)
    turn = e + np.sqrt(e * e + l * (l + 1))
    # the series cancels like exp(accumulated phase); attraction speeds the phase up
    base = np.where(e >= 0, _RHO_SERIES, np.sqrt(e * e + _RHO_SERIES**2) + e)
    cut = np.maximum(base, np.minimum(turn, _RHO_SERIES_CAP))
    ser = r <= cut
    if ser.any():
        F[ser], dF[ser] = _coulomb_series(l, e[ser], r[ser])
    rest = ~ser
    if rest.any():
        er, rr = e[rest], r[rest]
        Fa, dFa, ok = _coulomb_asymptotic(l, er, rr)
        if not ok.all():
            Fs, dFs = _coulomb_steed(l, er[~ok], rr[~ok])
            Fa[~ok], dFa[~ok] = Fs, dFs
        F[rest], dF[rest] = Fa, dFa
    if not (np.all(np.isfinite(F)) and np.all(np.isfinite(dF))):
        raise RangeError(f"Coulomb function not representable for l={l}")
    if scalar:
        return float(F[0]), float(dF[0])
    return F.reshape(shape), dF.reshape(shape)


def coulomb_wave(l, eta_c, rho):
    """Radial Coulomb wave ``y_l^(C) = sqrt(2/pi) F_l(eta, rho)``.

    Reduces to ``sqrt(2/pi) rho j_l(rho)`` at ``eta = 0`` and behaves as
    ``sqrt(2/pi) sin(rho - eta ln 2rho - l pi/2 + sigma_l)`` for large ``rho``.
    """
    F, _ = regular_coulomb(l, eta_c, rho)
    return SQRT_2_OVER_PI * F


def coulomb_phase_derivative(l, eta_c, k, r):
    """``d phi_l / dk`` of the asymptotic Coulomb phase.

    ``phi_l = k r - eta(k) ln(2kr) - l pi/2 + sigma_l(eta(k))`` with
    ``eta(k) = Z_t Z_p alpha m / k``; the prefactor ``Z_t Z_p alpha m / k^2``
    equals ``eta_c / k``.
    """
    l = _check_l(l)
    if k <= 0 or r <= 0:
        raise DomainError("coulomb_phase_derivative requires k > 0 and r > 0")
    if eta_c == 0:
        return float(r)
    psi = digamma_complex(complex(l + 1, eta_c)).real
    return r + eta_c / k * (math.log(2 * k * r) - 1.0 - psi)


def stationary_velocity(l, coupling, rho):
    """Root ``v_0(rho)`` of the stationary-phase condition.

    Solves ``1 + c/(v^2 rho) * (ln(2 v rho / e) - Re psi(l + 1 + i c/v)) = 0``
    for the dimensionless velocity ``v = k/m`` at ``rho = m r``, where
    ``c = Z_t Z_p alpha > 0`` (repulsive).
    """
    l = _check_l(l)
    if coupling <= 0 or rho <= 0:
        raise DomainError("stationary_velocity needs a repulsive coupling and rho > 0")

    def cond(v):
        psi = digamma_complex(complex(l + 1, coupling / v)).real
        return 1.0 + coupling / (v * v * rho) * (math.log(2 * v * rho) - 1.0 - psi)

    guess = math.sqrt(coupling / rho)
    lo, hi = 0.05 * guess, 2.0 * guess
    while cond(lo) > 0:
        lo *= 0.5
    while cond(hi) < 0:
        hi *= 2.0
    return brentq(cond, lo, hi, xtol=1e-14 * guess, rtol=1e-13)
