"""Double-precision evaluation of theta, mu, R and the completed mu~, used only as an oracle."""

from __future__ import annotations

import cmath
import math

from scipy.special import erfc, erfcx

PI = math.pi
# stop a bilateral sum after this many consecutive negligible terms
_QUIET = 4
_EPS = 1e-18


def _check_tau(tau: complex) -> None:
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")


def _bilateral(term, start: int = 0) -> tuple[complex, float]:
    """Sum term(n) over all integers, returning (value, size of the last terms seen)."""
    total = 0j
    tail = 0.0
    for direction in (1, -1):
        n = start if direction == 1 else start - 1
        quiet = 0
        scale = 0.0
        while quiet < _QUIET:
            t = term(n)
            total += t
            scale = max(scale, abs(t))
            if abs(t) <= _EPS * max(scale, 1e-300):
                quiet += 1
            else:
                quiet = 0
            tail = max(tail, abs(t))
            n += direction
            if abs(n - start) > 100000:
                raise ArithmeticError("series did not converge")
        tail = max(tail, 0.0)
    return total, _EPS * (abs(total) + 1)


def theta(z: complex, tau: complex) -> complex:
    """sum over nu in Z + 1/2 of exp(pi i nu^2 tau + 2 pi i nu (z + 1/2))."""
    _check_tau(tau)

    def term(n):
        nu = n + 0.5
        return cmath.exp(1j * PI * nu * nu * tau + 2j * PI * nu * (z + 0.5))

    return _bilateral(term)[0]


def _lattice_point(u: complex, tau: complex) -> bool:
    k = u.imag / tau.imag
    r = u - round(k) * tau
    return abs(k - round(k)) < 1e-12 and abs(r.real - round(r.real)) < 1e-12 and abs(r.imag) < 1e-12


def mu(u: complex, v: complex, tau: complex) -> complex:
    """exp(pi i u) / theta(v) * sum_n (-1)^n exp(pi i (n^2+n) tau + 2 pi i n v) / (1 - exp(2 pi i (n tau + u)))."""
    _check_tau(tau)
    if _lattice_point(u, tau) or _lattice_point(v, tau):
        raise ValueError("u or v is a lattice point")

    def term(n):
        num = cmath.exp(1j * PI * (n * n + n) * tau + 2j * PI * n * v)
        den = 1 - cmath.exp(2j * PI * (n * tau + u))
        return (-1) ** (n % 2) * num / den

    s, _ = _bilateral(term)
    return cmath.exp(1j * PI * u) * s / theta(v, tau)


def E(z: float) -> float:
    """2 * integral_0^z exp(-pi t^2) dt = erf(sqrt(pi) z)."""
    return math.erf(math.sqrt(PI) * z)


def R(u: complex, tau: complex) -> complex:
    """sum over nu in Z + 1/2 of (sgn(nu) - E((nu + a) sqrt(2y))) (-1)^(nu - 1/2) exp(-pi i nu^2 tau - 2 pi i nu u), a = Im u / y."""
    _check_tau(tau)
    y = tau.imag
    a = u.imag / y
    r2y = math.sqrt(2 * y)

    def term(n):
        nu = n + 0.5
        sg = 1.0 if nu > 0 else -1.0
        # sgn(nu) - E(x) = sgn(nu) * erfc(sgn(nu) * sqrt(pi) x)
        t = sg * math.sqrt(PI) * (nu + a) * r2y
        expo = -1j * PI * nu * nu * tau - 2j * PI * nu * u
        if t > 0:
            val = float(erfcx(t)) * cmath.exp(expo - t * t)
        else:
            val = float(erfc(t)) * cmath.exp(expo)
        return sg * (-1) ** (n % 2) * val

    return _bilateral(term)[0]


def mutilde(u: complex, v: complex, tau: complex) -> complex:
    return mu(u, v, tau) + 0.5j * R(u - v, tau)


def mutilde_eval_numeric(u: complex, v: complex, tau: complex) -> tuple[complex, float]:
    """(value, rough absolute error estimate) of the completed mu~(u, v; tau)."""
    val = mutilde(u, v, tau)
    return val, 1e-12 * max(1.0, abs(val))


def eta(tau: complex) -> complex:
    _check_tau(tau)
    q = cmath.exp(2j * PI * tau)
    # Euler pentagonal series
    def term(n):
        return (-1) ** (n % 2) * q ** (n * (3 * n - 1) // 2) if n * (3 * n - 1) >= 0 else 0

    s, _ = _bilateral(term)
    return cmath.exp(2j * PI * tau / 24) * s


def N_numeric(a: int, c: int, tau: complex) -> complex:
    """N(a,c;tau) = q^(-1/4) mu~(2a/c, tau; 2 tau)."""
    return cmath.exp(-0.5j * PI * tau) * mutilde(2 * a / c, tau, 2 * tau)


def M_numeric(a: int, c: int, tau: complex) -> complex:
    """M(a,c;tau) = q^(-(a/c - 1/2)^2 / 2) mu~(a tau / c, tau / 2; tau)."""
    h = a / c - 0.5
    return cmath.exp(-1j * PI * tau * h * h) * mutilde(a * tau / c, tau / 2, tau)
