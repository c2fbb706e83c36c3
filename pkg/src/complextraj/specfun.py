"""Polynomial special functions at complex arguments.

Everything here is an exact finite computation: physicists' Hermite
polynomials by upward recurrence and the terminating Gauss hypergeometric
series.  The one numerically determined quantity is the normalization
constant of the trigonometric Poschl-Teller eigenfunctions, computed by
adaptive Gauss-Legendre quadrature and cached.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from scipy.special import roots_legendre

from .errors import InputDomainError, PrecisionError

HERMITE_N_CAP = 200


@dataclass(frozen=True)
class PolynomialEval:
    """Value of a polynomial and its exact analytic derivative."""

    value: complex
    derivative: complex


def hermite_phys(n: int, z: complex) -> PolynomialEval:
    """Physicists' Hermite polynomial H_n(z) with derivative H_n'(z).

    Upward recurrence H_{k+1} = 2 z H_k - 2 k H_{k-1}; the derivative is
    H_n' = 2 n H_{n-1}.  Stable for the supported range n <= 200 at
    moderate |z|.
    """
    if n < 0:
        raise InputDomainError("hermite_phys: n must be a nonnegative integer")
    if n > HERMITE_N_CAP:
        raise InputDomainError(f"hermite_phys: n={n} exceeds cap {HERMITE_N_CAP}")
    z = complex(z)
    h_prev = 0.0 + 0.0j  # H_{-1} (unused for n=0)
    h = 1.0 + 0.0j
    for k in range(n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
    return PolynomialEval(value=h, derivative=2.0 * n * h_prev)


def gauss_2f1_terminating(n: int, b: float, c: float, z: complex) -> PolynomialEval:
    """Terminating 2F1(-n, b; c; z) as a degree-n polynomial in z.

    The first parameter -n makes the series stop after n+1 terms:

        sum_{k=0..n} (-n)_k (b)_k / ((c)_k k!) z^k

    Terms are built from the ratio of consecutive terms, so no large
    Pochhammer product is ever formed.  The derivative uses
    d/dz 2F1(-n, b; c; z) = (-n b / c) 2F1(-n+1, b+1; c+1; z).
    """
    if n < 0:
        raise InputDomainError("gauss_2f1_terminating: n must be nonnegative")
    if c <= 0 and float(c) == int(c):
        raise InputDomainError(f"gauss_2f1_terminating: c={c} is a nonpositive integer")
    z = complex(z)
    value = _terminating_series(n, b, c, z)
    if n == 0:
        derivative = 0.0 + 0.0j
    else:
        derivative = (-n * b / c) * _terminating_series(n - 1, b + 1.0, c + 1.0, z)
    return PolynomialEval(value=value, derivative=derivative)


def _terminating_series(n: int, b: float, c: float, z: complex) -> complex:
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(n):
        term *= (-n + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


# -- Poschl-Teller normalization --------------------------------------------
#
# c_n(l) = integral_0^{pi/2} [cos^l(x) sin^l(x) 2F1(-n, n+2l; l+1/2; sin^2 x)]^2 dx
#
# The integrand is smooth on the closed interval for l > 1/2, so
# Gauss-Legendre converges geometrically; node doubling gives a cheap,
# reliable error estimate.

_pt_norm_cache: dict[tuple[int, float], float] = {}
_pt_norm_lock = threading.Lock()

_QUAD_START_NODES = 32
_QUAD_MAX_NODES = 16384
_QUAD_RTOL = 1e-12


def pt_norm_constant(n: int, l: float) -> float:
    """Normalization integral c_n(l) for the symmetric Poschl-Teller well.

    Computed once per (n, l) by Gauss-Legendre quadrature on [0, pi/2],
    doubling the node count until the result changes by less than 1e-12
    relative, then cached.  Safe for concurrent readers; the first write
    is serialized.
    """
    if n < 0:
        raise InputDomainError("pt_norm_constant: n must be nonnegative")
    if not l > 0.5:
        raise InputDomainError(f"pt_norm_constant: requires l > 1/2, got l={l}")
    key = (int(n), float(l))
    cached = _pt_norm_cache.get(key)
    if cached is not None:
        return cached
    with _pt_norm_lock:
        cached = _pt_norm_cache.get(key)
        if cached is not None:
            return cached
        value = _pt_norm_quadrature(n, float(l))
        _pt_norm_cache[key] = value
    return value


def _pt_norm_quadrature(n: int, l: float) -> float:
    previous = None
    prev_change = None
    m = _QUAD_START_NODES
    while m <= _QUAD_MAX_NODES:
        current = _pt_norm_fixed(n, l, m)
        if previous is not None:
            change = abs(current - previous) / max(abs(current), 1e-300)
            if change <= _QUAD_RTOL:
                return current
            # Gauss-Legendre on an analytic integrand converges faster than
            # geometrically per doubling; once the change stops shrinking we
            # are resampling the integrand's floating-point noise floor and
            # more nodes cannot help.
            if prev_change is not None and change < 1e-9 and change >= 0.25 * prev_change:
                return current
            prev_change = change
        previous = current
        m *= 2
    raise PrecisionError(
        f"pt_norm_constant(n={n}, l={l}) did not converge at {_QUAD_MAX_NODES} nodes"
    )


def _pt_norm_fixed(n: int, l: float, m: int) -> float:
    nodes, weights = roots_legendre(m)
    half = math.pi / 4.0
    total = 0.0
    b = n + 2.0 * l
    c = l + 0.5
    for t, w in zip(nodes, weights):
        x = half * (t + 1.0)
        s = math.sin(x)
        f = (math.cos(x) * s) ** l * _terminating_series(n, b, c, s * s).real
        total += w * f * f
    return half * total
