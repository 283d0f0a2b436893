"""Lanczos approximation of the (complex) log-gamma function.

Uses the g=7, n=9 coefficient set, which gives close to full binary64
accuracy for Re(z) >= 1/2; the left half-plane is reached by reflection.
"""

import cmath
import math

_G = 7.0
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_pole(z):
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def loggamma(z):
    """Complex log-gamma.

    The branch is not the principal one in general, but ``exp(loggamma(z))``
    is always Gamma(z), which is all the callers rely on.
    """
    z = complex(z)
    if _is_pole(z):
        raise ValueError(f"Gamma has a pole at {z.real:g}")
    if 0.0 <= z.real < 0.5:
        # Gamma(z) = Gamma(z+1)/z; reflection would underflow sin(pi z) near 0
        return loggamma(z + 1.0) - cmath.log(z)
    if z.real < 0.0:
        # Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return cmath.log(math.pi / cmath.sin(math.pi * z)) - loggamma(1.0 - z)
    z -= 1.0
    acc = _COEFFS[0]
    for i in range(1, len(_COEFFS)):
        acc += _COEFFS[i] / (z + i)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_abs_gamma(z):
    """log|Gamma(z)| for real or complex z."""
    return loggamma(z).real


def gamma(z):
    """Gamma(z); real input gives a real result (sign included)."""
    if isinstance(z, complex):
        return cmath.exp(loggamma(z))
    x = float(z)
    val = cmath.exp(loggamma(x))
    return val.real


def gamma_sign(x):
    """Sign of Gamma(x) for real non-pole x."""
    if x > 0:
        return 1.0
    if _is_pole(complex(x)):
        raise ValueError(f"Gamma has a pole at {x:g}")
    # Gamma alternates sign between consecutive negative integers
    return -1.0 if math.floor(x) % 2 else 1.0
