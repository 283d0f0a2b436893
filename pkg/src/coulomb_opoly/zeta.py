"""Spectral zeta function of the zeros of F_L.

zeta_L(k) = sum_n rho_{L,n}^(-k), k >= 2, summed over all real nonzero zeros
of phi_L(eta, .).  The values follow from a quadratic convolution
recurrence started at zeta_L(2) = ||J_L||_HS^2, and feed Euler-type bounds
on the smallest zero and the moments of the orthogonality measure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import coulomb, opoly
from .coulomb import CoulombParams
from .errors import InvalidInputError, ParameterDomainError
from .gammafn import loggamma

__all__ = [
    "ZetaTable",
    "zeta_table",
    "rayleigh_sigma",
    "euler_bounds",
    "euler_bounds_s1",
    "measure_moments",
    "hankel_min_eigenvalue",
    "gamma_identity_check",
    "hadamard_residual",
    "kummer_taylor",
    "ratio_taylor_zeta",
    "zero_power_sums",
    "tilde_zero_sums",
]


@dataclass(frozen=True)
class ZetaTable:
    """zeta_L(2), ..., zeta_L(k_max) for one parameter point."""

    params: CoulombParams
    values: tuple

    def __getitem__(self, k: int) -> float:
        """zeta_L(k) for 2 <= k <= k_max."""
        if k < 2 or k - 2 >= len(self.values):
            raise IndexError(f"zeta index {k} outside 2..{len(self.values) + 1}")
        return self.values[k - 2]

    @property
    def k_max(self) -> int:
        return len(self.values) + 1


def zeta_table(p: CoulombParams, k_max: int) -> ZetaTable:
    """zeta_L(2..k_max) by

        zeta(2)   = (1 + eta^2/(L+1)^2) / (2L+3)
        zeta(k+1) = [-2 eta/(L+1) zeta(k) + sum_{l=1}^{k-2} zeta(l+1) zeta(k-l)] / (2L+k+2).

    The sign of the eta term is the one that makes zeta(k) equal the power
    sums of the zeros of phi_L; it follows from the Riccati equation of
    phi_{L+1}/phi_L.  Even values do not depend on that sign.  The
    convolution is summed with ``math.fsum``.
    """
    p.require_plain()
    if k_max < 2:
        raise InvalidInputError("k_max must be >= 2")
    L, eta = p.L, p.eta
    c = 0.0 if eta == 0.0 else eta / (L + 1.0)
    z = [0.0, 0.0, (1.0 + c * c) / (2 * L + 3.0)]
    for k in range(2, k_max):
        conv = math.fsum(z[l + 1] * z[k - l] for l in range(1, k - 1))
        z.append((-2.0 * c * z[k] + conv) / (2 * L + k + 2.0))
    return ZetaTable(p, tuple(z[2:]))


def rayleigh_sigma(nu: float, n_max: int) -> list:
    """Rayleigh sums sigma_2(nu), ..., sigma_{2 n_max}(nu) of j_{nu,k}^(-2n).

    sigma_2 = 1/(4(nu+1)), sigma_{2n} = sum_{k=1}^{n-1} sigma_{2k} sigma_{2n-2k} / (n + nu).
    """
    if not nu > -1:
        raise ParameterDomainError("nu must exceed -1")
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    s = [0.0, 1.0 / (4.0 * (nu + 1.0))]
    for n in range(2, n_max + 1):
        s.append(math.fsum(s[k] * s[n - k] for k in range(1, n)) / (n + nu))
    return s[1:]


def euler_bounds(p: CoulombParams, s_max: int) -> list:
    """(zeta(2s)^(-1/s), zeta(2s)/zeta(2s+2)) for s = 1..s_max; each brackets rho_{L,1}^2."""
    if s_max < 1:
        raise InvalidInputError("s_max must be >= 1")
    t = zeta_table(p, 2 * s_max + 2)
    return [(t[2 * s] ** (-1.0 / s), t[2 * s] / t[2 * s + 2]) for s in range(1, s_max + 1)]


def euler_bounds_s1(p: CoulombParams):
    """Closed forms of the s = 1 bracket for rho_{L,1}^2.

        1/zeta(2)       = (2L+3)(L+1)^2 / ((L+1)^2 + eta^2)
        zeta(2)/zeta(4) = (2L+3)(2L+5)(L+2)(L+1)^2 / ((5L+8) eta^2 + (L+2)(L+1)^2)

    The second follows from zeta(4) = zeta(2) (zeta(2) + 2 eta^2/((L+1)^2 (L+2))) / (2L+5).
    """
    L, e2 = p.L, p.eta * p.eta
    lo = (2 * L + 3) * (L + 1) ** 2 / ((L + 1) ** 2 + e2)
    hi = (2 * L + 3) * (2 * L + 5) * (L + 2) * (L + 1) ** 2 / ((5 * L + 8) * e2 + (L + 2) * (L + 1) ** 2)
    return lo, hi


def measure_moments(p: CoulombParams, n_max: int) -> list:
    """Moments m_n = zeta(n+2)/zeta(2), n = 0..n_max, of the orthogonality measure."""
    if n_max < 0:
        raise InvalidInputError("n_max must be >= 0")
    t = zeta_table(p, n_max + 2)
    return [t[n + 2] / t[2] for n in range(n_max + 1)]


def hankel_min_eigenvalue(moments) -> float:
    """Smallest eigenvalue of the Hankel matrix [m_{i+j}], relative to its largest."""
    m = np.asarray(moments, dtype=float)
    h = (m.size - 1) // 2 + 1
    H = np.array([[m[i + j] for j in range(h)] for i in range(h)])
    ev = np.linalg.eigvalsh(H)
    return float(ev[0] / ev[-1])


class GammaIdentityReport(NamedTuple):
    max_residual: float
    max_imag: float
    residuals: tuple


def gamma_identity_check(p: CoulombParams, k_max: int) -> GammaIdentityReport:
    """Residuals of the Gamma-function identity tying zeta_L(2..k_max+2) together.

        2[(L+1)^2+eta^2] / ((L+1)(L+1-i eta)) Gamma(L+2-i eta+k) / (Gamma(2L+4+k) k!)
          = sum_{l=0}^k Gamma(L+1-i eta+k-l) (2i)^(-l) / (Gamma(2L+2+k-l) (k-l)!) zeta_L(l+2)

    Residuals are relative to the sum of term magnitudes.  ``max_imag``
    is the largest |Im| of the difference, which vanishes for eta = 0.
    """
    L, eta = p.L, p.eta
    if not L > -1:
        raise ParameterDomainError("identity needs L > -1")
    t = zeta_table(p, k_max + 2)
    a = complex(L + 1.0, -eta)
    pre = 2.0 * ((L + 1) ** 2 + eta * eta) / ((L + 1) * a)
    res, ims = [], []
    for k in range(k_max + 1):
        lhs = pre * cmath.exp(loggamma(a + 1 + k) - loggamma(2 * L + 4 + k) - math.lgamma(k + 1))
        terms = [
            cmath.exp(loggamma(a + k - l) - loggamma(2 * L + 2 + k - l) - math.lgamma(k - l + 1))
            * (2j) ** (-l)
            * t[l + 2]
            for l in range(k + 1)
        ]
        rhs = complex(math.fsum(x.real for x in terms), math.fsum(x.imag for x in terms))
        scale = abs(lhs) + sum(abs(x) for x in terms)
        res.append(abs(lhs - rhs) / scale)
        ims.append(abs((lhs - rhs).imag) / scale)
    return GammaIdentityReport(max(res), max(ims), tuple(res))


def hadamard_residual(p: CoulombParams, rho: float, k_max: int = 40) -> float:
    """|log phi_L(rho) + sum_{k=2}^{k_max} rho^k zeta(k)/k - eta rho/(L+1)|.

    Only meaningful for |rho| inside the first zero, where the series converges.
    """
    t = zeta_table(p, k_max)
    ph = coulomb.phi_L(p, rho).phi
    if ph <= 0:
        raise ParameterDomainError("rho must lie inside the first zero (phi_L > 0)")
    c = 0.0 if p.eta == 0 else p.eta * rho / (p.L + 1.0)
    s = math.fsum([math.log(ph), -c] + [rho ** k * t[k] / k for k in range(2, k_max + 1)])
    return abs(s)


def kummer_taylor(L: float, eta: float, n_terms: int) -> np.ndarray:
    """Taylor coefficients of phi_L(eta, rho) in rho, from the Kummer series.

    exp(-i rho) and 1F1(L+1-i eta; 2L+2; 2 i rho) are expanded separately
    and multiplied as power series; the product is real.
    """
    a = complex(L + 1.0, -eta)
    b = 2.0 * L + 2.0
    m = np.empty(n_terms, dtype=complex)
    e = np.empty(n_terms, dtype=complex)
    m[0] = e[0] = 1.0
    for k in range(1, n_terms):
        m[k] = m[k - 1] * (a + k - 1) / ((b + k - 1) * k) * 2j
        e[k] = e[k - 1] * (-1j) / k
    prod = np.array([np.sum(e[: k + 1] * m[k::-1]) for k in range(n_terms)])
    return prod.real


def ratio_taylor_zeta(p: CoulombParams, k_max: int) -> np.ndarray:
    """zeta_L(2..k_max+2) read off the Taylor series of
    (1/(2L+3)) (1 + eta^2/(L+1)^2) phi_{L+1}/phi_L, by series division."""
    n = k_max + 1
    num = kummer_taylor(p.L + 1, p.eta, n)
    den = kummer_taylor(p.L, p.eta, n)
    q = np.zeros(n)
    for k in range(n):
        q[k] = (num[k] - np.dot(q[:k], den[k:0:-1])) / den[0]
    c = 0.0 if p.eta == 0 else p.eta / (p.L + 1)
    return (1.0 + c * c) / (2 * p.L + 3) * q


class ZeroSums(NamedTuple):
    sums: tuple
    tail_bounds: tuple
    count: int


def zero_power_sums(zeros, powers, error_bounds=None) -> ZeroSums:
    """Truncated sums sum_k rho_k^(-s) with a tail bound per power.

    The tail over missing zeros uses the linear spacing model of
    :func:`opoly.spacing_fit`; the propagated zero errors and the rounding
    of the powers are added.
    """
    r = np.asarray(zeros, dtype=float)
    a, b = opoly.spacing_fit(r)
    sums, bounds = [], []
    for s in powers:
        vals = r ** (-float(s))
        tail = opoly.tail_power_bound(a, b, r.size, float(s))
        if error_bounds is not None:
            e = np.asarray(error_bounds, dtype=float)
            tail += float(np.sum(s * np.abs(r) ** (-float(s) - 1) * e))
        # each power carries about |s| + 2 rounding errors; fsum adds one more
        tail += (abs(s) + 3) * coulomb.EPS * float(np.sum(np.abs(vals)))
        sums.append(math.fsum(vals.tolist()))
        bounds.append(tail)
    return ZeroSums(tuple(sums), tuple(bounds), int(r.size))


def tilde_zero_sums(p: CoulombParams, s_max: int, count: int = 200, tol: float = 1e-10) -> ZeroSums:
    """sum_k rho~_k^(-2s), s = 1..s_max, over zeros of the derivative; numeric only."""
    res = coulomb.zeros_dF(p, count, tol, refine=False)
    return zero_power_sums(res.zeros, [2 * s for s in range(1, s_max + 1)], res.error_bounds)
