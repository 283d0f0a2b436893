"""Regular Coulomb wave functions through their Jacobi-matrix description.

F_L(eta, rho) = C_L(eta) rho^(L+1) phi_L(eta, rho) with the entire factor

    phi_L(eta, rho) = exp(-i rho) 1F1(L + 1 - i eta; 2L + 2; 2 i rho),

whose real zeros are the reciprocals of the nonzero eigenvalues of the
Jacobi matrix J_L with entries lam_n, w_n at n = L+1, L+2, ...; the zeros of
dF/drho belong to the bordered matrix J~_L in the same way.
"""

from __future__ import annotations

import cmath
import decimal
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, special

from . import jacobi
from .errors import (
    ConvergenceError,
    InvalidInputError,
    ParameterDomainError,
    PrecisionLossError,
)
from .gammafn import gamma_sign, log_abs_gamma

__all__ = [
    "CoulombParams",
    "CoulombEval",
    "PhiValue",
    "coulomb_lambda",
    "coulomb_weight",
    "coulomb_sequences",
    "bessel_sequences",
    "hs_norm_squared",
    "hs_norm_squared_direct",
    "phi_series",
    "phi_L",
    "C_L",
    "C_L_product",
    "F_and_dF",
    "G_tilde",
    "zeros_F",
    "zeros_dF",
    "bessel_J",
]

EPS = np.finfo(float).eps
MAX_SERIES_TERMS = 100_000
BESSEL_MAX_ARG = 40.0


@dataclass(frozen=True)
class CoulombParams:
    """Angular-momentum-like parameter L and Coulomb strength eta."""

    L: float
    eta: float

    def __post_init__(self):
        L, eta = float(self.L), float(self.eta)
        if not (math.isfinite(L) and math.isfinite(eta)):
            raise InvalidInputError("L and eta must be finite")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "eta", eta)

    def require_plain(self):
        """Admissibility for J_L: L > -3/2, and L != -1 unless eta = 0."""
        if not self.L > -1.5:
            raise ParameterDomainError(f"L must exceed -3/2, got {self.L}")
        if self.L == -1.0 and self.eta != 0.0:
            raise ParameterDomainError("L = -1 requires eta = 0")

    def require_tilde(self):
        """Admissibility for J~_L: L > -1/2."""
        if not self.L > -0.5:
            raise ParameterDomainError(f"the bordered matrix needs L > -1/2, got {self.L}")

    @property
    def is_integer_L(self) -> bool:
        return self.L == math.floor(self.L)


class PhiValue(NamedTuple):
    value: float
    imag_residue: float
    series_error: float
    terms: int


class CoulombEval(NamedTuple):
    phi: float
    dphi: float
    F: float
    dF: float
    imag_residue: float
    series_error: float = 0.0
    series_terms: int = 0


# ---------------------------------------------------------------------------
# matrix entries


def coulomb_lambda(n, eta):
    """lam_n = -eta / (n (n+1)); real n, vectorized."""
    n = np.asarray(n, dtype=float)
    if eta == 0.0:
        return np.zeros_like(n)
    return -eta / (n * (n + 1.0))


def coulomb_weight(n, eta):
    """w_n = sqrt((n+1)^2 + eta^2) / ((n+1) sqrt((2n+1)(2n+3)))."""
    n = np.asarray(n, dtype=float)
    return np.sqrt((n + 1.0) ** 2 + eta * eta) / ((n + 1.0) * np.sqrt((2 * n + 1.0) * (2 * n + 3.0)))


def _lam_tail_sum(n0, eta):
    # telescoping: sum_{n>=n0} 1/(n(n+1)) = 1/n0
    return -eta / n0


def _w2_tail_sum(n0, eta):
    # w_n^2 = 1/((2n+1)(2n+3)) + eta^2 [4/((2u-1)(2u+1)) - 1/u^2],  u = n + 1
    base = 1.0 / (2.0 * (2.0 * n0 + 1.0))
    if eta == 0.0:
        return base
    return base + eta * eta * (2.0 / (2.0 * n0 + 1.0) - float(special.polygamma(1, n0 + 1.0)))


def _lam2_tail_sum(n0, eta):
    # (1/n - 1/(n+1))^2 summed
    if eta == 0.0:
        return 0.0
    return eta * eta * (
        float(special.polygamma(1, n0)) + float(special.polygamma(1, n0 + 1.0)) - 2.0 / n0
    )


def _decay_from(n_of_cut, eta):
    """DecayDescriptor for Coulomb tails starting at n = n_of_cut(M)."""

    def lam_sum(m):
        return _lam_tail_sum(n_of_cut(m), eta)

    def lam_abs(m):
        return abs(lam_sum(m))

    def w2_sum(m):
        return _w2_tail_sum(n_of_cut(m), eta)

    def lam_sup(m):
        return float(abs(coulomb_lambda(n_of_cut(m), eta)))

    def w_sup(m):
        return float(coulomb_weight(n_of_cut(m), eta))

    return jacobi.DecayDescriptor(
        lambda_tail_bound=lam_abs,
        weight_tail_bound=w2_sum,
        lambda_tail_sum=lam_sum,
        weight_tail_sum=w2_sum,
        lambda_sup_bound=lam_sup,
        weight_sup_bound=w_sup,
    )


def coulomb_sequences(p: CoulombParams, tilde: bool = False):
    """(JacobiOperator, DecayDescriptor) for J_L, or for J~_L when ``tilde``.

    Row k of J_L carries lam_{L+1+k} and w_{L+1+k}.  Row 0 of J~_L carries
    lam~ = -eta/(L+1)^2 and w~ = sqrt((2L+1)/(L+1)) w_L, and its row k >= 1
    carries lam_{L+k}, w_{L+k}.

    The tail rules are closed forms (telescoping sums and trigamma), valid
    for cuts of at least one row.
    """
    L, eta = p.L, p.eta
    if not tilde:
        p.require_plain()
        base = L + 1.0

        def lam_at(k):
            return coulomb_lambda(base + k, eta)

        def w_at(k):
            return coulomb_weight(base + k, eta)

        op = jacobi.JacobiOperator(lam_at, w_at, 0, name=f"J_L(L={L:g},eta={eta:g})")
        return op, _decay_from(lambda m: base + m, eta)

    p.require_tilde()
    lam0 = -eta / (L + 1.0) ** 2
    w0 = math.sqrt((2 * L + 1.0) / (L + 1.0)) * float(coulomb_weight(L, eta))

    def lam_at(k):
        k = np.asarray(k)
        return np.where(k == 0, lam0, coulomb_lambda(L + np.maximum(k, 1), eta))

    def w_at(k):
        k = np.asarray(k)
        return np.where(k == 0, w0, coulomb_weight(L + np.maximum(k, 1), eta))

    op = jacobi.JacobiOperator(lam_at, w_at, 0, name=f"J~_L(L={L:g},eta={eta:g})")
    return op, _decay_from(lambda m: L + max(m, 1), eta)


def bessel_sequences(nu: float):
    """Jacobi operator with lam = 0, w_k = 1/sqrt((nu+k+1)(nu+k+2)).

    Its regularized characteristic function is Gamma(nu+1) z^(-nu) J_nu(2z).
    """
    if not nu > -1:
        raise ParameterDomainError("nu must exceed -1")

    def lam_at(k):
        return np.zeros(np.shape(k))

    def w_at(k):
        k = np.asarray(k, dtype=float)
        return 1.0 / np.sqrt((nu + k + 1.0) * (nu + k + 2.0))

    def w2_sum(m):
        return 1.0 / (nu + m + 1.0)

    decay = jacobi.DecayDescriptor(
        lambda_tail_bound=lambda m: 0.0,
        weight_tail_bound=w2_sum,
        lambda_tail_sum=lambda m: 0.0,
        weight_tail_sum=w2_sum,
        lambda_sup_bound=lambda m: 0.0,
        weight_sup_bound=lambda m: float(w_at(m)),
    )
    return jacobi.JacobiOperator(lam_at, w_at, 0, name=f"Bessel(nu={nu:g})"), decay


def hs_norm_squared(p: CoulombParams) -> float:
    """Closed form of sum lam^2 + 2 sum w^2 over J_L: ((L+1)^2+eta^2)/((2L+3)(L+1)^2)."""
    p.require_plain()
    L, eta = p.L, p.eta
    if L == -1.0:
        return 1.0 / (2 * L + 3.0)
    return ((L + 1.0) ** 2 + eta * eta) / ((2 * L + 3.0) * (L + 1.0) ** 2)


def hs_norm_squared_direct(p: CoulombParams, N: int = 10_000):
    """Hilbert-Schmidt norm^2 of J_L by direct summation plus an integral tail.

    Returns (value, error_bound).  The summand f(n) = lam_n^2 + 2 w_n^2 is
    decreasing, so the tail beyond N lies between int_N^inf f and that
    integral plus f(N); the midpoint is returned with half the gap as error.
    """
    p.require_plain()
    L, eta = p.L, p.eta
    n = L + 1.0 + np.arange(N, dtype=float)

    def f(x):
        return coulomb_lambda(x, eta) ** 2 + 2.0 * coulomb_weight(x, eta) ** 2

    head = math.fsum(f(n).tolist())
    cut = L + 1.0 + N
    integral, quad_err = integrate.quad(lambda x: float(f(x)), cut, np.inf, epsabs=1e-15, epsrel=1e-13)
    fN = float(f(cut))
    return head + integral + 0.5 * fN, 0.5 * fN + quad_err


# ---------------------------------------------------------------------------
# the entire factor phi_L


def phi_series(L: float, eta: float, rho: float, tol: float = 1e-16) -> PhiValue:
    """Re(exp(-i rho) 1F1(L+1-i eta; 2L+2; 2 i rho)) by the Kummer power series.

    Real and imaginary parts are accumulated with ``math.fsum``; the series
    stops after 10 consecutive terms below ``tol`` times the running
    magnitude.  ``series_error`` estimates the rounding, eps * sum |term|,
    which grows like exp(|rho|) and is why large |rho| is out of range.
    """
    b = 2.0 * L + 2.0
    if b <= 0 and b == math.floor(b):
        raise ParameterDomainError(f"2L+2 = {b:g} is a nonpositive integer")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    a = complex(L + 1.0, -eta)
    z = complex(0.0, 2.0 * rho)
    term = 1.0 + 0.0j
    re_parts, im_parts = [1.0], [0.0]
    abs_sum = 1.0
    biggest = 1.0
    small = 0
    k = 0
    while small < 10:
        if k >= MAX_SERIES_TERMS:
            raise ConvergenceError(f"Kummer series did not converge in {MAX_SERIES_TERMS} terms")
        term = term * (a + k) / ((b + k) * (k + 1)) * z
        k += 1
        re_parts.append(term.real)
        im_parts.append(term.imag)
        mag = abs(term)
        abs_sum += mag
        biggest = max(biggest, mag)
        running = abs(complex(math.fsum(re_parts), math.fsum(im_parts)))
        small = small + 1 if mag <= tol * max(running, EPS * biggest) else 0
    m = complex(math.fsum(re_parts), math.fsum(im_parts))
    val = cmath.exp(complex(0.0, -rho)) * m
    return PhiValue(val.real, abs(val.imag), 2.0 * EPS * abs_sum * (1 + k * EPS), k + 1)


def _check_residue(v: PhiValue, where: str):
    if v.imag_residue > 1e-10 * (1.0 + abs(v.value)):
        raise PrecisionLossError(
            f"imaginary residue {v.imag_residue:.3g} of the Kummer series at {where}",
            best_bound=v.imag_residue,
        )


def phi_L(p: CoulombParams, rho: float, tol: float = 1e-16) -> CoulombEval:
    """phi_L(eta, rho) and its rho-derivative.

    The derivative uses
        dphi_L = eta/(L+1) phi_L - rho/(2L+3) (1 + eta^2/(L+1)^2) phi_{L+1},
    so one extra series at L+1 is summed.  F and dF are left as NaN; see
    :func:`F_and_dF`.
    """
    p.require_plain()
    rho = float(rho)
    if not math.isfinite(rho):
        raise InvalidInputError("rho must be finite")
    L, eta = p.L, p.eta
    v0 = phi_series(L, eta, rho, tol)
    _check_residue(v0, f"L={L:g}, rho={rho:g}")
    v1 = phi_series(L + 1.0, eta, rho, tol)
    _check_residue(v1, f"L={L + 1:g}, rho={rho:g}")
    if eta == 0.0:
        c0, c1 = 0.0, 1.0
    else:
        c0 = eta / (L + 1.0)
        c1 = 1.0 + c0 * c0
    dphi = c0 * v0.value - rho / (2 * L + 3.0) * c1 * v1.value
    serr = v0.series_error + abs(rho / (2 * L + 3.0) * c1) * v1.series_error + abs(c0) * v0.series_error
    return CoulombEval(
        v0.value, dphi, math.nan, math.nan,
        max(v0.imag_residue, v1.imag_residue), serr, v0.terms + v1.terms,
    )


def C_L(p: CoulombParams) -> float:
    """Normalization 2^L exp(-pi eta/2) |Gamma(L+1+i eta)| / Gamma(2L+2).

    Negative for -3/2 < L < -1, where Gamma(2L+2) < 0.
    """
    L, eta = p.L, p.eta
    b = 2.0 * L + 2.0
    if b <= 0 and b == math.floor(b):
        raise ParameterDomainError(f"Gamma(2L+2) has a pole at L = {L:g}")
    if L + 1.0 <= 0 and eta == 0.0 and L + 1.0 == math.floor(L + 1.0):
        raise ParameterDomainError(f"Gamma(L+1) has a pole at L = {L:g}")
    log_c = L * math.log(2.0) - 0.5 * math.pi * eta + log_abs_gamma(complex(L + 1.0, eta)) - log_abs_gamma(b)
    return gamma_sign(b) * math.exp(log_c)


def C_L_product(L: int, eta: float) -> float:
    """C_L for integer L >= 0 from the Gamow-factor product form.

    sqrt(2 pi eta / (exp(2 pi eta) - 1)) sqrt(prod_{k=1}^L (k^2 + eta^2)) / ((2L+1)!! L!)
    """
    if L < 0 or L != int(L):
        raise ParameterDomainError("product form needs integer L >= 0")
    L = int(L)
    x = 2 * math.pi * eta
    gamow = 1.0 if eta == 0 else x / math.expm1(x)
    prod = math.prod(k * k + eta * eta for k in range(1, L + 1))
    dfact = math.prod(range(1, 2 * L + 2, 2))
    return math.sqrt(gamow) * math.sqrt(prod) / (dfact * math.factorial(L))


def F_and_dF(p: CoulombParams, rho: float, tol: float = 1e-16) -> CoulombEval:
    """F_L(eta, rho) = C_L rho^(L+1) phi_L and its rho-derivative.

    Negative rho is accepted only for integer L, where rho^(L+1) is real.
    """
    rho = float(rho)
    if rho == 0.0:
        raise InvalidInputError("rho must be nonzero")
    if rho < 0 and not p.is_integer_L:
        raise ParameterDomainError("negative rho needs integer L (rho^(L+1) has no real branch)")
    ev = phi_L(p, rho, tol)
    c = C_L(p)
    L = p.L
    pw = rho ** (L + 1.0)
    pw_m = rho ** L
    F = c * pw * ev.phi
    dF = c * ((L + 1.0) * pw_m * ev.phi + pw * ev.dphi)
    return ev._replace(F=F, dF=dF)


def G_tilde(p: CoulombParams, rho: float, tol: float = 1e-16) -> float:
    """phi_L + rho/(L+1) dphi_L, the characteristic function of J~_L.

    Written as (1 - rho lam~) phi_L - rho^2 w~^2 phi_{L+1}.
    """
    p.require_tilde()
    L, eta = p.L, p.eta
    v0 = phi_series(L, eta, rho, tol)
    v1 = phi_series(L + 1.0, eta, rho, tol)
    _check_residue(v0, f"L={L:g}, rho={rho:g}")
    _check_residue(v1, f"L={L + 1:g}, rho={rho:g}")
    lam0 = -eta / (L + 1.0) ** 2
    w0sq = (2 * L + 1.0) / (L + 1.0) * float(coulomb_weight(L, eta)) ** 2
    return (1.0 - rho * lam0) * v0.value - rho * rho * w0sq * v1.value


def zeros_F(p: CoulombParams, count: int, tol: float = 1e-10, refine: bool = True, **kw):
    """The ``count`` smallest-modulus zeros of phi_L (nonzero zeros of F_L).

    phi_L is entire, so zeros of both signs are returned for every L.
    """
    op, decay = coulomb_sequences(p)
    return jacobi.zeros_of_G(op, decay, count, tol, refine=refine, **kw)


def zeros_dF(p: CoulombParams, count: int, tol: float = 1e-10, refine: bool = True, **kw):
    """The ``count`` smallest-modulus zeros of phi_L + rho/(L+1) dphi_L."""
    op, decay = coulomb_sequences(p, tilde=True)
    return jacobi.zeros_of_G(op, decay, count, tol, refine=refine, **kw)


# ---------------------------------------------------------------------------
# Bessel oracle


def bessel_J(nu: float, x: float, tol: float = 1e-17) -> float:
    """J_nu(x) from its power series, summed in 60-digit decimal arithmetic.

    The extra digits absorb the exp(|x|) cancellation of the alternating
    series, which is why the validated range stops at |x| = 40.
    """
    nu, x = float(nu), float(x)
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise InvalidInputError("nu and x must be finite")
    if abs(x) > BESSEL_MAX_ARG:
        raise ParameterDomainError(f"|x| = {abs(x):g} beyond the validated range {BESSEL_MAX_ARG:g}")
    if nu < 0 and nu == math.floor(nu):
        n = int(-nu)
        return (-1) ** n * bessel_J(float(n), x, tol)
    if x < 0 and nu != math.floor(nu):
        raise ParameterDomainError("negative x needs integer order")
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    with decimal.localcontext(decimal.Context(prec=60)):
        y = decimal.Decimal(x) * decimal.Decimal(x) / 4
        dnu = decimal.Decimal(nu)
        term = decimal.Decimal(1)
        total = decimal.Decimal(1)
        stop = decimal.Decimal(tol) * decimal.Decimal("1e-3")
        k = 0
        while True:
            k += 1
            term = -term * y / (k * (dnu + k))
            total += term
            if k > y and abs(term) <= stop * abs(total):
                break
            if k > MAX_SERIES_TERMS:
                raise ConvergenceError("Bessel series did not converge")
    sign = 1.0
    if x < 0 and int(nu) % 2:
        sign = -1.0
    pref = math.exp(nu * math.log(abs(x) / 2.0) - math.lgamma(nu + 1.0))
    if nu + 1.0 < 0:
        pref *= math.copysign(1.0, math.gamma(nu + 1.0))
    return sign * pref * float(total)
