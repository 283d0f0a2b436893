"""Orthogonal polynomials generated by Jacobi matrices.

The generic engine runs the three-term recurrence

    x P_n = w_{n-1} P_{n-1} + lam_n P_n + w_n P_{n+1},    P_{-1} = 0, P_0 = 1,

for first-kind (P) and second-kind (Q, with Q_0 = 0, Q_1 = 1/w_0) solutions.
On top of it sit the Lommel polynomials and the Coulomb family
P_n^(L)(eta; z) generated by J_L, with its explicit coefficients, the
Wronskian-type identities linking it to F_L, and the discrete
orthogonality measure supported on reciprocal zeros of phi_L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import coulomb, jacobi, seqkernel
from .coulomb import CoulombParams
from .errors import InvalidInputError, ParameterDomainError
from .gammafn import gamma_sign, log_abs_gamma

__all__ = [
    "PolyCoeffs",
    "DiscreteMeasure",
    "IdentityReport",
    "op_values",
    "op_first_kind",
    "op_second_kind",
    "op_first_kind_F",
    "op_second_kind_F",
    "lommel_R",
    "lommel_R_explicit",
    "lommel_R_F",
    "lommel_Q_nu",
    "coulomb_P",
    "coulomb_R",
    "coulomb_P_F",
    "coulomb_P_tilde",
    "Q_eta",
    "Q_shift_residual",
    "coulomb_P_coeffs",
    "coulomb_P_coeffs_interp",
    "poly_eval",
    "hurwitz_sequence",
    "identity_a_residual",
    "identity_b_residual",
    "identity_suite",
    "bessel_F_residual",
    "orthogonality_measure",
    "orthogonality_matrix",
    "spacing_fit",
    "tail_power_bound",
]


@dataclass(frozen=True)
class PolyCoeffs:
    """Coefficients c_0..c_n with P(z) = sum_k c_k z^(n-k)."""

    coeffs: tuple
    degree: int

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) != self.degree + 1:
            raise InvalidInputError("need degree + 1 coefficients")
        if c[0] == 0.0:
            raise InvalidInputError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, z):
        return poly_eval(self.coeffs, z)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms (x_k, mass_k) with x_k = 1/rho_k, plus bookkeeping of the rest.

    ``tail_defect`` is 1 - sum(masses) - mass_at_zero, the weight carried by
    atoms beyond the computed ones.  ``tail_majorant`` bounds the same
    quantity from the fitted zero spacing and serves as a cross-check.
    ``zero_mass_residual`` is only set for the bordered matrix, where the
    absence of an atom at 0 is not proven; it is reported, never assumed.
    """

    atoms: tuple
    mass_at_zero: float
    tail_defect: float
    tail_majorant: float = math.nan
    zero_mass_residual: float = math.nan
    zero_errors: tuple = ()

    @property
    def points(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def masses(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])


class IdentityReport(NamedTuple):
    identity_a: float
    identity_b: float
    lommel_bessel: float
    lommel_q_nu: float
    q_shift: float
    bessel_F: float
    details: dict


def poly_eval(coeffs, z):
    """Horner evaluation of sum_k c_k z^(n-k)."""
    z = np.asarray(z, dtype=float)
    acc = np.zeros_like(z)
    for c in coeffs:
        acc = acc * z + c
    return acc if acc.ndim else float(acc)


# ---------------------------------------------------------------------------
# generic engine


def op_values(op: jacobi.JacobiOperator, n_max: int, z, second_kind: bool = False) -> np.ndarray:
    """P_0..P_{n_max} (or Q_0..Q_{n_max}) at z; shape (n_max + 1,) + shape(z)."""
    if n_max < 0:
        raise InvalidInputError("degree must be non-negative")
    z = np.asarray(z, dtype=float)
    lam, w = op.entries(max(n_max, 1))
    out = np.empty((n_max + 1,) + z.shape)
    if second_kind:
        prev, cur = np.zeros_like(z), np.zeros_like(z)
        out[0] = cur
        if n_max == 0:
            return out
        prev, cur = cur, np.full_like(z, 1.0 / w[0])
        out[1] = cur
        start = 1
    else:
        prev, cur = np.zeros_like(z), np.ones_like(z)
        out[0] = cur
        start = 0
    for k in range(start, n_max):
        wm = w[k - 1] if k > 0 else 0.0
        nxt = ((z - lam[k]) * cur - wm * prev) / w[k]
        prev, cur = cur, nxt
        out[k + 1] = cur
    return out


def op_first_kind(op: jacobi.JacobiOperator, n: int, z):
    """P_n(z) by forward recurrence."""
    v = op_values(op, n, z)[n]
    return v if np.ndim(v) else float(v)


def op_second_kind(op: jacobi.JacobiOperator, n: int, z):
    """Q_n(z), the solution with Q_0 = 0, Q_1 = 1/w_0."""
    v = op_values(op, n, z, second_kind=True)[n]
    return v if np.ndim(v) else float(v)


def op_first_kind_F(op: jacobi.JacobiOperator, n: int, z: float) -> float:
    """P_n(z) from the product-times-F form (independent route)."""
    lam, w = op.entries(max(n, 1))
    gam = [jacobi.gamma_at(op, k) for k in range(n)]
    pref = math.prod((z - lam[k]) / w[k] for k in range(n))
    x = [gam[k] ** 2 / (lam[k] - z) for k in range(n)]
    return (pref * seqkernel.eval_F(x)).real


def op_second_kind_F(op: jacobi.JacobiOperator, n: int, z: float) -> float:
    """Q_n(z) from the product-times-F form (independent route)."""
    if n == 0:
        return 0.0
    lam, w = op.entries(n + 1)
    gam = [jacobi.gamma_at(op, k) for k in range(n + 1)]
    pref = math.prod((z - lam[k]) / w[k] for k in range(1, n)) / w[0]
    x = [gam[k + 1] ** 2 / (lam[k + 1] - z) for k in range(n - 1)]
    return (pref * seqkernel.eval_F(x)).real


# ---------------------------------------------------------------------------
# Lommel polynomials


def _lommel_guard(nu, x):
    if -nu >= 0 and -nu == math.floor(-nu):
        raise ParameterDomainError(f"-nu = {-nu:g} is a non-negative integer")
    if x == 0:
        raise InvalidInputError("x must be nonzero")


def lommel_R(n: int, nu: float, x: float) -> float:
    """R_{n,nu}(x) by R_{k+1} = 2(k+nu)/x R_k - R_{k-1}, R_{-1} = 0, R_0 = 1."""
    _lommel_guard(nu, x)
    if n < -1:
        raise InvalidInputError("n must be >= -1")
    if n == -1:
        return 0.0
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, 2.0 * (k + nu) / x * cur - prev
    return cur


def lommel_R_explicit(n: int, nu: float, x: float) -> float:
    """Explicit finite sum for R_{n,nu}(x); oracle for the recurrence."""
    _lommel_guard(nu, x)
    terms = []
    for k in range(n // 2 + 1):
        lg = log_abs_gamma(nu + n - k) - log_abs_gamma(nu + k)
        sg = gamma_sign(nu + n - k) * gamma_sign(nu + k)
        terms.append((-1) ** k * math.comb(n - k, k) * sg * math.exp(lg) * (2.0 / x) ** (n - 2 * k))
    return math.fsum(terms)


def lommel_R_F(n: int, nu: float, x: float) -> float:
    """R_{n,nu}(x) = (2/x)^n Gamma(nu+n)/Gamma(nu) F({x / (2(nu+k))}_{k<n})."""
    _lommel_guard(nu, x)
    ratio = math.prod(nu + k for k in range(n))
    f = seqkernel.eval_F([x / (2.0 * (nu + k)) for k in range(n)])
    return ((2.0 / x) ** n * ratio * f).real


def lommel_Q_nu(n: int, u: float, nu: float) -> float:
    """Q_n(u; nu), polynomials in the order nu.

    They are the first-kind polynomials of the (non-compact) Jacobi matrix
    with lam_k = -k and w_k = u, evaluated at z = nu.
    """
    if u == 0:
        raise InvalidInputError("u must be nonzero")
    op = jacobi.JacobiOperator(
        lambda k: -np.asarray(k, dtype=float),
        lambda k: np.full(np.shape(k), float(abs(u))),
        name=f"order-variable(u={u:g})",
    )
    # w_k = |u| keeps the weights positive; a negative u flips P_n by (-1)^n
    sign = 1.0 if u > 0 else (-1.0) ** n
    return sign * op_first_kind(op, n, nu)


# ---------------------------------------------------------------------------
# Coulomb family


def _jl(p: CoulombParams, tilde=False):
    op, _ = coulomb.coulomb_sequences(p, tilde=tilde)
    return op


def coulomb_P(p: CoulombParams, n: int, z):
    """P_n^(L)(eta; z); n = -1 gives 0."""
    if n == -1:
        return 0.0 * np.asarray(z, dtype=float) if np.ndim(z) else 0.0
    return op_first_kind(_jl(p), n, z)


def coulomb_R(p: CoulombParams, n: int, rho):
    """R_n^(L)(eta; rho) = P_n^(L)(eta; 1/rho)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho == 0):
        raise InvalidInputError("rho must be nonzero")
    v = coulomb_P(p, n, 1.0 / rho)
    return v if np.ndim(v) else float(v)


def coulomb_P_F(p: CoulombParams, n: int, z: float) -> float:
    """P_n^(L) from the F form with gamma_{L+k}^2/(z - lam_{L+k})."""
    # flipping the sign of every entry leaves each x_k x_{k+1}, hence F, unchanged
    return op_first_kind_F(_jl(p), n, z)


def coulomb_P_tilde(p: CoulombParams, n: int, z):
    """P~_n^(L)(eta; z), the polynomials of the bordered matrix J~_L."""
    return op_first_kind(_jl(p, tilde=True), n, z)


def _h(k, n, L):
    return k * (2 * L + k + 1) * (2 * n - k + 2) * (2 * L + 2 * n - k + 3) / (
        4.0 * (2 * n - 2 * k + 1) * (2 * n - 2 * k + 3)
    )


def Q_eta(n: int, L: float, eta: float, k_max: int | None = None) -> np.ndarray:
    """Q_0..Q_{k_max}(n, L; eta) from Q_{k+1} = eta Q_k - h_k(n, L) Q_{k-1}."""
    k_max = n if k_max is None else k_max
    out = np.empty(k_max + 1)
    prev, cur = 0.0, 1.0
    out[0] = cur
    for k in range(k_max):
        prev, cur = cur, eta * cur - _h(k, n, L) * prev
        out[k + 1] = cur
    return out


def Q_shift_residual(n: int, L: float, eta: float) -> float:
    """max_k |Q_k(n) - alpha_k Q_k(n-1) - beta_k eta Q_{k-1}(n-1)| (relative), k <= n - 1."""
    if n < 1:
        raise InvalidInputError("need n >= 1")
    qn = Q_eta(n, L, eta)
    qm = Q_eta(n - 1, L, eta)
    worst = 0.0
    for k in range(n):
        den = (2 * n - k + 1) * (2 * L + 2 * n - k + 2)
        alpha = 2 * (2 * n - 2 * k + 1) * (L + n + 1) / den
        beta = k * (2 * L + k + 1) / den
        prev = qm[k - 1] if k >= 1 else 0.0
        r = qn[k] - alpha * qm[k] - beta * eta * prev
        scale = abs(qn[k]) + abs(alpha * qm[k]) + abs(beta * eta * prev) + 1e-300
        worst = max(worst, abs(r) / scale)
    return worst


def _lgs(x):
    """(log|Gamma(x)|, sign Gamma(x)) for real x."""
    return log_abs_gamma(x), gamma_sign(x)


def coulomb_P_coeffs(p: CoulombParams, n: int) -> PolyCoeffs:
    """Explicit coefficients c_k(n, L, eta) of P_n^(L)(eta; z) = sum c_k z^(n-k).

    c_k = sqrt(2L+2n+3)/((L+1) sqrt(2L+3)) |Gamma(L+2+i eta)/Gamma(L+n+2+i eta)|
          Gamma(2n-k+2) Gamma(2L+2n-k+3) / (Gamma(2n-2k+2) Gamma(2L+k+2))
          2^(k-n-1)/k! Q_k(n, L; eta)
    """
    p.require_plain()
    L, eta = p.L, p.eta
    if n < 0:
        raise InvalidInputError("degree must be non-negative")
    if L == -1.0:
        raise ParameterDomainError("explicit coefficients need L != -1")
    q = Q_eta(n, L, eta)
    log_front = (
        0.5 * math.log(2 * L + 2 * n + 3)
        - math.log(abs(L + 1))
        - 0.5 * math.log(2 * L + 3)
        + log_abs_gamma(complex(L + 2, eta))
        - log_abs_gamma(complex(L + n + 2, eta))
    )
    sign_front = math.copysign(1.0, L + 1)
    coeffs = []
    for k in range(n + 1):
        parts = [_lgs(2 * n - k + 2), _lgs(2 * L + 2 * n - k + 3)]
        dparts = [_lgs(2 * n - 2 * k + 2), _lgs(2 * L + k + 2)]
        lg = sum(v for v, _ in parts) - sum(v for v, _ in dparts)
        sg = math.prod(s for _, s in parts) * math.prod(s for _, s in dparts)
        lg += (k - n - 1) * math.log(2.0) - math.lgamma(k + 1)
        coeffs.append(sign_front * sg * math.exp(log_front + lg) * q[k])
    return PolyCoeffs(tuple(coeffs), n)


def coulomb_P_coeffs_interp(p: CoulombParams, n: int) -> np.ndarray:
    """Coefficients of P_n^(L) by interpolation at n+1 Chebyshev nodes (oracle).

    Returned highest power first, like :class:`PolyCoeffs`.
    """
    op = _jl(p)
    lam, w = op.entries(max(n, 1))
    radius = max(1.0, float(np.max(np.abs(lam)) + 2 * np.max(w)))
    j = np.arange(n + 1)
    nodes = radius * np.cos((2 * j + 1) * np.pi / (2 * n + 2))
    vals = op_values(op, n, nodes)[n]
    cheb = np.polynomial.chebyshev.Chebyshev.fit(nodes, vals, n, domain=[-radius, radius])
    # identical domain and window give coefficients in z itself
    power = cheb.convert(kind=np.polynomial.Polynomial, domain=[-1, 1], window=[-1, 1])
    return power.coef[::-1].copy()


def hurwitz_sequence(p: CoulombParams, rho: float, ns) -> list:
    """Residuals of the limit
        sqrt((2L+3)(2L+2n+1)) C_{L+n} rho^(L+n) R_{n-1}^(L) -> sqrt(1 + eta^2/(L+1)^2) F_L
    for each n in ``ns``, relative to the right-hand side."""
    L, eta = p.L, p.eta
    target = math.sqrt(1.0 + eta * eta / (L + 1) ** 2) * coulomb.F_and_dF(p, rho).F
    out = []
    for n in ns:
        lhs = (
            math.sqrt((2 * L + 3) * (2 * L + 2 * n + 1))
            * coulomb.C_L(CoulombParams(L + n, eta))
            * rho ** (L + n)
            * coulomb_R(p, n - 1, rho)
        )
        out.append(abs(lhs - target) / abs(target))
    return out


# ---------------------------------------------------------------------------
# identities


def identity_a_residual(p: CoulombParams, n: int, rho: float) -> float:
    """Relative residual of

        R_n^(L-1) F_L - (L+1)/L sqrt((2L+3)/(2L+1)) sqrt(eta^2+L^2)/sqrt(eta^2+(L+1)^2)
            R_{n-1}^(L) F_{L-1}  =  sqrt((2L+2n+1)/(2L+1)) F_{L+n}.
    """
    L, eta = p.L, p.eta
    if not L > -0.5 or L == 0:
        raise ParameterDomainError("identity needs 0 != L > -1/2")
    pm = CoulombParams(L - 1, eta)
    fl = coulomb.F_and_dF(p, rho).F
    flm = coulomb.F_and_dF(pm, rho).F
    fln = coulomb.F_and_dF(CoulombParams(L + n, eta), rho).F
    k = (L + 1) / L * math.sqrt((2 * L + 3) / (2 * L + 1)) * math.sqrt(eta * eta + L * L) / math.sqrt(
        eta * eta + (L + 1) ** 2
    )
    t1 = coulomb_R(pm, n, rho) * fl
    t2 = k * coulomb_R(p, n - 1, rho) * flm if n >= 1 else 0.0
    rhs = math.sqrt((2 * L + 2 * n + 1) / (2 * L + 1)) * fln
    return abs(t1 - t2 - rhs) / (abs(t1) + abs(t2) + abs(rhs))


def identity_b_residual(p: CoulombParams, n: int, s: int, z: float) -> float:
    """Relative residual of

        P_n^(L-1) P_{n+s}^(L) - P_{n+s+1}^(L-1) P_{n-1}^(L) = (w_L / w_{L+n}) P_s^(L+n).
    """
    L, eta = p.L, p.eta
    pm = CoulombParams(L - 1, eta)
    pm.require_plain()
    t1 = coulomb_P(pm, n, z) * coulomb_P(p, n + s, z)
    t2 = coulomb_P(pm, n + s + 1, z) * coulomb_P(p, n - 1, z)
    wl = float(coulomb.coulomb_weight(L, eta))
    wln = float(coulomb.coulomb_weight(L + n, eta))
    rhs = wl / wln * coulomb_P(CoulombParams(L + n, eta), s, z)
    return abs(t1 - t2 - rhs) / (abs(t1) + abs(t2) + abs(rhs))


def bessel_F_residual(nu: float, rho: float, tol: float = 1e-13) -> float:
    """Relative residual of F({rho/(nu+k)}_{k>=1}) = Gamma(nu+1) rho^(-nu) J_nu(2 rho), rho > 0.

    The left side is the regularized characteristic function of the Bessel
    Jacobi operator, so its tail is handled by the same model as G_J.
    """
    if not rho > 0:
        raise ParameterDomainError("rho must be positive")
    op, decay = coulomb.bessel_sequences(nu)
    lhs = jacobi.evaluate_G(op, decay, rho, tol).value
    rhs = math.exp(math.lgamma(nu + 1) - nu * math.log(rho)) * coulomb.bessel_J(nu, 2 * rho)
    return float(abs(lhs - rhs) / (abs(lhs) + abs(rhs)))


def identity_suite(p: CoulombParams, n_max: int = 6, s_max: int = 6, rhos=(0.7, 1.3, 2.0)) -> IdentityReport:
    """Largest residuals of the Coulomb and Lommel identities over a grid.

    (a) uses the rho grid and n = 1..n_max; (b) uses z = 1/rho, n, s <= n_max, s_max.
    The Lommel-Bessel relation, the order-variable identity and the Bessel
    form of F are run at nu = L + 1/2 (when admissible) on the same grid.
    """
    res_a = 0.0
    if p.L > -0.5 and p.L != 0:
        res_a = max(identity_a_residual(p, n, r) for n in range(1, n_max + 1) for r in rhos)
    else:
        res_a = math.nan
    res_b = math.nan
    if CoulombParams(p.L - 1, p.eta).L > -1.5 and not (p.L - 1 == -1.0 and p.eta != 0):
        res_b = max(
            identity_b_residual(p, n, s, 1.0 / r)
            for n in range(0, n_max + 1)
            for s in range(0, s_max + 1)
            for r in rhos
        )
    nu = p.L + 0.5
    lb = math.nan
    if nu > 0:
        lb = 0.0
        for r in rhos:
            for n in range(1, n_max + 1):
                lhs = coulomb.bessel_J(nu + n, r)
                a = lommel_R(n, nu, r) * coulomb.bessel_J(nu, r)
                b = lommel_R(n - 1, nu + 1, r) * coulomb.bessel_J(nu - 1, r)
                lb = max(lb, abs(lhs - a + b) / (abs(lhs) + abs(a) + abs(b)))
    qn = 0.0
    for r in rhos:
        for n in range(0, n_max + 1):
            a = lommel_Q_nu(n, r, 1.2)
            b = lommel_R(n, 1.2, 2 * r)
            qn = max(qn, abs(a - b) / (1.0 + abs(b)))
    qs = max(Q_shift_residual(n, p.L, p.eta) for n in range(1, n_max + 1))
    bf = max(bessel_F_residual(nu, r) for r in rhos) if nu > -1 else math.nan
    return IdentityReport(res_a, res_b, lb, qn, qs, bf, {"n_max": n_max, "s_max": s_max, "rhos": tuple(rhos)})


# ---------------------------------------------------------------------------
# orthogonality measure


def spacing_fit(zeros):
    """Conservative linear model |rho_k| >= a + b k for zeros sorted by modulus.

    Zeros of one sign are asymptotically equally spaced, so the combined
    modulus-ordered list grows linearly.  The slope is the smallest 4-step
    secant over the upper half of the list, shrunk by 5%, and the intercept
    is the smallest one compatible with every point of that half.
    """
    r = np.sort(np.abs(np.asarray(zeros, dtype=float)))
    K = r.size
    if K < 8:
        return math.nan, math.nan
    half = K // 2
    k = np.arange(1, K + 1)
    seg, kk = r[half:], k[half:]
    b = 0.95 * float(np.min((seg[4:] - seg[:-4]) / 4.0))
    a = float(np.min(seg - b * kk))
    return a, b


def tail_power_bound(a: float, b: float, K: int, power: float) -> float:
    """Bound on sum_{k>K} (a + b k)^(-power) by the integral from K; power > 1."""
    if not (b > 0 and a + b * K > 0) or power <= 1:
        return math.inf
    return (a + b * K) ** (1.0 - power) / (b * (power - 1.0))


def orthogonality_measure(p: CoulombParams, K: int, tol: float = 1e-10, tilde: bool = False,
                          refine: bool = False) -> DiscreteMeasure:
    """The first K atoms of the orthogonality measure of P^(L) (or P~^(L)).

    Masses are closed forms at the zeros rho_k of phi_L:
        (2L+3)(L+1)^2 / ((L+1)^2 + eta^2) rho_k^(-2);
    for the bordered matrix, at zeros of the derivative,
        (L+1) / (rho~^2 - 2 eta rho~ - L(L+1)).
    Zeros come from the truncated matrix (with bisection refinement when
    ``refine``); the doubling gap is the per-zero error.
    """
    if K < 1:
        raise InvalidInputError("K must be >= 1")
    if tilde:
        res = coulomb.zeros_dF(p, K, tol, refine=refine)
    else:
        res = coulomb.zeros_F(p, K, tol, refine=refine)
    rho = np.array(res.zeros)
    L, eta = p.L, p.eta
    if tilde:
        masses = (L + 1) / (rho * rho - 2 * eta * rho - L * (L + 1))
        scale = float(np.max(masses * rho * rho))
    else:
        scale = (2 * L + 3) * (L + 1) ** 2 / ((L + 1) ** 2 + eta * eta) if L != -1 else 2 * L + 3
        masses = scale / (rho * rho)
    if np.any(masses <= 0):
        raise ParameterDomainError("non-positive atom mass; zeros inaccurate or parameters out of range")
    atoms = tuple((float(1.0 / r), float(m)) for r, m in zip(rho, masses))
    total = math.fsum(masses.tolist())
    a, b = spacing_fit(rho)
    majorant = scale * tail_power_bound(a, b, rho.size, 2.0)
    if tilde:
        return DiscreteMeasure(atoms, 0.0, max(0.0, 1.0 - total), majorant,
                               zero_mass_residual=1.0 - total - majorant, zero_errors=tuple(res.error_bounds))
    # sum rule: scale * sum rho^-2 = scale * ||J_L||_HS^2 = 1, no atom at 0
    return DiscreteMeasure(atoms, 0.0, 1.0 - total, majorant, zero_errors=tuple(res.error_bounds))


def orthogonality_matrix(p: CoulombParams, measure: DiscreteMeasure, n_max: int, tilde: bool = False):
    """(G, bound): Gram matrix sum_k mass_k P_m(x_k) P_n(x_k) for m, n <= n_max,
    and the matching bound on the contribution of the missing atoms,
    tail_defect * max_{|x| <= x_K} |P_m P_n|."""
    op = _jl(p, tilde=tilde)
    x = measure.points
    m = measure.masses
    vals = op_values(op, n_max, x)
    gram = (vals * m) @ vals.T
    x_edge = float(np.min(np.abs(x)))
    grid = np.linspace(-x_edge, x_edge, 201)
    gv = np.abs(op_values(op, n_max, grid))
    sup = np.max(gv[:, None, :] * gv[None, :, :], axis=2)
    return gram, abs(measure.tail_defect) * sup
