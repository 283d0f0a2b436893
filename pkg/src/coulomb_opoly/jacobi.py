"""Semi-infinite symmetric Jacobi operators with l^1 diagonal and l^2 weights.

The central object is the regularized characteristic function

    G_J(z) = prod_n (1 - z lam_n) * F({gamma_n^2 / (lam_n - 1/z)}),   G_J(0) = 1,

an entire function whose zeros are the reciprocals of the nonzero
eigenvalues of J.  Folding the product into the F-recurrence gives the
division-free rule

    g_j = (1 - z lam_j) g_{j+1} - z^2 w_j^2 g_{j+2},      g_j = G_{J^(j)}(z),

which is what :func:`evaluate_G` runs (see ``_kernels.det_recurrence``).
The infinite tail beyond the cut N is replaced by its first-order
log-determinant approximation, and the neglected part is bounded through
Schatten-norm estimates of the tail operator.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import (
    ConvergenceError,
    InvalidInputError,
    PoleProximityError,
    SeedingError,
)

__all__ = [
    "JacobiOperator",
    "DecayDescriptor",
    "GEval",
    "SpectrumResult",
    "XiVector",
    "max_truncation",
    "gamma_at",
    "truncate",
    "truncate_bands",
    "eigenvalues_sym_tridiag",
    "evaluate_G",
    "char_function_G",
    "weyl_m",
    "xi_vector",
    "zeros_of_G",
    "zeros_interlace",
]

EPS = np.finfo(float).eps
DEFAULT_MAX_TRUNC = 1 << 23
MAX_TRUNC_ENV = "COULOMB_OPOLY_MAX_TRUNC"


def max_truncation() -> int:
    """Cap on truncation orders; ``COULOMB_OPOLY_MAX_TRUNC`` overrides the default."""
    raw = os.environ.get(MAX_TRUNC_ENV)
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise InvalidInputError(f"{MAX_TRUNC_ENV} must be an integer, got {raw!r}")
        if cap < 2:
            raise InvalidInputError(f"{MAX_TRUNC_ENV} must be >= 2")
        return cap
    return DEFAULT_MAX_TRUNC


@dataclass(frozen=True)
class DecayDescriptor:
    """Tail information certifying lam in l^1 and w in l^2.

    Every callable takes an absolute index N of the *unshifted* sequences.
    The two bounds are required; the rest sharpen the truncation of
    :func:`evaluate_G` and may be omitted.

    lambda_tail_bound(N) >= sum_{n>=N} |lam_n|
    weight_tail_bound(N) >= sum_{n>=N} w_n^2
    lambda_tail_sum(N)   == sum_{n>=N} lam_n       (exact, signed)
    weight_tail_sum(N)   == sum_{n>=N} w_n^2       (exact)
    lambda_sup_bound(N)  >= sup_{n>=N} |lam_n|
    weight_sup_bound(N)  >= sup_{n>=N} w_n
    """

    lambda_tail_bound: Callable[[int], float]
    weight_tail_bound: Callable[[int], float]
    lambda_tail_sum: Optional[Callable[[int], float]] = None
    weight_tail_sum: Optional[Callable[[int], float]] = None
    lambda_sup_bound: Optional[Callable[[int], float]] = None
    weight_sup_bound: Optional[Callable[[int], float]] = None


@dataclass(frozen=True)
class JacobiOperator:
    """Jacobi matrix J^(shift) built from index rules.

    ``lambda_at`` and ``weight_at`` must accept an integer numpy array of
    indices and return float arrays of the same shape.
    """

    lambda_at: Callable[[np.ndarray], np.ndarray]
    weight_at: Callable[[np.ndarray], np.ndarray]
    shift: int = 0
    name: str = field(default="J", compare=False)

    def __post_init__(self):
        if self.shift < 0:
            raise InvalidInputError("shift must be non-negative")

    def shifted(self, k: int = 1) -> "JacobiOperator":
        """The operator J^(shift + k) with the first k rows and columns removed."""
        return JacobiOperator(self.lambda_at, self.weight_at, self.shift + k, self.name)

    def entries(self, n: int):
        """(lam, w) arrays of the first n diagonal and off-diagonal entries."""
        return _entries(self, int(n))


@functools.lru_cache(maxsize=8)
def _entries(op: JacobiOperator, n: int):
    idx = np.arange(op.shift, op.shift + n, dtype=np.int64)
    lam = np.ascontiguousarray(np.broadcast_to(op.lambda_at(idx), idx.shape), dtype=float)
    w = np.ascontiguousarray(np.broadcast_to(op.weight_at(idx), idx.shape), dtype=float)
    if n and not (np.all(np.isfinite(lam)) and np.all(np.isfinite(w))):
        raise InvalidInputError(f"non-finite matrix entries for {op.name}")
    if n and np.any(w <= 0):
        raise InvalidInputError(f"weights of {op.name} must be positive")
    lam.flags.writeable = False
    w.flags.writeable = False
    return lam, w


class GEval(NamedTuple):
    value: complex
    derivative: complex
    error_bound: float
    truncation_order: int


class SpectrumResult(NamedTuple):
    eigenvalues: tuple
    zeros: tuple
    error_bounds: tuple
    truncation_order: int


class XiVector(NamedTuple):
    xi_minus1: float
    xi: np.ndarray
    dxi_minus1: float
    dxi: np.ndarray
    error_bound: float


def gamma_at(op: JacobiOperator, n: int) -> float:
    """gamma_n with gamma_0 = 1, gamma_{k+1} = w_k / gamma_k."""
    if n < 0:
        raise InvalidInputError("n must be non-negative")
    _, w = op.entries(n)
    g = 1.0
    for k in range(n):
        g = w[k] / g
    return g


def truncate_bands(op: JacobiOperator, n: int):
    """Diagonal and off-diagonal of the top-left n x n block."""
    if n < 1:
        raise InvalidInputError("truncation order must be >= 1")
    lam, w = op.entries(n)
    return lam.copy(), w[: n - 1].copy()


def truncate(op: JacobiOperator, n: int) -> np.ndarray:
    """Dense top-left n x n block of the operator."""
    d, e = truncate_bands(op, n)
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


def _as_bands(matrix):
    if isinstance(matrix, tuple):
        d, e = matrix
        return np.asarray(d, dtype=float), np.asarray(e, dtype=float)
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError("expected a square matrix")
    d = np.diag(m).copy()
    e = np.diag(m, 1).copy()
    if not np.array_equal(e, np.diag(m, -1)):
        raise InvalidInputError("matrix is not symmetric")
    rest = m - np.diag(d) - np.diag(e, 1) - np.diag(e, -1)
    if np.any(rest != 0):
        raise InvalidInputError("matrix is not tridiagonal")
    return d, e


def eigenvalues_sym_tridiag(matrix, tol: Optional[float] = None, indices=None) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix, ascending, by Sturm bisection.

    Parameters
    ----------
    matrix : ndarray or (diag, offdiag) tuple
    tol : float, optional
        Absolute bisection tolerance; defaults to a few ulps of the
        Gershgorin radius.
    indices : array of int, optional
        Ascending eigenvalue indices to compute (all by default).
    """
    d, e = _as_bands(matrix)
    n = d.shape[0]
    if n == 0:
        return np.empty(0)
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise InvalidInputError("matrix entries must be finite")
    ae = np.abs(e)
    r = np.zeros(n)
    r[:-1] += ae
    r[1:] += ae
    lo = float(np.min(d - r))
    hi = float(np.max(d + r))
    scale = max(abs(lo), abs(hi), np.finfo(float).tiny)
    if tol is None:
        tol = 4 * EPS * scale
    elif not tol > 0:
        raise InvalidInputError("tolerance must be positive")
    pad = 2 * EPS * scale + tol
    idx = np.arange(n) if indices is None else np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InvalidInputError("eigenvalue index out of range")
    return _kernels.bisect_eigenvalues(d, e * e, idx.astype(np.int64), lo - pad, hi + pad, tol)


# ---------------------------------------------------------------------------
# characteristic function


def _tail_model(decay: DecayDescriptor, m: int, rho):
    """First-order log of G_{J^(m)}(rho), its rho-derivative, and the remainder bound."""
    a = abs(rho)
    lam_l1 = float(decay.lambda_tail_bound(m))
    w_l2 = float(decay.weight_tail_bound(m))
    sl = float(decay.lambda_sup_bound(m)) if decay.lambda_sup_bound else lam_l1
    sw = float(decay.weight_sup_bound(m)) if decay.weight_sup_bound else math.sqrt(w_l2)
    norm = sl + 2.0 * sw
    q = a * norm
    hs2 = sl * lam_l1 + 2.0 * w_l2
    if q >= 1.0:
        return 0.0, 0.0, math.inf
    if decay.lambda_tail_sum is not None and decay.weight_tail_sum is not None:
        t1 = float(decay.lambda_tail_sum(m))
        ws = float(decay.weight_tail_sum(m))
        log_g = -rho * t1 - rho * rho * ws
        dlog_g = -t1 - 2.0 * rho * ws
        # log G = -rho Tr K - sum_{j>=2} rho^j Tr K^j / j; what is kept is exact
        # up to the diagonal part of Tr K^2, the rest is bounded via
        # |Tr K^3| <= sum|lam|^3 + 3 sum w^2 (|lam_n| + |lam_{n+1}|) and
        # |Tr K^j| <= ||K||^(j-2) ||K||_HS^2.
        rem = (
            a * a * sl * lam_l1 / 2.0
            + a ** 3 * (sl * sl * lam_l1 + 6.0 * sl * w_l2) / 3.0
            + a ** 4 * norm * norm * hs2 / (4.0 * (1.0 - q))
        )
    else:
        log_g = 0.0 * rho
        dlog_g = 0.0 * rho
        rem = a * lam_l1 + a * a * hs2 / (2.0 * (1.0 - q))
    return log_g, dlog_g, rem


def _truncation_order(op, decay, rho, tol, min_n, cap):
    n = max(64, min_n)
    best = math.inf
    while True:
        _, _, rem = _tail_model(decay, op.shift + n, rho)
        eps_n = math.expm1(rem) if rem < 700 else math.inf
        best = min(best, eps_n)
        if eps_n <= tol:
            return n, eps_n
        if n >= cap:
            raise ConvergenceError(
                f"tail bound {best:.3g} above tol {tol:.3g} at truncation cap {cap}",
                best_bound=best,
            )
        n = min(2 * n, cap)


def _run(op, decay, rho, tol, keep=1, max_n=None):
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    cap = max_truncation() if max_n is None else int(max_n)
    n, eps_n = _truncation_order(op, decay, rho, tol, keep, cap)
    lam, w = op.entries(n)
    rho = complex(rho) if isinstance(rho, complex) else float(rho)
    out = np.zeros((keep, 4), dtype=complex if isinstance(rho, complex) else float)
    _kernels.det_recurrence(lam, w * w, rho, out)
    m = op.shift + n
    lg0, dl0, _ = _tail_model(decay, m, rho)
    lg1, dl1, _ = _tail_model(decay, m + 1, rho)
    g_n = np.exp(lg0)
    g_n1 = np.exp(lg1)
    return out, g_n, g_n * dl0, g_n1, g_n1 * dl1, eps_n, n


def evaluate_G(op: JacobiOperator, decay: DecayDescriptor, rho, tol: float = 1e-12,
               max_n: Optional[int] = None) -> GEval:
    """G_J(rho), its derivative, and a bound on the truncation error.

    ``tol`` bounds the relative size of the neglected tail factor; the
    returned ``error_bound`` is that factor times the magnitude of the
    recurrence coefficients (plus a rounding allowance).
    """
    if rho == 0:
        return GEval(1.0, _G_prime_at_zero(op, decay), 0.0, 0)
    out, g_n, dg_n, g_n1, dg_n1, eps_n, n = _run(op, decay, rho, tol, 1, max_n)
    a, b, da, db = out[0]
    value = a * g_n + b * g_n1
    deriv = da * g_n + a * dg_n + db * g_n1 + b * dg_n1
    scale = abs(a * g_n) + abs(b * g_n1)
    err = scale * eps_n + scale * 8.0 * EPS * (math.sqrt(n) + 10.0)
    return GEval(value, deriv, err, n)


def _G_prime_at_zero(op, decay):
    # G(z) = exp(-z Tr J) det2(1 - zJ), det2 = 1 + O(z^2): G'(0) = -Tr J
    if decay.lambda_tail_sum is not None:
        return -float(decay.lambda_tail_sum(op.shift))
    lam, _ = op.entries(min(max_truncation(), 1 << 16))
    return -math.fsum(lam)


def char_function_G(op: JacobiOperator, decay: DecayDescriptor, rho, tol: float = 1e-12):
    """Regularized characteristic function G_J(rho); 1 at rho = 0."""
    if rho == 0:
        return 1.0
    return evaluate_G(op, decay, rho, tol).value


def weyl_m(op: JacobiOperator, decay: DecayDescriptor, z: float, tol: float = 1e-12) -> float:
    """Weyl function m(z) = <e_0, (J - z)^{-1} e_0> off the spectrum.

    Uses m(z) = -(1/z) G_{J^(1)}(1/z) / G_J(1/z).
    """
    if z == 0:
        raise InvalidInputError("z = 0 is not handled by the ratio form")
    zeta = 1.0 / z
    g = evaluate_G(op, decay, zeta, tol)
    g1 = evaluate_G(op.shifted(1), decay, zeta, tol)
    noise = max(g.error_bound, tol * (abs(g.value) + abs(g.derivative * zeta)))
    if abs(g.value) <= noise:
        raise PoleProximityError(f"z = {z!r} is within numerical noise of an eigenvalue")
    return -zeta * g1.value / g.value


def jump_at_zero(op: JacobiOperator, decay: DecayDescriptor, rho: float, tol: float = 1e-12) -> float:
    """Mass of the orthogonality measure at x = 1/rho for a zero rho of G_J.

    Lambda = -x G_{J^(1)}(1/x) / G_J'(1/x) with x = 1/rho.
    """
    g = evaluate_G(op, decay, rho, tol)
    g1 = evaluate_G(op.shifted(1), decay, rho, tol)
    return -(1.0 / rho) * g1.value / g.derivative


def xi_vector(op: JacobiOperator, decay: DecayDescriptor, z: float, K: int,
              tol: float = 1e-12) -> XiVector:
    """xi_{-1}(z) = G_J(z) and xi_k(z) = (prod_{l<k} w_l) z^{k+1} G_{J^(k+1)}(z), k = 0..K.

    Derivatives in z come from the same recurrence (forward mode).
    """
    if z == 0:
        raise InvalidInputError("z must be nonzero")
    if K < 0:
        raise InvalidInputError("K must be non-negative")
    keep = K + 2
    out, g_n, dg_n, g_n1, dg_n1, eps_n, n = _run(op, decay, z, tol, keep)
    a, b, da, db = out[:, 0], out[:, 1], out[:, 2], out[:, 3]
    g = a * g_n + b * g_n1
    dg = da * g_n + a * dg_n + db * g_n1 + b * dg_n1
    _, w = op.entries(max(K, 1))
    # prefactor p_k = (prod_{l<k} w_l) z^{k+1}
    k = np.arange(K + 1)
    logw = np.concatenate(([0.0], np.cumsum(np.log(w[:K]))))
    pref = np.exp(logw) * z ** (k + 1)
    dpref = pref * (k + 1) / z
    xi = pref * g[1:]
    dxi = dpref * g[1:] + pref * dg[1:]
    scale = abs(a[0] * g_n) + abs(b[0] * g_n1)
    return XiVector(g[0], xi, dg[0], dxi, scale * eps_n)


# ---------------------------------------------------------------------------
# zeros


def _seeds(op, count, n):
    d, e = truncate_bands(op, n)
    k = min(count, n)
    idx = np.unique(np.concatenate((np.arange(k), np.arange(n - k, n))))
    mu = eigenvalues_sym_tridiag((d, e), indices=idx)
    mu = mu[mu != 0.0]
    # order the reciprocals, i.e. the candidate zeros, by modulus
    return mu[_modulus_order(1.0 / mu)]


TIE_RTOL = 1e-9


def _modulus_order(r, slack=None) -> list:
    """Indices sorting ``r`` by modulus, positive first on ties.

    Two moduli tie when they differ by at most TIE_RTOL relative plus the
    sum of their ``slack`` entries (error bounds), so +-pairs of an even
    function come out in a fixed order regardless of rounding noise.
    """
    r = np.asarray(r, dtype=float)
    s = np.zeros(r.size) if slack is None else np.asarray(slack, dtype=float)
    idx = sorted(range(r.size), key=lambda i: (abs(r[i]), r[i] < 0))
    changed = True
    while changed:
        changed = False
        for j in range(len(idx) - 1):
            a, b = idx[j], idx[j + 1]
            if r[a] < 0 < r[b]:
                width = TIE_RTOL * max(abs(r[a]), abs(r[b])) + s[a] + s[b]
                if abs(abs(r[a]) - abs(r[b])) <= width:
                    idx[j], idx[j + 1] = b, a
                    changed = True
    return idx


def _sign_certain(ge: GEval) -> int:
    v = ge.value.real if isinstance(ge.value, complex) else ge.value
    if abs(v) <= ge.error_bound:
        return 0
    return 1 if v > 0 else -1


def zeros_of_G(op: JacobiOperator, decay: DecayDescriptor, count: int, tol: float = 1e-10,
               refine: bool = True, n0: int = 64, n_max: Optional[int] = None) -> SpectrumResult:
    """The ``count`` smallest-modulus zeros of G_J.

    Seeds are reciprocals of the largest-modulus eigenvalues of the N x N
    truncation, with N doubled from ``n0`` until the seeds move by less than
    10 tol.  With ``refine`` each seed is bracketed by a certified sign change
    of G_J and bisected down to ``tol``; otherwise the last doubling gap is
    reported as the error estimate.
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    cap = max_truncation()
    if n_max is None:
        n_max = max(2048, 8 * count)
    n_max = min(n_max, cap)
    n = max(n0, 4 * count)
    n = min(n, n_max)
    mu = _seeds(op, count, n)
    move = np.full(count, np.inf)
    while True:
        if n >= n_max:
            break
        n2 = min(2 * n, n_max)
        mu2 = _seeds(op, count, n2)
        r1 = 1.0 / mu[:count]
        r2 = 1.0 / mu2[:count]
        if r1.shape == r2.shape:
            move = np.abs(r1 - r2)
        n, mu = n2, mu2
        if np.all(move < 10 * tol):
            break
    if mu.size < count:
        raise SeedingError(f"truncation of order {n} has only {mu.size} nonzero eigenvalues")
    all_r = 1.0 / mu
    seeds = all_r[:count]
    if not np.all(np.isfinite(move)):
        move = np.zeros(count)

    if not refine:
        zs = [float(r) for r in seeds]
        errs = [float(m) for m in move]
        order = _modulus_order(zs, errs)
        return SpectrumResult(
            tuple(float(mu[i]) for i in order),
            tuple(zs[i] for i in order),
            tuple(errs[i] for i in order),
            n,
        )

    g_tol = min(1e-8, max(1e-14, 1e-2 * tol))
    zeros, errs = [], []
    for i, r in enumerate(seeds):
        others = np.delete(all_r, i)
        gap = min(float(np.min(np.abs(others - r))) if others.size else math.inf, abs(r))
        z, e = _refine_zero(op, decay, float(r), float(move[i]), gap, tol, g_tol)
        zeros.append(z)
        errs.append(e)
    order = _modulus_order(zeros, errs)
    return SpectrumResult(
        tuple(float(1.0 / zeros[i]) for i in order),
        tuple(zeros[i] for i in order),
        tuple(errs[i] for i in order),
        n,
    )


def _refine_zero(op, decay, r, move, gap, tol, g_tol):
    half_gap = 0.5 * gap
    delta = max(4.0 * move, 64 * EPS * abs(r), 0.5 * tol)
    while True:
        if delta >= half_gap:
            delta = half_gap * 0.999
        a, b = r - delta, r + delta
        sa = _sign_certain(evaluate_G(op, decay, a, g_tol))
        sb = _sign_certain(evaluate_G(op, decay, b, g_tol))
        if sa and sb and sa != sb:
            break
        if delta >= half_gap * 0.99:
            raise SeedingError(
                f"no certified sign change of G around seed {r!r} (half-gap {half_gap:.3g})",
                best_bound=delta,
            )
        delta *= 8.0
    while (b - a) > tol:
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        sm = _sign_certain(evaluate_G(op, decay, mid, g_tol))
        if sm == 0:
            break
        if sm == sa:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b), 0.5 * (b - a)


def zeros_interlace(a, b) -> bool:
    """True when same-sign members of two zero lists strictly alternate.

    Only the range covered by both lists is compared, since either list
    may stop before the other.
    """
    for sign in (1.0, -1.0):
        za = sorted(abs(x) for x in a if x * sign > 0)
        zb = sorted(abs(x) for x in b if x * sign > 0)
        if not za or not zb:
            continue
        top = min(za[-1], zb[-1])
        merged = sorted([(x, 0) for x in za if x <= top] + [(x, 1) for x in zb if x <= top])
        for (x1, l1), (x2, l2) in zip(merged, merged[1:]):
            if l1 == l2 or x1 == x2:
                return False
    return True
