"""The alternating pair-product functional F on complex sequences.

For a sequence x = (x_1, x_2, ...) with sum |x_k x_{k+1}| finite,

    F(x) = 1 + sum_{m>=1} (-1)^m sum_{k_1 < k_2 - 1 < ...} prod_j x_{k_j} x_{k_j + 1},

i.e. a signed sum over all sets of disjoint adjacent index pairs.  The
production path never touches the multi-sum; it runs the two-term rule

    F(x) = F(Tx) - x_1 x_2 F(T^2 x)

backwards from the end of the window, where T is the left shift.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "ComplexSeqWindow",
    "FValue",
    "eval_F",
    "eval_F_tail",
    "eval_F_bound",
    "truncation_error_bound",
    "check_shift_identity",
]


@dataclass(frozen=True)
class ComplexSeqWindow:
    """A finite window x_1..x_n of a (possibly infinite) complex sequence.

    ``tail_bound`` bounds sum_{k>=n} |x_k x_{k+1}|, i.e. every adjacent pair
    that touches a discarded entry, including the pair straddling the cut.
    It is zero for genuinely finite sequences.
    """

    entries: tuple
    tail_bound: float = 0.0

    def __post_init__(self):
        entries = tuple(complex(x) for x in self.entries)
        for x in entries:
            if not cmath.isfinite(x):
                raise InvalidInputError(f"non-finite sequence entry {x!r}")
        tb = float(self.tail_bound)
        if not tb >= 0.0 or math.isnan(tb):
            raise InvalidInputError(f"tail_bound must be >= 0, got {self.tail_bound!r}")
        if math.isinf(tb):
            raise InvalidInputError("tail_bound must be finite for a sequence in the domain of F")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "tail_bound", tb)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def of(cls, entries: Sequence[complex], tail_bound: float = 0.0) -> "ComplexSeqWindow":
        return cls(tuple(entries), tail_bound)

    def pair_sum(self) -> float:
        """sum_{k<n} |x_k x_{k+1}| over pairs inside the window."""
        x = self.entries
        return math.fsum(abs(x[k] * x[k + 1]) for k in range(len(x) - 1))


class FValue(NamedTuple):
    value: complex
    error_bound: float
    stale: bool


def _as_window(window) -> ComplexSeqWindow:
    if isinstance(window, ComplexSeqWindow):
        return window
    return ComplexSeqWindow(tuple(window))


def _backward(entries) -> complex:
    # f_j = f_{j+1} - x_j x_{j+1} f_{j+2}, with f_{n+1} = f_n = 1
    n = len(entries)
    if n < 2:
        return 1.0 + 0.0j
    f_next2 = 1.0 + 0.0j
    f_next = 1.0 + 0.0j
    for j in range(n - 2, -1, -1):
        f = f_next - entries[j] * entries[j + 1] * f_next2
        f_next2, f_next = f_next, f
    return f_next


def eval_F(window) -> complex:
    """F of the window entries (the tail beyond the window is taken as zero).

    ``window`` may be a :class:`ComplexSeqWindow` or any sequence of numbers.
    """
    return _backward(_as_window(window).entries)


def truncation_error_bound(window) -> float:
    """Bound on |F(x) - F(x_1..x_n)| from the window's tail bound.

    Every term of the multi-sum that is dropped uses at least one pair from
    the tail, so the dropped part is majorized by
    exp(S_in) * (exp(tail_bound) - 1) with S_in the in-window pair sum.
    """
    w = _as_window(window)
    if w.tail_bound == 0.0:
        return 0.0
    return math.exp(w.pair_sum()) * math.expm1(w.tail_bound)


def eval_F_tail(window, tol: float) -> FValue:
    """F of a tail-truncated infinite sequence together with its error bound.

    ``stale`` is set when the truncation bound exceeds ``tol``; the value
    is still returned so the caller can decide what to do with it.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    w = _as_window(window)
    err = truncation_error_bound(w)
    return FValue(eval_F(w), err, err > tol)


def eval_F_bound(window) -> float:
    """exp(sum |x_k x_{k+1}| + tail_bound), an upper bound for |F(x)|."""
    w = _as_window(window)
    return math.exp(w.pair_sum() + w.tail_bound)


def check_shift_identity(window, d: int) -> float:
    """Largest residual of the shift/Wronskian identities on a finite window.

    Checks, for 1 <= d <= n - 2 and every s with d + s <= n,

        F(x_1..x_d) F(x_2..x_{d+s}) - F(x_1..x_{d+s}) F(x_2..x_d)
            = prod_{j<=d} x_j x_{j+1} * F(x_{d+2}..x_{d+s})

    and the full-window form

        F(x_1..x_d) F(Tx) - F(x_2..x_d) F(x) = prod_{k<=d} x_k x_{k+1} F(T^{d+1} x).

    Residuals are scaled by 1 + the magnitudes of the terms involved.
    """
    w = _as_window(window)
    x = w.entries
    n = len(x)
    if d < 1 or d + 2 > n:
        raise InvalidInputError(f"need 1 <= d and d + 2 <= window length (d={d}, n={n})")

    def F(lo, hi):
        # F(x_lo .. x_hi) with 1-based inclusive bounds; empty when hi < lo
        return _backward(x[lo - 1:hi]) if hi >= lo else 1.0 + 0.0j

    prod = 1.0 + 0.0j
    for j in range(1, d + 1):
        prod *= x[j - 1] * x[j]

    worst = 0.0
    for s in range(1, n - d + 1):
        a = F(1, d) * F(2, d + s)
        b = F(1, d + s) * F(2, d)
        rhs = prod * F(d + 2, d + s)
        scale = 1.0 + abs(a) + abs(b) + abs(rhs)
        worst = max(worst, abs(a - b - rhs) / scale)

    a = F(1, d) * F(2, n)
    b = F(2, d) * F(1, n)
    rhs = prod * F(d + 2, n)
    scale = 1.0 + abs(a) + abs(b) + abs(rhs)
    worst = max(worst, abs(a - b - rhs) / scale)
    return worst


def random_window(rng: np.random.Generator, n: int, scale: float = 1.0) -> ComplexSeqWindow:
    """Random complex window with entries of modulus below ``scale``; used by self-tests."""
    r = scale * rng.random(n)
    t = 2 * np.pi * rng.random(n)
    return ComplexSeqWindow(tuple(r * np.exp(1j * t)))
