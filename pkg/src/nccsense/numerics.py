"""Small dense-matrix helpers and chi-square tail functions.

Everything here is self-contained (stdlib math plus numpy containers) and
sized for the dimensions this package actually meets: antenna counts up to
16, augmented matrices up to 32x32, chi-square degrees of freedom up to 512.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DET_DIM = 32

# Acklam's rational approximation to the standard normal quantile.  Only used
# to seed the chi-square quantile search, so its ~1e-9 accuracy is plenty.
_ACK_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_ACK_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_ACK_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_ACK_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array, rejecting non-finite entries."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def is_hermitian(a, tol: float = 0.0) -> bool:
    """True when ``a`` equals its conjugate transpose to within ``tol``."""
    arr = as_complex_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"need a square matrix, got shape {arr.shape}")
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    if arr.size == 0:
        return True
    return float(np.abs(arr - arr.conj().T).max()) <= tol


def is_symmetric(a, tol: float = 0.0) -> bool:
    """True when ``a`` equals its plain transpose to within ``tol``."""
    arr = as_complex_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"need a square matrix, got shape {arr.shape}")
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    if arr.size == 0:
        return True
    return float(np.abs(arr - arr.T).max()) <= tol


def determinant(a) -> complex:
    """Determinant of a square complex matrix by partially pivoted LU.

    Intended for matrices up to MAX_DET_DIM; larger inputs are rejected
    rather than silently returning something slow or inaccurate.  A
    triangular input comes back exact: the elimination subtracts zeros.
    """
    arr = as_complex_matrix(a)
    n = arr.shape[0]
    if arr.shape[1] != n:
        raise ValueError(f"need a square matrix, got shape {arr.shape}")
    if n > MAX_DET_DIM:
        raise ValueError(f"matrix dimension {n} exceeds limit {MAX_DET_DIM}")
    u = arr.copy()
    det = 1.0 + 0.0j
    for col in range(n):
        piv = col + int(np.argmax(np.abs(u[col:, col])))
        if u[piv, col] == 0.0:
            return 0.0 + 0.0j
        if piv != col:
            u[[col, piv]] = u[[piv, col]]
            det = -det
        det *= u[col, col]
        if col + 1 < n:
            factors = u[col + 1 :, col] / u[col, col]
            u[col + 1 :, col + 1 :] -= np.outer(factors, u[col, col + 1 :])
    return complex(det)


def _normal_upper_quantile(p: float) -> float:
    """z such that P(N(0,1) > z) = p, via Acklam's approximation."""
    return -_acklam(p)


def _acklam(p: float) -> float:
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    plow = 0.02425
    if p < plow:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        return num / den
    if p > 1.0 - plow:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        return -num / den
    q = p - 0.5
    r = q * q
    num = ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
    den = ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    return num * q / den


def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by power series (x < a+1)."""
    if x <= 0.0:
        return 0.0
    total = term = 1.0 / a
    denom = a
    for _ in range(10_000):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    if log_prefix < -745.0:
        return 0.0
    return total * math.exp(log_prefix)


def _gamma_q_contfrac(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by modified Lentz (x >= a+1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    if log_prefix < -745.0:
        return 0.0
    return math.exp(log_prefix) * h


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


@dataclass(frozen=True)
class ChiSquare:
    """Central chi-square distribution with ``dof`` degrees of freedom."""

    dof: int

    def __post_init__(self):
        if not isinstance(self.dof, (int, np.integer)) or self.dof < 1:
            raise ValueError(f"dof must be a positive integer, got {self.dof!r}")

    def _check_x(self, x: float) -> float:
        x = float(x)
        if not math.isfinite(x) or x < 0.0:
            raise ValueError(f"x must be finite and nonnegative, got {x!r}")
        return x

    def cdf(self, x: float) -> float:
        """P(X <= x)."""
        x = self._check_x(x)
        a = 0.5 * self.dof
        t = 0.5 * x
        if t == 0.0:
            return 0.0
        if t < a + 1.0:
            return _clamp01(_gamma_p_series(a, t))
        return _clamp01(1.0 - _gamma_q_contfrac(a, t))

    def survival(self, x: float) -> float:
        """Q(x) = P(X > x)."""
        x = self._check_x(x)
        a = 0.5 * self.dof
        t = 0.5 * x
        if t == 0.0:
            return 1.0
        if t < a + 1.0:
            return _clamp01(1.0 - _gamma_p_series(a, t))
        return _clamp01(_gamma_q_contfrac(a, t))

    def _logpdf(self, x: float) -> float:
        a = 0.5 * self.dof
        if x <= 0.0:
            return -math.inf
        return (a - 1.0) * math.log(x) - 0.5 * x - a * math.log(2.0) - math.lgamma(a)

    def inverse_survival(self, p: float) -> float:
        """x such that survival(x) = p, to within |Q(x) - p| <= 1e-13 * p.

        Wilson-Hilferty gives the starting point; a bracketed Newton
        iteration (bisection step whenever Newton leaves the bracket)
        polishes it.
        """
        p = float(p)
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie strictly in (0, 1), got {p!r}")
        nu = float(self.dof)
        z = _normal_upper_quantile(p)
        t = 2.0 / (9.0 * nu)
        x = nu * max(1.0 - t + z * math.sqrt(t), 0.1) ** 3

        # Establish a bracket [lo, hi] with survival(lo) > p > survival(hi).
        lo, hi = 0.0, max(x, 1e-8)
        while self.survival(hi) > p:
            lo = hi
            hi *= 2.0
            if hi > 1e300:
                raise ArithmeticError("quantile bracket expansion failed")
        x = min(max(x, lo + 0.25 * (hi - lo)), hi)

        for _ in range(200):
            fx = self.survival(x) - p
            if abs(fx) <= 1e-14 * p:
                return x
            if fx > 0.0:
                lo = x
            else:
                hi = x
            pdf = math.exp(self._logpdf(x))
            if pdf > 0.0:
                step = fx / pdf  # survival' = -pdf, so Newton moves by +fx/pdf
                x_new = x + step
            else:
                x_new = math.nan
            if not (lo < x_new < hi):
                x_new = 0.5 * (lo + hi)
            if x_new == x:
                return x
            x = x_new
        return x
