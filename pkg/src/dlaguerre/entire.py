"""Transcendental extension: the unweighted functional on entire functions.

``f_inf(x, h, phi) = [phi(x+h) - phi(x-h)]^2 - 4 phi(x) [phi(x+h) - 2 phi(x) + phi(x-h)]``
is evaluated on closed-form entire functions, alongside the exponential
approximants ``q_n(x) = prod_{k=1}^{n^n} (1 + x / (n ln n (k + n)))`` and the
harmonic-type sums that control them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from .polycore import EXACT, Poly, PreconditionError
from .realroots import is_real_rooted, mesh_at_least, mesh_size

_CHUNK = 1 << 20
QN_MAX_N = 8


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


# -- entire functions --------------------------------------------------------


@dataclass(frozen=True)
class PolyTimesExp:
    """``p(x) * exp(b x)``; its real zeros are exactly those of ``p``."""

    p: Poly
    b: Fraction | float = 0

    def __call__(self, x):
        if self.b == 0 and _is_rational(x) and self.p.backend == EXACT:
            return self.p(x)
        return float(self.p.to_float()(float(x))) * math.exp(float(self.b) * float(x))

    def mp(self, x) -> mpmath.mpf:
        x = mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
        b = _mp(self.b)
        val = mpmath.mpf(0)
        for c in reversed(self.p.coeffs):
            val = val * x + _mp(c)
        return val * mpmath.exp(b * x)

    def mesh_inf(self):
        return mesh_size(self.p).mesh if self.p.degree >= 1 else math.inf

    def describe(self) -> str:
        return f"({self.p}) * exp({self.b}*x)"


@dataclass(frozen=True)
class ExpOfSquare:
    """``exp(x^2)``: zero-free and outside the Laguerre-Polya class."""

    def __call__(self, x):
        x = float(x)
        return math.exp(x * x)

    def mp(self, x) -> mpmath.mpf:
        x = _mp(x)
        return mpmath.exp(x * x)

    def describe(self) -> str:
        return "exp(x^2)"


@dataclass(frozen=True)
class GaussianTimesPoly:
    """``p(x) * exp(-a x^2)`` with ``a >= 0``, a genus-2 member of the class."""

    p: Poly
    a: Fraction | float = 1

    def __call__(self, x):
        x = float(x)
        return float(self.p.to_float()(x)) * math.exp(-float(self.a) * x * x)

    def mp(self, x) -> mpmath.mpf:
        x = _mp(x)
        val = mpmath.mpf(0)
        for c in reversed(self.p.coeffs):
            val = val * x + _mp(c)
        return val * mpmath.exp(-_mp(self.a) * x * x)

    def describe(self) -> str:
        return f"({self.p}) * exp(-{self.a}*x^2)"


@dataclass(frozen=True)
class ClosedForm:
    """Any real function given by float and (optionally) mpmath evaluators."""

    func: Callable[[float], float]
    description: str = "closed form"
    mp_func: Callable | None = None

    def __call__(self, x):
        return self.func(float(x))

    def mp(self, x):
        if self.mp_func is None:
            return mpmath.mpf(self.func(float(x)))
        return self.mp_func(_mp(x))

    def describe(self) -> str:
        return self.description


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def hadamard_truncation(c, m: int, b, shifts) -> PolyTimesExp:
    """``c x^m e^{bx} prod (1 + x/a_k) e^{-x/a_k}`` rewritten as ``p(x) e^{gamma x}``."""
    shifts = [Fraction(a) for a in shifts]
    if any(a == 0 for a in shifts):
        raise PreconditionError("product zeros must be nonzero")
    p = Poly([Fraction(c)]) * Poly.x() ** m
    for a in shifts:
        p = p * Poly([Fraction(1), 1 / a])
    gamma = Fraction(b) - sum((1 / a for a in shifts), Fraction(0))
    return PolyTimesExp(p, gamma)


# -- the functional ------------------------------------------------------


def f_infinity(phi, x, h):
    """Unweighted discrete Laguerre functional of ``phi`` at ``x`` with step ``h``."""
    if h == 0:
        raise PreconditionError("step h must be nonzero")
    if isinstance(phi, PolyTimesExp) and _is_rational(x) and _is_rational(h) and phi.b == 0:
        x, h = Fraction(x), Fraction(h)
    a, m, c = phi(x + h), phi(x), phi(x - h)
    return (a - c) ** 2 - 4 * m * (a - 2 * m + c)


def f_infinity_mp(phi, x, h, dps: int = 60) -> mpmath.mpf:
    with mpmath.workdps(dps):
        x, h = _mp(x), _mp(h)
        a, m, c = phi.mp(x + h), phi.mp(x), phi.mp(x - h)
        return (a - c) ** 2 - 4 * m * (a - 2 * m + c)


def _normalized_terms(phi: PolyTimesExp, xs: np.ndarray, h: float):
    """Values of ``phi(x+h), phi(x), phi(x-h)`` divided by ``exp(b x)``."""
    coeffs = np.array([float(c) for c in phi.p.coeffs])
    pv = np.polynomial.polynomial.polyval
    b = float(phi.b)
    return pv(xs + h, coeffs) * math.exp(b * h), pv(xs, coeffs), pv(xs - h, coeffs) * math.exp(-b * h)


def _functional(a, m, c):
    return (a - c) ** 2 - 4 * m * (a - 2 * m + c)


@dataclass
class Theorem34Report:
    subject: str
    h: float
    window: tuple
    grid: int
    in_hypothesis: bool
    min_normalized: float
    argmin: float
    candidates: list
    confirmed: list
    artifacts: list

    @property
    def ok(self) -> bool:
        return not self.confirmed


def _recheck(phi, x: float, h) -> tuple[bool, float]:
    """High-precision (or exact) sign of the functional at the rational image of x."""
    xr = Fraction(x)
    if isinstance(phi, PolyTimesExp) and phi.b == 0 and phi.p.backend == EXACT and _is_rational(h):
        val = f_infinity(phi, xr, Fraction(h))
        return val < 0, float(val)
    val = f_infinity_mp(phi, xr, h)
    return val < 0, float(val)


def check_theorem34(phi, window, grid: int = 1001, h=1, tol: float = 1e-9) -> Theorem34Report:
    """Grid check of ``f_inf(x, h, phi) >= 0`` with a refine-and-recheck ladder.

    For ``p(x) e^{bx}`` the functional is divided by ``e^{2bx}`` (a positive
    factor) before sampling, and a sample is a candidate violation when it
    falls below ``-tol * scale`` with ``scale = max(1, a^2, m^2, c^2)`` over
    the three normalized values.  Candidates are re-minimised on a finer
    local grid and then re-evaluated exactly (b = 0) or at 60 digits; only
    those that stay negative are confirmed.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise PreconditionError("window must satisfy lo < hi")
    in_hyp = isinstance(phi, PolyTimesExp)
    if in_hyp:
        if phi.p.is_zero() or (phi.p.degree >= 1 and not is_real_rooted(phi.p)):
            raise PreconditionError("polynomial factor must be real-rooted")
        if not mesh_at_least(phi.p.to_exact() if phi.p.backend != EXACT else phi.p, Fraction(h)):
            raise PreconditionError(f"mesh of the polynomial factor is below {h}")
    xs = np.linspace(lo, hi, grid)
    hf = float(h)

    def normalized(pts):
        if in_hyp:
            a, m, c = _normalized_terms(phi, pts, hf)
        else:
            a = np.array([phi(x + hf) for x in pts])
            m = np.array([phi(x) for x in pts])
            c = np.array([phi(x - hf) for x in pts])
        scale = np.maximum.reduce([np.ones_like(pts), a * a, m * m, c * c])
        return _functional(a, m, c) / scale

    vals = normalized(xs)
    i = int(np.argmin(vals))
    cands, confirmed, artifacts = [], [], []
    step = (hi - lo) / max(grid - 1, 1)
    for j in np.nonzero(vals < -tol)[0]:
        x0 = float(xs[j])
        fine = np.linspace(x0 - step, x0 + step, 201)
        fv = normalized(fine)
        xm = float(fine[int(np.argmin(fv))])
        cands.append(xm)
        negative, value = _recheck(phi, xm, h)
        (confirmed if negative else artifacts).append((xm, value))
    return Theorem34Report(phi.describe(), hf, (lo, hi), grid, in_hyp,
                           float(vals[i]), float(xs[i]), cands, confirmed, artifacts)


# -- the approximating sums and products --------------------------------------


def _check_n(n: int) -> None:
    if n < 2:
        raise PreconditionError("n must be at least 2")
    if n > QN_MAX_N:
        raise PreconditionError(f"n^n terms are capped at n = {QN_MAX_N}")


def _k_chunks(n: int):
    total = n**n
    for start in range(1, total + 1, _CHUNK):
        yield np.arange(start, min(start + _CHUNK, total + 1), dtype=np.float64)


def sumlem_partial(n: int, a: float = 0.0) -> float:
    """``sum_{k=1}^{n^n} 1 / (n ln n (k + n) + a)`` with exactly rounded summation."""
    _check_n(n)
    c = n * math.log(n)
    if c * (1 + n) + a <= 0:
        raise PreconditionError("a makes a denominator nonpositive")
    # math.fsum consumes the chunks in a fixed order, so results are reproducible
    return math.fsum(v for k in _k_chunks(n) for v in (1.0 / (c * (k + n) + a)).tolist())


def sumlem_bounds(n: int, a: float = 0.0) -> tuple[float, float]:
    """Integral comparison bounds on :func:`sumlem_partial`.

    ``lo = int_1^{n^n+1}`` and ``hi = int_0^{n^n}`` of ``dk / (n ln n (k+n) + a)``
    in closed form.  Both need the integrand positive on its range, i.e.
    ``n^2 ln n + a > 0``; otherwise the upper integral runs through a pole.
    """
    _check_n(n)
    c = n * math.log(n)
    if c * n + a <= 0:
        raise PreconditionError(
            f"integrand 1/({c:.4g}(k+{n}) + {a}) has a pole on [0, n^n]; bounds undefined"
        )
    s = n + a / c
    big = float(n**n)
    lo = math.log1p(big / (1 + s)) / c
    hi = math.log1p(big / s) / c
    return lo, hi


def _qn_logs(n: int, x: float) -> tuple[float, int, bool]:
    c = n * math.log(n)
    parts = []
    negatives = 0
    for k in _k_chunks(n):
        t = 1.0 + x / (c * (k + n))
        if np.any(t == 0):
            return 0.0, 0, True
        negatives += int(np.count_nonzero(t < 0))
        parts.extend(np.log(np.abs(t)).tolist())
    return math.fsum(parts), negatives, False


def qn_eval(n: int, x: float) -> float:
    """``q_n(x)`` in the log domain, never forming the coefficient vector."""
    _check_n(n)
    x = float(x)
    if x == 0:
        return 1.0
    logsum, negatives, hit = _qn_logs(n, x)
    if hit:
        return 0.0
    return (-1.0) ** (negatives % 2) * math.exp(logsum)


def qn_zeros(n: int, count: int | None = None) -> np.ndarray:
    """The first ``count`` (default all) zeros ``-n ln n (k + n)``."""
    _check_n(n)
    total = n**n if count is None else min(count, n**n)
    k = np.arange(1, total + 1, dtype=np.float64)
    return -n * math.log(n) * (k + n)


@dataclass(frozen=True)
class QnConvergenceReport:
    n_list: tuple
    interval: tuple
    grid: int
    max_errors: tuple

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.max_errors, self.max_errors[1:]))


def qn_convergence_report(n_list, interval=(-1.0, 1.0), grid: int = 101) -> QnConvergenceReport:
    """Max of ``|q_n(x) - e^x|`` over a uniform grid, for each n."""
    lo, hi = float(interval[0]), float(interval[1])
    xs = np.linspace(lo, hi, grid) if hi > lo else np.array([lo])
    errs = []
    for n in n_list:
        _check_n(n)
        errs.append(max(abs(qn_eval(n, float(x)) - math.exp(float(x))) for x in xs))
    return QnConvergenceReport(tuple(n_list), (lo, hi), grid, tuple(errs))
