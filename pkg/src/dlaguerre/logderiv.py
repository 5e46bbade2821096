"""Discrete logarithmic derivatives, their residues and superlevel measures.

``F(x) = (p(x+h) - p(x)) / (h p(x))`` and ``R(x) = (p(x) - p(x-h)) / (h p(x))``
are handled as reduced rational functions.  Their partial-fraction residues at
the simple roots ``a_k`` of ``p`` have the closed forms
``p(a_k + h) / (h p'(a_k))`` and ``-p(a_k - h) / (h p'(a_k))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polycore import EXACT, FLOAT, Poly, PreconditionError, RootedPoly, Scalar, coerce, poly_gcd
from .realroots import (
    IsolationInterval,
    bisect_interval,
    is_real_rooted,
    isolate_roots,
    mesh_at_least,
    rational_root,
    refine_root,
    simplest_rational_between,
)

FORWARD = "forward"
REVERSE = "reverse"


class PoleError(ValueError):
    """A rational function was evaluated at one of its poles."""


@dataclass(frozen=True)
class RationalFunc:
    """``numerator / denominator`` with a monic denominator.

    Exact-backend instances are reduced: the gcd of numerator and denominator
    is constant.
    """

    numerator: Poly
    denominator: Poly

    @classmethod
    def make(cls, num: Poly, den: Poly) -> RationalFunc:
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.backend != den.backend:
            raise TypeError("numerator and denominator backends differ")
        if num.backend == EXACT and not num.is_zero():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num, den = num // g, den // g
        lead = den.leading
        return cls(num.scale(1 / lead), den.monic())

    @property
    def backend(self) -> str:
        return self.denominator.backend

    def __call__(self, x):
        d = self.denominator(x)
        if d == 0:
            raise PoleError(f"pole at {x}")
        return self.numerator(x) / d

    def derivative(self) -> RationalFunc:
        n, d = self.numerator, self.denominator
        return RationalFunc.make(n.derivative() * d - n * d.derivative(), d * d)

    def __str__(self) -> str:
        return f"({self.numerator}) / ({self.denominator})"


def _difference_quotient(p: Poly, h, forward: bool) -> RationalFunc:
    if p.is_constant():
        raise PreconditionError("need a nonconstant polynomial")
    if h == 0:
        raise PreconditionError("step h must be nonzero")
    h = coerce(h, p.backend)
    num = (p.shift(h) - p) if forward else (p - p.shift(-h))
    return RationalFunc.make(num, p.scale(h))


def build_F(p: Poly, h=1) -> RationalFunc:
    return _difference_quotient(p, h, True)


def build_R(p: Poly, h=1) -> RationalFunc:
    return _difference_quotient(p, h, False)


def log_derivative(p: Poly) -> RationalFunc:
    """``p'/p`` in reduced form."""
    if p.is_constant():
        raise PreconditionError("need a nonconstant polynomial")
    return RationalFunc.make(p.derivative(), p)


# -- residues ------------------------------------------------------------


@dataclass(frozen=True)
class PartialFractions:
    poles: tuple
    residues: tuple
    polynomial_part: Poly
    backend: str = EXACT

    def __call__(self, x):
        total = self.polynomial_part(x)
        for a, r in zip(self.poles, self.residues):
            if x == a:
                raise PoleError(f"pole at {x}")
            total += r / (x - a)
        return total

    def residue_at(self, pole):
        for a, r in zip(self.poles, self.residues):
            if a == pole:
                return r
        raise KeyError(pole)


def simple_real_roots(p) -> tuple[list, str]:
    """Sorted simple real roots of ``p`` and the backend they are exact in.

    Raises :class:`PreconditionError` for repeated or non-real roots.  When
    every root is rational the values are Fractions, otherwise floats
    refined to 1e-12.
    """
    if isinstance(p, RootedPoly):
        if any(m > 1 for _, m in p.roots):
            raise PreconditionError("repeated roots")
        return [loc for loc, _ in p.roots], p.backend
    ivs = isolate_roots(p)
    if any(iv.multiplicity > 1 for iv in ivs):
        raise PreconditionError("repeated roots")
    if len(ivs) != p.degree:
        raise PreconditionError("non-real roots")
    if p.backend == EXACT:
        exact = [rational_root(iv) for iv in ivs]
        if all(r is not None for r in exact):
            return exact, EXACT
    return [float(refine_root(iv.factor, iv, Fraction(1, 10**12))) for iv in ivs], FLOAT


def residues(p, direction: str = FORWARD, h=1) -> PartialFractions:
    """Partial fractions of F (forward) or R (reverse) by the closed forms."""
    if direction not in (FORWARD, REVERSE):
        raise ValueError(f"direction must be {FORWARD!r} or {REVERSE!r}")
    roots, backend = simple_real_roots(p)
    poly = p.expand() if isinstance(p, RootedPoly) else p
    if backend != poly.backend:
        poly = poly.to_float()
    h = coerce(h, backend)
    dp = poly.derivative()
    if direction == FORWARD:
        res = [poly(a + h) / (h * dp(a)) for a in roots]
    else:
        res = [-poly(a - h) / (h * dp(a)) for a in roots]
    return PartialFractions(tuple(roots), tuple(res), Poly([], backend), backend)


@dataclass(frozen=True)
class ResidueReport:
    degree: int
    A: tuple
    B: tuple
    sum_A: Scalar
    sum_B: Scalar
    min_A: Scalar
    min_B: Scalar
    mesh_at_least_one: bool

    @property
    def sums_ok(self) -> bool:
        return self.sum_A == self.degree and self.sum_B == self.degree

    @property
    def signs_ok(self) -> bool:
        return not self.mesh_at_least_one or (self.min_A >= 0 and self.min_B >= 0)

    @property
    def ok(self) -> bool:
        return self.sums_ok and self.signs_ok


def check_residue_lemmas(p) -> ResidueReport:
    """Residue sums (always ``deg p``) and signs (nonnegative when mesh >= 1)."""
    fwd = residues(p, FORWARD)
    rev = residues(p, REVERSE)
    poly = p.expand() if isinstance(p, RootedPoly) else p
    spaced = mesh_at_least(poly, 1)
    sum_a = sum(fwd.residues, start=Fraction(0) if fwd.backend == EXACT else 0.0)
    sum_b = sum(rev.residues, start=Fraction(0) if rev.backend == EXACT else 0.0)
    return ResidueReport(
        poly.degree, fwd.residues, rev.residues, sum_a, sum_b,
        min(fwd.residues), min(rev.residues), spaced,
    )


def _require_spaced(p: Poly) -> None:
    if p.is_constant() or not is_real_rooted(p):
        raise PreconditionError("need a real-rooted nonconstant polynomial")
    if not mesh_at_least(p, 1):
        raise PreconditionError("need mesh >= 1")
    if p.degree >= 2 and any(iv.multiplicity > 1 for iv in isolate_roots(p)):
        raise PreconditionError("need simple roots")


def default_samples(p: Poly) -> list[Fraction]:
    """Midpoints between consecutive roots plus one unit beyond each end."""
    ivs = isolate_roots(p)
    locs = []
    for iv in ivs:
        r = rational_root(iv)
        locs.append((r, r) if r is not None else (iv.lo, iv.hi))
    pts = [locs[0][0] - 1]
    for (_, ahi), (blo, _) in zip(locs, locs[1:]):
        pts.append((ahi + blo) / 2)
    pts.append(locs[-1][1] + 1)
    return pts


@dataclass(frozen=True)
class InequalityReport:
    samples: tuple
    margins_F: tuple  # F(x)^2 + n F'(x), must be <= 0
    margins_R: tuple

    @property
    def holds(self) -> bool:
        return all(m <= 0 for m in self.margins_F + self.margins_R)


def check_cauchy_schwarz(p: Poly, samples=None) -> InequalityReport:
    """Exact check of ``F^2 <= -n F'`` and ``R^2 <= -n R'`` at sample points."""
    _require_spaced(p)
    n = p.degree
    samples = default_samples(p) if samples is None else [coerce(s, p.backend) for s in samples]
    F, R = build_F(p), build_R(p)
    dF, dR = F.derivative(), R.derivative()
    mf, mr = [], []
    for x in samples:
        if p(x) == 0:
            raise PoleError(f"sample {x} is a root of p")
        mf.append(F(x) ** 2 + n * dF(x))
        mr.append(R(x) ** 2 + n * dR(x))
    return InequalityReport(tuple(samples), tuple(mf), tuple(mr))


@dataclass(frozen=True)
class IdentityReport:
    samples: tuple
    residuals: tuple

    @property
    def holds(self) -> bool:
        return all(r == 0 for r in self.residuals)


def check_product_identity(p: Poly, samples) -> IdentityReport:
    """Residual of ``F R - (F - R) - (p^2 - p(x+1)p(x-1))/p^2`` at each sample."""
    F, R = build_F(p), build_R(p)
    out = []
    samples = [coerce(s, p.backend) for s in samples]
    for x in samples:
        px = p(x)
        if px == 0:
            raise PoleError(f"sample {x} is a root of p")
        f, r = F(x), R(x)
        out.append(f * r - (f - r) - (px * px - p(x + 1) * p(x - 1)) / (px * px))
    return IdentityReport(tuple(samples), tuple(out))


@dataclass(frozen=True)
class SpacingReport:
    g: Poly
    real_rooted: bool
    simple: bool
    mesh_at_least_one: bool
    mesh_at_least_d: bool
    d: Fraction
    mesh_estimate: float

    @property
    def ok(self) -> bool:
        return self.real_rooted and self.simple and self.mesh_at_least_one


def _approx_mesh(p: Poly) -> float:
    ivs = isolate_roots(p)
    if len(ivs) < 2:
        return math.inf
    vals = [float(refine_root(iv.factor, iv, Fraction(1, 10**12))) for iv in ivs]
    return min(b - a for a, b in zip(vals, vals[1:]))


def check_spacing_preservation(p: Poly, d=1) -> SpacingReport:
    """Spacing of ``g(x) = p(x+1) - p(x)`` against 1 (proved) and ``d`` (open)."""
    d = Fraction(d)
    if d < 1:
        raise PreconditionError("d must be at least 1")
    if p.degree < 2 or not is_real_rooted(p):
        raise PreconditionError("need a real-rooted polynomial of degree >= 2")
    if not mesh_at_least(p, d):
        raise PreconditionError(f"need mesh(p) >= {d}")
    g = p.forward_difference(1)
    ivs = isolate_roots(g)
    real = sum(iv.multiplicity for iv in ivs) == g.degree
    simple = all(iv.multiplicity == 1 for iv in ivs)
    return SpacingReport(
        g, real, simple, mesh_at_least(g, 1), mesh_at_least(g, d), d, _approx_mesh(g)
    )


# -- superlevel measures --------------------------------------------------


class MeasureMode(enum.Enum):
    EXACT_ROOT_PAIRING = "ExactRootPairing"
    NUMERIC_SCAN = "NumericScan"


@dataclass(frozen=True)
class MeasureResult:
    """Lebesgue measure of ``{x : rf(x) >= lam}``.

    In pairing mode the intervals ``(pole, level root]`` use every pole and
    every root of ``num - lam*den`` exactly once, so ``total`` is the exact
    value ``sum(roots) - sum(poles)`` even when the endpoints are irrational.
    ``enclosure`` is the independent bracket obtained by summing the isolated
    endpoint intervals, and ``vieta_total`` the coefficient-based value.
    Interval endpoints are midpoints of brackets narrower than the requested
    width.  In scan mode ``total_error`` bounds the bisection error.
    """

    lam: Fraction | float
    intervals: tuple
    total: Fraction | float
    total_error: Fraction | float
    method: MeasureMode
    vieta_total: Fraction | None = None
    pairing_ok: bool = True
    failure: str | None = None
    tail_bound: float = 0.0
    enclosure: tuple | None = None

    @property
    def consistent(self) -> bool:
        """Pairing succeeded and the endpoint enclosure contains the Vieta total."""
        if not self.pairing_ok or self.vieta_total is None or self.enclosure is None:
            return False
        lo, hi = self.enclosure
        return lo <= self.vieta_total <= hi and self.total == self.vieta_total


def _vieta_root_sum(q: Poly) -> Fraction:
    return -q.coeff(q.degree - 1) / q.leading


def _failed(lam, reason: str, vieta=None) -> MeasureResult:
    return MeasureResult(lam, (), Fraction(0), Fraction(0), MeasureMode.EXACT_ROOT_PAIRING,
                         vieta, False, reason)


class _Pt:
    """A real algebraic point held as an exact value or a shrinking bracket."""

    def __init__(self, iv: IsolationInterval, kind: str):
        self.iv = iv
        self.kind = kind
        r = rational_root(iv) if iv.factor.degree <= 2 else None
        self.exact = r

    @property
    def lo(self):
        return self.exact if self.exact is not None else self.iv.lo

    @property
    def hi(self):
        return self.exact if self.exact is not None else self.iv.hi

    def split(self) -> None:
        nxt = bisect_interval(self.iv)
        if isinstance(nxt, Fraction):
            self.exact = nxt
        else:
            self.iv = nxt

    @property
    def width(self):
        return self.hi - self.lo


def _separate(points: list[_Pt]) -> None:
    """Refine until the brackets are pairwise disjoint and ordered."""
    while True:
        points.sort(key=lambda q: q.lo)
        clash = False
        for a, b in zip(points, points[1:]):
            if a.hi >= b.lo:
                clash = True
                (a if a.width >= b.width else b).split()
        if not clash:
            return


def _exact_root_pairing(rf: RationalFunc, lam: Fraction, width: Fraction) -> MeasureResult:
    num, den = rf.numerator, rf.denominator
    if num.degree >= den.degree:
        return _failed(lam, "numerator degree is not below denominator degree")
    level = num - den.scale(lam)
    m = den.degree
    vieta = _vieta_root_sum(level) - _vieta_root_sum(den)
    poles = isolate_roots(den)
    if len(poles) != m or any(iv.multiplicity > 1 for iv in poles):
        return _failed(lam, "poles are not all real and simple", vieta)
    sols = isolate_roots(level)
    if len(sols) != m or any(iv.multiplicity > 1 for iv in sols):
        return _failed(lam, "level-set polynomial has non-real or repeated roots", vieta)
    pts = [_Pt(iv, "pole") for iv in poles] + [_Pt(iv, "level") for iv in sols]
    _separate(pts)
    kinds = [q.kind for q in pts]
    if kinds != ["pole", "level"] * m:
        return _failed(lam, f"poles and level points do not interlace: {kinds}", vieta)
    # one exact spot check per sign region of rf - lam
    cuts = [pts[0].lo - 1]
    for a, b in zip(pts, pts[1:]):
        pad = (b.lo - a.hi) / 4
        cuts.append(simplest_rational_between(a.hi + pad, b.lo - pad))
    cuts.append(pts[-1].hi + 1)
    for i, x in enumerate(cuts):
        inside = i % 2 == 1
        if (rf(x) >= lam) != inside:
            return _failed(lam, f"sign check failed near {x}", vieta)
    for q in pts:
        while q.width > width:
            q.split()
    intervals, lo_sum, hi_sum = [], Fraction(0), Fraction(0)
    for pole, sol in zip(pts[0::2], pts[1::2]):
        intervals.append(((pole.lo + pole.hi) / 2, (sol.lo + sol.hi) / 2))
        lo_sum += sol.lo - pole.hi
        hi_sum += sol.hi - pole.lo
    total = _vieta_root_sum(level) - _vieta_root_sum(den)
    return MeasureResult(lam, tuple(intervals), total, Fraction(0), MeasureMode.EXACT_ROOT_PAIRING,
                         vieta, enclosure=(lo_sum, hi_sum))


def _real_roots_float(q: np.ndarray) -> list[float]:
    if len(q) <= 1:
        return []
    r = np.roots(q[::-1])
    scale = max(1.0, float(np.max(np.abs(r)))) if len(r) else 1.0
    return sorted(float(z.real) for z in r if abs(z.imag) <= 1e-7 * scale)


def _numeric_scan(rf: RationalFunc, lam: float, tol: float = 1e-9, grid: int = 4001) -> MeasureResult:
    num = np.array([float(c) for c in rf.numerator.coeffs] or [0.0])
    den = np.array([float(c) for c in rf.denominator.coeffs])
    level = np.zeros(max(len(num), len(den)))
    level[: len(num)] += num
    level[: len(den)] -= lam * den
    while len(level) > 1 and level[-1] == 0:
        level = level[:-1]

    def g(x):
        # same sign as rf(x) - lam wherever rf is finite
        return np.polynomial.polynomial.polyval(x, level) * np.polynomial.polynomial.polyval(x, den)

    poles = _real_roots_float(den)
    crit = poles + _real_roots_float(level)
    if poles:
        span = (max(poles) - min(poles)) or 1.0
        lo, hi = min(poles) - 10 * span, max(poles) + 10 * span
    else:
        lo, hi = -10.0, 10.0
    # widen to the root bounds so the sign is constant outside the window
    for q in (level, den):
        if len(q) > 1:
            b = 1.0 + float(np.max(np.abs(q[:-1] / q[-1])))
            lo, hi = min(lo, -b - 1.0), max(hi, b + 1.0)
    base = np.linspace(lo, hi, grid)
    xs = np.union1d(base, np.array([c for c in crit if lo < c < hi]))
    pts = np.sort(np.concatenate([xs, 0.5 * (xs[1:] + xs[:-1])]))
    sg = np.sign(g(pts))

    def crossing(a, b):
        fa = g(a)
        while b - a > tol:
            m = 0.5 * (a + b)
            fm = g(m)
            if fm == 0:
                return m
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        return 0.5 * (a + b)

    if sg[0] > 0 or sg[-1] > 0:
        return MeasureResult(lam, (), math.inf, 0.0, MeasureMode.NUMERIC_SCAN, tail_bound=math.inf)
    intervals = []
    start = None
    for k in range(len(pts) - 1):
        a, b, sa, sb = float(pts[k]), float(pts[k + 1]), sg[k], sg[k + 1]
        if sa <= 0 < sb:
            start = a if sa == 0 else crossing(a, b)
        elif sb <= 0 < sa:
            intervals.append((start, b if sb == 0 else crossing(a, b)))
            start = None
    total = math.fsum(b - a for a, b in intervals)
    return MeasureResult(lam, tuple(intervals), total, 2 * tol * max(len(intervals), 1),
                         MeasureMode.NUMERIC_SCAN)


def superlevel_measure(rf: RationalFunc, lam, mode=MeasureMode.EXACT_ROOT_PAIRING,
                       width=Fraction(1, 2**40)) -> MeasureResult:
    """Measure of ``{x : rf(x) >= lam}`` for ``lam > 0``.

    ExactRootPairing assumes rf decreases strictly between its simple real
    poles and vanishes at infinity, so each pole ``a_k`` pairs with the one
    solution of ``rf = lam`` to its right.  Every structural assumption is
    verified exactly; a broken one is reported in ``failure`` rather than
    raised.  NumericScan works for any rf on a bounded window.
    """
    mode = MeasureMode(mode) if not isinstance(mode, MeasureMode) else mode
    if lam <= 0:
        raise PreconditionError("lambda must be positive")
    if mode is MeasureMode.EXACT_ROOT_PAIRING:
        if rf.backend != EXACT:
            raise PreconditionError("ExactRootPairing needs the exact backend")
        return _exact_root_pairing(rf, Fraction(lam), Fraction(width))
    return _numeric_scan(rf, float(lam))
