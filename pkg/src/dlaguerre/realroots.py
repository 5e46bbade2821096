"""Real-root counting, isolation and refinement with Sturm chains.

All decisions are made in exact rational arithmetic.  Float-backend inputs
are converted to the exact rational value of their coefficients first, so
the answers describe that polynomial exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .polycore import (
    EXACT,
    FLOAT,
    BackendError,
    Poly,
    PreconditionError,
    gcd_squarefree,
    poly_gcd,
    sign,
)


class EndpointRootError(ValueError):
    """A Sturm-count endpoint is itself a root."""


def _exact(p: Poly) -> Poly:
    return p if p.backend == EXACT else p.to_exact()


def _require_exact(p: Poly, what: str) -> None:
    if p.backend != EXACT:
        raise BackendError(f"{what} needs the exact backend")


# -- Sturm chains ----------------------------------------------------------


def sturm_chain(p: Poly) -> list[Poly]:
    """``p, p', -rem(p, p'), ...`` scaled by positive constants."""
    _require_exact(p, "sturm_chain")
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        r = -(chain[-2] % chain[-1])
        if r.is_zero():
            break
        chain.append(r.scale(1 / abs(r.leading)))
    if chain[-1].is_zero():
        chain.pop()
    return chain


def _variations(signs) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_at(chain: list[Poly], x) -> int:
    return _variations(sign(q(x)) for q in chain)


def _variations_at_infinity(chain: list[Poly], direction: int) -> int:
    return _variations(sign(q.leading) * (direction ** q.degree) for q in chain)


def sturm_count(p: Poly, lo, hi, chain: list[Poly] | None = None) -> int:
    """Number of distinct real roots of ``p`` in the open interval (lo, hi)."""
    _require_exact(p, "sturm_count")
    if p.is_zero():
        raise PreconditionError("zero polynomial has no finite root count")
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise PreconditionError("need lo < hi")
    if p(lo) == 0 or p(hi) == 0:
        raise EndpointRootError(f"endpoint is a root of {p}")
    chain = chain or sturm_chain(p)
    return _variations_at(chain, lo) - _variations_at(chain, hi)


def real_root_count(p: Poly) -> int:
    """Distinct real roots of ``p`` on the whole line."""
    p = _exact(p)
    if p.is_constant():
        return 0
    chain = sturm_chain(p)
    return _variations_at_infinity(chain, -1) - _variations_at_infinity(chain, 1)


def cauchy_bound(p: Poly) -> Fraction:
    """``1 + max |a_i / a_n|``: every root has absolute value below this."""
    p = _exact(p)
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def real_root_count_with_multiplicity(p: Poly) -> int:
    fac = gcd_squarefree(_exact(p))
    return sum(e * real_root_count(f) for f, e in fac.factors)


def is_real_rooted(p: Poly) -> bool:
    """True when every complex root of the nonconstant ``p`` is real."""
    p = _exact(p)
    if p.is_zero():
        return False
    return real_root_count_with_multiplicity(p) == p.degree


# -- isolation ---------------------------------------------------------------


@dataclass(frozen=True)
class IsolationInterval:
    """Open interval (lo, hi) holding exactly one distinct real root.

    ``factor`` is the monic squarefree factor of the target that vanishes at
    the root; ``sign_lo``/``sign_hi`` are its (opposite) signs at the ends.
    """

    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int
    multiplicity: int
    factor: Poly = field(repr=False, compare=False)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _split_point(f: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    """Midpoint of (lo, hi), nudged dyadically off any root of ``f``."""
    mid = (lo + hi) / 2
    k = 2
    while f(mid) == 0:
        off = (hi - lo) / 2**k
        for cand in (mid + off, mid - off):
            if f(cand) != 0:
                return cand
        k += 1
    return mid


def _isolate_squarefree(f: Poly, multiplicity: int) -> list[IsolationInterval]:
    if f.is_constant():
        return []
    chain = sturm_chain(f)
    b = cauchy_bound(f)
    lo, hi = -b, b
    total = _variations_at(chain, lo) - _variations_at(chain, hi)
    out = []
    stack = [(lo, hi, total)]
    while stack:
        lo, hi, c = stack.pop()
        if c == 0:
            continue
        if c == 1:
            out.append(IsolationInterval(lo, hi, sign(f(lo)), sign(f(hi)), multiplicity, f))
            continue
        mid = _split_point(f, lo, hi)
        vm = _variations_at(chain, mid)
        left = _variations_at(chain, lo) - vm
        stack.append((mid, hi, c - left))
        stack.append((lo, mid, left))
    return out


def bisect_interval(iv: IsolationInterval) -> IsolationInterval | Fraction:
    """Halve ``iv``; returns the root itself if the midpoint hits it."""
    mid = (iv.lo + iv.hi) / 2
    s = sign(iv.factor(mid))
    if s == 0:
        return mid
    if s == iv.sign_lo:
        return IsolationInterval(mid, iv.hi, s, iv.sign_hi, iv.multiplicity, iv.factor)
    return IsolationInterval(iv.lo, mid, iv.sign_lo, s, iv.multiplicity, iv.factor)


def _shrink_around(iv: IsolationInterval, exact_root: Fraction) -> IsolationInterval:
    """A tiny isolating interval around a root found exactly."""
    w = iv.width / 4
    while True:
        lo, hi = exact_root - w, exact_root + w
        if iv.lo <= lo and hi <= iv.hi:
            slo, shi = sign(iv.factor(lo)), sign(iv.factor(hi))
            if slo and shi:
                return IsolationInterval(lo, hi, slo, shi, iv.multiplicity, iv.factor)
        w /= 2


def isolate_roots(p: Poly) -> list[IsolationInterval]:
    """Disjoint isolating intervals, sorted, one per distinct real root."""
    p = _exact(p)
    if p.is_zero():
        raise PreconditionError("cannot isolate roots of the zero polynomial")
    fac = gcd_squarefree(p)
    ivs = []
    for f, e in fac.factors:
        ivs.extend(_isolate_squarefree(f, e))
    ivs.sort(key=lambda iv: iv.lo)
    # intervals of different factors may overlap; their roots never coincide
    changed = True
    while changed:
        changed = False
        for i in range(len(ivs) - 1):
            a, b = ivs[i], ivs[i + 1]
            if a.hi >= b.lo:
                wide = i if a.width >= b.width else i + 1
                nxt = bisect_interval(ivs[wide])
                if isinstance(nxt, Fraction):
                    nxt = _shrink_around(ivs[wide], nxt)
                ivs[wide] = nxt
                ivs.sort(key=lambda iv: iv.lo)
                changed = True
                break
    return ivs


# -- refinement ------------------------------------------------------------


def _dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(round(x * 2**bits), 2**bits)


def refine_root(p: Poly, iv: IsolationInterval, tol) -> Fraction | float:
    """Locate the root in ``iv`` to within ``tol``.

    Bisection, with a Newton step accepted only when it lands inside the
    current bracket.  Exact inputs give a Fraction (the root itself when it is
    the simplest rational in the final bracket), float inputs a float.
    """
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    tol = Fraction(tol)
    bits = max(4, math.ceil(-math.log2(tol)) + 4)
    f = iv.factor
    fp = f.derivative()
    lo, hi, slo = iv.lo, iv.hi, iv.sign_lo
    root = None
    while root is None and hi - lo > 2 * tol:
        mid = (lo + hi) / 2
        d = fp(mid)
        if d != 0:
            t = _dyadic(mid - f(mid) / d, bits)
            if lo < t < hi:
                st = sign(f(t))
                if st == 0:
                    root = t
                    break
                if st == slo:
                    lo = t
                    probe = t + tol / 2
                else:
                    hi = t
                    probe = t - tol / 2
                if lo < probe < hi:
                    sp = sign(f(probe))
                    if sp == 0:
                        root = probe
                        break
                    if sp == slo:
                        lo = probe
                    else:
                        hi = probe
                if hi - lo <= 2 * tol:
                    break
        mid = (lo + hi) / 2
        sm = sign(f(mid))
        if sm == 0:
            root = mid
        elif sm == slo:
            lo = mid
        else:
            hi = mid
    if root is None:
        # a rational root is the simplest rational in any small enough bracket
        cand = simplest_rational_between(lo, hi) if lo < hi else lo
        root = cand if f(cand) == 0 else (lo + hi) / 2
    return float(root) if p.backend == FLOAT else root


def rational_root(iv: IsolationInterval) -> Fraction | None:
    """The root in ``iv`` if it is rational, else None (decided exactly).

    A rational root ``r/q`` of an integer primitive polynomial has ``q``
    dividing the leading coefficient ``D``; two such rationals differ by at
    least ``1/D**2``, so a bracket narrower than that pins the candidate.
    """
    f = iv.factor
    if f.degree == 1:
        return -f.coeffs[0] / f.coeffs[1]
    ints = f.integer_primitive()
    D = abs(ints[-1])
    approx = refine_root(f, iv, Fraction(1, 4 * D * D))
    cand = Fraction(approx).limit_denominator(D)
    return cand if f(cand) == 0 else None


def root_values(p: Poly, tol=Fraction(1, 10**15)) -> list[tuple[Fraction, bool, int]]:
    """``(value, is_exact, multiplicity)`` per distinct real root, ascending."""
    out = []
    for iv in isolate_roots(p):
        r = rational_root(iv)
        if r is not None:
            out.append((r, True, iv.multiplicity))
        else:
            out.append((refine_root(iv.factor, iv, tol), False, iv.multiplicity))
    return out


# -- mesh size -------------------------------------------------------------


@dataclass(frozen=True)
class MeshReport:
    """Minimum adjacent gap of the real roots, repeated by multiplicity.

    ``mesh`` is a Fraction when the minimising pair is rational (always the
    case when ``exact``), a float approximation otherwise, and ``math.inf``
    with fewer than two real roots.
    """

    mesh: Fraction | float
    gap_argmin: tuple[int, int] | None
    all_real: bool
    simple: bool
    exact: bool
    roots: tuple = ()


def mesh_size(p: Poly) -> MeshReport:
    p = _exact(p)
    if p.is_constant():
        raise PreconditionError("mesh size of a constant polynomial is undefined")
    fac = gcd_squarefree(p)
    simple = all(e == 1 for _, e in fac.factors)
    vals = root_values(p)
    all_real = sum(m for _, _, m in vals) == p.degree
    flat = [(v, ex) for v, ex, m in vals for _ in range(m)]
    roots = tuple(v for v, _ in flat)
    if len(flat) < 2:
        return MeshReport(math.inf, None, all_real, simple, True, roots)
    best, arg = None, None
    for i, ((a, _), (b, _)) in enumerate(zip(flat, flat[1:])):
        gap = b - a
        if best is None or gap < best:
            best, arg = gap, (i, i + 1)
    pair_exact = flat[arg[0]][1] and flat[arg[1]][1]
    exact = all(ex for _, ex in flat)
    mesh = best if (pair_exact or best == 0) else float(best)
    return MeshReport(mesh, arg, all_real, simple, exact, roots)


def _gap_equals(a: IsolationInterval, b: IsolationInterval, h: Fraction) -> bool:
    """Whether root(b) - root(a) == h exactly."""
    lo = max(a.lo, b.lo - h)
    hi = min(a.hi, b.hi - h)
    if lo >= hi:
        return False
    g = poly_gcd(a.factor, b.factor.shift(h))
    if g.is_constant():
        return False
    return sturm_count(g, lo, hi) >= 1


def _compare_gap(a: IsolationInterval, b: IsolationInterval, h: Fraction) -> bool:
    """Whether root(b) - root(a) >= h, decided exactly."""
    if _gap_equals(a, b, h):
        return True
    ea = eb = None
    while True:
        alo, ahi = (ea, ea) if ea is not None else (a.lo, a.hi)
        blo, bhi = (eb, eb) if eb is not None else (b.lo, b.hi)
        if blo - ahi >= h:
            return True
        if bhi - alo <= h:
            return False
        if ea is None and (eb is not None or a.width >= b.width):
            nxt = bisect_interval(a)
            if isinstance(nxt, Fraction):
                ea = nxt
            else:
                a = nxt
        else:
            nxt = bisect_interval(b)
            if isinstance(nxt, Fraction):
                eb = nxt
            else:
                b = nxt


def mesh_at_least(p: Poly, h) -> bool:
    """Exact test of ``mesh(p) >= h`` over the real roots of ``p``."""
    p = _exact(p)
    h = Fraction(h)
    if h <= 0:
        return True
    ivs = isolate_roots(p)
    if sum(iv.multiplicity for iv in ivs) < 2:
        return True
    if any(iv.multiplicity > 1 for iv in ivs):
        return False
    return all(_compare_gap(a, b, h) for a, b in zip(ivs, ivs[1:]))


# -- nonnegativity -----------------------------------------------------------


class Nonnegativity(enum.Enum):
    NONNEGATIVE_EVERYWHERE = "NonnegativeEverywhere"
    NEGATIVE = "Negative"
    IDENTICALLY_ZERO = "IdenticallyZero"


@dataclass(frozen=True)
class NonnegativityResult:
    status: Nonnegativity
    witness: Fraction | None = None
    value: Fraction | None = None

    @property
    def nonnegative(self) -> bool:
        return self.status is not Nonnegativity.NEGATIVE


def simplest_rational_between(a: Fraction, b: Fraction) -> Fraction:
    """Smallest-denominator rational in the closed interval [a, b]."""
    if a > b:
        a, b = b, a
    if a <= 0 <= b:
        return Fraction(0)
    if b < 0:
        return -simplest_rational_between(-b, -a)
    fl = math.floor(a)
    if fl == a:
        return Fraction(fl)
    if fl + 1 <= b:
        return Fraction(fl + 1)
    # both in (fl, fl + 1): recurse on reciprocals of the fractional parts
    inner = simplest_rational_between(1 / (b - fl), 1 / (a - fl))
    return fl + 1 / inner


def gap_sample_points(p: Poly) -> list[Fraction]:
    """One rational point in each root-free region of ``p``, left to right."""
    ivs = isolate_roots(p)
    if not ivs:
        return [Fraction(0)]
    pts = [Fraction(math.floor(ivs[0].lo))]
    for a, b in zip(ivs, ivs[1:]):
        pts.append(simplest_rational_between(a.hi, b.lo))
    pts.append(Fraction(math.ceil(ivs[-1].hi)))
    return pts


def certify_nonnegative(p: Poly) -> NonnegativityResult:
    """Decide ``p(x) >= 0`` for every real x, exactly."""
    _require_exact(p, "certify_nonnegative")
    if p.is_zero():
        return NonnegativityResult(Nonnegativity.IDENTICALLY_ZERO)
    if p.is_constant():
        if p.leading > 0:
            return NonnegativityResult(Nonnegativity.NONNEGATIVE_EVERYWHERE)
        return NonnegativityResult(Nonnegativity.NEGATIVE, Fraction(0), p.leading)
    fac = gcd_squarefree(p)
    odd = fac.odd_part
    if p.degree % 2 == 0 and real_root_count(odd) == 0:
        probe = cauchy_bound(p)
        if p(probe) > 0:
            return NonnegativityResult(Nonnegativity.NONNEGATIVE_EVERYWHERE)
    for x in gap_sample_points(fac.squarefree_part):
        v = p(x)
        if v < 0:
            return NonnegativityResult(Nonnegativity.NEGATIVE, x, v)
    raise AssertionError(f"no negative witness found for {p}")  # unreachable
