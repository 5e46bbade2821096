"""Dense univariate polynomials over exact rationals or IEEE doubles.

Every value carries a backend tag: ``"exact"`` (coefficients are
:class:`fractions.Fraction`) or ``"float"``.  Python ints are neutral and are
promoted to whichever backend they meet.  Combining a Fraction with a float
raises :class:`BackendError` before any arithmetic happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"


class BackendError(TypeError):
    """Exact and floating-point values were mixed."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


def backend_of(value) -> str | None:
    """Backend implied by a scalar; ``None`` for ints (neutral)."""
    if isinstance(value, bool):
        raise TypeError("bool is not a polynomial scalar")
    if isinstance(value, int):
        return None
    if isinstance(value, Fraction):
        return EXACT
    if isinstance(value, float):
        return FLOAT
    raise TypeError(f"unsupported scalar type {type(value).__name__}")


def coerce(value, backend: str) -> Scalar:
    """Convert ``value`` to ``backend``; ints convert, other mixes raise."""
    b = backend_of(value)
    if b is None:
        return Fraction(value) if backend == EXACT else float(value)
    if b != backend:
        raise BackendError(f"{b} value {value!r} used with {backend} backend")
    return value


def infer_backend(values: Iterable) -> str:
    found = {backend_of(v) for v in values} - {None}
    if len(found) > 1:
        raise BackendError("mixed exact and float values")
    return found.pop() if found else EXACT


def sign(value) -> int:
    return (value > 0) - (value < 0)


class Poly:
    """Immutable dense polynomial; ``coeffs[i]`` multiplies ``x**i``.

    Trailing zeros are stripped on construction, so the zero polynomial has
    an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs", "backend")

    def __init__(self, coeffs: Iterable = (), backend: str | None = None):
        coeffs = list(coeffs)
        if backend is None:
            backend = infer_backend(coeffs)
        elif backend not in (EXACT, FLOAT):
            raise ValueError(f"unknown backend {backend!r}")
        cs = [coerce(c, backend) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def x(cls, backend: str = EXACT) -> Poly:
        return cls([0, 1], backend)

    @classmethod
    def const(cls, c, backend: str | None = None) -> Poly:
        return cls([c], backend)

    @classmethod
    def from_roots(cls, roots: Iterable, leading=1, backend: str | None = None) -> Poly:
        roots = list(roots)
        if backend is None:
            backend = infer_backend(roots + [leading])
        out = cls([leading], backend)
        for r in roots:
            out = out * cls([-coerce(r, backend), 1], backend)
        return out

    # -- basic queries ----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else self._zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, i: int) -> Scalar:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self._zero()

    def _zero(self) -> Scalar:
        return Fraction(0) if self.backend == EXACT else 0.0

    def _check(self, other: Poly) -> None:
        if self.backend != other.backend:
            raise BackendError(f"{self.backend} polynomial combined with {other.backend} polynomial")

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly([coerce(other, self.backend)], self.backend)

    # -- evaluation -------------------------------------------------------

    def __call__(self, x) -> Scalar:
        x = coerce(x, self.backend)
        acc = self._zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> Poly:
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)], self.backend)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs], self.backend)

    def __sub__(self, other) -> Poly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Poly:
        return self._lift(other) - self

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly([], self.backend)
        out = [self._zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self.backend)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power")
        out = Poly([1], self.backend)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> Poly:
        c = coerce(c, self.backend)
        return Poly([a * c for a in self.coeffs], self.backend)

    def __divmod__(self, other: Poly) -> tuple[Poly, Poly]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        lead = dv[-1]
        q = [self._zero()] * max(len(rem) - len(dv) + 1, 0)
        for shift in range(len(rem) - len(dv), -1, -1):
            c = rem[shift + len(dv) - 1] / lead
            q[shift] = c
            if c:
                for i, d in enumerate(dv):
                    rem[shift + i] -= c * d
            rem.pop()
        return Poly(q, self.backend), Poly(rem, self.backend)

    def __floordiv__(self, other: Poly) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return divmod(self, other)[1]

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        return self.scale(1 / self.leading if self.backend == FLOAT else Fraction(1) / self.leading)

    # -- calculus and difference operators ------------------------------

    def derivative(self) -> Poly:
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.backend)

    def shift(self, h) -> Poly:
        """The polynomial ``x -> self(x + h)`` (Taylor shift by Horner)."""
        h = coerce(h, self.backend)
        if h == 0:
            return self
        out: list = []
        for c in reversed(self.coeffs):
            # out <- out * (x + h) + c
            nxt = [self._zero()] * (len(out) + 1)
            for i, a in enumerate(out):
                nxt[i + 1] += a
                nxt[i] += a * h
            nxt[0] += c
            out = nxt
        return Poly(out, self.backend)

    def forward_difference(self, h=1) -> Poly:
        """``self(x + h) - self(x)``; degree drops by one for nonconstant input."""
        if h == 0:
            raise PreconditionError("difference step must be nonzero")
        return self.shift(h) - self

    def compose_scale(self, s) -> Poly:
        """The polynomial ``x -> self(s * x)``."""
        s = coerce(s, self.backend)
        out = []
        p = coerce(1, self.backend)
        for c in self.coeffs:
            out.append(c * p)
            p = p * s
        return Poly(out, self.backend)

    # -- conversions ------------------------------------------------------

    def to_float(self) -> Poly:
        return Poly([float(c) for c in self.coeffs], FLOAT)

    def to_exact(self) -> Poly:
        return Poly([Fraction(c) for c in self.coeffs], EXACT)

    def integer_primitive(self) -> list[int]:
        """Integer coefficients of a positive multiple of ``self`` with content 1."""
        if self.backend != EXACT:
            raise BackendError("integer_primitive needs the exact backend")
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        return [v // g for v in ints] if g else ints

    # -- dunder plumbing --------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.backend == other.backend and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, float)) and not isinstance(other, bool):
            return self.coeffs == Poly([other], self.backend).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.backend, self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({[_fmt(c) for c in self.coeffs]}, {self.backend!r})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = _fmt(abs(c))
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            body = mono if (mag == "1" and mono) else (f"{mag}*{mono}" if mono else mag)
            terms.append(("-" if c < 0 else "+", body))
        first_sign, first = terms[0]
        s = ("-" if first_sign == "-" else "") + first
        for sg, body in terms[1:]:
            s += f" {sg} {body}"
        return s


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return repr(c)


def eval_poly(p: Poly, x) -> Scalar:
    return p(x)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (exact backend)."""
    if a.backend != EXACT or b.backend != EXACT:
        raise BackendError("polynomial gcd needs the exact backend")
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a.monic() if not a.is_zero() else a


class SquarefreeFactorization(NamedTuple):
    squarefree_part: Poly
    odd_part: Poly
    factors: list  # [(monic squarefree factor, exponent), ...]


def gcd_squarefree(p: Poly) -> SquarefreeFactorization:
    """Yun's squarefree decomposition ``p = lc(p) * prod f_i**e_i``."""
    if p.backend != EXACT:
        raise BackendError("squarefree factorization needs the exact backend")
    one = Poly([1])
    if p.is_constant():
        return SquarefreeFactorization(one, one, [])
    f = p.monic()
    fp = f.derivative()
    a = poly_gcd(f, fp)
    b = f // a
    c = fp // a
    d = c - b.derivative()
    factors = []
    i = 1
    while not b.is_constant():
        a = poly_gcd(b, d)
        if not a.is_constant():
            factors.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    sqf, odd = one, one
    for fac, e in factors:
        sqf = sqf * fac
        if e % 2:
            odd = odd * fac
    return SquarefreeFactorization(sqf, odd, factors)


@dataclass(frozen=True)
class RootedPoly:
    """``leading * prod (x - root)**mult`` with strictly increasing roots."""

    roots: tuple  # ((location, multiplicity), ...)
    leading: Scalar = 1

    def __post_init__(self):
        roots = tuple((loc, int(m)) for loc, m in self.roots)
        backend = infer_backend([loc for loc, _ in roots] + [self.leading])
        roots = tuple((coerce(loc, backend), m) for loc, m in roots)
        for _, m in roots:
            if m < 1:
                raise ValueError("multiplicities must be positive")
        for (a, _), (b, _) in zip(roots, roots[1:]):
            if not a < b:
                raise ValueError("root locations must be strictly increasing")
        if self.leading == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "leading", coerce(self.leading, backend))

    @classmethod
    def from_list(cls, roots: Sequence, leading=1) -> RootedPoly:
        """Build from a root list in which repeats encode multiplicity."""
        grouped: dict = {}
        for r in roots:
            grouped[r] = grouped.get(r, 0) + 1
        return cls(tuple(sorted(grouped.items())), leading)

    @property
    def backend(self) -> str:
        return backend_of(self.leading) or EXACT

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def root_list(self) -> list:
        return [loc for loc, m in self.roots for _ in range(m)]

    def mesh(self):
        """Minimum adjacent gap with repeats; ``math.inf`` below two roots."""
        rs = self.root_list()
        if len(rs) < 2:
            return math.inf
        return min(b - a for a, b in zip(rs, rs[1:]))

    def expand(self) -> Poly:
        return expand(self)

    def __str__(self) -> str:
        parts = []
        lead = self.leading
        if lead != 1 or not self.roots:
            parts.append(_fmt(lead))
        for loc, m in self.roots:
            if loc == 0:
                base = "x"
            else:
                base = f"(x {'-' if loc > 0 else '+'} {_fmt(abs(loc))})"
            parts.append(base + (f"^{m}" if m > 1 else ""))
        return "*".join(parts)


def expand(rp: RootedPoly) -> Poly:
    return Poly.from_roots(rp.root_list(), rp.leading, rp.backend)
