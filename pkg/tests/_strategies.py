"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from dlaguerre.polycore import Poly, RootedPoly

small_fracs = st.fractions(min_value=-10, max_value=10, max_denominator=12)
nonzero_fracs = small_fracs.filter(lambda v: v != 0)


@st.composite
def polys(draw, max_degree=6, min_degree=0):
    coeffs = draw(st.lists(small_fracs, min_size=min_degree + 1, max_size=max_degree + 1))
    if min_degree > 0 and coeffs[-1] == 0:
        coeffs[-1] = Fraction(1)
    return Poly(coeffs)


@st.composite
def spaced_roots(draw, min_gap=Fraction(1), min_degree=2, max_degree=7, max_denominator=8):
    """Sorted rational roots with every adjacent gap at least ``min_gap``."""
    n = draw(st.integers(min_degree, max_degree))
    start = draw(st.fractions(min_value=-6, max_value=6, max_denominator=max_denominator))
    extras = draw(st.lists(st.fractions(min_value=0, max_value=3, max_denominator=max_denominator),
                           min_size=n - 1, max_size=n - 1))
    roots = [start]
    for e in extras:
        roots.append(roots[-1] + Fraction(min_gap) + e)
    return roots


@st.composite
def simple_roots(draw, min_degree=1, max_degree=7):
    """Distinct sorted rational roots with no spacing constraint."""
    n = draw(st.integers(min_degree, max_degree))
    vals = draw(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=6),
                         min_size=n, max_size=n, unique=True))
    return sorted(vals)


def rooted(roots, leading=1):
    return RootedPoly.from_list(roots, leading)
