from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import example, given, strategies as st

from dlaguerre.laguerre import (
    MeshTooSmallError,
    NotRealRootedError,
    Verdict,
    certify_main_theorem,
    classical_laguerre,
    convergence_ratios,
    discrete_fn,
    eval_fn,
    limit_check,
    sharpened_laguerre,
)
from dlaguerre.polycore import BackendError, Poly, PreconditionError
from dlaguerre.realroots import certify_nonnegative

from _strategies import nonzero_fracs, polys, small_fracs, spaced_roots

x = Poly.x()
p012 = Poly.from_roots([0, 1, 2])


def _sympy_fn(coeffs, n, h):
    X = sp.Symbol("x")
    p = sum((sp.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(coeffs)), sp.Integer(0))
    h = sp.Rational(h.numerator, h.denominator)
    pp, pm = p.subs(X, X + h), p.subs(X, X - h)
    f = sp.expand((n - 1) * (pp - pm) ** 2 - 4 * n * p * (pp - 2 * p + pm))
    return [F(int(c.p), int(c.q)) for c in reversed(sp.Poly(f, X).all_coeffs())] if f != 0 else []


def test_classical_examples():
    assert classical_laguerre(x * x) == Poly([0, 0, 2])
    assert classical_laguerre(x) == Poly([1])
    q = classical_laguerre(x * x + 1)
    assert q == Poly([-2, 0, 2]) and q(0) < 0


def test_sharpened_examples():
    assert certify_nonnegative(sharpened_laguerre(p012, 3)).nonnegative
    assert sharpened_laguerre(x, 1).is_zero()
    assert sharpened_laguerre(x * x, 2).is_zero()
    with pytest.raises(PreconditionError):
        sharpened_laguerre(x, 0)


def test_discrete_fn_examples():
    assert discrete_fn(p012, 3, 1) == Poly.from_roots([1, 1]).scale(72)
    assert discrete_fn(p012, 2, 1) == Poly.from_roots([3, 1, 1, -1]).scale(-12)
    assert discrete_fn((x * x + 1) * (x + 1), 3, 1) == Poly([8, -32, 32])
    with pytest.raises(PreconditionError):
        discrete_fn(p012, 3, 0)


def test_eval_fn_examples():
    assert eval_fn(p012, 2, 1, 4) == -540
    assert eval_fn(p012, 3, 1, 1) == 0
    assert eval_fn(Poly([5]), 4, F(1, 3), F(7, 2)) == 0


def test_certify_examples():
    cert = certify_main_theorem(p012, 1)
    assert cert.verdict is Verdict.CERTIFIED and cert.n_used == 3 and cert.mesh_checked.mesh == 1
    assert certify_main_theorem(Poly.from_roots([0, 2, 4]), 2).certified
    with pytest.raises(MeshTooSmallError):
        certify_main_theorem(Poly.from_roots([0, F(-3, 4)]), 1)


def test_certify_preconditions_are_distinct():
    with pytest.raises(NotRealRootedError):
        certify_main_theorem((x * x + 1) * (x + 1), 1)
    with pytest.raises(MeshTooSmallError):
        certify_main_theorem(Poly.from_roots([0, 0, -1]), 1)
    with pytest.raises(BackendError):
        certify_main_theorem(p012.to_float(), 1)


def test_limit_check_frozen_values():
    # f_3/(4h^2) - sharpened at x = 1/3 equals 4h^2/3 + 2h^4 by hand expansion
    hs = [F(1, 2), F(1, 4), F(1, 8)]
    devs = limit_check(p012, 3, F(1, 3), hs)
    assert devs == [F(11, 24), F(35, 384), F(131, 6144)]
    assert devs == [4 * h * h / 3 + 2 * h**4 for h in hs]
    assert convergence_ratios(devs) == [F(176, 35), F(560, 131)]


def test_limit_check_trivial_cases():
    assert limit_check(x, 1, F(2), [F(1), F(1, 2)]) == [0, 0]
    assert limit_check(x * x, 2, F(-3, 7), [F(1), F(1, 2), F(1, 4)]) == [0, 0, 0]


@given(polys(max_degree=5), st.integers(1, 6), nonzero_fracs)
@example(Poly([]), 1, F(1))
def test_discrete_fn_matches_sympy(p, n, h):
    assert list(discrete_fn(p, n, h).coeffs) == _sympy_fn(p.coeffs, n, h)


@given(polys(max_degree=6), st.integers(1, 7), nonzero_fracs, small_fracs)
def test_eval_fn_agrees_with_expansion(p, n, h, t):
    assert eval_fn(p, n, h, t) == discrete_fn(p, n, h)(t)


@given(polys(max_degree=6, min_degree=1), st.integers(1, 7), nonzero_fracs)
def test_degree_bound(p, n, h):
    assert discrete_fn(p, n, h).degree <= 2 * p.degree - 2


@given(polys(max_degree=5), st.integers(1, 5), nonzero_fracs, nonzero_fracs, small_fracs)
def test_rescaling_equivalence(p, n, h, s, t):
    # f_n(., h, p(s x)) at t equals f_n(., s h, p) at s t
    ps = p.compose_scale(s)
    assert discrete_fn(ps, n, h)(t) == discrete_fn(p, n, s * h)(s * t)


@given(spaced_roots(max_degree=6), st.sampled_from([1, -1, F(5, 2)]))
def test_main_theorem_on_spaced_roots(roots, lead):
    cert = certify_main_theorem(Poly.from_roots(roots, lead), 1)
    assert cert.certified
    assert certify_nonnegative(cert.fn_poly).nonnegative


@given(spaced_roots(max_degree=5), st.integers(1, 3))
def test_larger_weight_stays_nonnegative(roots, extra):
    p = Poly.from_roots(roots)
    assert certify_nonnegative(discrete_fn(p, p.degree, 1)).nonnegative
    assert certify_nonnegative(discrete_fn(p, p.degree + extra, 1)).nonnegative
