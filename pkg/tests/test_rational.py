"""Scalar arithmetic: canonical fractions of multivariate polynomials.

sympy is used only as an independent oracle (gcd, differentiation); the
package itself never imports it.
"""

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from diracdeform.rational import (
    DegreeCapError,
    Poly,
    PoleError,
    Scalar,
    degree_cap,
    is_definite,
    is_positive_pattern,
    poly_divexact,
    poly_from_str,
    poly_gcd,
    poly_lcm,
    poly_to_str,
    random_poly,
    scalar_from_str,
    scalar_is_definite,
    scalar_to_str,
)

SYMS = sympy.symbols("x1 x2 x3 x4")


def to_sympy(p: Poly):
    total = 0
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(SYMS, e):
            term *= s**k
        total += term
    return total


def x(i, nv):
    return Poly.variable(i, nv)


# -- polynomial ring basics --------------------------------------------------


def test_ring_identities():
    p = x(1, 2) * x(1, 2) + x(2, 2).scale(3) + Poly.const(2, Fraction(1, 2))
    q = x(1, 2) - Poly.one(2)
    assert p * q == q * p
    assert (p + q) - q == p
    assert p * Poly.one(2) == p
    assert (p * Poly.zero(2)).is_zero()


def test_parse_print_roundtrip():
    cases = ["0", "1", "-3/2", "x1", "2*x1^3*x2 - x2 + 1/2", "x1*x2*x3"]
    for text in cases:
        p = poly_from_str(text, 3)
        assert poly_from_str(poly_to_str(p), 3) == p


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        poly_from_str("x9", 3)
    with pytest.raises(ValueError):
        poly_from_str("x1^", 3)
    with pytest.raises(ValueError):
        poly_from_str("", 3)


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(1, 9))
@settings(max_examples=60, deadline=None)
def test_constant_arithmetic_matches_fractions(a, b, d):
    fa, fb = Fraction(a, d), Fraction(b, d)
    pa, pb = Poly.const(0, fa), Poly.const(0, fb)
    assert (pa * pb).coefficient(()) == fa * fb
    assert (pa + pb).coefficient(()) == fa + fb


def test_divexact_and_lcm():
    f = (x(1, 2) + x(2, 2)) * (x(1, 2) - x(2, 2))
    g = x(1, 2) + x(2, 2)
    assert poly_divexact(f, g) == x(1, 2) - x(2, 2)
    with pytest.raises(ValueError):
        poly_divexact(x(1, 2), x(2, 2))
    lcm = poly_lcm(f, g)
    assert poly_divexact(lcm, f) is not None


def test_gcd_matches_sympy_oracle():
    rng = random.Random(5)
    with degree_cap(None):
        for _ in range(120):
            nv = rng.randint(1, 4)
            f = random_poly(rng, nv, rng.randint(0, 3), terms=rng.randint(1, 3), bound=6)
            g = random_poly(rng, nv, rng.randint(0, 3), terms=rng.randint(1, 3), bound=6)
            if rng.random() < 0.5:
                h = random_poly(rng, nv, 2, terms=2, bound=4)
                f, g = f * h, g * h
            if f.is_zero() or g.is_zero():
                continue
            mine = to_sympy(poly_gcd(f, g))
            theirs = sympy.gcd(
                sympy.Poly(to_sympy(f), *SYMS[:nv]),
                sympy.Poly(to_sympy(g), *SYMS[:nv]),
            ).as_expr()
            ratio = sympy.simplify(mine / theirs)
            assert ratio.is_constant() and ratio != 0


# -- canonical fractions --------------------------------------------------------


def test_scalar_canonical_form():
    two_x_over_four = Scalar(x(1, 2).scale(2), Poly.const(2, 4))
    x_over_two = Scalar(x(1, 2), Poly.const(2, 2))
    assert two_x_over_four == x_over_two
    assert hash(two_x_over_four) == hash(x_over_two)
    # denominator normalized to integer primitive, positive leading coefficient
    s = Scalar(x(1, 2), -x(2, 2))
    assert poly_to_str(s.den) == "x2"
    assert poly_to_str(s.num) == "-x1"


def test_scalar_field_axioms():
    rng = random.Random(11)
    with degree_cap(None):
        for _ in range(40):
            nv = 3
            a = Scalar(random_poly(rng, nv, 2, 2, 5), _nonzero(rng, nv))
            b = Scalar(random_poly(rng, nv, 2, 2, 5), _nonzero(rng, nv))
            c = Scalar(random_poly(rng, nv, 2, 2, 5), _nonzero(rng, nv))
            assert (a + b) * c == a * c + b * c
            assert a - a == Scalar.zero(nv)
            if not b.is_zero():
                assert (a / b) * b == a


def _nonzero(rng, nv):
    while True:
        p = random_poly(rng, nv, 2, 2, 5)
        if not p.is_zero():
            return p


def test_derivative_quotient_rule_vs_sympy():
    rng = random.Random(23)
    with degree_cap(None):
        for _ in range(30):
            nv = 3
            s = Scalar(random_poly(rng, nv, 3, 2, 6), _nonzero(rng, nv))
            i = rng.randint(1, nv)
            mine = s.derivative(i)
            theirs = sympy.diff(
                to_sympy(s.num) / to_sympy(s.den), SYMS[i - 1]
            )
            got = to_sympy(mine.num) / to_sympy(mine.den)
            assert sympy.simplify(got - theirs) == 0


def test_evaluate_and_poles():
    one = Poly.one(2)
    s = Scalar(one, one - x(1, 2))
    assert s.evaluate([Fraction(1, 2), Fraction(0)]) == 2
    with pytest.raises(PoleError):
        s.evaluate([Fraction(1), Fraction(0)])


def test_scalar_string_roundtrip():
    s = scalar_from_str("(3/2*x1^2 - x2 + 1)/(x1 + 1)", 2)
    assert scalar_from_str(scalar_to_str(s), 2) == s
    t = scalar_from_str("x1 - 5", 2)
    assert t.is_polynomial()


def test_degree_cap_behavior():
    p = poly_from_str("x1^5", 1)
    q = poly_from_str("x1^4", 1)
    with degree_cap(8):
        with pytest.raises(DegreeCapError):
            p * q
    with degree_cap(None):
        assert (p * q).total_degree() == 9
    with degree_cap(12):
        assert (p * q).total_degree() == 9


def test_positive_pattern():
    assert is_positive_pattern(poly_from_str("1 + x1^2", 2))
    assert is_positive_pattern(poly_from_str("2 + 3*x1^2*x2^4", 2))
    assert not is_positive_pattern(poly_from_str("x1^2", 2))  # no constant
    assert not is_positive_pattern(poly_from_str("1 + x1", 2))  # odd power
    assert not is_positive_pattern(poly_from_str("1 - x1^2", 2))  # sign
    assert is_definite(poly_from_str("-1 - x1^2", 2))
    assert scalar_is_definite(scalar_from_str("(1 + x1^2)/(2 + x2^2)", 2))
    assert not scalar_is_definite(scalar_from_str("(x1)/(1 + x2^2)", 2))


def test_pattern_soundness_no_rational_zero():
    rng = random.Random(3)
    p = poly_from_str("1 + x1^2 + 2*x1^2*x2^2", 2)
    assert is_positive_pattern(p)
    for _ in range(200):
        pt = [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(2)]
        assert p.evaluate(pt) > 0


def test_gcd_heuristic_stacked_factors():
    """Dense stacked common factors must cancel exactly (heuristic + fallback)."""
    rng = random.Random(17)
    with degree_cap(None):
        for _ in range(25):
            nv = rng.randint(2, 5)
            h = random_poly(rng, nv, rng.randint(1, 3), terms=3, bound=6)
            if h.is_zero():
                continue
            f = random_poly(rng, nv, 2, terms=3, bound=6) * h
            g = random_poly(rng, nv, 2, terms=3, bound=6) * h
            if f.is_zero() or g.is_zero():
                continue
            d = poly_gcd(f, g)
            # the engineered factor divides the gcd, the gcd divides both,
            # and the cofactors are coprime
            h_prim = poly_gcd(h, h)  # primitive normalization of h
            poly_divexact(d, h_prim)
            qf, qg = poly_divexact(f, d), poly_divexact(g, d)
            assert poly_gcd(qf, qg).is_constant()


def test_derivative_shared_denominator_factors():
    """d(n/d) with gcd(d, d') != 1 stays fast and exact (gcd-extracted rule)."""
    with degree_cap(None):
        n3 = 3
        d = poly_from_str("x1^2*x2 + x1*x2", n3)  # = x1*x2*(x1+1), not squarefree-friendly
        num = poly_from_str("x3 + 1", n3)
        s = Scalar(num, d)
        ds = s.derivative(1)
        theirs = sympy.diff(to_sympy(s.num) / to_sympy(s.den), SYMS[0])
        got = to_sympy(ds.num) / to_sympy(ds.den)
        assert sympy.simplify(got - theirs) == 0


def test_degree_cap_thread_isolation():
    import threading

    from diracdeform.rational import current_degree_cap

    seen = {}

    def worker(name, limit):
        with degree_cap(limit):
            seen[name] = current_degree_cap()

    threads = [
        threading.Thread(target=worker, args=("a", None)),
        threading.Thread(target=worker, args=("b", 3)),
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert seen == {"a": None, "b": 3}
    assert current_degree_cap() == 8
