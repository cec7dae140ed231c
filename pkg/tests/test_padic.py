from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zplie.errors import (EmptyModulus, HenselFailure, MalformedPolynomial, MalformedScalar,
                          NonUnit, NoRoot, UnsupportedPrime)
from zplie.padic import (INF, PContext, PPoly, has_monic_integral_irreducible_factor,
                         hensel_quadratic, is_square_unit, newton_slopes, residue, val)

P3, P5 = PContext(3), PContext(5)


def test_val_examples():
    assert val(P3, 18) == 2
    assert val(P5, 0) == INF
    assert val(P5, Fraction(3, 7)) == 0


def test_residue_examples():
    assert residue(P3, Fraction(1, 2), 2) == 5
    assert residue(P5, 7, 1) == 2
    assert residue(P3, 0, 3) == 0
    with pytest.raises(EmptyModulus):
        residue(P3, 1, 0)
    with pytest.raises(MalformedScalar):
        residue(P3, Fraction(1, 3), 1)


def test_square_classes():
    assert is_square_unit(P5, 4)
    assert not is_square_unit(P5, 2)
    assert not is_square_unit(P3, P3.rho)
    with pytest.raises(NonUnit):
        is_square_unit(P5, 10)
    with pytest.raises(UnsupportedPrime):
        is_square_unit(PContext(2), 1)


def test_rho_is_smallest_nonresidue():
    for p, rho in [(3, 2), (5, 2), (7, 3), (11, 2), (17, 3)]:
        assert PContext(p).rho == rho


def test_hensel_examples():
    assert hensel_quadratic(P5, 0, 1, 1, 2) == 1
    # frozen from a search over all residues mod 25
    assert [f for f in range(25) if (f * f - 6) % 25 == 0 and f % 5 == 1] == [16]
    assert hensel_quadratic(P5, 0, 6, 1, 2) == 16
    assert hensel_quadratic(P3, 1, 0, 0, 3) == 0


def test_hensel_errors():
    with pytest.raises(NoRoot):
        hensel_quadratic(P5, 0, 2, 1, 2)
    with pytest.raises(HenselFailure):
        hensel_quadratic(P3, 0, 0, 0, 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 400), st.integers(0, 400), st.integers(1, 6))
def test_hensel_lifts_vanish(p, a, c, N):
    ctx = PContext(p)
    for f0 in range(p):
        if (f0 * f0 + a * f0 - c) % p == 0 and (2 * f0 + a) % p:
            f = hensel_quadratic(ctx, a, c, f0, N)
            assert f % p == f0
            assert (f * f + a * f - c) % p ** N == 0


def test_newton_examples():
    p = 3
    assert newton_slopes(P3, PPoly.from_high([1, 0, -p])) == [(Fraction(1, 2), 2)]
    c = Fraction(p)
    poly = PPoly.from_high([1, Fraction(-2, p), Fraction(1, p ** 2) - c / p ** 4])
    # both roots have valuation -3/2; the middle point lies above the chord
    assert newton_slopes(P3, poly) == [(Fraction(-3, 2), 2)]
    assert newton_slopes(P3, PPoly.from_high([1, -1])) == [(0, 1)]
    with pytest.raises(MalformedPolynomial):
        newton_slopes(P3, PPoly(()))


def test_integral_factor_examples():
    p = 3
    assert not has_monic_integral_irreducible_factor(P3, PPoly.from_high([1, Fraction(-1, p)]))
    assert has_monic_integral_irreducible_factor(P3, PPoly.from_high([1, 0, -p]))
    poly = PPoly.from_high([1, Fraction(-2, p), Fraction(1, p ** 2) - Fraction(p) / p ** 4])
    assert not has_monic_integral_irreducible_factor(P3, poly)
    with pytest.raises(MalformedPolynomial):
        has_monic_integral_irreducible_factor(P3, PPoly.from_high([2, 1]))


pscalar = st.builds(lambda n, d, k: Fraction(n, d) * Fraction(3) ** k,
                    st.integers(-200, 200), st.sampled_from([1, 2, 4, 5, 7]), st.integers(-3, 3))


@given(pscalar, pscalar)
def test_valuation_laws(x, y):
    assert val(P3, x * y) == val(P3, x) + val(P3, y)
    if x + y != 0 and x != 0 and y != 0:
        assert val(P3, x + y) >= min(val(P3, x), val(P3, y))
        if val(P3, x) != val(P3, y):
            assert val(P3, x + y) == min(val(P3, x), val(P3, y))


@given(st.lists(pscalar, min_size=1, max_size=5))
def test_slopes_cover_degree(coeffs):
    poly = PPoly(tuple(coeffs) + (Fraction(1),))
    sl = newton_slopes(P3, poly)
    assert sum(n for _, n in sl) == poly.degree
    assert [s for s, _ in sl] == sorted(s for s, _ in sl)


def _integral_root_exists(p, b, c, depth=10):
    """Lift roots of the content-free integral rescaling digit by digit."""
    k = max(0, -min(val(PContext(p), b), val(PContext(p), c)))
    g = [int(x * p ** k) for x in (Fraction(1), b, c)]
    while all(x % p == 0 for x in g):
        g = [x // p for x in g]
    roots = [0]
    for j in range(1, depth + 1):
        step = p ** (j - 1)
        roots = [r + t * step for r in roots for t in range(p)
                 if (g[0] * (r + t * step) ** 2 + g[1] * (r + t * step) + g[2]) % p ** j == 0]
        if not roots:
            return False
    return True


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(-4, 4), st.integers(1, 40), st.integers(-4, 4),
       st.integers(1, 40), st.booleans())
def test_quadratic_predicate_against_root_search(p, vb, ub, vc, uc, neg):
    ctx = PContext(p)
    b = Fraction(p) ** vb * ub * (-1 if neg else 1)
    c = Fraction(p) ** vc * uc
    expected = (val(ctx, b) >= 0 and val(ctx, c) >= 0) or _integral_root_exists(p, b, c)
    assert has_monic_integral_irreducible_factor(ctx, PPoly((c, b, Fraction(1)))) == expected
