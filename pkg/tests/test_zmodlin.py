import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zplie import _linalg as la
from zplie import zmodlin as zl
from zplie.errors import MalformedMatrix
from zplie.padic import INF, PContext, val

P3 = PContext(3)
F = Fraction


def diag(*xs):
    n = len(xs)
    return zl.hnf(P3, [[F(xs[j]) if i == j else F(0) for i in range(n)] for j in range(n)], n)


def test_hnf_examples():
    M = zl.hnf(P3, [(3, 0), (0, 1)], 2)
    assert sorted(v for _, v in M.pivots()) == [1, 3]
    assert M == zl.hnf(P3, [(0, 1), (3, 5)], 2)
    assert zl.hnf(P3, [(1, 1), (1, 1)], 2) == zl.hnf(P3, [(1, 1)], 2)
    assert zl.hnf(P3, [(1, 1), (1, 1)], 2).rank == 1
    assert zl.hnf(P3, [(2, 0), (0, 2)], 2) == zl.full(P3, 2)
    with pytest.raises(MalformedMatrix):
        zl.hnf(P3, [(F(1, 3), 0)], 2)


def test_index_examples():
    assert zl.index(P3, diag(3, 1, 1)) == 3
    assert zl.index(P3, diag(3, 3, 1)) == 9
    assert zl.index(P3, zl.hnf(P3, [(1, 0, 0), (0, 1, 0)], 3)) == INF


def test_isolator_examples():
    assert zl.isolator(P3, zl.hnf(P3, [(3, 9)], 2)) == zl.hnf(P3, [(1, 3)], 2)
    assert zl.isolator(P3, zl.full(P3, 3)) == zl.full(P3, 3)
    assert zl.isolator(P3, diag(3, 1)) == zl.full(P3, 2)


def test_member_intersect_preimage_examples():
    assert not zl.member(P3, (1, 0), diag(3, 1))
    e1, e2 = zl.hnf(P3, [(1, 0)], 2), zl.hnf(P3, [(0, 1)], 2)
    assert zl.intersect(P3, e1, e2).is_zero()
    pre = zl.preimage(P3, [[F(1, 3)]], zl.full(P3, 1), zl.full(P3, 1))
    assert pre == zl.hnf(P3, [(3,)], 1)


def test_zero_module_keeps_ambient_rank():
    Z = zl.zero(3)
    assert Z.n == 3 and Z.rank == 0


def test_index_p_count_rank3():
    # hyperplanes of F_p^3, counted as nonzero functionals up to scalars
    for p in (3, 5):
        ctx = PContext(p)
        funcs = {tuple(x * pow(next(y for y in f if y), -1, p) % p for x in f)
                 for f in itertools.product(range(p), repeat=3) if any(f)}
        mods = set()
        for f in funcs:
            # kernel of the functional plus p Z_p^3
            gens = [tuple(F(x) for x in v) for v in itertools.product(range(p), repeat=3)
                    if sum(a * b for a, b in zip(f, v)) % p == 0]
            gens += [tuple(F(p) if i == j else F(0) for i in range(3)) for j in range(3)]
            M = zl.hnf(ctx, gens, 3)
            assert zl.index(ctx, M) == p
            mods.add(M)
        assert len(mods) == p * p + p + 1


entry = st.builds(lambda u, k: F(u) * 3 ** k, st.integers(-5, 5), st.integers(0, 2))
cols3 = st.lists(st.tuples(entry, entry, entry), min_size=1, max_size=4)


def full_rank(cols):
    return la.rank(la.from_cols(cols, 3)) == 3


@settings(max_examples=80, deadline=None)
@given(cols3)
def test_hnf_canonical(cols):
    M = zl.hnf(P3, cols, 3)
    assert zl.hnf(P3, list(reversed(cols)), 3) == M
    assert zl.hnf(P3, M.cols, 3) == M
    for c in cols:
        assert zl.member(P3, c, M)
    for r, v in M.pivots():
        assert v == 3 ** val(P3, v)


@settings(max_examples=80, deadline=None)
@given(cols3)
def test_isolator_properties(cols):
    M = zl.hnf(P3, cols, 3)
    iso = zl.isolator(P3, M)
    assert zl.isolator(P3, iso) == iso
    assert iso.rank == M.rank
    assert zl.contains(P3, iso, M)
    if M.rank == 3:
        assert zl.index(P3, M) % zl.index(P3, iso) == 0


@settings(max_examples=60, deadline=None)
@given(cols3, cols3)
def test_intersection_index(c1, c2):
    if not (full_rank(c1) and full_rank(c2)):
        return
    M1, M2 = zl.hnf(P3, c1, 3), zl.hnf(P3, c2, 3)
    I = zl.intersect(P3, M1, M2)
    assert zl.index(P3, I) >= max(zl.index(P3, M1), zl.index(P3, M2))
    assert zl.contains(P3, M1, I) and zl.contains(P3, M2, I)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(entry, min_size=3, max_size=3), min_size=3, max_size=3), cols3, cols3,
       st.integers(0, 2))
def test_preimage_properties(T, cm, cd, shift):
    T = [[x / 3 ** shift for x in row] for row in T]
    M, D = zl.hnf(P3, cm, 3), zl.hnf(P3, cd, 3)
    pre = zl.preimage(P3, T, M, D)
    assert zl.contains(P3, D, pre)
    for c in pre.cols:
        assert zl.member(P3, la.matvec(T, list(c)), M)


def test_index_matches_determinant():
    M = zl.hnf(P3, [(3, 1, 0), (0, 9, 2), (1, 1, 1)], 3)
    d = la.det(la.from_cols([(3, 1, 0), (0, 9, 2), (1, 1, 1)], 3))
    assert zl.index(P3, M) == 3 ** val(P3, d)
