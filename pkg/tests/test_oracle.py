import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zplie import _linalg as la
from zplie import lie
from zplie import oracle as orc
from zplie import selfsim as ss
from zplie import zmodlin as zl
from zplie.errors import ValidationError
from zplie.families import FamilyTag, construct
from zplie.padic import PContext, residue

from tagsweep import three_dim_tags

F = Fraction
P3 = PContext(3)


@pytest.mark.parametrize("n,p,count", [(3, 3, 13), (3, 5, 31), (4, 3, 40)])
def test_enum_examples(n, p, count):
    assert len(orc.enum_index_p(n, p)) == count


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enum_is_complete_and_duplicate_free(n, p):
    ctx = PContext(p)
    shapes = orc.enum_index_p(n, p)
    assert len(shapes) == (p ** n - 1) // (p - 1)
    mods = {orc.to_submodule(ctx, sh) for sh in shapes}
    assert len(mods) == len(shapes)
    assert all(zl.index(ctx, M) == p for M in mods)


def test_subalgebra_filter_examples():
    shapes = orc.enum_index_p(3, 3)
    assert len(orc.subalgebra_filter(construct(P3, FamilyTag("L0")), shapes)) == 13
    assert len(orc.subalgebra_filter(construct(P3, FamilyTag("L1", s=1)), shapes)) == 13
    L3 = construct(P3, FamilyTag("L3", s=0))
    got = set(orc.subalgebra_filter(L3, shapes))
    want = {sh for sh in shapes if lie.is_subalgebra(L3, orc.to_submodule(P3, sh))}
    assert got == want and len(got) < 13


@pytest.mark.parametrize("tag", list(three_dim_tags(3))[::7])
def test_subalgebra_fast_path_matches_bracket_closure(tag):
    L = construct(P3, tag)
    shapes = orc.enum_index_p(L)
    want = [sh for sh in shapes if lie.is_subalgebra(L, orc.to_submodule(P3, sh))]
    assert orc.subalgebra_filter(L, shapes) == want


def in_affine(sol, f, p, N):
    q = p ** N
    h = [(x - y) % q for x, y in zip(f, sol.particular)]
    if not sol.gens:
        return not any(h)
    C = [[g[i] for g in sol.gens] for i in range(len(h))]
    return orc.solve_mod(C, h, p, N) is not None


def piece_vector(Fm, d):
    return [Fm[1 + i][1 + j] for i in range(d) for j in range(d)] + [Fm[1 + i][0] for i in range(d)]


def test_hom_solutions_examples():
    L1 = construct(P3, FamilyTag("L1", s=1))
    sh = orc.SubmoduleShape(3, 1, (0,))
    pieces = orc.hom_solutions_mod(L1, sh, 1, 1)
    assert pieces and all(pc.F00 == 1 for pc in pieces)
    zero = orc.hom_solutions_mod(L1, sh, 2, 0)
    assert any(pc.top == (0, 0) and in_affine(pc.sol, [0] * 6, 3, 2) for pc in zero)
    L7 = construct(P3, FamilyTag("L7", s=0, a=F(0), c=P3.rho))
    for e, f in itertools.product(range(3), repeat=2):
        sh = orc.SubmoduleShape(3, 2, (e, f))
        if sh in orc.subalgebra_filter(L7, [sh]):
            for F00 in range(9):
                orc.hom_solutions_mod(L7, sh, 2, F00, headroom=1)
    with pytest.raises(ValidationError):
        orc.hom_solutions_mod(construct(P3, FamilyTag("L3", s=0)), orc.SubmoduleShape(3, 1, (0,)), 1, 1)


def test_solve_mod_matches_brute_force():
    p, N = 3, 2
    C = [[3, 1], [0, 3]]
    for h in itertools.product(range(9), repeat=2):
        brute = {f for f in itertools.product(range(9), repeat=2)
                 if all(sum(c * x for c, x in zip(r, f)) % 9 == hh for r, hh in zip(C, h))}
        sol = orc.solve_mod(C, list(h), p, N)
        if sol is None:
            assert not brute
        else:
            assert {tuple(v) for v in orc.enumerate_solutions(sol)} == brute


def _shape_of(ctx, M):
    return next(sh for sh in orc.enum_index_p(M.n, ctx.p) if orc.to_submodule(ctx, sh) == M)


@pytest.mark.parametrize("tag", list(three_dim_tags(3))[::5])
def test_certificates_reduce_to_congruence_solutions(tag):
    dec = ss.decide_ss_index_3dim(construct(P3, tag))
    if dec.sigma != "p" or dec.certificate_on != "input":
        return
    cert = dec.certificate
    sh = _shape_of(P3, cert.M)
    Fm = la.matmul(cert.Phi(), sh.basis_matrix(3))
    N = 2
    Fq = [[residue(P3, x, N) for x in r] for r in Fm]
    pieces = orc.hom_solutions_mod(construct(P3, tag), sh, N, Fq[0][0], headroom=1)
    top = tuple(Fq[0][1:])
    assert any(pc.top == top and in_affine(pc.sol, piece_vector(Fq, 2), 3, N) for pc in pieces)


@pytest.mark.parametrize("tag", [FamilyTag("L4", s=s, t=t, epsilon=e)
                                 for s in (0, 1) for t in (0, 1) for e in (0, 1)]
                         + [FamilyTag("L5", s=s, r=r, c=F(c)) for s in (0, 1) for r in (0, 1)
                            for c in (1, 3)])
def test_unit_corner_forces_divisible_first_column(tag):
    # <x0 + e x1, p x1, x2> with a unit top-right entry of A/p^s: every solution
    # has p | F11 and p | F21, which makes <p x1, p x2> invariant
    L = construct(P3, tag)
    for e in range(3):
        sh = orc.SubmoduleShape(3, 1, (e,))
        if sh not in orc.subalgebra_filter(L, [sh]):
            continue
        for F00 in range(9):
            for pc in orc.hom_solutions_mod(L, sh, 2, F00, headroom=1):
                if any(pc.top):
                    continue
                for f in orc.enumerate_solutions(pc.sol):
                    assert f[0] % 3 == 0 and f[2] % 3 == 0


def test_exhaust_examples():
    r0 = orc.exhaust(construct(P3, FamilyTag("L3", s=0)), 1)
    assert r0.covered is True
    r1 = orc.exhaust(construct(P3, FamilyTag("L2", s=1, r=1, c=F(1))), 2)
    assert r1.covered is True
    r2 = orc.exhaust(construct(P3, FamilyTag("L2", s=1, r=1, c=F(3))), 2)
    assert r2.covered is False and r2.uncovered_total > 0
    assert r2.simple_lift
    assert "corroborates" in r0.statement and "proves" not in r0.statement


def test_exhaust_is_deterministic_and_job_independent():
    L = construct(P3, FamilyTag("L4", s=0, t=0, epsilon=1))
    a = json.dumps(orc.exhaust(L, 2, jobs=1).to_json(), sort_keys=True)
    b = json.dumps(orc.exhaust(L, 2, jobs=2).to_json(), sort_keys=True)
    assert a == b


def test_exhaust_rejects_non_ideal_candidates():
    L = construct(P3, FamilyTag("L3", s=0))
    with pytest.raises(ValidationError):
        orc.exhaust(L, 1, candidates=[zl.hnf(P3, [(1, 0, 0)], 3)])


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(0, 8), min_size=3, max_size=3), min_size=1, max_size=4))
def test_span_mod_contains_generators(gens):
    sp, orders = orc.span_mod(gens, 3, 2)
    sol = orc.AffineSolutions(9, [0, 0, 0], sp, orders)
    for g in gens:
        assert in_affine(sol, g, 3, 2)
