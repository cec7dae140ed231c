"""Acceptance suite: seven end-to-end criteria, one PASS/FAIL line each.

Run with pytest (lines are printed in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from zplie import lie, oracle, selfsim  # noqa: E402
from zplie.families import (FamilyTag, construct, lattice_from_matrix,  # noqa: E402
                            recognize_with_basis, verify_recognition)
from zplie.padic import INF, PContext, val  # noqa: E402
from tagsweep import three_dim_tags  # noqa: E402

F = Fraction
RESULTS = []
JOBS = int(os.environ.get("JOBS", "4"))


def record(n, ok, detail, t0):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({time.time() - t0:.1f}s) {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def theorem_sublist(ctx, tag):
    """Index-p families read straight from the classification statement."""
    f = tag.family
    if f in ("L0", "L1"):
        return True
    if f == "L2":
        return val(ctx, tag.c) == 1
    if f == "L3":
        return False
    if f == "L4":
        return tag.t == 1 or (tag.t == 0 and tag.epsilon == 0)
    if f == "L5":
        if tag.r >= 1:
            return val(ctx, tag.c) == 1
        return val(ctx, 4 * tag.c + 1) == 1
    raise AssertionError(f"recognizer returned {f}")


# -- 1 ------------------------------------------------------------------------

def criterion_1():
    t0 = time.time()
    bad, n, counts = [], 0, {}
    for p in (3, 5):
        ctx = PContext(p)
        for tag in three_dim_tags(p):
            n += 1
            dec = selfsim.decide_ss_index_3dim(construct(ctx, tag))
            want = "p" if theorem_sublist(ctx, dec.tag) else "p^2"
            counts[(p, dec.sigma)] = counts.get((p, dec.sigma), 0) + 1
            ok = dec.sigma == want and dec.simplicity.status == "Simple"
            if dec.sigma == "p":
                ok = ok and dec.certificate.index == p
            if not ok:
                bad.append((p, str(tag), dec.sigma, dec.simplicity.status))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 30
    summary = ", ".join(f"p={p}: {counts.get((p, 'p'), 0)} p / {counts.get((p, 'p^2'), 0)} p^2"
                        for p in (3, 5))
    return record(1, ok, f"{n} tags ({summary}); mismatches {bad[:3]}", t0), bad


# -- 2 ------------------------------------------------------------------------

def criterion_2():
    t0 = time.time()
    ctx = PContext(3)
    bad, n = [], 0
    for tag in three_dim_tags(3):
        L = construct(ctx, tag)
        dec = selfsim.decide_ss_index_3dim(L)
        rep = oracle.exhaust(L, 2, jobs=JOBS, hints=[dec.certificate], tag=str(tag))
        n += 1
        if dec.sigma == "p^2":
            ok = rep.covered is True
        else:
            ok = rep.covered is False and rep.simple_lift
        if not ok:
            bad.append((str(tag), dec.sigma, rep.covered, rep.simple_lift))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 600
    return record(2, ok, f"{n} tags at p=3, N=2, jobs={JOBS}; disagreements {bad[:3]}", t0), bad


# -- 3 ------------------------------------------------------------------------

def _simple_without_cap(endo):
    v = selfsim.simplicity(endo)
    return v.status == "Simple", v


def criterion_3():
    t0 = time.time()
    bad, n = [], 0
    # direct constructions of odd index on rank 3
    for p in (3, 5):
        ctx = PContext(p)
        for tag in three_dim_tags(p):
            rec = recognize_with_basis(construct(ctx, tag))
            if not theorem_sublist(ctx, rec.tag):
                continue
            for k in (1, 3):
                endo = selfsim.certify(ctx, rec.tag, k)
                n += 1
                ok, v = _simple_without_cap(endo)
                if not ok or endo.index != p ** k:
                    bad.append((str(rec.tag), k, v.status))
    # corank-one abelian ideal construction, index p^(d k)
    rng = random.Random(3)
    ctx = PContext(3)
    for d in (1, 2, 3, 4):
        for _ in range(4):
            a = tuple(F(rng.choice([0, 1, 2, 3, 6, 9])) for _ in range(d))
            b = tuple(F(rng.choice([1, 2, 3, 9])) for _ in range(d - 1))
            L = construct(ctx, FamilyTag("Lab", a=a, b=b))
            for k in (1, 2):
                endo = selfsim.certificate_codim_one(L, k)
                n += 1
                ok, v = _simple_without_cap(endo)
                if not ok or endo.index != 3 ** (d * k):
                    bad.append((f"Lab{a}{b}", k, v.status))
    # scalar-action lattices, index p^k
    for p in (3, 5):
        ctx = PContext(p)
        for d in range(2, 6):
            for a in (F(0), F(1), F(p), F(p * p), F(2)):
                for k in (1, 2, 3):
                    endo = selfsim.certify(ctx, FamilyTag("Ld", d=d, a=a), k)
                    n += 1
                    ok, v = _simple_without_cap(endo)
                    if not ok or endo.index != p ** k:
                        bad.append((f"Ld{d}({a})", k, v.status))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 60
    return record(3, ok, f"{n} certificates; failures {bad[:3]}", t0), bad


# -- 4 ------------------------------------------------------------------------

def random_tag(rng, p):
    fam = rng.choice(["L0", "L1", "L2", "L3", "L4", "L5", "L6", "L7"])
    s, r, t = rng.randint(0, 2), rng.randint(1, 2), rng.randint(0, 2)

    def scalar():
        return F(rng.randint(-50, 50) * p ** rng.randint(0, 2), rng.choice([1, 2, 4, 7]))
    if fam == "L0":
        return FamilyTag("L0")
    if fam in ("L1", "L3"):
        return FamilyTag(fam, s=s)
    if fam == "L2":
        return FamilyTag("L2", s=s, r=r, c=scalar())
    if fam == "L4":
        return FamilyTag("L4", s=s, t=t, epsilon=rng.randint(0, 1))
    if fam == "L5":
        return FamilyTag("L5", s=s, r=rng.randint(0, 2), c=scalar())
    if fam == "L6":
        a = scalar()
        return FamilyTag("L6", a=a if a else F(1))
    return FamilyTag("L7", s=s, a=scalar(), c=scalar())


def random_gl3(rng, p):
    while True:
        P = [[F(rng.randint(-p + 1, p - 1) * p ** rng.randint(0, 2)) for _ in range(3)]
             for _ in range(3)]
        det = (P[0][0] * (P[1][1] * P[2][2] - P[1][2] * P[2][1])
               - P[0][1] * (P[1][0] * P[2][2] - P[1][2] * P[2][0])
               + P[0][2] * (P[1][0] * P[2][1] - P[1][1] * P[2][0]))
        if det != 0 and det.numerator % p:
            return P


def criterion_4():
    t0 = time.time()
    rng = random.Random(4)
    bad, n = [], 0
    for i in range(100):
        p = (3, 5)[i % 2]
        ctx = PContext(p)
        tag = random_tag(rng, p)
        base = construct(ctx, tag)
        for _ in range(10):
            L = lie.change_basis(base, random_gl3(rng, p))
            rec = recognize_with_basis(L)
            n += 1
            # the recognised basis carries L onto construct(rec.tag)
            if not verify_recognition(L, rec):
                bad.append((p, str(tag), str(rec.tag)))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 120
    return record(4, ok, f"{n} recognitions, {len(bad)} failures {bad[:3]}", t0), bad


# -- 5 ------------------------------------------------------------------------

def random_metabelian(rng):
    d = rng.choice([2, 2, 3])
    while True:
        A = [[F(rng.choice([0, 1, -1, 2, 3, -3, 6, 9])) for _ in range(d)] for _ in range(d)]
        scalar = all(A[i][j] == (A[0][0] if i == j else 0) for i in range(d) for j in range(d))
        if not scalar:
            return A


def criterion_5():
    t0 = time.time()
    ctx = PContext(3)
    bad, checks = [], {}
    for d in range(2, 7):
        for s in range(4):
            r = selfsim.shss_classify(construct(ctx, FamilyTag("Ld", d=d, a=F(3) ** s)))
            if r.s != s:
                bad.append(("Ld", d, s, r.s))
    r0 = selfsim.shss_classify(construct(ctx, FamilyTag("Ld", d=4, a=F(0))))
    if r0.s != INF:
        bad.append(("Ld abelian", r0.s))
    rng = random.Random(5)
    for _ in range(50):
        L = lattice_from_matrix(ctx, random_metabelian(rng))
        r = selfsim.shss_classify(L)
        if r.shss or r.witness is None:
            bad.append(("random", r.s))
            continue
        W, _ = lie.restrict(L, [list(c) for c in r.witness.cols])
        if W.n == 3:
            verdict = selfsim.decide_ss_index_3dim(W).sigma
        else:
            verdict = "p^2" if oracle.exhaust(W, 2, jobs=JOBS).covered else "uncovered"
        key = (W.n, r.witness_check, verdict)
        checks[key] = checks.get(key, 0) + 1
        if verdict != "p^2":
            bad.append(("witness", W.n, verdict))
    for p in (3, 5):
        pc = PContext(p)
        for tag in three_dim_tags(p):
            h = selfsim.hereditary_3dim(construct(pc, tag))
            if h.hereditary != (h.tag.family in ("L0", "L1")):
                bad.append(("hereditary", str(tag)))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 300
    return record(5, ok, f"witness checks {sorted(checks.items())}; failures {bad[:3]}", t0), bad


# -- 6 ------------------------------------------------------------------------

def criterion_6():
    t0 = time.time()
    ctx = PContext(3)
    bad, info = [], []
    for a in ((F(0), F(0), F(3)), (F(0), F(0), F(0), F(3))):
        d = len(a)
        L = construct(ctx, FamilyTag("Lab", a=a, b=(F(1),) * (d - 1)))
        w = selfsim.witness_nonss(L)
        ineq = all(w.k[0] + w.k[1] - w.k[i] > i - 1 for i in range(1, d + 1))
        W, _ = lie.restrict(L, [list(c) for c in w.M.cols])
        rep = oracle.exhaust(W, 2, jobs=JOBS)
        info.append((d, w.k, rep.covered))
        if not (ineq and w.ok and rep.covered is True):
            bad.append((d, w.k, ineq, w.checks, rep.covered))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 180
    return record(6, ok, f"(d, k, covered) = {info}; failures {bad[:2]}", t0), bad


# -- 7 ------------------------------------------------------------------------

def criterion_7():
    t0 = time.time()
    bad = []
    for p in (3, 5):
        for n in range(1, 6):
            if len(oracle.enum_index_p(n, p)) != (p ** n - 1) // (p - 1):
                bad.append(("enum", n, p))
    rng = random.Random(7)
    agree = 0
    for i in range(200):
        p = (3, 5)[i % 2]
        ctx = PContext(p)
        n = rng.choice([1, 2])
        L = construct(ctx, FamilyTag("Ld", d=n, a=F(0))) if n > 1 else lie.new_lie(ctx, [[[0]]])
        while True:
            U = [[F(rng.randint(-3, 3) * p ** rng.randint(0, 2)) for _ in range(n)] for _ in range(n)]
            if n == 1 or U[0][0] * U[1][1] != U[0][1] * U[1][0]:
                if U[0][0] or n > 1:
                    break
        Fm = [[F(rng.randint(-4, 4)) for _ in range(n)] for _ in range(n)]
        endo = selfsim.make_endo(L, U, Fm)
        predicted = selfsim.abelian_simplicity_predicate(ctx, endo.Phi())
        chain = selfsim.domain_chain(endo, 40)
        decays = chain.stabilized_isolator is not None and chain.stabilized_isolator.is_zero()
        if predicted == decays:
            agree += 1
        else:
            bad.append(("abelian", n, U, Fm))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 60
    return record(7, ok, f"enum counts n<=5; predicate agrees on {agree}/200; failures {bad[:2]}", t0), bad


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def test_criterion_1():
    ok, bad = criterion_1()
    assert ok, bad


def test_criterion_2():
    ok, bad = criterion_2()
    assert ok, bad


def test_criterion_3():
    ok, bad = criterion_3()
    assert ok, bad


def test_criterion_4():
    ok, bad = criterion_4()
    assert ok, bad


def test_criterion_5():
    ok, bad = criterion_5()
    assert ok, bad


def test_criterion_6():
    ok, bad = criterion_6()
    assert ok, bad


def test_criterion_7():
    ok, bad = criterion_7()
    assert ok, bad


if __name__ == "__main__":
    results = [c()[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
