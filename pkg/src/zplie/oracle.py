"""Finite-level brute force for index-p self-similarity.

Index-p submodules are enumerated by the pivot of their reduction mod p; the
homomorphism conditions on a metabelian lattice are linear in the matrix ``F``
once ``F_00`` and the top row are fixed, so each (shape, F_00) is solved mod
``p**N`` and the solution coset is walked against a list of candidate ideals.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _linalg as la
from . import lie
from . import metabelian as mb
from . import zmodlin as zl
from .errors import NotSolvable, Unsupported, ValidationError
from .lie import LieLattice
from .padic import residue
from .serialize import matrix_to_json
from .zmodlin import Submodule

DEFAULT_LEVEL = 2
MAX_ENUM = 1 << 21
LIFT_BUDGET = 40


@dataclass(frozen=True)
class SubmoduleShape:
    """``<x_i + e_i x_j (i < j), p x_j, x_i (i > j)>`` with pivot ``j``.

    ``j = 0`` is the top-scaled case ``<p x_0, x_1, ...>``; otherwise the
    pivot sits in the abelian tail and ``k0`` records the first tail index
    carrying a nonzero residue (None when only ``x_0`` is tilted).
    """

    n: int
    pivot: int
    residues: tuple

    @property
    def kind(self) -> str:
        return "top-scaled" if self.pivot == 0 else "mid-scaled"

    @property
    def k0(self):
        return next((i for i in range(1, self.pivot) if self.residues[i]), None)

    def basis_matrix(self, p: int):
        """``U`` (rows) whose columns are the displayed generators."""
        U = la.identity(self.n)
        j = self.pivot
        for i, e in enumerate(self.residues):
            U[j][i] = Fraction(e)
        U[j][j] = Fraction(p)
        return U

    def to_json(self) -> dict:
        out = {"kind": self.kind, "pivot": self.pivot, "residues": list(self.residues)}
        if self.k0 is not None:
            out["k0"] = self.k0
        return out

    def __str__(self):
        return f"{self.kind}(pivot={self.pivot}, e={list(self.residues)})"


def enum_index_p(L_or_n, p: int | None = None) -> list[SubmoduleShape]:
    """All index-p submodules, each once, ordered by pivot then residues."""
    if isinstance(L_or_n, LieLattice):
        n, p = L_or_n.n, L_or_n.ctx.p
    else:
        n = int(L_or_n)
    return [SubmoduleShape(n, j, e) for j in range(n)
            for e in itertools.product(range(p), repeat=j)]


def to_submodule(ctx, shape: SubmoduleShape) -> Submodule:
    return zl.from_matrix(ctx, shape.basis_matrix(ctx.p))


def subalgebra_filter(L: LieLattice, shapes) -> list[SubmoduleShape]:
    gb = mb.standard_good_basis(L)
    out = []
    for sh in shapes:
        U = sh.basis_matrix(L.ctx.p)
        if gb is not None:
            ok = mb.induced_B(gb, U).is_subalgebra
        else:
            ok = lie.is_subalgebra(L, to_submodule(L.ctx, sh))
        if ok:
            out.append(sh)
    return out


# -- linear congruences ---------------------------------------------------

def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass
class AffineSolutions:
    """``particular + sum c_k gens[k]`` with ``c_k`` ranging mod ``orders[k]``."""

    modulus: int
    particular: list
    gens: list
    orders: list

    @property
    def size(self) -> int:
        out = 1
        for o in self.orders:
            out *= o
        return out


def solve_mod(C, h, p: int, N: int) -> AffineSolutions | None:
    """All ``f`` with ``C f = h`` mod ``p**N`` (integer inputs), or None."""
    q = p ** N
    if not C:
        raise ValueError("solve_mod needs at least one equation; use free_solutions")
    m, n = len(C), len(C[0])
    A = [[x % q for x in row] + [hv % q] for row, hv in zip(C, h)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    vs = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j]:
                    v = _vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in Q:
            row[t], row[j] = row[j], row[t]
        pv = p ** v
        u = pow(A[t][t] // pv, -1, q)
        A[t] = [x * u % q for x in A[t]]
        for i2 in range(m):
            if i2 != t and A[i2][t]:
                f = A[i2][t] // pv
                A[i2] = [(x - f * y) % q for x, y in zip(A[i2], A[t])]
        for j2 in range(t + 1, n):
            if A[t][j2]:
                f = A[t][j2] // pv
                for row in A:
                    row[j2] = (row[j2] - f * row[t]) % q
                for row in Q:
                    row[j2] = (row[j2] - f * row[t]) % q
        vs.append(v)
    r = len(vs)
    if any(A[i][n] for i in range(r, m)):
        return None
    g = [0] * n
    gens, orders = [], []
    for i, v in enumerate(vs):
        hv = A[i][n]
        if hv % p ** v:
            return None
        g[i] = hv // p ** v
        if v:
            gens.append([row[i] * p ** (N - v) % q for row in Q])
            orders.append(p ** v)
    for j in range(r, n):
        gens.append([row[j] for row in Q])
        orders.append(q)
    part = [sum(Q[i][k] * g[k] for k in range(n)) % q for i in range(n)]
    return AffineSolutions(q, part, gens, orders)


def free_solutions(n: int, p: int, N: int) -> AffineSolutions:
    q = p ** N
    return AffineSolutions(q, [0] * n, [[int(i == j) for i in range(n)] for j in range(n)], [q] * n)


def _solve_or_free(C, h, n, p, N):
    return solve_mod(C, h, p, N) if C else free_solutions(n, p, N)


def enumerate_solutions(sol: AffineSolutions):
    """Every solution vector, in lexicographic order of the coefficients."""
    q = sol.modulus
    for cs in itertools.product(*(range(o) for o in sol.orders)):
        v = list(sol.particular)
        for c, g in zip(cs, sol.gens):
            if c:
                v = [(a + c * b) % q for a, b in zip(v, g)]
        yield v


def span_mod(gens, p: int, N: int):
    """Independent generators and orders of the subgroup of ``(Z/p^N)^n`` spanned by ``gens``."""
    if not gens:
        return [], []
    q = p ** N
    n, k = len(gens[0]), len(gens)
    G = [[g[i] % q for g in gens] for i in range(n)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    out, orders = [], []
    for t in range(min(n, k)):
        best = None
        for i in range(t, n):
            for j in range(t, k):
                if G[i][j] and (best is None or _vp(G[i][j], p) < best[0]):
                    best = (_vp(G[i][j], p), i, j)
        if best is None:
            break
        v, i, j = best
        G[t], G[i] = G[i], G[t]
        for row in R:
            row[t], row[i] = row[i], row[t]
        for row in G:
            row[t], row[j] = row[j], row[t]
        pv = p ** v
        u = G[t][t] // pv
        uinv = pow(u, -1, q)
        G[t] = [x * uinv % q for x in G[t]]
        for row in R:
            row[t] = row[t] * u % q
        for i2 in range(t + 1, n):
            if G[i2][t]:
                f = G[i2][t] // pv
                G[i2] = [(x - f * y) % q for x, y in zip(G[i2], G[t])]
                for row in R:
                    row[t] = (row[t] + f * row[i2]) % q
        for j2 in range(t + 1, k):
            if G[t][j2]:
                f = G[t][j2] // pv
                for row in G:
                    row[j2] = (row[j2] - f * row[t]) % q
        out.append([row[t] * pv % q for row in R])
        orders.append(p ** (N - v))
    return out, orders


def project(sol: AffineSolutions, p: int, N: int) -> AffineSolutions:
    """Reduce a solution set modulo the smaller power ``p**N``."""
    q = p ** N
    gens, orders = span_mod(sol.gens, p, N)
    return AffineSolutions(q, [x % q for x in sol.particular], gens, orders)


# -- homomorphism congruences ---------------------------------------------

@dataclass
class HomPiece:
    """Solutions with fixed ``F_00`` and top row; ``sol`` covers the block and column 0.

    Unknown layout: ``F[1+i][1+j]`` at ``i*d + j``, then ``F[1+i][0]`` at ``d*d + i``.
    """

    F00: int
    top: tuple
    sol: AffineSolutions


def full_F(d: int, F00: int, top, f):
    n = d + 1
    F = [[0] * n for _ in range(n)]
    F[0][0] = F00
    for j, t in enumerate(top):
        F[0][1 + j] = t
    for i in range(d):
        F[1 + i][0] = f[d * d + i]
        for j in range(d):
            F[1 + i][1 + j] = f[i * d + j]
    return F


def _good_lattice(L: LieLattice) -> mb.GoodBasis:
    gb = mb.standard_good_basis(L)
    if gb is None:
        raise Unsupported("the congruence solver needs the standard basis to be a good basis")
    return gb


def _int_matrix(ctx, X, N):
    return [[residue(ctx, x, N) for x in r] for r in X]


def _content(ctx, X) -> int:
    from .padic import val
    vs = [val(ctx, x) for r in X for x in r if x]
    return min(vs) if vs else 0


def _top_rows(ctx, B, d, N):
    """Residues of the exact top rows ``t`` with ``t B = 0``.

    Reducing the exact kernel (rather than solving ``t B = 0`` mod p^N) keeps
    out spurious rows that only vanish because ``B`` is divisible by p.
    """
    if la.det(B) != 0:
        return [tuple([0] * d)]
    q = ctx.p ** N
    K = zl.integral_kernel(ctx, [[B[l][j] for l in range(d)] for j in range(d)], d)
    gens = [[residue(ctx, x, N) for x in c] for c in K.cols]
    out = set()
    for cs in itertools.product(range(q), repeat=len(gens)):
        out.add(tuple(sum(c * g[i] for c, g in zip(cs, gens)) % q for i in range(d)))
    return sorted(out)


def _block_system(Ab, Aq, Bq, F00, top, d):
    nv = d * d + d
    rows = []
    for i in range(d):
        for j in range(i + 1, d):
            if not (top[i] or top[j]):
                continue
            for k in range(d):
                r = [0] * nv
                for l in range(d):
                    r[l * d + j] += top[i] * Ab[k][l]
                    r[l * d + i] -= top[j] * Ab[k][l]
                rows.append(r)
    for i in range(d):
        for j in range(d):
            r = [0] * nv
            for l in range(d):
                r[i * d + l] += Bq[l][j]
                r[l * d + j] -= F00 * Aq[i][l]
                r[d * d + l] += top[j] * Aq[i][l]
            rows.append(r)
    return [r for r in rows if any(r)]


def hom_solutions_mod(L: LieLattice, shape: SubmoduleShape, N: int, F00: int,
                      headroom: int = 0) -> list[HomPiece]:
    """Homomorphism solutions mod ``p**N`` on an index-p subalgebra, for one ``F_00``.

    The system is solved modulo ``p**(N + headroom)`` for every lift of
    ``F_00`` and of the top row, and the solution sets are reduced mod
    ``p**N``.  Headroom discards residues that satisfy the congruences only
    because ``B`` carries factors of p; every exact homomorphism survives.
    The top row is zero when ``B`` is invertible over Q and otherwise ranges
    over the reductions of the exact left kernel of ``B``.
    """
    ctx = L.ctx
    gb = _good_lattice(L)
    ind = mb.induced_B(gb, shape.basis_matrix(ctx.p))
    if not ind.is_subalgebra:
        raise ValidationError(f"{shape} is not a subalgebra", None)
    d, p = gb.d, ctx.p
    Nh = N + headroom
    q = p ** N
    # exact equations may be divided by the p-power content they always carry
    A = gb.A_rows()
    vA, vB = _content(ctx, A), _content(ctx, ind.B)
    vc = min(vA, vB)
    Ab = _int_matrix(ctx, la.scale(A, Fraction(1, p ** vA)), Nh)
    Aq = _int_matrix(ctx, la.scale(A, Fraction(1, p ** vc)), Nh)
    Bq = _int_matrix(ctx, la.scale(ind.B, Fraction(1, p ** vc)), Nh)
    tops = _top_rows(ctx, ind.B, d, Nh)
    out, seen, cache = [], set(), {}
    for z in range(p ** headroom):
        f00 = F00 % q + z * q
        for top in tops:
            rows = _block_system(Ab, Aq, Bq, f00, top, d)
            key = tuple(map(tuple, rows))
            if key not in cache:
                sol = _solve_or_free(rows, [0] * len(rows), d * d + d, p, Nh)
                cache[key] = None if sol is None else project(sol, p, N)
            sol = cache[key]
            if sol is None:
                continue
            t = tuple(x % q for x in top)
            sig = (t, tuple(sol.particular), tuple(map(tuple, sol.gens)))
            if sig in seen:
                continue
            seen.add(sig)
            out.append(HomPiece(F00 % q, t, sol))
    return out


# -- candidate ideals ------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    name: str
    module: Submodule


def _rank_mod_p(rows, p):
    m = [[x % p for x in r] for r in rows]
    rk = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        k = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if k is None:
            continue
        m[rk], m[k] = m[k], m[rk]
        inv = pow(m[rk][c], -1, p)
        for i in range(len(m)):
            if i != rk and m[i][c]:
                f = m[i][c] * inv
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rk])]
        rk += 1
    return rk


def _subspaces_mod_p(d, p):
    """Every proper nonzero subspace of F_p^d, as reduced row-echelon row lists."""
    for k in range(1, d):
        for piv in itertools.combinations(range(d), k):
            free = [(r, c) for r in range(k) for c in range(piv[r] + 1, d) if c not in piv]
            for vals in itertools.product(range(p), repeat=len(free)):
                rows = [[int(c == piv[r]) for c in range(d)] for r in range(k)]
                for (r, c), v in zip(free, vals):
                    rows[r][c] = v
                yield rows


def _invariant_subspaces(Aq, d, p):
    """Subspaces of the tail mod p stable under ``A`` (columns are images)."""
    out = []
    for rows in _subspaces_mod_p(d, p):
        imgs = [[sum(Aq[l][i] * v[i] for i in range(d)) % p for l in range(d)] for v in rows]
        if _rank_mod_p(rows + imgs, p) == len(rows):
            out.append(rows)
    return out


def _quadratic_lines(ctx, A, N):
    """Hensel-lifted eigenlines of a rank-2 tail.

    The line ``x_1 + f x_2`` is stable when ``b f^2 + (a-d) f - c = 0`` for
    ``A = [[a, b], [c, d]]``; the quadratic is divided by its content first so
    that scalar parts of ``A`` do not hide simple roots.
    """
    from .padic import val
    p, q = ctx.p, ctx.p ** N
    raw = [A[0][1], A[0][0] - A[1][1], -A[1][0]]
    if not any(raw):
        return []
    m = min(val(ctx, x) for x in raw if x)
    be, dif, mga = (residue(ctx, x / Fraction(p) ** m, N) for x in raw)
    out = []
    for coeffs, mk, only_zero in (((be, dif, mga), lambda f: [0, 1, f], False),
                                  ((-mga, -dif, -be), lambda g: [0, g, 1], True)):
        a2, a1, a0 = coeffs
        for f0 in range(1 if only_zero else p):
            if (a2 * f0 * f0 + a1 * f0 + a0) % p or (2 * a2 * f0 + a1) % p == 0:
                continue
            f = f0
            for _ in range(N + 1):
                f = (f - (a2 * f * f + a1 * f + a0) * pow(2 * a2 * f + a1, -1, q)) % q
            out.append(mk(f))
    return out


def _scaled(ctx, M: Submodule, k: int) -> Submodule:
    return zl.hnf(ctx, [[x * ctx.p ** k for x in c] for c in M.cols], M.n)


def candidate_ideals(L: LieLattice, N: int = DEFAULT_LEVEL) -> list[Candidate]:
    """Invariant-ideal candidates: stable tail subspaces lifted over ``pJ``,
    Hensel eigenlines, derived and central ideals, and their p-multiples."""
    ctx = L.ctx
    gb = _good_lattice(L)
    d, p, n = gb.d, ctx.p, L.n
    A = gb.A_rows()
    Aq = _int_matrix(ctx, A, 1)
    base = []
    J = [[0] + [int(i == j) for i in range(d)] for j in range(d)]
    pJ = [[p * x for x in v] for v in J]
    base.append(("J", zl.hnf(ctx, J, n)))
    if d <= 4 or p == 3 and d <= 5:
        for rows in _invariant_subspaces(Aq, d, p):
            lab = "V" + "".join("[" + "".join(map(str, r)) + "]" for r in rows)
            base.append((lab + "+pJ", zl.hnf(ctx, [[0] + r for r in rows] + pJ, n)))
    if d == 2:
        for v in _quadratic_lines(ctx, A, N):
            base.append((f"eigenline({v[1]},{v[2]})", zl.hnf(ctx, [v], n)))
    for name, M in (("derived", lie.derived(L)), ("iso-derived", lie.iso_derived(L)),
                    ("center", lie.center(L))):
        if not M.is_zero() and zl.index_exponent(ctx, M) != 0:
            base.append((name, M))
    out, seen = [], set()
    for name, M in base:
        for k in (0, 1):
            I = _scaled(ctx, M, k) if k else M
            if _mod_key(ctx, I, N) is None or I.cols in seen:
                continue
            seen.add(I.cols)
            out.append(Candidate(name if k == 0 else f"p*{name}", I))
    return out


def _mod_key(ctx, I: Submodule, N: int):
    """HNF of ``I + p^N L``; None when that is just ``p^N L``."""
    n = I.n
    pn = [[ctx.p ** N * int(i == j) for i in range(n)] for j in range(n)]
    S = zl.hnf(ctx, list(I.cols) + pn, n)
    if S == zl.hnf(ctx, pn, n):
        return None
    return S.cols


def _kernel_rows(ctx, I: Submodule, N: int):
    """Integer rows ``K`` with ``K x = 0`` mod p^N exactly when ``x`` lies in ``I + p^N L``."""
    q = ctx.p ** N
    n = I.n
    S = zl.hnf(ctx, list(I.cols) + [[q * int(i == j) for i in range(n)] for j in range(n)], n)
    exps, P = zl.smith(ctx, S)
    Pinv = la.inverse(P)
    rows = []
    for e, r in zip(exps, Pinv):
        e = min(e, N)
        if e > 0:
            rows.append([residue(ctx, x, N) * ctx.p ** (N - e) % q for x in r])
    return rows


def is_ideal_mod(L: LieLattice, I: Submodule, N: int) -> bool:
    ctx, q = L.ctx, L.ctx.p ** N
    K = _kernel_rows(ctx, I, N)
    for e in la.identity(L.n):
        for u in I.cols:
            b = [residue(ctx, x, N) for x in lie.bracket(L, e, u)]
            if any(sum(k * x for k, x in zip(r, b)) % q for r in K):
                return False
    return True


# -- coverage --------------------------------------------------------------

def _prepared(ctx, cands, N):
    return [(c.name, [[int(x) for x in u] for u in c.module.cols], _kernel_rows(ctx, c.module, N))
            for c in cands]


def _residual_system(ctx, U, d, prepared, M, N):
    """Stacked linear residuals of the invariance tests for candidates inside ``M``.

    Returns ``(names, segments, K0w, Lall)``: residual = ``K0w * (F00, top) + Lall f``.
    """
    q = ctx.p ** N
    n = d + 1
    Uinv = la.inverse(U)
    nv = d * d + d
    names, segs, k0rows, lrows = [], [], [], []
    for name, gens, K in prepared:
        if not all(zl.member(ctx, u, M) for u in gens):
            continue
        start = len(lrows)
        for u in gens:
            w = [residue(ctx, x, N) for x in la.matvec(Uinv, [Fraction(x) for x in u])]
            for kr in K:
                row = [0] * nv
                for i in range(d):
                    for j in range(d):
                        row[i * d + j] = w[1 + j] * kr[1 + i] % q
                    row[d * d + i] = w[0] * kr[1 + i] % q
                lrows.append(row)
                k0rows.append([kr[0] * w[0] % q] + [kr[0] * w[1 + j] % q for j in range(d)])
        names.append(name)
        segs.append((start, len(lrows)))
    return (names, segs, np.array(k0rows, dtype=np.int64).reshape(-1, n),
            np.array(lrows, dtype=np.int64).reshape(-1, nv))


def _walk(piece, K0w, Lall, segs, q, max_enum, samples, full_counts=True):
    """``(covered, uncovered_count, sample_vectors, count_is_exact)``.

    ``covered`` is None when the relevant coset exceeds ``max_enum``.  Without
    ``full_counts`` the walk stops at the first chunk that yields samples.
    Samples are spread evenly over the uncovered solutions of that chunk.
    """
    sol = piece.sol
    fixed = np.array([piece.F00] + list(piece.top), dtype=np.int64)
    part = np.array(sol.particular, dtype=np.int64)
    P0 = (K0w @ fixed + Lall @ part) % q
    G = (Lall @ np.array(sol.gens, dtype=np.int64).T) % q if sol.gens else np.zeros((len(P0), 0), np.int64)
    for a, b in segs:
        if not P0[a:b].any() and not G[a:b].any():
            return True, 0, [], True
    if not segs:
        return False, sol.size, list(itertools.islice(enumerate_solutions(sol), samples)), True
    rel = [k for k in range(G.shape[1]) if G[:, k].any()]
    size = 1
    for k in rel:
        size *= sol.orders[k]
    if size > max_enum:
        return None, None, [], False
    orders = np.array([sol.orders[k] for k in rel], dtype=np.int64)
    Grel = G[:, rel]
    count, found = 0, []
    chunk = 1 << 15
    for start in range(0, size, chunk):
        idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
        digits = np.empty((len(idx), len(rel)), dtype=np.int64)
        rest = idx.copy()
        for t in range(len(rel) - 1, -1, -1):
            digits[:, t] = rest % orders[t]
            rest //= orders[t]
        res = (P0[None, :] + digits @ Grel.T) % q
        cov = np.zeros(len(idx), dtype=bool)
        for a, b in segs:
            cov |= ~res[:, a:b].any(axis=1)
        bad = np.nonzero(~cov)[0]
        count += len(bad)
        want = samples - len(found)
        if want > 0 and len(bad):
            picks = sorted(set(np.linspace(0, len(bad) - 1, min(want, len(bad))).astype(int)))
            for i in bad[picks]:
                f = list(sol.particular)
                for t, k in enumerate(rel):
                    c = int(digits[i, t])
                    f = [(x + c * g) % q for x, g in zip(f, sol.gens[k])]
                found.append(f)
        if not full_counts and found and len(found) >= samples:
            return False, count, found, start + chunk >= size
    return count == 0, count, found, True


def _covered_single(ctx, shape, Fbar, prepared, N):
    """Names of candidates inside the domain that ``Fbar`` stabilizes mod p^N."""
    q = ctx.p ** N
    U = shape.basis_matrix(ctx.p)
    Uinv = la.inverse(U)
    M = to_submodule(ctx, shape)
    out = []
    for name, gens, K in prepared:
        if not all(zl.member(ctx, u, M) for u in gens):
            continue
        ok = True
        for u in gens:
            w = [residue(ctx, x, N) for x in la.matvec(Uinv, [Fraction(x) for x in u])]
            img = [sum(Fbar[i][j] * w[j] for j in range(len(w))) % q for i in range(len(w))]
            if any(sum(k * x for k, x in zip(r, img)) % q for r in K):
                ok = False
                break
        if ok:
            out.append(name)
    return out


def _hint_residue(ctx, work, P, endo, N):
    """Shape and reduced ``F`` of an index-p endo given on the input lattice."""
    U, F = la.fmat(endo.U), la.fmat(endo.F)
    if P is not None:
        Pinv = la.inverse(P)
        U, F = la.matmul(Pinv, U), la.matmul(Pinv, F)
    M = zl.from_matrix(ctx, U)
    for sh in enum_index_p(work):
        if to_submodule(ctx, sh) == M:
            Fs = la.matmul(F, la.matmul(la.inverse(U), sh.basis_matrix(ctx.p)))
            return sh, [[residue(ctx, x, N) for x in r] for r in Fs]
    return None, None


def _shape_task(args):
    L, shape, N, prepared, max_enum, samples, headroom, full_counts = args
    ctx = L.ctx
    q = ctx.p ** N
    gb = _good_lattice(L)
    d = gb.d
    U = shape.basis_matrix(ctx.p)
    if not mb.induced_B(gb, U).is_subalgebra:
        return {"shape": shape.to_json(), "subalgebra": False}
    M = to_submodule(ctx, shape)
    names, segs, K0w, Lall = _residual_system(ctx, U, d, prepared, M, N)
    recs = []
    for F00 in range(q):
        pieces = hom_solutions_mod(L, shape, N, F00, headroom)
        total = sum(pc.sol.size for pc in pieces)
        unc, cov, samp, exact = 0, True, [], True
        for pc in pieces:
            if not full_counts and len(samp) >= samples:
                exact = False
                break
            c, k, found, ex = _walk(pc, K0w, Lall, segs, q, max_enum, samples, full_counts)
            exact = exact and ex
            if c is None:
                cov = None if cov is not False else False
                continue
            if not c:
                cov = False
                unc += k
                samp += [full_F(d, F00, pc.top, f) for f in found][: samples - len(samp)]
        recs.append({"F00": F00, "top_rows": len(pieces), "solutions": total,
                     "covered": cov, "uncovered_count": unc, "count_exact": exact,
                     "uncovered": samp})
    return {"shape": shape.to_json(), "subalgebra": True, "candidates_inside": names,
            "records": recs}


# -- lifting and the report ------------------------------------------------

def _exact_top(ctx, B, tbar, d, N):
    """An exact top row with ``t B = 0`` reducing to ``tbar``, or None."""
    if not any(tbar):
        return [Fraction(0)] * d
    if la.det(B) != 0:
        return None
    K = zl.integral_kernel(ctx, [[B[l][j] for l in range(d)] for j in range(d)], d)
    if K.is_zero():
        return None
    Kq = [[residue(ctx, c[i], N) for c in K.cols] for i in range(d)]
    sol = solve_mod(Kq, list(tbar), ctx.p, N)
    if sol is None:
        return None
    return [sum(Fraction(cf) * c[i] for cf, c in zip(sol.particular, K.cols)) for i in range(d)]


def lift(L: LieLattice, shape: SubmoduleShape, Fbar, N: int):
    """Try to lift a solution mod p^N to an exact simple virtual endomorphism.

    ``F_00`` is tried as its residue and as the residue minus ``p^N``; the top
    row is moved onto the exact left kernel of ``B``, and the remaining
    entries onto the exact integral solution lattice by a congruence solve.
    Returns the endo or None.
    """
    from .errors import ZpError
    from .selfsim import make_endo, simplicity
    ctx = L.ctx
    p, q = ctx.p, ctx.p ** N
    gb = _good_lattice(L)
    d = gb.d
    U = shape.basis_matrix(p)
    B = mb.induced_B(gb, U).B
    A = gb.A_rows()
    top = _exact_top(ctx, B, Fbar[0][1:], d, N)
    if top is None:
        return None
    nv = d * d + d
    target = [Fbar[1 + i][1 + j] for i in range(d) for j in range(d)] + [Fbar[1 + i][0] for i in range(d)]
    for F00 in (Fbar[0][0], Fbar[0][0] - q):
        rows = _block_system(A, A, B, Fraction(F00), top, d)
        K = zl.integral_kernel(ctx, rows, nv) if rows else zl.full(ctx, nv)
        if K.is_zero():
            if any(x % q for x in target):
                continue
            f = [Fraction(0)] * nv
        else:
            Kq = [[residue(ctx, c[i], N) for c in K.cols] for i in range(nv)]
            sol = solve_mod(Kq, target, p, N)
            if sol is None:
                continue
            f = [sum(Fraction(cf) * c[i] for cf, c in zip(sol.particular, K.cols)) for i in range(nv)]
        F = la.fmat(full_F(d, F00, top, f))
        try:
            endo = make_endo(L, U, F)
        except ZpError:
            continue
        if simplicity(endo).status == "Simple":
            return endo
    return None


@dataclass
class ExhaustReport:
    p: int
    level: int
    tag: str | None
    basis: list | None
    candidates: list
    shapes: list
    covered: bool | None
    uncovered_total: int
    lift: dict | None
    lifted_endo: object = field(default=None, repr=False)
    hints: list = field(default_factory=list)
    counts_exact: bool = True

    @property
    def simple_lift(self) -> bool:
        return self.lift is not None

    @property
    def statement(self) -> str:
        N = self.level
        if self.covered:
            return (f"corroborates non-self-similarity of index p at level {N}: "
                    "every homomorphism solution stabilizes a candidate ideal")
        if self.covered is None:
            return f"undetermined at level {N}: some solution sets exceed the enumeration limit"
        if self.simple_lift:
            return (f"uncovered solutions at level {N}; one lifts to a verified simple "
                    "virtual endomorphism of index p")
        return f"uncovered solutions at level {N}; no simple lift found within the attempt budget"

    def to_json(self) -> dict:
        shapes = []
        for r in self.shapes:
            r = dict(r)
            if "records" in r:
                r["records"] = [dict(rec, uncovered=[matrix_to_json(F) for F in rec["uncovered"]])
                                for rec in r["records"]]
            shapes.append(r)
        return {
            "p": self.p, "level": self.level, "tag": self.tag,
            "basis": None if self.basis is None else matrix_to_json(la.from_cols(self.basis, len(self.basis))),
            "candidates": self.candidates, "covered": self.covered,
            "uncovered_total": self.uncovered_total, "counts_exact": self.counts_exact,
            "simple_lift": self.simple_lift, "lift": self.lift, "hints": self.hints,
            "statement": self.statement, "shapes": shapes,
        }


def _default_jobs():
    try:
        return max(1, int(os.environ.get("JOBS", "1")))
    except ValueError:
        return 1


def exhaust(L: LieLattice, N: int = DEFAULT_LEVEL, candidates=None, jobs: int | None = None,
            max_enum: int = MAX_ENUM, samples: int = 3, lift_budget: int = LIFT_BUDGET,
            tag: str | None = None, headroom: int = 1, hints=(),
            full_counts: bool = False) -> ExhaustReport:
    """Walk every index-p subalgebra and every homomorphism solution mod ``p^N``.

    ``candidates`` (Submodules or :class:`Candidate`) default to
    :func:`candidate_ideals`; each must be an ideal mod ``p^N``.  When the
    standard basis is not a good basis, the computation runs in a good basis
    (reported as ``basis``) and a lifted endo is carried back.
    """
    from .selfsim import transport
    ctx = L.ctx
    if N < 1:
        raise ValueError("level must be at least 1")
    P = None
    work = L
    if mb.standard_good_basis(L) is None:
        gb = mb.find_good_basis(L)
        if gb is None:
            raise Unsupported("exhaust needs an abelian ideal of corank one")
        P = gb.basis_matrix()
        work = lie.change_basis(L, P)
    if candidates is None:
        cands = candidate_ideals(work, N)
    else:
        cands = []
        for i, c in enumerate(candidates):
            c = c if isinstance(c, Candidate) else Candidate(f"user{i}", c)
            if P is not None:
                c = Candidate(c.name, zl.image(ctx, la.inverse(P), c.module, L.n))
            if not is_ideal_mod(work, c.module, N):
                raise ValidationError(f"candidate {c.name} is not an ideal mod p^{N}", None)
            cands.append(c)
    prepared = _prepared(ctx, cands, N)
    shapes = enum_index_p(work)
    tasks = [(work, sh, N, prepared, max_enum, samples, headroom, full_counts)
             for sh in shapes]
    jobs = _default_jobs() if jobs is None else max(1, jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_shape_task, tasks))
    else:
        results = [_shape_task(t) for t in tasks]
    covered, total = True, 0
    for r in results:
        for rec in r.get("records", []):
            if rec["covered"] is False:
                covered = False
                total += rec["uncovered_count"]
            elif rec["covered"] is None and covered is not False:
                covered = None
    lift_info, endo = None, None
    attempts = 0
    queue = []
    hint_info = []
    for h in hints:
        sh, Fbar = _hint_residue(ctx, work, P, h, N)
        if sh is None:
            hint_info.append({"index_p": False})
            continue
        stab = _covered_single(ctx, sh, Fbar, prepared, N)
        hint_info.append({"index_p": True, "shape": sh.to_json(), "F_mod": matrix_to_json(Fbar),
                          "stabilized": stab})
        if not stab:
            queue.append((sh, Fbar))
    if covered is False:
        for sh, Fbar in queue:
            if endo is None:
                e = lift(work, sh, Fbar, N)
                if e is not None:
                    endo = transport(e, L, P) if P is not None else e
                    lift_info = {"shape": sh.to_json(), "F_mod": matrix_to_json(Fbar), "from_hint": True,
                                 "U": matrix_to_json(endo.U),
                                 "F": matrix_to_json(endo.F),
                                 "simplicity": "Simple"}
        for sh, r in zip(shapes, results):
            for rec in r.get("records", []):
                for Fbar in rec["uncovered"]:
                    if attempts >= lift_budget or endo is not None:
                        break
                    attempts += 1
                    e = lift(work, sh, Fbar, N)
                    if e is not None:
                        endo = transport(e, L, P) if P is not None else e
                        lift_info = {"shape": sh.to_json(), "F_mod": matrix_to_json(Fbar), "from_hint": False,
                                     "U": matrix_to_json(endo.U),
                                     "F": matrix_to_json(endo.F),
                                     "simplicity": "Simple"}
    return ExhaustReport(ctx.p, N, tag, None if P is None else la.cols_of(P),
                         [c.name for c in cands], results, covered, total, lift_info, endo,
                         hint_info, all(rec["count_exact"] for r in results
                                        for rec in r.get("records", [])))
