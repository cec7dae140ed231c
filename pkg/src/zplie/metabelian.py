"""Lattices with an abelian ideal of codimension one.

A good basis ``(x_0, ..., x_d)`` has ``<x_1, ..., x_d>`` an abelian ideal, and
the matrix ``A`` records ``[x_0, x_i] = sum_l A[l][i] x_l`` (columns are images).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import _linalg as la
from . import lie
from . import zmodlin as zl
from .errors import DimensionMismatch, MalformedMatrix
from .lie import LieLattice
from .zmodlin import Submodule


@dataclass(frozen=True)
class GoodBasis:
    lattice: LieLattice
    basis: tuple  # columns x_0..x_d in ambient coordinates
    A: tuple      # d x d rows

    @property
    def d(self) -> int:
        return len(self.basis) - 1

    def A_rows(self):
        return [list(r) for r in self.A]

    def basis_matrix(self):
        return la.from_cols(self.basis, self.lattice.n)


def _is_abelian(L: LieLattice, cols) -> bool:
    return all(not any(lie.bracket(L, a, b)) for a, b in combinations(cols, 2))


def matrix_of_basis(L: LieLattice, cols):
    """The matrix ``A`` if ``cols`` is a good basis, else None."""
    cols = [[Fraction(x) for x in c] for c in cols]
    tail = cols[1:]
    if not _is_abelian(L, tail):
        return None
    d = len(tail)
    A = la.zeros(d, d)
    for i, xi in enumerate(tail):
        c = zl.coords(lie.bracket(L, cols[0], xi), cols)
        if c is None or c[0] != 0 or any(v.denominator % L.ctx.p == 0 for v in c):
            return None
        for l in range(d):
            A[l][i] = c[l + 1]
    return A


def _centralizer(L: LieLattice, S: Submodule) -> Submodule:
    rows = []
    for s in S.cols:
        rows.extend(lie.ad(L, s))
    return zl.integral_kernel(L.ctx, rows, L.n)


def _candidate_ideals(L: LieLattice):
    ctx, n = L.ctx, L.n
    D = lie.iso_derived(L)
    if D.rank == n - 1:
        yield D
        return
    if not _is_abelian(L, D.cols):
        return
    C = _centralizer(L, D)
    if C.rank == n - 1:
        yield C
    e = la.identity(n)
    for extra in combinations(range(n), n - 1 - D.rank):
        yield zl.saturate_cols(ctx, list(D.cols) + [e[i] for i in extra], n)


def find_good_basis(L: LieLattice) -> GoodBasis | None:
    """A canonical good basis, or None when no suitable abelian ideal is found.

    The ideal's basis is its Hermite form; ``x_0`` is the first standard basis
    vector completing it to a basis of the lattice.
    """
    ctx, n = L.ctx, L.n
    if n == 0:
        return None
    e = la.identity(n)
    for J in _candidate_ideals(L):
        if J.rank != n - 1 or not _is_abelian(L, J.cols) or not lie.is_ideal(L, J):
            continue
        for i in range(n):
            if zl.index(ctx, zl.hnf(ctx, list(J.cols) + [e[i]], n)) == 1:
                cols = [e[i]] + [list(c) for c in J.cols]
                A = matrix_of_basis(L, cols)
                if A is not None:
                    return GoodBasis(L, tuple(tuple(c) for c in cols),
                                     tuple(tuple(r) for r in A))
    return None


def good_basis_from(L: LieLattice, cols) -> GoodBasis | None:
    A = matrix_of_basis(L, cols)
    if A is None:
        return None
    return GoodBasis(L, tuple(tuple(Fraction(x) for x in c) for c in cols),
                     tuple(tuple(r) for r in A))


def standard_good_basis(L: LieLattice) -> GoodBasis | None:
    """The standard basis as a good basis, when it is one (family presentations)."""
    return good_basis_from(L, la.identity(L.n))


@dataclass(frozen=True)
class InducedB:
    B: list
    is_subalgebra: bool


def induced_B(gb: GoodBasis, U) -> InducedB:
    """``B = U_00 U^{-1} A U`` for a lower block-triangular basis matrix ``U``."""
    U = la.fmat(U)
    d = gb.d
    if len(U) != d + 1 or any(len(r) != d + 1 for r in U):
        raise DimensionMismatch("U must be (d+1) x (d+1)")
    if any(U[0][i] != 0 for i in range(1, d + 1)):
        raise MalformedMatrix("U must have U[0][i] = 0 for i >= 1")
    if U[0][0] == 0:
        raise MalformedMatrix("singular U")
    Ub = [r[1:] for r in U[1:]]
    if la.det(Ub) == 0:
        raise MalformedMatrix("singular U")
    B = la.scale(la.matmul(la.matmul(la.inverse(Ub), gb.A_rows()), Ub), U[0][0])
    ok = all(x.denominator % gb.lattice.ctx.p for r in B for x in r)
    return InducedB(B, ok)


@dataclass(frozen=True)
class HomVerdict:
    ok: bool
    reason: str | None = None


def _as_matrix(x):
    if isinstance(x, GoodBasis):
        return x.A_rows()
    if isinstance(x, InducedB):
        return x.B
    return x


def check_hom_metabelian(A, B, F) -> HomVerdict:
    """Homomorphism test in good-basis coordinates.

    ``A`` and ``B`` are the matrices of L and M (or good bases / induced
    results carrying them); ``F`` is the (d+1) x (d+1) matrix of phi, columns
    being images of the good basis of M in the good basis of L.
    """
    A, B, F = la.fmat(_as_matrix(A)), la.fmat(_as_matrix(B)), la.fmat(F)
    d = len(A)
    if len(B) != d or len(F) != d + 1 or any(len(r) != d + 1 for r in F):
        raise DimensionMismatch("matrix sizes do not match")
    top = F[0][1:]
    Fb = [r[1:] for r in F[1:]]
    col0 = [r[0] for r in F[1:]]
    if any(top) and la.det(B) != 0:
        return HomVerdict(False, "forced-zero-row")
    for j in range(d):
        if sum(top[l] * B[l][j] for l in range(d)) != 0:
            return HomVerdict(False, f"condition (a) fails at j={j + 1}")
    AF = la.matmul(A, Fb)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if top[i] * AF[k][j] - top[j] * AF[k][i] != 0:
                    return HomVerdict(False, f"condition (b) fails at i={i + 1}, j={j + 1}, k={k + 1}")
    FB = la.matmul(Fb, B)
    Acol = la.matvec(A, col0)
    for i in range(d):
        for j in range(d):
            if FB[i][j] != F[0][0] * AF[i][j] - top[j] * Acol[i]:
                return HomVerdict(False, f"condition (c) fails at i={i + 1}, j={j + 1}")
    return HomVerdict(True)
