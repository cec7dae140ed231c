"""Lie lattices over Z_p given by structure constants."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _linalg as la
from . import zmodlin as zl
from .errors import NotClosed, RankMismatch, ValidationError
from .padic import PContext
from .zmodlin import Submodule

MODULE_ONLY = "module-only"
SUBALGEBRA = "subalgebra"
IDEAL = "ideal"


@dataclass(frozen=True)
class LieLattice:
    """``[x_i, x_j] = sum_k sc[i][j][k] x_k`` on the standard basis of Z_p^n."""

    ctx: PContext
    n: int
    sc: tuple

    def bracket(self, x: Sequence, y: Sequence) -> list[Fraction]:
        return bracket(self, x, y)

    def basis(self) -> list[list[Fraction]]:
        return la.identity(self.n)

    def is_abelian(self) -> bool:
        return all(v == 0 for row in self.sc for vec in row for v in vec)


def _zero_sc(n):
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


def new_lie(ctx: PContext, sc) -> LieLattice:
    """Validate structure constants (antisymmetry, integrality, Jacobi)."""
    n = len(sc)
    c = [[[Fraction(v) for v in sc[i][j]] for j in range(n)] for i in range(n)]
    for i in range(n):
        if len(c[i]) != n or any(len(v) != n for v in c[i]):
            raise RankMismatch("structure constants are not n x n x n")
        for j in range(n):
            for k in range(n):
                v = c[i][j][k]
                if v.denominator % ctx.p == 0:
                    raise ValidationError(f"non-integral constant at ({i},{j},{k})", (i, j, k))
                if v != -c[j][i][k]:
                    raise ValidationError(f"antisymmetry fails at ({i},{j},{k})", (i, j, k))
    L = LieLattice(ctx, n, tuple(tuple(tuple(v) for v in row) for row in c))
    e = la.identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                t = [a + b + d for a, b, d in zip(
                    bracket(L, e[i], bracket(L, e[j], e[k])),
                    bracket(L, e[j], bracket(L, e[k], e[i])),
                    bracket(L, e[k], bracket(L, e[i], e[j])))]
                if any(t):
                    raise ValidationError(f"Jacobi identity fails for ({i},{j},{k})", (i, j, k))
    return L


def from_brackets(ctx: PContext, n: int, brackets: dict) -> LieLattice:
    """Build from ``{(i, j): vector}`` for i < j; missing pairs are zero."""
    sc = _zero_sc(n)
    for (i, j), v in brackets.items():
        v = [Fraction(x) for x in v]
        sc[i][j] = v
        sc[j][i] = [-x for x in v]
    return new_lie(ctx, sc)


def bracket(L: LieLattice, x: Sequence, y: Sequence) -> list[Fraction]:
    n = L.n
    if len(x) != n or len(y) != n:
        raise RankMismatch("vector rank does not match lattice rank")
    out = [Fraction(0)] * n
    for i, xi in enumerate(x):
        if not xi:
            continue
        row = L.sc[i]
        for j, yj in enumerate(y):
            if not yj or i == j:
                continue
            f = xi * yj
            for k, v in enumerate(row[j]):
                if v:
                    out[k] += f * v
    return out


def ad(L: LieLattice, x: Sequence):
    """Matrix (rows) of ``y -> [x, y]``."""
    e = la.identity(L.n)
    return la.transpose([bracket(L, x, ej) for ej in e])


def bracket_module(L: LieLattice, A: Submodule, B: Submodule) -> Submodule:
    gens = [bracket(L, a, b) for a in A.cols for b in B.cols]
    return zl.hnf(L.ctx, gens, L.n)


def whole(L: LieLattice) -> Submodule:
    return zl.full(L.ctx, L.n)


@dataclass(frozen=True)
class Series:
    kind: str
    terms: list
    reaches_zero: bool
    resolved: bool

    @property
    def is_solvable(self):
        return self.reaches_zero if self.kind == "derived" else None

    @property
    def is_nilpotent(self):
        return self.reaches_zero if self.kind == "lower_central" else None


def series(L: LieLattice, kind: str = "derived", max_steps: int | None = None,
           isolated: bool = False) -> Series:
    """Derived or lower central series, stopped at zero or once the rank stalls.

    A stalled rank means the rational series is stationary and never reaches
    zero, which settles solvability/nilpotency without valuation arguments.
    """
    if max_steps is None:
        max_steps = 2 * L.n + 2
    if kind not in ("derived", "lower_central"):
        raise ValueError(f"unknown series kind {kind!r}")
    W = whole(L)
    terms = [W]
    cur = W
    for _ in range(max_steps):
        nxt = bracket_module(L, cur, cur) if kind == "derived" else bracket_module(L, W, cur)
        if isolated:
            nxt = zl.isolator(L.ctx, nxt)
        terms.append(nxt)
        if nxt.is_zero():
            return Series(kind, terms, True, True)
        if nxt.rank == cur.rank:
            return Series(kind, terms, False, True)
        cur = nxt
    return Series(kind, terms, False, False)


def is_solvable(L: LieLattice) -> bool:
    return series(L, "derived").reaches_zero


def is_nilpotent(L: LieLattice) -> bool:
    return series(L, "lower_central").reaches_zero


def derived(L: LieLattice) -> Submodule:
    W = whole(L)
    return bracket_module(L, W, W)


def iso_derived(L: LieLattice) -> Submodule:
    return zl.isolator(L.ctx, derived(L))


def substructure_kind(L: LieLattice, M: Submodule) -> str:
    ctx = L.ctx
    e = la.identity(L.n)
    if all(zl.member(ctx, bracket(L, x, m), M) for x in e for m in M.cols):
        return IDEAL
    if all(zl.member(ctx, bracket(L, a, b), M) for a in M.cols for b in M.cols):
        return SUBALGEBRA
    return MODULE_ONLY


def is_subalgebra(L: LieLattice, M: Submodule) -> bool:
    return substructure_kind(L, M) != MODULE_ONLY


def is_ideal(L: LieLattice, M: Submodule) -> bool:
    return substructure_kind(L, M) == IDEAL


def center(L: LieLattice) -> Submodule:
    rows = []
    for i in range(L.n):
        rows.extend(ad(L, la.identity(L.n)[i]))
    return zl.integral_kernel(L.ctx, rows, L.n)


def change_basis(L: LieLattice, P) -> LieLattice:
    """Structure constants in the basis given by the columns of ``P`` (rational allowed).

    The result is validated, so ``P`` must produce integral constants.
    """
    P = la.fmat(P)
    n = L.n
    Pinv = la.inverse(P)
    cols = la.cols_of(P)
    sc = _zero_sc(n)
    for i in range(n):
        for j in range(i + 1, n):
            v = la.matvec(Pinv, bracket(L, cols[i], cols[j]))
            sc[i][j] = v
            sc[j][i] = [-x for x in v]
    return new_lie(L.ctx, sc)


def restrict(L: LieLattice, M: Submodule | Sequence, basis=None):
    """Structure constants of a subalgebra in its own basis.

    ``M`` may be a Submodule (its Hermite columns are used) or an explicit list
    of basis columns.  Returns ``(lattice, basis_columns)``.
    """
    if isinstance(M, Submodule):
        cols = [list(c) for c in M.cols]
    else:
        cols = [[Fraction(x) for x in c] for c in M]
    r = len(cols)
    sc = _zero_sc(r)
    for i in range(r):
        for j in range(i + 1, r):
            br = bracket(L, cols[i], cols[j])
            c = zl.coords(br, cols)
            if c is None or any(x.denominator % L.ctx.p == 0 for x in c):
                raise NotClosed(f"[y{i}, y{j}] leaves the submodule")
            sc[i][j] = c
            sc[j][i] = [-x for x in c]
    return new_lie(L.ctx, sc), cols
