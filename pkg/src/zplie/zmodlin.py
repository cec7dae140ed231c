"""Submodules of Z_p^n in canonical column Hermite form.

A :class:`Submodule` stores generator columns in lower-triangular echelon
form: every pivot is a pure power of p (p-coprime integers are units), and
the entries of earlier columns in a pivot row are reduced to ``[0, p^k)``.
The form is unique, so submodule equality is plain tuple equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import _linalg as la
from .errors import MalformedMatrix, RankMismatch
from .padic import INF, PContext, residue, val


@dataclass(frozen=True)
class Submodule:
    n: int
    cols: tuple  # tuple of column tuples of Fraction

    @property
    def rank(self) -> int:
        return len(self.cols)

    def pivots(self) -> list[tuple[int, Fraction]]:
        out = []
        for c in self.cols:
            r = next(i for i, x in enumerate(c) if x != 0)
            out.append((r, c[r]))
        return out

    def matrix(self):
        return la.from_cols(self.cols, self.n)

    def is_zero(self) -> bool:
        return not self.cols

    def __repr__(self):
        body = ", ".join("(" + ",".join(str(x) for x in c) + ")" for c in self.cols)
        return f"Submodule(n={self.n}, <{body}>)"


def _check_integral(ctx: PContext, cols):
    for c in cols:
        for x in c:
            if x.denominator % ctx.p == 0:
                raise MalformedMatrix(f"entry {x} is not {ctx.p}-integral")


def hnf(ctx: PContext, gens: Iterable[Sequence], n: int | None = None) -> Submodule:
    """Canonical column Hermite form of the module spanned by ``gens``."""
    cols = [[Fraction(x) for x in g] for g in gens]
    if n is None:
        if not cols:
            raise RankMismatch("ambient rank needed for an empty generator list")
        n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise RankMismatch("generators of different lengths")
    _check_integral(ctx, cols)
    p = ctx.p
    rest = [c for c in cols if any(c)]
    out: list[list] = []
    prows: list[tuple[int, int]] = []
    for row in range(n):
        cand = [i for i, c in enumerate(rest) if c[row] != 0]
        if not cand:
            continue
        bi = min(cand, key=lambda i: val(ctx, rest[i][row]))
        best = rest.pop(bi)
        k = val(ctx, best[row])
        pk = Fraction(p) ** k
        u = best[row] / pk
        piv = [x / u for x in best]
        nxt = []
        for c in rest:
            if c[row] != 0:
                q = c[row] / pk
                c = [x - q * y for x, y in zip(c, piv)]
            if any(c):
                nxt.append(c)
        rest = nxt
        out.append(piv)
        prows.append((row, k))
    for j, (r, k) in enumerate(prows):
        pk = Fraction(p) ** k
        pj = out[j]
        for i in range(j):
            x = out[i][r]
            if x == 0:
                continue
            rem = residue(ctx, x, k) if k > 0 else 0
            q = (x - rem) / pk
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], pj)]
    return Submodule(n, tuple(tuple(c) for c in out))


def zero(n: int) -> Submodule:
    return Submodule(n, ())


def full(ctx: PContext, n: int) -> Submodule:
    return hnf(ctx, la.identity(n), n)


def from_matrix(ctx: PContext, rows) -> Submodule:
    """Submodule spanned by the columns of a row-major matrix."""
    n = len(rows)
    return hnf(ctx, la.cols_of(la.fmat(rows)), n)


def index(ctx: PContext, M: Submodule):
    """``p ** (sum of pivot valuations)`` for full rank modules, ``inf`` otherwise."""
    if M.rank < M.n:
        return INF
    return ctx.p ** sum(val(ctx, x) for _, x in M.pivots())


def index_exponent(ctx: PContext, M: Submodule):
    if M.rank < M.n:
        return INF
    return sum(val(ctx, x) for _, x in M.pivots())


def _kernel_mod_p(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    m = [[x % p for x in r] for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(m)) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    basis = []
    for f in (c for c in range(ncols) if c not in piv):
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = -m[i][f] % p
        basis.append(v)
    return basis


def saturate_cols(ctx: PContext, cols, n: int) -> Submodule:
    """Saturation of the span of integral columns inside Z_p^n."""
    M = hnf(ctx, cols, n)
    p = ctx.p
    while M.rank:
        rows = [[residue(ctx, c[i], 1) for c in M.cols] for i in range(n)]
        ker = _kernel_mod_p(rows, M.rank, p)
        if not ker:
            return M
        extra = []
        for v in ker:
            w = [sum(Fraction(v[j]) * M.cols[j][i] for j in range(M.rank)) / p for i in range(n)]
            extra.append(w)
        M = hnf(ctx, list(M.cols) + extra, n)
    return M


def isolator(ctx: PContext, M: Submodule) -> Submodule:
    """Smallest isolated submodule containing ``M`` (same rank)."""
    return saturate_cols(ctx, M.cols, M.n)


def integral_kernel(ctx: PContext, rows, ncols: int) -> Submodule:
    """``{x in Z_p^ncols : rows . x = 0}`` as a Submodule."""
    basis = la.kernel(la.fmat(rows), ncols) if rows else la.kernel([], ncols)
    scaled = []
    for v in basis:
        m = min(val(ctx, x) for x in v if x != 0)
        scaled.append([x / Fraction(ctx.p) ** m for x in v])
    return saturate_cols(ctx, scaled, ncols)


def member(ctx: PContext, x: Sequence, M: Submodule) -> bool:
    if len(x) != M.n:
        raise RankMismatch("vector and module have different ambient ranks")
    x = [Fraction(v) for v in x]
    if any(v.denominator % ctx.p == 0 for v in x):
        return False
    for (r, pv), c in zip(M.pivots(), M.cols):
        if x[r] == 0:
            continue
        q = x[r] / pv
        if q.denominator % ctx.p == 0:
            return False
        x = [a - q * b for a, b in zip(x, c)]
    return not any(x)


def contains(ctx: PContext, big: Submodule, small: Submodule) -> bool:
    return all(member(ctx, c, big) for c in small.cols)


def msum(ctx: PContext, M1: Submodule, M2: Submodule) -> Submodule:
    if M1.n != M2.n:
        raise RankMismatch("ambient ranks differ")
    return hnf(ctx, list(M1.cols) + list(M2.cols), M1.n)


def intersect(ctx: PContext, M1: Submodule, M2: Submodule) -> Submodule:
    if M1.n != M2.n:
        raise RankMismatch("ambient ranks differ")
    n = M1.n
    if M1.is_zero() or M2.is_zero():
        return zero(n)
    r1 = M1.rank
    big = [list(M1.cols[j][i] for j in range(r1)) + [-c[i] for c in M2.cols] for i in range(n)]
    K = integral_kernel(ctx, big, r1 + M2.rank)
    gens = [[sum(k[j] * M1.cols[j][i] for j in range(r1)) for i in range(n)] for k in K.cols]
    return hnf(ctx, gens, n)


def preimage(ctx: PContext, T, M: Submodule, D: Submodule) -> Submodule:
    """``{x in D : T x in M}`` for a rational matrix ``T`` (rows)."""
    T = la.fmat(T)
    n_out = len(T)
    if n_out != M.n or (T and len(T[0]) != D.n):
        raise RankMismatch("map does not match module ranks")
    if D.is_zero():
        return zero(D.n)
    TD = [la.matvec(T, c) for c in D.cols]
    rd = D.rank
    big = [[TD[j][i] for j in range(rd)] + [-c[i] for c in M.cols] for i in range(n_out)]
    K = integral_kernel(ctx, big, rd + M.rank)
    gens = [[sum(k[j] * D.cols[j][i] for j in range(rd)) for i in range(D.n)] for k in K.cols]
    return hnf(ctx, gens, D.n)


def image(ctx: PContext, T, M: Submodule, n_out: int) -> Submodule:
    T = la.fmat(T)
    return hnf(ctx, [la.matvec(T, c) for c in M.cols], n_out)


def coords(x: Sequence, basis_cols: Sequence[Sequence]) -> list[Fraction] | None:
    """Rational coordinates of ``x`` in the given column basis, or None."""
    n = len(x)
    return la.solve(la.from_cols(basis_cols, n), [Fraction(v) for v in x])


def smith_exponents(ctx: PContext, M: Submodule) -> list:
    """Elementary divisor exponents of ``M`` (ascending), padded with ``inf``."""
    return smith(ctx, M)[0]


def smith(ctx: PContext, M: Submodule):
    """Elementary divisors and an adapted ambient basis.

    Returns ``(exponents, P)`` with ``P`` invertible over Z_p (row-major) such
    that ``M`` is spanned by ``p**e_i * P[:, i]``.
    """
    n = M.n
    X = [list(r) for r in M.matrix()]
    m = M.rank
    P = la.identity(n)
    exps = []
    p = Fraction(ctx.p)
    for t in range(min(n, m)):
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if X[i][j] != 0:
                    v = val(ctx, X[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        X[t], X[i] = X[i], X[t]
        for r in range(n):
            P[r][t], P[r][i] = P[r][i], P[r][t]
        for r in X:
            r[t], r[j] = r[j], r[t]
        piv = X[t][t]
        for i2 in range(t + 1, n):
            if X[i2][t] != 0:
                f = X[i2][t] / piv
                X[i2] = [a - f * b for a, b in zip(X[i2], X[t])]
                for r in range(n):
                    P[r][t] += f * P[r][i2]
        for j2 in range(t + 1, m):
            if X[t][j2] != 0:
                f = X[t][j2] / piv
                for r in range(n):
                    X[r][j2] -= f * X[r][t]
        exps.append(v)
    exps += [INF] * (n - len(exps))
    return exps, P
