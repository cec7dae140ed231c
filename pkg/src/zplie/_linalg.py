# Small dense exact linear algebra over Q. Matrices are lists of rows.
from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch, MalformedMatrix


def fmat(rows):
    return [[Fraction(x) for x in r] for r in rows]


def zeros(n, m):
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(r) for r in zip(*a)] if a else []


def from_cols(cols, n):
    if not cols:
        return [[] for _ in range(n)]
    return [[Fraction(c[i]) for c in cols] for i in range(n)]


def cols_of(a):
    return [list(c) for c in zip(*a)] if a and a[0] else []


def matmul(a, b):
    if a and len(a[0]) != len(b):
        raise DimensionMismatch("inner dimensions differ")
    bt = list(zip(*b)) if b else []
    return [[sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in bt] for r in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(r, v)), Fraction(0)) for r in a]


def scale(a, s):
    return [[x * s for x in r] for r in a]


def add(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def rref(a):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return m, piv


def rank(a):
    return len(rref(a)[1]) if a and a[0] else 0


def kernel(a, ncols=None):
    """Basis of the right kernel ``{x : a x = 0}`` over Q."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, piv = rref(a)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -m[i][f]
        basis.append(v)
    return basis


def solve(a, b):
    """One solution of ``a x = b`` over Q, or None."""
    n = len(a)
    m = len(a[0]) if n else 0
    aug = [list(r) + [Fraction(bi)] for r, bi in zip(a, b)]
    red, piv = rref(aug)
    if m in piv:
        return None
    x = [Fraction(0)] * m
    for i, pc in enumerate(piv):
        x[pc] = red[i][m]
    return x


def det(a):
    n = len(a)
    m = [list(r) for r in a]
    d = Fraction(1)
    for c in range(n):
        k = next((i for i in range(c, n) if m[i][c] != 0), None)
        if k is None:
            return Fraction(0)
        if k != c:
            m[c], m[k] = m[k], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a):
    n = len(a)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise MalformedMatrix("singular matrix")
    return [r[n:] for r in red]
