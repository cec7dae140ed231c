"""Exact arithmetic in the localisation of the integers at a prime p.

Elements of Z_p that occur in presentations are stored as
:class:`fractions.Fraction` values whose denominators are coprime to ``p``.
Truncation to residues only happens in :func:`residue` and in the oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (EmptyModulus, HenselFailure, MalformedPolynomial,
                     MalformedScalar, NonUnit, NoRoot, UnsupportedPrime)

INF = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _smallest_nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise UnsupportedPrime(f"no quadratic non-residue modulo {p}")


@dataclass(frozen=True)
class PContext:
    """A prime together with the fixed non-square unit and a default precision."""

    p: int
    precision: int = 20
    rho: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise UnsupportedPrime(f"{self.p} is not prime")
        if self.precision < 1:
            raise EmptyModulus("precision must be positive")
        if self.p >= 3:
            object.__setattr__(self, "rho", Fraction(_smallest_nonresidue(self.p)))

    def require_odd(self, what: str = "this operation") -> None:
        if self.p == 2:
            raise UnsupportedPrime(f"{what} requires p >= 3")

    def scalar(self, x) -> Fraction:
        """Coerce ``x`` to a Fraction and check the denominator is p-regular."""
        return scalar(self, x)


def scalar(ctx: PContext, x) -> Fraction:
    if isinstance(x, str):
        x = Fraction(x.strip())
    x = Fraction(x)
    if x.denominator % ctx.p == 0:
        raise MalformedScalar(f"{x} is not a {ctx.p}-adic integer")
    return x


def val(ctx: PContext, x) -> int | float:
    """p-adic valuation of a rational; ``math.inf`` for zero.

    Negative values are returned for rationals with p in the denominator.
    """
    x = Fraction(x)
    if x == 0:
        return INF
    p = ctx.p
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def val_integral(ctx: PContext, x) -> int | float:
    """Valuation of an element required to lie in Z_p."""
    v = val(ctx, x)
    if v < 0:
        raise MalformedScalar(f"{x} is not integral at {ctx.p}")
    return v


def unit_part(ctx: PContext, x) -> Fraction:
    x = Fraction(x)
    return x / Fraction(ctx.p) ** val(ctx, x)


def residue(ctx: PContext, x, N: int) -> int:
    """``x mod p**N`` as an integer in ``[0, p**N)``."""
    if N <= 0:
        raise EmptyModulus("residue needs N >= 1")
    x = Fraction(x)
    if x.denominator % ctx.p == 0:
        raise MalformedScalar(f"{x} is not integral at {ctx.p}")
    m = ctx.p ** N
    return x.numerator * pow(x.denominator, -1, m) % m


def residue0(ctx: PContext, x, N: int) -> int:
    """Like :func:`residue` but ``N == 0`` gives 0 (the trivial modulus)."""
    return 0 if N == 0 else residue(ctx, x, N)


def is_square_unit(ctx: PContext, u) -> bool:
    """Whether the unit ``u`` is a square in Z_p (p odd, Euler's criterion)."""
    ctx.require_odd("square-class test")
    u = Fraction(u)
    if val(ctx, u) != 0:
        raise NonUnit(f"{u} is not a unit at {ctx.p}")
    r = residue(ctx, u, 1)
    return pow(r, (ctx.p - 1) // 2, ctx.p) == 1


def hensel_quadratic(ctx: PContext, a, c, f0: int, N: int) -> int:
    """Lift a simple root ``f0`` of ``k^2 + a k - c`` mod p to a root mod p^N."""
    if N <= 0:
        raise EmptyModulus("hensel_quadratic needs N >= 1")
    p = ctx.p
    m = p ** N
    ar = residue(ctx, a, N)
    cr = residue(ctx, c, N)
    f = f0 % p
    if (f * f + ar * f - cr) % p:
        raise NoRoot(f"{f0} is not a root of k^2 + {a}k - {c} modulo {p}")
    if (2 * f + ar) % p == 0:
        raise HenselFailure(f"{f0} is not a simple root modulo {p}")
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        mod = p ** prec
        val_f = (f * f + ar * f - cr) % mod
        deriv = (2 * f + ar) % mod
        f = (f - val_f * pow(deriv, -1, mod)) % mod
    return f % m


def sqrt_unit(ctx: PContext, u, N: int) -> int:
    """An integer ``r`` with ``r^2 = u`` mod p^N, for a square unit ``u``."""
    ctx.require_odd("square roots")
    if not is_square_unit(ctx, u):
        raise NoRoot(f"{u} is not a square unit")
    r0 = next(x for x in range(1, ctx.p) if (x * x - residue(ctx, u, 1)) % ctx.p == 0)
    return hensel_quadratic(ctx, 0, u, r0, N)


@dataclass(frozen=True)
class PPoly:
    """A polynomial with rational coefficients, stored lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_high(cls, coeffs: Sequence) -> "PPoly":
        return cls(tuple(reversed(list(coeffs))))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def charpoly(matrix) -> PPoly:
    """Characteristic polynomial ``det(lambda I - X)`` by the Faddeev-LeVerrier recursion."""
    n = len(matrix)
    X = [[Fraction(v) for v in row] for row in matrix]
    high = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = X M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(X M_k)/k
        prev_c = high[-1]
        Mk = [[sum(X[i][l] * Mk[l][j] for l in range(n)) + (prev_c if i == j else 0)
               for j in range(n)] for i in range(n)]
        tr = sum(sum(X[i][l] * Mk[l][i] for l in range(n)) for i in range(n))
        high.append(-tr / k)
    return PPoly.from_high(high)


def newton_slopes(ctx: PContext, poly: PPoly) -> list[tuple[Fraction | float, int]]:
    """Slopes of the Newton polygon, i.e. the valuations of the roots with multiplicity.

    Points are ``(i, v(coefficient of lambda^(deg - i)))``; the lower convex hull is
    read left to right, so slopes come out nondecreasing.  Roots equal to zero
    contribute a final segment of slope ``inf``.
    """
    if not poly.coeffs:
        raise MalformedPolynomial("zero polynomial")
    deg = poly.degree
    high = list(reversed(poly.coeffs))
    pts = [(i, val(ctx, c)) for i, c in enumerate(high) if c != 0]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out: list[tuple[Fraction | float, int]] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    last = hull[-1][0]
    if last < deg:
        out.append((INF, deg - last))
    return out


def has_monic_integral_irreducible_factor(ctx: PContext, poly: PPoly) -> bool:
    """Whether a monic irreducible factor over Q_p has coefficients in Z_p.

    All roots of an irreducible factor share one valuation, and a monic factor
    is integral exactly when its roots are, so this is decided by the presence
    of a Newton slope >= 0.  Exact in every degree.
    """
    if not poly.coeffs or poly.degree < 1:
        raise MalformedPolynomial("need a polynomial of degree >= 1")
    if not poly.is_monic():
        raise MalformedPolynomial("polynomial is not monic")
    return any(s >= 0 for s, _ in newton_slopes(ctx, poly))


def fmt_scalar(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
