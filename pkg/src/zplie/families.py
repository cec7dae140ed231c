"""Named lattice families and a recognizer for rank-3 solvable lattices."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import _linalg as la
from . import lie
from . import metabelian as mb
from .errors import NotSolvable, OutOfDomain, Unsupported
from .lie import LieLattice
from .padic import PContext, fmt_scalar, is_square_unit, residue, sqrt_unit, val

FAMILIES = ("L0", "L1", "L2", "L3", "L4", "L5", "L6", "L7", "Lab", "Ld")

_PARAMS = {
    "L0": (), "L1": ("s",), "L2": ("s", "r", "c"), "L3": ("s",),
    "L4": ("s", "t", "epsilon"), "L5": ("s", "r", "c"), "L6": ("a",),
    "L7": ("s", "a", "c"), "Lab": ("a", "b"), "Ld": ("d", "a"),
}


@dataclass(frozen=True)
class FamilyTag:
    family: str
    s: int = 0
    r: int = 0
    t: int = 0
    epsilon: int = 0
    c: Fraction = Fraction(0)
    a: object = Fraction(0)  # scalar, or a tuple for Lab
    b: tuple = ()
    d: int = 0

    def params(self) -> dict:
        return {k: getattr(self, k) for k in _PARAMS[self.family]}

    def to_json(self) -> dict:
        out = {"family": self.family}
        for k, v in self.params().items():
            if isinstance(v, tuple):
                out[k] = [fmt_scalar(x) for x in v]
            elif isinstance(v, Fraction):
                out[k] = fmt_scalar(v)
            else:
                out[k] = v
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FamilyTag":
        fam = obj.get("family")
        if fam not in FAMILIES:
            raise OutOfDomain(f"unknown family {fam!r}")
        kw = {}
        for k in _PARAMS[fam]:
            if k not in obj:
                if k == "d" and fam == "Ld":
                    raise OutOfDomain("Ld needs d")
                continue
            v = obj[k]
            if k in ("a", "b") and fam == "Lab":
                kw[k] = tuple(Fraction(str(x)) for x in v)
            elif k in ("a", "c"):
                kw[k] = Fraction(str(v))
            else:
                kw[k] = int(v)
        return cls(fam, **kw)

    def __str__(self):
        def show(v):
            if isinstance(v, tuple):
                return "(" + ",".join(fmt_scalar(x) for x in v) + ")"
            return fmt_scalar(v) if isinstance(v, Fraction) else str(v)
        ps = ", ".join(f"{k}={show(v)}" for k, v in self.params().items())
        return f"{self.family}({ps})"


def _check_domain(ctx: PContext, tag: FamilyTag):
    if tag.family not in FAMILIES:
        raise OutOfDomain(f"unknown family {tag.family!r}")
    for k in ("s", "r", "t", "d"):
        if getattr(tag, k) < 0:
            raise OutOfDomain(f"{k} must be a natural number")
    if tag.epsilon not in (0, 1):
        raise OutOfDomain("epsilon must be 0 or 1")
    if tag.family == "L4" and ctx.p == 2:
        raise OutOfDomain("L4 requires p >= 3")
    scalars = [tag.c] + (list(tag.a) + list(tag.b) if tag.family == "Lab" else [tag.a])
    for x in scalars:
        if Fraction(x).denominator % ctx.p == 0:
            raise OutOfDomain(f"parameter {x} is not a {ctx.p}-adic integer")
    if tag.family == "Lab" and (len(tag.a) < 1 or len(tag.b) != len(tag.a) - 1):
        raise OutOfDomain("Lab needs len(a) = d >= 1 and len(b) = d - 1")
    if tag.family == "Ld" and tag.d < 2:
        raise OutOfDomain("Ld needs d >= 2")


def family_matrix(ctx: PContext, tag: FamilyTag):
    """The matrix ``A`` of the presentation (columns are images of ``ad x_0``)."""
    _check_domain(ctx, tag)
    p = Fraction(ctx.p)
    f = tag.family
    ps = p ** tag.s
    if f == "L0":
        return la.zeros(2, 2)
    if f == "L1":
        return la.scale(la.identity(2), ps)
    if f == "L2":
        pr = p ** tag.r
        return la.scale([[1, pr], [pr * tag.c, 1]], ps)
    if f == "L3":
        return [[Fraction(0), ps], [Fraction(0), Fraction(0)]]
    if f == "L4":
        return la.scale([[0, 1], [p ** tag.t * ctx.rho ** tag.epsilon, 0]], ps)
    if f == "L5":
        return la.scale([[p ** tag.r, 1], [tag.c, 0]], ps)
    if f == "L6":
        return la.scale(la.identity(2), Fraction(tag.a))
    if f == "L7":
        return la.scale([[tag.a, 1], [tag.c, 0]], ps)
    if f == "Ld":
        return la.scale(la.identity(tag.d - 1), Fraction(tag.a))
    d = len(tag.a)
    A = la.zeros(d, d)
    for l in range(d):
        A[l][0] = Fraction(tag.a[l])
    for i in range(d - 1):
        A[i][i + 1] = Fraction(tag.b[i])
    return A


def lattice_from_matrix(ctx: PContext, A) -> LieLattice:
    """Metabelian lattice with ``[x_0, x_i] = sum_l A[l][i] x_l`` and abelian tail."""
    d = len(A)
    br = {}
    for i in range(d):
        col = [Fraction(0)] + [Fraction(A[l][i]) for l in range(d)]
        if any(col):
            br[(0, i + 1)] = col
    return lie.from_brackets(ctx, d + 1, br)


def construct(ctx: PContext, tag: FamilyTag) -> LieLattice:
    return lattice_from_matrix(ctx, family_matrix(ctx, tag))


def residually_nilpotent(tag: FamilyTag, ctx: PContext | None = None) -> bool:
    """Residual nilpotency for families L0 to L5.

    ``ctx`` is only consulted for L5, where the valuation of ``c`` matters.
    """
    f = tag.family
    if f in ("L0", "L3"):
        return True
    if f in ("L1", "L2"):
        return tag.s >= 1
    if f == "L4":
        return tag.s >= 1 or tag.t >= 1
    if f == "L5":
        if tag.s >= 1:
            return True
        if tag.r == 0:
            return False
        if ctx is None:
            raise Unsupported("the prime is needed to read val(c) for L5")
        return val(ctx, tag.c) >= 1
    raise OutOfDomain("residual nilpotency is tabulated for families L0 to L5 only")


@dataclass(frozen=True)
class Recognition:
    """A tag with an ambient basis ``P`` (columns) in which ``L`` has the tag's presentation.

    ``exact`` is False when the basis involves a p-adic square root; the
    presentation then matches modulo ``p**precision``.
    """

    tag: FamilyTag
    P: list = field(compare=False)
    exact: bool = True
    precision: int | None = None


def _col(X, v):
    # combination of the columns of X with coefficients v
    return [sum(x * c for x, c in zip(row, v)) for row in X]


def _cyclic_vector(ctx: PContext, M):
    for v in ([1, 0], [0, 1], [1, 1]):
        v = [Fraction(x) for x in v]
        Mv = la.matvec(M, v)
        if residue(ctx, Mv[0] * v[1] - Mv[1] * v[0], 1):
            return v
    raise AssertionError("matrix is scalar modulo p")


def _companion_basis(ctx, x0, XJ, M):
    """Basis ``[x0, X_J M v, X_J v]`` and the companion parameters ``(tr M, -det M)``."""
    v = _cyclic_vector(ctx, M)
    P = la.from_cols([x0, _col(XJ, la.matvec(M, v)), _col(XJ, v)], 3)
    return P, M[0][0] + M[1][1], -la.det(M)


def recognize_with_basis(L: LieLattice) -> Recognition:
    """Family, parameters and an explicit basis realising the isomorphism."""
    ctx = L.ctx
    ctx.require_odd("recognition")
    if L.n != 3:
        raise Unsupported("recognition is limited to rank 3")
    if not lie.is_solvable(L):
        raise NotSolvable("recognition needs a solvable lattice")
    gb = mb.find_good_basis(L)
    if gb is None:
        raise NotSolvable("no abelian ideal of corank one was found")
    cols = [list(c) for c in gb.basis]
    x0 = cols[0]
    XJ = la.from_cols(cols[1:], 3)
    A = gb.A_rows()
    p = Fraction(ctx.p)
    if all(x == 0 for r in A for x in r):
        return Recognition(FamilyTag("L0"), la.from_cols(cols, 3))
    s = min(val(ctx, x) for r in A for x in r if x != 0)
    Ap = la.scale(A, 1 / p ** s)
    if Ap[0][1] == 0 and Ap[1][0] == 0 and Ap[0][0] == Ap[1][1]:
        lam = Ap[0][0]
        return Recognition(FamilyTag("L1", s=s),
                           la.from_cols([[x / lam for x in x0]] + cols[1:], 3))
    if (residue(ctx, Ap[0][1], 1) == 0 and residue(ctx, Ap[1][0], 1) == 0
            and residue(ctx, Ap[0][0] - Ap[1][1], 1) == 0):
        w = (Ap[0][0] + Ap[1][1]) / 2
        T0 = la.sub(Ap, la.scale(la.identity(2), w))
        m = min(val(ctx, x) for r in T0 for x in r if x != 0)
        C = la.scale(T0, 1 / p ** m)
        v = _cyclic_vector(ctx, C)
        gamma = -la.det(C)
        P = la.from_cols([[x / w for x in x0], _col(XJ, la.matvec(C, v)),
                          _col(XJ, [w * x for x in v])], 3)
        return Recognition(FamilyTag("L2", s=s, r=m, c=gamma / w ** 2), P)
    a = Ap[0][0] + Ap[1][1]
    c = -la.det(Ap)
    if a == 0 and c == 0:
        P, _, _ = _companion_basis(ctx, x0, XJ, Ap)
        return Recognition(FamilyTag("L3", s=s), P)
    if a == 0:
        t = val(ctx, c)
        u = c / p ** t
        eps = 0 if is_square_unit(ctx, u) else 1
        N = ctx.precision
        lam = Fraction(sqrt_unit(ctx, ctx.rho ** eps / u, N + 1))
        P, _, _ = _companion_basis(ctx, [lam * x for x in x0], XJ, la.scale(Ap, lam))
        return Recognition(FamilyTag("L4", s=s, t=t, epsilon=eps), P, exact=False, precision=N)
    r = val(ctx, a)
    w = a / p ** r
    P, a2, c2 = _companion_basis(ctx, [x / w for x in x0], XJ, la.scale(Ap, 1 / w))
    return Recognition(FamilyTag("L5", s=s, r=r, c=c2), P)


def recognize(L: LieLattice) -> FamilyTag:
    return recognize_with_basis(L).tag


def verify_recognition(L: LieLattice, rec: Recognition) -> bool:
    """Check that ``rec.P`` carries ``L`` onto the tag's presentation.

    Exact recognitions compare structure constants exactly; the others compare
    them modulo ``p**precision``.
    """
    ctx = L.ctx
    P = la.fmat(rec.P)
    if la.det(P) == 0 or val(ctx, la.det(P)) != 0:
        return False
    if any(x.denominator % ctx.p == 0 for r in P for x in r):
        return False
    M = lie.change_basis(L, P)
    T = construct(ctx, rec.tag)
    if rec.exact:
        return M.sc == T.sc
    N = rec.precision
    return all(x == y or val(ctx, x - y) >= N
               for r1, r2 in zip(M.sc, T.sc) for v1, v2 in zip(r1, r2) for x, y in zip(v1, v2))
