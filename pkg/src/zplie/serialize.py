"""JSON encodings shared by the library and the CLI.

Scalars are strings ``"num/den"`` (``"num"`` when the denominator is 1) and
matrices are arrays of columns.
"""
from __future__ import annotations

from fractions import Fraction

from . import _linalg as la
from . import lie
from . import zmodlin as zl
from .errors import MalformedMatrix, ValidationError
from .padic import INF, PContext, fmt_scalar


def scalar_to_json(x) -> str:
    return fmt_scalar(Fraction(x))


def scalar_from_json(s) -> Fraction:
    if isinstance(s, bool):
        raise MalformedMatrix(f"bad scalar {s!r}")
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise MalformedMatrix(f"bad scalar {s!r}") from e


def matrix_to_json(rows) -> list:
    """Row-major matrix to an array of column arrays."""
    return [[scalar_to_json(x) for x in col] for col in la.cols_of(la.fmat(rows))]


def matrix_from_json(cols) -> list:
    if not isinstance(cols, list) or not all(isinstance(c, list) for c in cols):
        raise MalformedMatrix("a matrix is an array of column arrays")
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise MalformedMatrix("columns of different lengths")
    return la.from_cols([[scalar_from_json(x) for x in c] for c in cols], n)


def lattice_to_json(L: lie.LieLattice) -> dict:
    br = {}
    for i in range(L.n):
        for j in range(i + 1, L.n):
            terms = [[k, scalar_to_json(v)] for k, v in enumerate(L.sc[i][j]) if v]
            if terms:
                br[f"{i},{j}"] = terms
    return {"p": L.ctx.p, "rank": L.n, "brackets": br}


def lattice_from_json(obj: dict, ctx: PContext | None = None) -> lie.LieLattice:
    """Validated lattice; a bracket listed for ``i > j`` is an antisymmetry error."""
    try:
        p, n, br = int(obj["p"]), int(obj["rank"]), obj.get("brackets", {})
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"lattice JSON needs p, rank and brackets ({e})", None) from e
    ctx = ctx or PContext(p)
    sc = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for key, terms in br.items():
        try:
            i, j = (int(t) for t in key.split(","))
        except ValueError as e:
            raise ValidationError(f"bad bracket key {key!r}", None) from e
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"bracket key {key!r} out of range", None)
        if i >= j:
            raise ValidationError(
                f"bracket [{i},{j}] must be given with i < j; antisymmetry supplies the rest",
                (i, j, None))
        for k, v in terms:
            k = int(k)
            if not 0 <= k < n:
                raise ValidationError(f"index {k} out of range in bracket {key!r}", None)
            sc[i][j][k] += scalar_from_json(v)
            sc[j][i][k] -= scalar_from_json(v)
    return lie.new_lie(ctx, sc)


def submodule_to_json(M: zl.Submodule) -> list:
    return [[scalar_to_json(x) for x in c] for c in M.cols]


def submodule_from_json(ctx: PContext, cols, n: int) -> zl.Submodule:
    return zl.hnf(ctx, [[scalar_from_json(x) for x in c] for c in cols], n)


def endo_to_json(endo) -> dict:
    return {"U": matrix_to_json(endo.U), "F": matrix_to_json(endo.F),
            "index": endo.index}


def endo_from_json(L: lie.LieLattice, obj: dict):
    """Re-validates through ``make_endo``."""
    from .selfsim import make_endo
    return make_endo(L, matrix_from_json(obj["U"]), matrix_from_json(obj["F"]))


def exponent_to_json(e):
    return "inf" if e == INF else e


def verdict_to_json(v) -> dict:
    out = {"status": v.status, "strategy": v.strategy}
    if v.witness is not None:
        out["witness"] = submodule_to_json(v.witness)
    if v.reason:
        out["reason"] = v.reason
    return out


def decision_to_json(dec) -> dict:
    return {"sigma": dec.sigma, "tag": dec.tag.to_json(),
            "certificate": endo_to_json(dec.certificate),
            "certificate_on": dec.certificate_on,
            "obstruction": dec.obstruction,
            "simplicity": verdict_to_json(dec.simplicity)}
