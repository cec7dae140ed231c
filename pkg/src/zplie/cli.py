"""Command-line front end.

Exit codes: 0 on success, 2 when the input is rejected (parse, validation or
domain errors), 3 when a verdict is inconclusive.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import families, oracle, selfsim
from . import serialize as ser
from .errors import ValidationError, ZpError
from .lie import LieLattice
from .padic import INF, PContext

VERBS = ("classify", "decide", "certify", "verify", "hereditary", "shss", "witness",
         "exhaust", "enum")

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 2, 3


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: parse error at line {e.lineno}, column {e.colno}: {e.msg}") from e


def parse_lattice_file(path: str):
    """``(lattice, tag or None)`` from a bracket file or a family shorthand."""
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "family" in obj:
        if "p" not in obj:
            raise InputError(f"{path}: a family shorthand needs p")
        ctx = PContext(int(obj["p"]))
        tag = families.FamilyTag.from_json(obj)
        return families.construct(ctx, tag), tag
    return ser.lattice_from_json(obj), None


def _tag_name(L: LieLattice, tag):
    return str(tag) if tag is not None else None


# -- verbs -----------------------------------------------------------------

def _classify(L, tag, args):
    rec = families.recognize_with_basis(L)
    out = {"tag": rec.tag.to_json(), "name": str(rec.tag), "basis": ser.matrix_to_json(rec.P),
           "exact": rec.exact, "verified": families.verify_recognition(L, rec)}
    if not rec.exact:
        out["precision"] = rec.precision
    return out, EXIT_OK


def _decide(L, tag, args):
    dec = selfsim.decide_ss_index_3dim(L)
    code = EXIT_INCONCLUSIVE if dec.simplicity.status == "Inconclusive" else EXIT_OK
    return ser.decision_to_json(dec), code


def _certify(L, tag, args):
    rec = families.recognize_with_basis(L)
    cert = selfsim.certify(L.ctx, rec.tag, args.index)
    where = "normal-form"
    if rec.exact:
        cert = selfsim.transport(cert, L, rec.P)
        where = "input"
    v = selfsim.simplicity(cert)
    out = {"tag": rec.tag.to_json(), "index_exponent": args.index,
           "certificate": ser.endo_to_json(cert), "certificate_on": where,
           "simplicity": ser.verdict_to_json(v)}
    return out, EXIT_INCONCLUSIVE if v.status == "Inconclusive" else EXIT_OK


def _verify(L, tag, args):
    if not args.endo:
        raise InputError("verify needs --endo FILE with {\"U\": ..., \"F\": ...}")
    endo = ser.endo_from_json(L, _load_json(args.endo))
    v = selfsim.simplicity(endo)
    out = {"valid": True, "index": endo.index, "simplicity": ser.verdict_to_json(v)}
    return out, EXIT_INCONCLUSIVE if v.status == "Inconclusive" else EXIT_OK


def _hereditary(L, tag, args):
    h = selfsim.hereditary_3dim(L)
    out = {"hereditary": h.hereditary, "tag": h.tag.to_json(),
           "witness": None if h.witness is None else ser.submodule_to_json(h.witness),
           "witness_sigma": h.witness_sigma}
    return out, EXIT_OK


def _shss(L, tag, args):
    r = selfsim.shss_classify(L)
    out = {"shss": r.shss, "s": None if r.s is None else ser.exponent_to_json(r.s),
           "witness": None if r.witness is None else ser.submodule_to_json(r.witness),
           "witness_check": r.witness_check}
    code = EXIT_INCONCLUSIVE if not r.shss and r.witness is None else EXIT_OK
    return out, code


def _witness(L, tag, args):
    w = selfsim.witness_nonss(L)
    out = {"k": list(w.k), "subalgebra": ser.submodule_to_json(w.M),
           "a": [ser.scalar_to_json(x) for x in w.a], "b": [ser.scalar_to_json(x) for x in w.b],
           "checks": w.checks, "ok": w.ok}
    return out, EXIT_OK


def _exhaust(L, tag, args):
    hints = []
    if L.n == 3 and not args.no_hint and L.ctx.p != 2:
        try:
            hints = [selfsim.decide_ss_index_3dim(L).certificate]
        except ZpError:
            hints = []
    rep = oracle.exhaust(L, args.level, jobs=args.jobs, tag=_tag_name(L, tag), hints=hints,
                         full_counts=args.full_counts)
    return rep.to_json(), EXIT_INCONCLUSIVE if rep.covered is None else EXIT_OK


def _enum(L, tag, args):
    shapes = oracle.enum_index_p(L)
    subs = set(oracle.subalgebra_filter(L, shapes))
    out = {"rank": L.n, "p": L.ctx.p, "count": len(shapes),
           "subalgebras": len(subs),
           "shapes": [dict(sh.to_json(), subalgebra=sh in subs) for sh in shapes]}
    return out, EXIT_OK


HANDLERS = {"classify": _classify, "decide": _decide, "certify": _certify,
            "verify": _verify, "hereditary": _hereditary, "shss": _shss,
            "witness": _witness, "exhaust": _exhaust, "enum": _enum}


# -- output ----------------------------------------------------------------

def _text(verb: str, out: dict) -> str:
    if "error" in out:
        return f"error ({out['error']}): {out['message']}"
    if verb == "exhaust":
        return (f"p={out['p']} level={out['level']} covered={out['covered']} "
                f"uncovered={out['uncovered_total']} simple_lift={out['simple_lift']}\n"
                f"{out['statement']}")
    if verb == "decide":
        return (f"{out['tag']['family']}: sigma = {out['sigma']}; certificate index "
                f"{out['certificate']['index']} is {out['simplicity']['status']}"
                + (f"; obstruction: {out['obstruction']}" if out["obstruction"] else ""))
    lines = []
    for k, v in out.items():
        if isinstance(v, (list, dict)) and len(json.dumps(v)) > 70:
            v = json.dumps(v)[:67] + "..."
        lines.append(f"{k}: {v if not isinstance(v, (list, dict)) else json.dumps(v)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zplie", description="Self-similarity computations for Z_p-Lie lattices.")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("input", help="lattice JSON file or family shorthand")
    ap.add_argument("--level", type=int, default=oracle.DEFAULT_LEVEL, help="oracle level N")
    ap.add_argument("--index", type=int, default=1, help="certificate index exponent k")
    ap.add_argument("--jobs", type=int, default=None, help="oracle workers (default: $JOBS or 1)")
    ap.add_argument("--endo", help="endomorphism JSON for verify")
    ap.add_argument("--no-hint", action="store_true",
                    help="exhaust: do not offer the rank-3 decision certificate as a lift hint")
    ap.add_argument("--full-counts", action="store_true",
                    help="exhaust: count every uncovered solution instead of stopping at samples")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        L, tag = parse_lattice_file(args.input)
        out, code = HANDLERS[args.verb](L, tag, args)
    except InputError as e:
        out, code = {"error": "input", "message": str(e)}, EXIT_INPUT
    except ValidationError as e:
        out = {"error": type(e).__name__, "message": str(e)}
        if e.triple is not None:
            out["triple"] = [None if t is None else int(t) for t in e.triple]
        code = EXIT_INPUT
    except ZpError as e:
        out, code = {"error": type(e).__name__, "message": str(e)}, EXIT_INPUT
    if args.fmt == "text":
        print(_text(args.verb, out), file=stdout)
    else:
        print(json.dumps(out, sort_keys=True, indent=2, default=_default), file=stdout)
    return code


def _default(x):
    if x == INF:
        return "inf"
    return str(x)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
