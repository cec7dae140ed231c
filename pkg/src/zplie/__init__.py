"""Self-similarity of Z_p-Lie lattices: decision procedures, certificates and a finite-level oracle."""
from . import errors, families, lie, metabelian, oracle, padic, selfsim, serialize, zmodlin
from .families import FamilyTag, construct, recognize, recognize_with_basis
from .lie import LieLattice
from .padic import PContext
from .selfsim import decide_ss_index_3dim, make_endo, shss_classify, simplicity

__version__ = "0.1.0"

__all__ = [
    "FamilyTag", "LieLattice", "PContext", "construct", "decide_ss_index_3dim",
    "errors", "families", "lie", "make_endo", "metabelian", "oracle", "padic",
    "recognize", "recognize_with_basis", "selfsim", "serialize", "shss_classify",
    "simplicity", "zmodlin",
]
