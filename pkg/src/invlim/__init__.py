"""Inverse-limit presentations of abelian groups, computed exactly.

Builds injective (divisible) presentations ``0 -> A -> M -> N`` of finitely
generated abelian groups and the inverse systems assembled from them, and
checks their structural properties on seeded samples.
"""

from invlim.atoms import (
    QQ,
    ZZ,
    Atom,
    AtomElement,
    Cyclic,
    NotDivisible,
    Pruefer,
    QmodZ,
)
from invlim.exact_arith import IntMatrix, SnfResult, snf
from invlim.sums import Element, Family, ModuleShape

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "ZZ",
    "Atom",
    "AtomElement",
    "Cyclic",
    "Element",
    "Family",
    "IntMatrix",
    "ModuleShape",
    "NotDivisible",
    "Pruefer",
    "QmodZ",
    "SnfResult",
    "snf",
]
