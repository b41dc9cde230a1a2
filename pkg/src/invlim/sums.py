"""Direct sums of atoms with finite-support elements.

A :class:`ModuleShape` is an ordered list of families; each family is one
atom repeated over ``range(n)`` or over all of ``{0, 1, 2, ...}``
(``extent=None``, printed as omega). Only elements are ever materialized,
and every element has finite support, so an omega-indexed sum is exactly
the restricted product with countable supports replaced by finite ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from invlim.atoms import Atom, AtomElement, NotDivisible, Value

OMEGA = None

Coord = tuple[str, int]


class ShapeMismatch(TypeError):
    pass


@dataclass(frozen=True)
class Family:
    fid: str
    atom: Atom
    extent: int | None = 1  # None means omega

    def __post_init__(self) -> None:
        if self.extent is not None and self.extent < 0:
            raise ValueError("family extent must be >= 0")

    def contains(self, index: int) -> bool:
        return index >= 0 and (self.extent is None or index < self.extent)

    def to_json(self) -> dict:
        return {
            "id": self.fid,
            "atom": self.atom.to_json(),
            "extent": "omega" if self.extent is None else self.extent,
        }

    @classmethod
    def from_json(cls, data: dict) -> Family:
        ext = data.get("extent", 1)
        if ext == "omega":
            ext = None
        elif isinstance(ext, str):
            ext = int(ext)
        return cls(str(data["id"]), Atom.from_json(data["atom"]), ext)


@dataclass(frozen=True)
class ModuleShape:
    families: tuple[Family, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "families", tuple(self.families))
        ids = [f.fid for f in self.families]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate family ids in {ids}")
        object.__setattr__(self, "_by_id", {f.fid: f for f in self.families})

    @classmethod
    def of(cls, *families: tuple) -> ModuleShape:
        """Shorthand: ``ModuleShape.of(("a", QQ, 2), ("b", QmodZ, None))``."""
        return cls(tuple(Family(*f) for f in families))

    def family(self, fid: str) -> Family:
        try:
            return self._by_id[fid]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"no family {fid!r} in shape") from None

    def __contains__(self, fid: str) -> bool:
        return fid in self._by_id  # type: ignore[attr-defined]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.fid for f in self.families)

    def is_finite(self) -> bool:
        return all(f.extent is not None for f in self.families)

    def coordinates(self) -> list[Coord]:
        """All coordinates of a finite shape, in shape order."""
        if not self.is_finite():
            raise ValueError("shape has an omega family")
        return [(f.fid, i) for f in self.families for i in range(f.extent)]

    def zero(self) -> Element:
        return Element(self, {})

    def __str__(self) -> str:
        parts = []
        for f in self.families:
            ext = "w" if f.extent is None else str(f.extent)
            parts.append(f"{f.fid}:{f.atom}^{ext}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"families": [f.to_json() for f in self.families]}

    @classmethod
    def from_json(cls, data: dict) -> ModuleShape:
        if not isinstance(data, dict) or not isinstance(data.get("families"), list):
            raise ValueError("shape must be an object with a 'families' array")
        return cls(tuple(Family.from_json(f) for f in data["families"]))


def direct_sum(*parts: tuple[str, ModuleShape]) -> ModuleShape:
    """Concatenate shapes, prefixing each part's family ids."""
    fams = []
    for prefix, shape in parts:
        fams.extend(Family(prefix + f.fid, f.atom, f.extent) for f in shape.families)
    return ModuleShape(tuple(fams))


def power(shape: ModuleShape, extent: int | None, prefix: str = "") -> ModuleShape:
    """The sum of ``extent`` copies of a finite ``shape``, flattened.

    Coordinate ``(fid, j)`` of copy ``i`` lives at ``(f"{prefix}{fid}[{j}]", i)``.
    """
    if not shape.is_finite():
        raise ValueError("can only take powers of finite shapes")
    return ModuleShape(tuple(Family(f"{prefix}{fid}[{j}]", shape.family(fid).atom, extent)
                             for fid, j in shape.coordinates()))


class Element:
    """Finite-support element of a :class:`ModuleShape`.

    Immutable; zero coordinates are never stored and every stored value is
    the canonical representative for its family's atom.
    """

    __slots__ = ("shape", "_coords", "_hash")

    def __init__(self, shape: ModuleShape, coords: Mapping[Coord, Value] | Iterable[tuple[Coord, Value]] = (),
                 *, _trusted: bool = False) -> None:
        items = coords.items() if isinstance(coords, Mapping) else coords
        if _trusted:
            clean = dict(items)
        else:
            clean = {}
            for (fid, idx), v in items:
                fam = shape.family(fid)
                if not isinstance(idx, int) or not fam.contains(idx):
                    raise IndexError(f"index {idx!r} outside family {fid!r}")
                if isinstance(v, AtomElement):
                    if v.atom != fam.atom:
                        raise ShapeMismatch(f"{v.atom} value in {fam.atom} family {fid!r}")
                    v = v.value
                v = fam.atom.canonical(v)
                if v != 0:
                    clean[(fid, idx)] = v
                else:
                    clean.pop((fid, idx), None)
        self.shape = shape
        self._coords = clean
        self._hash = None

    # -- access -------------------------------------------------------------

    def __getitem__(self, coord: Coord) -> Value:
        v = self._coords.get(coord)
        if v is None:
            fam = self.shape.family(coord[0])
            if not fam.contains(coord[1]):
                raise IndexError(f"index {coord[1]} outside family {coord[0]!r}")
            return fam.atom.zero()
        return v

    def atom_element(self, coord: Coord) -> AtomElement:
        return AtomElement(self.shape.family(coord[0]).atom, self[coord])

    def items(self) -> list[tuple[Coord, Value]]:
        return sorted(self._coords.items())

    def __iter__(self) -> Iterator[tuple[Coord, Value]]:
        return iter(self.items())

    @property
    def support(self) -> list[Coord]:
        return sorted(self._coords)

    def is_zero(self) -> bool:
        return not self._coords

    def __len__(self) -> int:
        return len(self._coords)

    def restrict(self, keep) -> Element:
        """Keep only the coordinates for which ``keep(fid, idx)`` is true."""
        return Element(self.shape, {c: v for c, v in self._coords.items() if keep(*c)}, _trusted=True)

    def reshape(self, shape: ModuleShape) -> Element:
        """The same coordinates viewed in another (compatible) shape."""
        return Element(shape, self._coords)

    # -- arithmetic ---------------------------------------------------------

    def _same(self, other: Element) -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: Element) -> Element:
        self._same(other)
        out = dict(self._coords)
        for c, v in other._coords.items():
            atom = self.shape.family(c[0]).atom
            w = atom.add(out.get(c, 0), v)
            if w != 0:
                out[c] = w
            else:
                out.pop(c, None)
        return Element(self.shape, out, _trusted=True)

    def __neg__(self) -> Element:
        return Element(self.shape, {c: self.shape.family(c[0]).atom.neg(v)
                                     for c, v in self._coords.items()}, _trusted=True)

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def scale(self, n: int) -> Element:
        out = {}
        for c, v in self._coords.items():
            w = self.shape.family(c[0]).atom.mul(n, v)
            if w != 0:
                out[c] = w
        return Element(self.shape, out, _trusted=True)

    def __rmul__(self, n: int) -> Element:
        if not isinstance(n, int):
            return NotImplemented
        return self.scale(n)

    def divide(self, n: int) -> Element:
        if n == 0:
            raise ValueError("division by zero")
        out = {}
        for c, v in self.items():
            try:
                w = self.shape.family(c[0]).atom.divide(n, v)
            except NotDivisible:
                raise NotDivisible(n, v, where=c) from None
            if w != 0:
                out[c] = w
        return Element(self.shape, out, _trusted=True)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.shape == other.shape and self._coords == other._coords

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, tuple(self.items())))
        return self._hash

    def __repr__(self) -> str:
        from invlim.exact_arith import format_rational

        body = ", ".join(f"({fid},{i}): {format_rational(v)}" for (fid, i), v in self.items())
        return f"Element({{{body}}})"

    def validate(self) -> None:
        """Re-check every element invariant; raises AssertionError on breach."""
        for (fid, idx), v in self._coords.items():
            fam = self.shape.family(fid)
            assert fam.contains(idx), f"index {idx} outside {fid}"
            assert v != 0, f"stored zero at {(fid, idx)}"
            assert fam.atom.is_canonical(v), f"non-canonical {v!r} at {(fid, idx)}"

    # -- serialization ------------------------------------------------------

    def to_json(self, with_shape: bool = True) -> dict:
        from invlim.exact_arith import format_rational

        data: dict = {"coords": [[fid, i, format_rational(v)] for (fid, i), v in self.items()]}
        if with_shape:
            data = {"shape": self.shape.to_json(), **data}
        return data

    @classmethod
    def from_json(cls, data: dict, shape: ModuleShape | None = None) -> Element:
        if shape is None:
            shape = ModuleShape.from_json(data["shape"])
        coords = {}
        for entry in data.get("coords", []):
            fid, idx, text = entry
            atom = shape.family(fid).atom
            val = atom.value_from_json(text)
            if val == 0:
                raise ValueError(f"stored zero at {(fid, idx)}")
            if (fid, idx) in coords:
                raise ValueError(f"duplicate coordinate {(fid, idx)}")
            coords[(fid, int(idx))] = val
        return cls(shape, coords)


def elem_arith(op: str, x: Element, y: Element | None = None, n: int | None = None) -> Element:
    if op == "add":
        if y is None:
            raise ValueError("add needs two operands")
        return x + y
    if op == "neg":
        return -x
    if op == "scalar_mul":
        if n is None:
            raise ValueError("scalar_mul needs n")
        return x.scale(n)
    raise ValueError(f"unknown op {op!r}")


def elem_divide(n: int, x: Element) -> Element:
    return x.divide(n)


def random_value(atom: Atom, rng: random.Random, bound: int) -> Value:
    bound = max(bound, 1)
    k = atom.kind
    if k == "zz":
        return rng.randint(-bound, bound)
    if k == "cyclic":
        return rng.randrange(min(atom.modulus, bound + 1))
    if k == "qq":
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    if k == "qmodz":
        return atom.canonical(Fraction(rng.randint(0, bound), rng.randint(1, bound)))
    p = atom.modulus
    top = 0
    while p ** (top + 1) <= bound:
        top += 1
    pk = p ** rng.randint(0, top)
    return atom.canonical(Fraction(rng.randrange(pk), pk))


def random_element(shape: ModuleShape, seed: int | random.Random, max_support: int, bound: int) -> Element:
    """Seeded random element with at most ``max_support`` nonzero coordinates.

    Omega families draw indices from ``range(8 * max_support)``. Passing a
    ``random.Random`` instead of an int seed draws from that generator.
    """
    if max_support < 0:
        raise ValueError("max_support must be >= 0")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    fams = [f for f in shape.families if f.extent is None or f.extent > 0]
    if not fams or max_support == 0:
        return shape.zero()
    coords = {}
    for _ in range(rng.randint(0, max_support)):
        fam = rng.choice(fams)
        idx = rng.randrange(8 * max_support if fam.extent is None else fam.extent)
        coords[(fam.fid, idx)] = random_value(fam.atom, rng, bound)
    return Element(shape, coords)
