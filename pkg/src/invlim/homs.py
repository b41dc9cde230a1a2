"""Additive maps between module shapes, as a closed combinator language.

Every combinator knows how to evaluate itself and carries a deterministic
preimage strategy. Strategies are partial: :func:`preimage` either returns
an ``x`` with ``h(x) == y`` (always re-checked) or raises
:class:`NoPreimageFound`, which means only that the strategy gave up.

Maps out of Q, Q/Z and Z(p^inf) exist only as the structural combinators
(there is no finite generating set to give images for); generator images
are reserved for sources built from Z and Z/d families.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from invlim.atoms import QQ, ZZ, Atom, NotDivisible, Pruefer, QmodZ, Value, embed_target, prime_power
from invlim.exact_arith import format_rational, parse_rational
from invlim.sums import Coord, Element, Family, ModuleShape, ShapeMismatch


class NoPreimageFound(ArithmeticError):
    """The deterministic preimage strategy failed (not a proof of non-surjectivity)."""


class HomTypeError(TypeError):
    """Ill-typed combinator; ``path`` locates the offending node in a JSON tree."""

    def __init__(self, message: str, path: str = "$") -> None:
        self.path = path
        super().__init__(f"{path}: {message}")


class Hom:
    op: str = "?"
    source: ModuleShape
    target: ModuleShape

    def __call__(self, x: Element) -> Element:
        return apply(self, x)

    def _apply(self, x: Element) -> Element:
        raise NotImplementedError

    def _preimage(self, y: Element) -> Element:
        raise NoPreimageFound(f"{self.op} has no preimage strategy")

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{self.op}: {self.source} -> {self.target}>"


def apply(h: Hom, x: Element) -> Element:
    if x.shape != h.source:
        raise ShapeMismatch(f"{h.op}: element shape {x.shape} != source {h.source}")
    return h._apply(x)


def preimage(h: Hom, y: Element) -> Element:
    """Some ``x`` with ``h(x) == y``, found by the combinator's strategy."""
    if y.shape != h.target:
        raise ShapeMismatch(f"{h.op}: element shape {y.shape} != target {h.target}")
    x = h._preimage(y)
    if h._apply(x) != y:
        raise NoPreimageFound(f"{h.op}: strategy produced a non-preimage")
    return x


# ---------------------------------------------------------------------------
# basic combinators


class Zero(Hom):
    op = "zero"

    def __init__(self, source: ModuleShape, target: ModuleShape) -> None:
        self.source, self.target = source, target

    def _apply(self, x: Element) -> Element:
        return self.target.zero()

    def _preimage(self, y: Element) -> Element:
        if not y.is_zero():
            raise NoPreimageFound("nonzero element is not in the image of the zero map")
        return self.source.zero()

    def to_json(self) -> dict:
        return {"op": "zero", "source": self.source.to_json(), "target": self.target.to_json()}


class Identity(Hom):
    op = "identity"

    def __init__(self, shape: ModuleShape) -> None:
        self.source = self.target = shape

    def _apply(self, x: Element) -> Element:
        return x

    def _preimage(self, y: Element) -> Element:
        return y

    def to_json(self) -> dict:
        return {"op": "identity", "shape": self.source.to_json()}


class CoordinateRoute(Hom):
    """Copy blocks of coordinates between families; uncovered sources are dropped.

    Each block is ``(src_fid, src_start, tgt_fid, tgt_start, length)`` with
    ``length=None`` meaning "to infinity" (both families omega). Blocks may
    not overlap on either side, so the map is a projection followed by an
    injection, and its preimage pads dropped coordinates with zero.
    """

    op = "route"

    def __init__(self, source: ModuleShape, target: ModuleShape,
                 blocks: Iterable[tuple[str, int, str, int, int | None]]) -> None:
        self.source, self.target = source, target
        self.blocks = tuple(tuple(b) for b in blocks)
        for sf, ss, tf, ts, length in self.blocks:
            if sf not in source or tf not in target:
                raise HomTypeError(f"route block references unknown family {sf!r} or {tf!r}")
            fs, ft = source.family(sf), target.family(tf)
            if fs.atom != ft.atom:
                raise HomTypeError(f"route block {sf!r}->{tf!r} joins {fs.atom} and {ft.atom}")
            if ss < 0 or ts < 0:
                raise HomTypeError("route block starts must be >= 0")
            if length is None:
                if fs.extent is not None or ft.extent is not None:
                    raise HomTypeError("unbounded route blocks need omega families on both sides")
            else:
                if length < 0:
                    raise HomTypeError("route block length must be >= 0")
                if fs.extent is not None and ss + length > fs.extent:
                    raise HomTypeError(f"route block overruns source family {sf!r}")
                if ft.extent is not None and ts + length > ft.extent:
                    raise HomTypeError(f"route block overruns target family {tf!r}")
        for side in (0, 2):
            for a in range(len(self.blocks)):
                for b in range(a + 1, len(self.blocks)):
                    if _blocks_overlap(self.blocks[a], self.blocks[b], side):
                        raise HomTypeError("route blocks overlap")

    @staticmethod
    def _locate(blocks, fid: str, idx: int, side: int) -> tuple[str, int] | None:
        other = 2 - side
        for blk in blocks:
            f, start, length = blk[side], blk[side + 1], blk[4]
            if f == fid and idx >= start and (length is None or idx < start + length):
                return blk[other], blk[other + 1] + idx - start
        return None

    def _apply(self, x: Element) -> Element:
        out = {}
        for (fid, idx), v in x.items():
            hit = self._locate(self.blocks, fid, idx, 0)
            if hit is not None:
                out[hit] = v
        return Element(self.target, out, _trusted=True)

    def _preimage(self, y: Element) -> Element:
        out = {}
        for (fid, idx), v in y.items():
            hit = self._locate(self.blocks, fid, idx, 2)
            if hit is None:
                raise NoPreimageFound(f"target coordinate {(fid, idx)} is not hit by the route")
            out[hit] = v
        return Element(self.source, out, _trusted=True)

    def to_json(self) -> dict:
        return {
            "op": "route",
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "blocks": [[sf, ss, tf, ts, "omega" if ln is None else ln] for sf, ss, tf, ts, ln in self.blocks],
        }


def _blocks_overlap(a, b, side: int) -> bool:
    if a[side] != b[side]:
        return False
    a0, b0 = a[side + 1], b[side + 1]
    a1 = float("inf") if a[4] is None else a0 + a[4]
    b1 = float("inf") if b[4] is None else b0 + b[4]
    return a0 < b1 and b0 < a1


def project(source: ModuleShape, fids: Sequence[str]) -> CoordinateRoute:
    """Projection of ``source`` onto the listed families (kept under their ids)."""
    target = ModuleShape(tuple(source.family(f) for f in fids))
    return CoordinateRoute(source, target, [(f, 0, f, 0, source.family(f).extent) for f in fids])


def inject(source: ModuleShape, target: ModuleShape) -> CoordinateRoute:
    """Inclusion of ``source`` into ``target`` family-by-family (same ids)."""
    return CoordinateRoute(source, target, [(f.fid, 0, f.fid, 0, f.extent) for f in source.families])


# ---------------------------------------------------------------------------
# coordinatewise maps


class _Pointwise(Hom):
    """A map acting by the same value function on every coordinate."""

    def _map_value(self, atom: Atom, v: Value) -> Value:
        raise NotImplementedError

    def _unmap_value(self, atom: Atom, v: Value) -> Value:
        raise NotImplementedError

    def _apply(self, x: Element) -> Element:
        out = {}
        for c, v in x.items():
            w = self._map_value(self.source.family(c[0]).atom, v)
            if w != 0:
                out[c] = w
        return Element(self.target, out, _trusted=True)

    def _preimage(self, y: Element) -> Element:
        out = {}
        for c, v in y.items():
            w = self._unmap_value(self.source.family(c[0]).atom, v)
            if w != 0:
                out[c] = w
        return Element(self.source, out, _trusted=True)


def _retarget(source: ModuleShape, atom_map) -> ModuleShape:
    return ModuleShape(tuple(Family(f.fid, atom_map(f.atom), f.extent) for f in source.families))


def _require(shape: ModuleShape, ok, what: str) -> None:
    for f in shape.families:
        if not ok(f.atom):
            raise HomTypeError(f"family {f.fid!r} has atom {f.atom}, expected {what}")


class MultByRational(_Pointwise):
    op = "mult_by_rational"

    def __init__(self, shape: ModuleShape, r: Fraction | int) -> None:
        _require(shape, lambda a: a == QQ, "Q")
        self.source = self.target = shape
        self.r = Fraction(r)

    def _map_value(self, atom, v):
        return v * self.r

    def _unmap_value(self, atom, v):
        if self.r == 0:
            raise NoPreimageFound("multiplication by 0 only hits 0")
        return v / self.r

    def to_json(self) -> dict:
        return {"op": self.op, "shape": self.source.to_json(), "r": format_rational(self.r)}


class MultByInt(_Pointwise):
    op = "mult_by_int"

    def __init__(self, shape: ModuleShape, n: int) -> None:
        self.source = self.target = shape
        self.n = int(n)

    def _map_value(self, atom, v):
        return atom.mul(self.n, v)

    def _unmap_value(self, atom, v):
        if self.n == 0:
            raise NoPreimageFound("multiplication by 0 only hits 0")
        try:
            return atom.divide(self.n, v)
        except NotDivisible as exc:
            raise NoPreimageFound(str(exc)) from None

    def to_json(self) -> dict:
        return {"op": self.op, "shape": self.source.to_json(), "n": str(self.n)}


class ReduceQ(_Pointwise):
    """Q -> Q/Z on every family; the preimage is the representative in [0, 1)."""

    op = "reduce_q"

    def __init__(self, source: ModuleShape) -> None:
        _require(source, lambda a: a == QQ, "Q")
        self.source = source
        self.target = _retarget(source, lambda a: QmodZ)

    def _map_value(self, atom, v):
        return QmodZ.canonical(v)

    def _unmap_value(self, atom, v):
        return v

    def to_json(self) -> dict:
        return {"op": self.op, "source": self.source.to_json()}


class EmbedCyclic(_Pointwise):
    """Z/p^k -> Z(p^inf), residue r to [r/p^k]."""

    op = "embed_cyclic"

    def __init__(self, source: ModuleShape) -> None:
        _require(source, lambda a: a.kind == "cyclic" and prime_power(a.modulus) is not None,
                 "a prime-power cyclic group")
        self.source = source
        self.target = _retarget(source, lambda a: embed_target("cyclic_into_pruefer", a))

    def _map_value(self, atom, v):
        return Pruefer(prime_power(atom.modulus)[0]).canonical(Fraction(v, atom.modulus))

    def _unmap_value(self, atom, v):
        r = v * atom.modulus
        if r.denominator != 1:
            raise NoPreimageFound(f"[{v}] is not killed by {atom.modulus}")
        return r.numerator % atom.modulus

    def to_json(self) -> dict:
        return {"op": self.op, "source": self.source.to_json()}


class PrueferMultPk(_Pointwise):
    """Multiplication by p^k on Z(p^inf) families."""

    op = "pruefer_mult_pk"

    def __init__(self, shape: ModuleShape, p: int, k: int) -> None:
        _require(shape, lambda a: a == Pruefer(p), f"Z({p}^inf)")
        if k < 0:
            raise HomTypeError("exponent k must be >= 0")
        self.source = self.target = shape
        self.p, self.k = p, k

    def _map_value(self, atom, v):
        return atom.mul(self.p ** self.k, v)

    def _unmap_value(self, atom, v):
        return atom.divide(self.p ** self.k, v)

    def to_json(self) -> dict:
        return {"op": self.op, "shape": self.source.to_json(), "p": str(self.p), "k": str(self.k)}


# ---------------------------------------------------------------------------
# maps out of free / cyclic sources


class GeneratorImage(Hom):
    """A map out of a sum of Z and Z/d families, fixed by generator images.

    The generator of a Z/d coordinate must go to an element killed by d.
    """

    op = "generator_image"

    def __init__(self, source: ModuleShape, target: ModuleShape, images: Mapping[Coord, Element]) -> None:
        for f in source.families:
            if f.atom.kind not in ("zz", "cyclic") or f.extent is None:
                raise HomTypeError(f"generator_image needs finite Z or Z/d families, got {f.fid!r}: {f.atom}")
        self.source, self.target = source, target
        imgs = {}
        for coord, img in images.items():
            fam = source.family(coord[0])
            if not fam.contains(coord[1]):
                raise HomTypeError(f"generator {coord} outside its family")
            if img.shape != target:
                raise HomTypeError(f"image of {coord} does not live in the target shape")
            if fam.atom.kind == "cyclic" and not img.scale(fam.atom.modulus).is_zero():
                raise HomTypeError(f"image of Z/{fam.atom.modulus} generator {coord} is not killed by "
                                   f"{fam.atom.modulus}")
            if not img.is_zero():
                imgs[coord] = img
        self.images = imgs

    def image(self, coord: Coord) -> Element:
        return self.images.get(coord, self.target.zero())

    def _apply(self, x: Element) -> Element:
        out = self.target.zero()
        for c, v in x.items():
            img = self.images.get(c)
            if img is not None:
                out = out + img.scale(v)
        return out

    def _preimage(self, y: Element) -> Element:
        # only for images supported on single, pairwise distinct coordinates
        owner: dict[Coord, Coord] = {}
        for gen, img in self.images.items():
            supp = img.support
            if len(supp) != 1 or supp[0] in owner:
                raise NoPreimageFound("generator images are not on distinct single coordinates")
            owner[supp[0]] = gen
        out = {}
        for c, v in y.items():
            gen = owner.get(c)
            if gen is None:
                raise NoPreimageFound(f"coordinate {c} is not hit by any generator")
            atom = self.target.family(c[0]).atom
            mult = _solve_multiple(atom, self.images[gen][c], v)
            src_atom = self.source.family(gen[0]).atom
            w = src_atom.canonical(mult)
            if w != 0:
                out[gen] = w
        return Element(self.source, out, _trusted=True)

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "images": [[fid, idx, img.to_json(with_shape=False)] for (fid, idx), img in sorted(self.images.items())],
        }


def _solve_multiple(atom: Atom, im: Value, y: Value) -> int:
    """An integer c with ``c * im == y`` in ``atom`` (least nonnegative for torsion)."""
    from invlim.atoms import Cyclic

    k = atom.kind
    if k in ("zz", "qq"):
        q = Fraction(y) / Fraction(im)
        if q.denominator != 1:
            raise NoPreimageFound(f"{y} is not an integer multiple of {im}")
        return q.numerator
    if k == "cyclic":
        try:
            return atom.divide(im, y)
        except NotDivisible:
            raise NoPreimageFound(f"{y} is not a multiple of {im} mod {atom.modulus}") from None
    b = im.denominator
    yb = y * b
    if yb.denominator != 1:
        raise NoPreimageFound(f"[{y}] is not a multiple of [{im}]")
    try:
        return Cyclic(b).divide(im.numerator, yb.numerator % b)
    except NotDivisible:
        raise NoPreimageFound(f"[{y}] is not a multiple of [{im}]") from None


# ---------------------------------------------------------------------------
# fiber sums


class FiberSum(Hom):
    """``y_i = sum of x_j over j with index_map[j] == i``, on every family.

    Source and target have the same families (ids and atoms); source
    families have extent ``len(index_map)`` and target families extent
    ``size``. The index map must be onto ``range(size)``. The preimage puts
    each ``y_i`` at the least ``j`` in its fiber.
    """

    op = "fiber_sum"

    def __init__(self, source: ModuleShape, target: ModuleShape, index_map: Sequence[int]) -> None:
        self.index_map = tuple(int(i) for i in index_map)
        if [f.fid for f in source.families] != [f.fid for f in target.families]:
            raise HomTypeError("fiber_sum source and target must have the same families")
        size = None
        for fs, ft in zip(source.families, target.families):
            if fs.atom != ft.atom:
                raise HomTypeError(f"fiber_sum family {fs.fid!r} changes atom")
            if fs.extent != len(self.index_map):
                raise HomTypeError(f"fiber_sum source family {fs.fid!r} has extent {fs.extent}, "
                                   f"expected {len(self.index_map)}")
            if ft.extent is None or (size is not None and ft.extent != size):
                raise HomTypeError("fiber_sum target families need one common finite extent")
            size = ft.extent
        if size is None:
            size = max(self.index_map, default=-1) + 1
        if any(not 0 <= i < size for i in self.index_map):
            raise HomTypeError("fiber_sum index map leaves the target range")
        if set(self.index_map) != set(range(size)):
            raise HomTypeError("fiber_sum index map is not surjective")
        self.source, self.target = source, target
        self.size = size
        self.section = tuple(self.index_map.index(i) for i in range(size))

    def _apply(self, x: Element) -> Element:
        out: dict[Coord, Value] = {}
        for (fid, j), v in x.items():
            c = (fid, self.index_map[j])
            atom = self.target.family(fid).atom
            w = atom.add(out.get(c, 0), v)
            if w != 0:
                out[c] = w
            else:
                out.pop(c, None)
        return Element(self.target, out, _trusted=True)

    def _preimage(self, y: Element) -> Element:
        return Element(self.source, {(fid, self.section[i]): v for (fid, i), v in y.items()}, _trusted=True)

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "index_map": list(self.index_map),
        }


# ---------------------------------------------------------------------------
# assembling maps


class SumOfHoms(Hom):
    """Pointwise sum of maps with a common source and target."""

    op = "sum"

    def __init__(self, terms: Sequence[Hom]) -> None:
        if not terms:
            raise HomTypeError("sum of no maps needs explicit shapes; use Zero")
        self.terms = tuple(terms)
        self.source, self.target = terms[0].source, terms[0].target
        for i, t in enumerate(self.terms):
            if t.source != self.source or t.target != self.target:
                raise HomTypeError(f"summand {i} has a different source or target")

    def _apply(self, x: Element) -> Element:
        out = self.target.zero()
        for t in self.terms:
            out = out + t._apply(x)
        return out

    def _preimage(self, y: Element) -> Element:
        # summands in order; a summand's preimage counts only if it works for the whole sum
        for t in self.terms:
            try:
                x = t._preimage(y)
            except NoPreimageFound:
                continue
            if self._apply(x) == y:
                return x
        raise NoPreimageFound("no summand's preimage works for the sum")

    def to_json(self) -> dict:
        return {"op": self.op, "terms": [t.to_json() for t in self.terms]}


class DirectSumOfHoms(Hom):
    """Block-diagonal map; sources and targets are concatenated in order."""

    op = "direct_sum"

    def __init__(self, parts: Sequence[Hom]) -> None:
        self.parts = tuple(parts)
        try:
            self.source = ModuleShape(tuple(f for p in self.parts for f in p.source.families))
            self.target = ModuleShape(tuple(f for p in self.parts for f in p.target.families))
        except ValueError as exc:
            raise HomTypeError(f"direct_sum parts share family ids: {exc}") from None
        self._owner = {f.fid: i for i, p in enumerate(self.parts) for f in p.source.families}
        self._towner = {f.fid: i for i, p in enumerate(self.parts) for f in p.target.families}

    def _split(self, x: Element, owner: dict, shapes: list[ModuleShape]) -> list[Element]:
        buckets: list[dict] = [{} for _ in self.parts]
        for c, v in x.items():
            buckets[owner[c[0]]][c] = v
        return [Element(s, b, _trusted=True) for s, b in zip(shapes, buckets)]

    def _merge(self, pieces: Iterable[Element], shape: ModuleShape) -> Element:
        out = {}
        for piece in pieces:
            out.update(dict(piece.items()))
        return Element(shape, out, _trusted=True)

    def _apply(self, x: Element) -> Element:
        pieces = self._split(x, self._owner, [p.source for p in self.parts])
        return self._merge((p._apply(e) for p, e in zip(self.parts, pieces)), self.target)

    def _preimage(self, y: Element) -> Element:
        pieces = self._split(y, self._towner, [p.target for p in self.parts])
        return self._merge((p._preimage(e) for p, e in zip(self.parts, pieces)), self.source)

    def to_json(self) -> dict:
        return {"op": self.op, "parts": [p.to_json() for p in self.parts]}


class Compose(Hom):
    """``outer`` after ``inner``."""

    op = "compose"

    def __init__(self, outer: Hom, inner: Hom) -> None:
        if inner.target != outer.source:
            raise HomTypeError(f"cannot compose: {inner.target} != {outer.source}")
        self.outer, self.inner = outer, inner
        self.source, self.target = inner.source, outer.target

    def _apply(self, x: Element) -> Element:
        return self.outer._apply(self.inner._apply(x))

    def _preimage(self, y: Element) -> Element:
        return self.inner._preimage(self.outer._preimage(y))

    def to_json(self) -> dict:
        return {"op": self.op, "outer": self.outer.to_json(), "inner": self.inner.to_json()}


def compose(g: Hom, h: Hom) -> Hom:
    """``g`` after ``h``."""
    return Compose(g, h)


def compose_all(maps: Sequence[Hom], shape: ModuleShape) -> Hom:
    """``maps[0]`` after ``maps[1]`` after ...; the identity on ``shape`` if empty."""
    if not maps:
        return Identity(shape)
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = Compose(m, out)
    return out


def direct_sum_of_homs(parts: Sequence[Hom]) -> Hom:
    if not parts:
        return Zero(ModuleShape(), ModuleShape())
    return DirectSumOfHoms(parts)


def sum_of_homs(terms: Sequence[Hom]) -> Hom:
    return SumOfHoms(terms)


# ---------------------------------------------------------------------------
# lifting and extension


def _free_rank_one(shape: ModuleShape) -> Coord:
    if len(shape.families) != 1 or shape.families[0].atom != ZZ or shape.families[0].extent != 1:
        raise HomTypeError(f"expected a free rank-1 source, got {shape}")
    return (shape.families[0].fid, 0)


def lift_through_surjection(f0: Hom, phi: Hom) -> GeneratorImage:
    """A map ``g`` with ``phi o g == f0``, for ``f0`` out of a free f.g. group."""
    for f in f0.source.families:
        if f.atom != ZZ or f.extent is None:
            raise HomTypeError(f"lift needs a free finitely generated source, got {f.fid!r}: {f.atom}")
    if f0.target != phi.target:
        raise HomTypeError("f0 and phi must share a target")
    images = {}
    for gen in f0.source.coordinates():
        images[gen] = preimage(phi, f0(Element(f0.source, {gen: 1})))
    return GeneratorImage(f0.source, phi.source, images)


def extend_into_divisible(h: Hom, m: int) -> GeneratorImage:
    """Extend ``h`` from a rank-1 lattice to the one ``m`` times finer.

    The new generator ``g'`` satisfies ``m * g' = g``, and goes to the
    canonical ``h(g) / m``. Needs divisible target atoms.
    """
    gen = _free_rank_one(h.source)
    if m < 1:
        raise ValueError("scale index must be >= 1")
    for f in h.target.families:
        if not f.atom.divisible:
            raise HomTypeError(f"target family {f.fid!r} ({f.atom}) is not divisible")
    value = h(Element(h.source, {gen: 1}))
    return GeneratorImage(h.source, h.target, {gen: value.divide(m)})


# ---------------------------------------------------------------------------
# JSON


def hom_from_json(data: object, path: str = "$") -> Hom:
    """Rebuild a combinator tree, reporting the first ill-typed node by path."""
    if not isinstance(data, dict) or "op" not in data:
        raise HomTypeError("expected an object with an 'op' field", path)
    op = data["op"]

    def shape(key: str) -> ModuleShape:
        try:
            return ModuleShape.from_json(data[key])
        except (KeyError, ValueError, TypeError) as exc:
            raise HomTypeError(f"bad shape in {key!r}: {exc}", f"{path}.{key}") from None

    try:
        if op == "zero":
            return Zero(shape("source"), shape("target"))
        if op == "identity":
            return Identity(shape("shape"))
        if op == "route":
            blocks = [(b[0], int(b[1]), b[2], int(b[3]), None if b[4] == "omega" else int(b[4]))
                      for b in data["blocks"]]
            return CoordinateRoute(shape("source"), shape("target"), blocks)
        if op == "mult_by_rational":
            return MultByRational(shape("shape"), parse_rational(data["r"]))
        if op == "mult_by_int":
            return MultByInt(shape("shape"), int(data["n"]))
        if op == "reduce_q":
            return ReduceQ(shape("source"))
        if op == "embed_cyclic":
            return EmbedCyclic(shape("source"))
        if op == "pruefer_mult_pk":
            return PrueferMultPk(shape("shape"), int(data["p"]), int(data["k"]))
        if op == "generator_image":
            src, tgt = shape("source"), shape("target")
            images = {}
            for i, (fid, idx, img) in enumerate(data.get("images", [])):
                try:
                    images[(fid, int(idx))] = Element.from_json(img, tgt)
                except (KeyError, ValueError, TypeError, IndexError) as exc:
                    raise HomTypeError(str(exc), f"{path}.images[{i}]") from None
            return GeneratorImage(src, tgt, images)
        if op == "fiber_sum":
            return FiberSum(shape("source"), shape("target"), data["index_map"])
        if op == "sum":
            return SumOfHoms([hom_from_json(t, f"{path}.terms[{i}]") for i, t in enumerate(data["terms"])])
        if op == "direct_sum":
            return direct_sum_of_homs([hom_from_json(p, f"{path}.parts[{i}]")
                                       for i, p in enumerate(data["parts"])])
        if op == "compose":
            return Compose(hom_from_json(data["outer"], f"{path}.outer"),
                           hom_from_json(data["inner"], f"{path}.inner"))
    except HomTypeError as exc:
        if exc.path == "$" and path != "$":
            raise HomTypeError(str(exc).split(": ", 1)[-1], path) from None
        raise
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise HomTypeError(f"{op}: {exc}", path) from None
    raise HomTypeError(f"unknown op {op!r}", path)
