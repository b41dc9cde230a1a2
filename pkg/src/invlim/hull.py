"""Injective presentations ``0 -> A -> M -> N`` of finitely generated groups.

``A`` is given as generators modulo the column span of an integer matrix.
After Smith normal form ``A = Z^r + sum Z/d_i``; each ``Z/d_i`` splits by
CRT into prime-power parts ``Z/p^k``, the part for ``p^k`` being the
subgroup generated by ``d_i / p^k``. Then

* ``M = Q^r + sum Z(p^inf)``, with ``e`` sending free generators to 1 and
  the ``Z/p^k`` generator to ``[1/p^k]``;
* ``N = (Q/Z)^r + sum Z(p^inf)``, with ``f`` reducing mod Z on the free part
  and multiplying by ``p^k`` on each Pruefer part,

so ``ker f = im e`` and both ``M`` and ``N`` are divisible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from invlim.atoms import QQ, ZZ, Cyclic, Pruefer, QmodZ, factorize
from invlim.exact_arith import IntMatrix, snf
from invlim.homs import GeneratorImage, Hom, PrueferMultPk, ReduceQ, apply, direct_sum_of_homs
from invlim.sums import Element, Family, ModuleShape, ShapeMismatch

FREE = "free"


@dataclass(frozen=True)
class Decomposition:
    rank: int
    invariant_factors: tuple[int, ...]
    prime_power_parts: tuple[tuple[int, int, int], ...]  # (p, k, index into invariant_factors)
    to_canonical: IntMatrix
    from_canonical: IntMatrix
    # canonical coordinate carrying each invariant factor, and the free ones
    torsion_coords: tuple[int, ...] = field(default=())
    free_coords: tuple[int, ...] = field(default=())

    @property
    def order(self) -> int | None:
        """|A|, or None when A is infinite."""
        if self.rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def exponent(self) -> int | None:
        if self.rank:
            return None
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "invariant_factors": [str(d) for d in self.invariant_factors],
            "prime_power_parts": [[str(p), k, i] for p, k, i in self.prime_power_parts],
            "to_canonical": self.to_canonical.to_json(),
            "from_canonical": self.from_canonical.to_json(),
        }


def decompose(presentation: IntMatrix, ngens: int) -> Decomposition:
    """Invariant factors and prime-power parts of ``Z^ngens / colspan(presentation)``."""
    if presentation.rows != ngens:
        raise ValueError(f"presentation has {presentation.rows} rows but ngens={ngens}")
    res = snf(presentation)
    diag = res.diagonal
    factors, tcoords, fcoords = [], [], []
    for j in range(ngens):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            fcoords.append(j)
        elif d >= 2:
            factors.append(d)
            tcoords.append(j)
    parts = [(p, k, i) for i, d in enumerate(factors) for p, k in factorize(d)]
    parts.sort(key=lambda t: (t[0], t[2]))
    return Decomposition(
        rank=len(fcoords),
        invariant_factors=tuple(factors),
        prime_power_parts=tuple(parts),
        to_canonical=res.u,
        from_canonical=res.u.inverse_unimodular(),
        torsion_coords=tuple(tcoords),
        free_coords=tuple(fcoords),
    )


def _part_id(n: int) -> str:
    return f"t{n}"


@dataclass(frozen=True)
class InjectivePresentation:
    a_shape: ModuleShape
    m_shape: ModuleShape
    n_shape: ModuleShape
    e: Hom
    f: Hom
    decomposition: Decomposition
    presentation: IntMatrix
    ngens: int

    # -- A in terms of the original generators ------------------------------

    def a_element(self, vec: Sequence[int]) -> Element:
        """The element of ``a_shape`` named by integer coordinates on the original generators."""
        dec = self.decomposition
        canon = dec.to_canonical.apply(tuple(vec))
        coords = {}
        for i, j in enumerate(dec.free_coords):
            coords[(FREE, i)] = canon[j]
        for n, (p, k, fi) in enumerate(dec.prime_power_parts):
            q = p**k
            cofactor = dec.invariant_factors[fi] // q
            coords[(_part_id(n), 0)] = canon[dec.torsion_coords[fi]] * pow(cofactor, -1, q)
        return Element(self.a_shape, coords)

    def generators_of(self, a: Element) -> tuple[int, ...]:
        """Original-generator coordinates of an ``a_shape`` element (torsion reduced)."""
        dec = self.decomposition
        canon = [0] * self.ngens
        for i, j in enumerate(dec.free_coords):
            canon[j] = a[(FREE, i)]
        for fi, j in enumerate(dec.torsion_coords):
            d = dec.invariant_factors[fi]
            canon[j] = sum(a[(_part_id(n), 0)] * (d // p**k)
                           for n, (p, k, owner) in enumerate(dec.prime_power_parts) if owner == fi) % d
        return dec.from_canonical.apply(tuple(canon))

    def to_json(self) -> dict:
        return {
            "ngens": self.ngens,
            "presentation": self.presentation.to_json(),
            "decomposition": self.decomposition.to_json(),
            "a_shape": self.a_shape.to_json(),
            "m_shape": self.m_shape.to_json(),
            "n_shape": self.n_shape.to_json(),
            "e": self.e.to_json(),
            "f": self.f.to_json(),
        }


def build_injective_presentation(presentation: IntMatrix, ngens: int) -> InjectivePresentation:
    dec = decompose(presentation, ngens)
    a_fams, m_fams, n_fams = [], [], []
    if dec.rank:
        a_fams.append(Family(FREE, ZZ, dec.rank))
        m_fams.append(Family(FREE, QQ, dec.rank))
        n_fams.append(Family(FREE, QmodZ, dec.rank))
    for n, (p, k, _) in enumerate(dec.prime_power_parts):
        a_fams.append(Family(_part_id(n), Cyclic(p**k), 1))
        m_fams.append(Family(_part_id(n), Pruefer(p), 1))
        n_fams.append(Family(_part_id(n), Pruefer(p), 1))
    a_shape, m_shape, n_shape = (ModuleShape(tuple(x)) for x in (a_fams, m_fams, n_fams))

    images = {}
    for i in range(dec.rank):
        images[(FREE, i)] = Element(m_shape, {(FREE, i): Fraction(1)})
    for n, (p, k, _) in enumerate(dec.prime_power_parts):
        images[(_part_id(n), 0)] = Element(m_shape, {(_part_id(n), 0): Fraction(1, p**k)})
    e = GeneratorImage(a_shape, m_shape, images)

    parts: list[Hom] = []
    if dec.rank:
        parts.append(ReduceQ(ModuleShape((m_shape.family(FREE),))))
    for n, (p, k, _) in enumerate(dec.prime_power_parts):
        parts.append(PrueferMultPk(ModuleShape((m_shape.family(_part_id(n)),)), p, k))
    f = direct_sum_of_homs(parts)
    return InjectivePresentation(a_shape, m_shape, n_shape, e, f, dec, presentation, ngens)


def kernel_membership(pres: InjectivePresentation, x: Element) -> Element | None:
    """The ``a_shape`` element ``a`` with ``e(a) == x`` if ``f(x) == 0``, else None."""
    if x.shape != pres.m_shape:
        raise ShapeMismatch(f"{x.shape} is not the M shape {pres.m_shape}")
    if not apply(pres.f, x).is_zero():
        return None
    coords = {}
    for (fid, idx), v in x.items():
        if fid == FREE:
            coords[(fid, idx)] = v.numerator
        else:
            coords[(fid, idx)] = (v * pres.a_shape.family(fid).atom.modulus).numerator
    return Element(pres.a_shape, coords)


def presentation_from_json(data: object) -> tuple[IntMatrix, int]:
    """Accept ``{"ngens": n, "presentation": [[...]]}`` or a bare matrix."""
    if isinstance(data, list):
        mat = IntMatrix.from_json(data)
        return mat, mat.rows
    if not isinstance(data, dict):
        raise ValueError("presentation document must be an object or a matrix")
    if "ngens" not in data:
        if "presentation" not in data:
            raise ValueError("presentation document needs 'ngens' or 'presentation'")
        mat = IntMatrix.from_json(data["presentation"])
        return mat, mat.rows
    ngens = int(data["ngens"])
    rows = data.get("presentation")
    if rows is None or rows == []:
        return IntMatrix.zeros(ngens, 0), ngens
    mat = IntMatrix.from_json(rows)
    if mat.rows != ngens:
        raise ValueError(f"presentation has {mat.rows} rows but ngens={ngens}")
    return mat, ngens
