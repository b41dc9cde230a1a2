"""Factoring maps ``Z -> M_0`` through a ladder of lifts and extensions.

Given an inverse chain ``... -> M_2 -> M_1 -> M_0`` of divisible groups with
surjective connecting maps, and a direct chain of rank-1 lattices
``c_0 Z <= c_1 Z <= ...`` inside Q, each step lifts ``f_i`` through
``phi_i`` and then extends it to the finer lattice, so that

    phi_i o f_{i+1} o (inclusion) == f_i.

Running the ladder on ``1 -> x`` over the lattices ``p_1^-i ... p_i^-i Z``
gives a certificate that ``x`` is divisible through the whole chain.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from invlim.atoms import QQ, ZZ, Pruefer, QmodZ, is_prime
from invlim.homs import (
    GeneratorImage,
    Hom,
    HomTypeError,
    Identity,
    MultByInt,
    MultByRational,
    NoPreimageFound,
    PrueferMultPk,
    apply,
    compose,
    compose_all,
    direct_sum_of_homs,
    extend_into_divisible,
    lift_through_surjection,
    preimage,
)
from invlim.sums import Element, Family, ModuleShape, random_element

GEN_SHAPE = ModuleShape((Family("g", ZZ, 1),))
GEN = ("g", 0)


class LadderError(NoPreimageFound):
    def __init__(self, stage: int, cause: Exception) -> None:
        self.stage = stage
        super().__init__(f"ladder failed at stage {stage}: {cause}")


def generator() -> Element:
    return Element(GEN_SHAPE, {GEN: 1})


def map_from_value(target: ModuleShape, x: Element) -> GeneratorImage:
    """The map ``Z -> target`` sending 1 to ``x``."""
    return GeneratorImage(GEN_SHAPE, target, {GEN: x})


@dataclass(frozen=True)
class DirectChain:
    """Lattices ``c_i Z`` in Q with ``c_i / c_{i+1}`` a positive integer."""

    generators: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        gens = tuple(Fraction(c) for c in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("a direct chain needs at least one lattice")
        if any(c <= 0 for c in gens):
            raise ValueError("lattice generators must be positive")
        for a, b in zip(gens, gens[1:]):
            q = a / b
            if q.denominator != 1:
                raise ValueError(f"{a}Z is not contained in {b}Z")

    @classmethod
    def from_multipliers(cls, ms: Sequence[int], c0: Fraction | int = 1) -> DirectChain:
        gens = [Fraction(c0)]
        for m in ms:
            gens.append(gens[-1] / m)
        return cls(tuple(gens))

    @property
    def length(self) -> int:
        return len(self.generators) - 1

    @property
    def multipliers(self) -> tuple[int, ...]:
        g = self.generators
        return tuple((g[i] / g[i + 1]).numerator for i in range(len(g) - 1))

    def index(self, i: int) -> int:
        """``c_0 / c_i``: the image of the first generator in ``c_i Z``."""
        return (self.generators[0] / self.generators[i]).numerator


@dataclass(frozen=True)
class InverseChain:
    """Divisible groups ``M_0 .. M_k`` with maps ``maps[i]: M_{i+1} -> M_i``.

    Each map must pass a sampled surjectivity-witness check on construction.
    """

    stages: tuple[ModuleShape, ...]
    maps: tuple[Hom, ...]
    witness_samples: int = field(default=20, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) != len(self.stages) - 1:
            raise ValueError("need one map per consecutive pair of stages")
        for i, s in enumerate(self.stages):
            for f in s.families:
                if not f.atom.divisible:
                    raise ValueError(f"stage {i} family {f.fid!r} ({f.atom}) is not divisible")
        rng = random.Random(0)
        for i, phi in enumerate(self.maps):
            if phi.source != self.stages[i + 1] or phi.target != self.stages[i]:
                raise HomTypeError(f"map {i} does not go from stage {i + 1} to stage {i}")
            for _ in range(self.witness_samples):
                y = random_element(phi.target, rng, 3, 30)
                try:
                    preimage(phi, y)
                except NoPreimageFound as exc:
                    raise LadderError(i, exc) from None

    @property
    def length(self) -> int:
        return len(self.maps)

    @classmethod
    def constant(cls, shape: ModuleShape, phi: Hom, k: int) -> InverseChain:
        return cls((shape,) * (k + 1), (phi,) * k)

    def down(self, i: int) -> Hom:
        """``phi_{0i}: M_i -> M_0``."""
        return compose_all(list(self.maps[:i]), self.stages[0])


@dataclass(frozen=True)
class CompositeCheck:
    stage: int
    multiplier: int
    ok: bool

    def to_json(self) -> dict:
        return {"stage": self.stage, "multiplier": str(self.multiplier), "ok": self.ok}


@dataclass(frozen=True)
class LadderResult:
    maps: tuple[Hom, ...]
    chain: DirectChain
    checks: tuple[CompositeCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def images(self) -> list[Element]:
        return [apply(f, generator()) for f in self.maps]

    def to_json(self) -> dict:
        from invlim.exact_arith import format_rational

        return {
            "generators": [format_rational(c) for c in self.chain.generators[: len(self.maps)]],
            "images": [e.to_json(with_shape=False) for e in self.images()],
            "checks": [c.to_json() for c in self.checks],
            "ok": self.ok,
        }


def ladder_step(f_i: Hom, phi_i: Hom, m_i: int) -> Hom:
    """Lift ``f_i`` through ``phi_i``, then extend to the lattice ``m_i`` times finer."""
    g = lift_through_surjection(f_i, phi_i)
    f_next = extend_into_divisible(g, m_i)
    incl = MultByInt(GEN_SHAPE, m_i)
    if apply(compose(phi_i, compose(f_next, incl)), generator()) != apply(f_i, generator()):
        raise ArithmeticError("ladder step failed its own factorization check")
    return f_next


def run_ladder(f0: Hom, inv: InverseChain, direct: DirectChain, k: int,
               samples: int = 20, seed: int = 0) -> LadderResult:
    """``f_0 .. f_k`` with ``phi_{0i} o f_i o psi_{i0} == f_0`` checked for every ``i``."""
    if k > min(inv.length, direct.length):
        raise ValueError(f"k={k} exceeds the chain lengths")
    if f0.source != GEN_SHAPE or f0.target != inv.stages[0]:
        raise HomTypeError("f_0 must map the rank-1 generator shape into M_0")
    maps = [f0]
    ms = direct.multipliers
    for i in range(k):
        try:
            maps.append(ladder_step(maps[-1], inv.maps[i], ms[i]))
        except NoPreimageFound as exc:
            raise LadderError(i, exc) from None

    rng = random.Random(seed)
    mults = [1] + [rng.randint(-1000, 1000) for _ in range(samples)]
    checks = []
    for i, f in enumerate(maps):
        composite = compose(inv.down(i), compose(f, MultByInt(GEN_SHAPE, direct.index(i))))
        for n in mults:
            x = Element(GEN_SHAPE, {GEN: n})
            checks.append(CompositeCheck(i, n, apply(composite, x) == apply(f0, x)))
    return LadderResult(tuple(maps), direct, tuple(checks))


def big_div_chain(primes: Sequence[int], k: int) -> DirectChain:
    """Lattices ``Z <= p_1^-1 Z <= p_1^-2 p_2^-2 Z <= ... <= p_1^-i ... p_i^-i Z``.

    A finite prime list is recycled cyclically (``p_j = primes[(j-1) % len]``).
    """
    if not primes:
        raise ValueError("need at least one prime")
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    if k < 0:
        raise ValueError("k must be >= 0")
    gens = [Fraction(1)]
    for i in range(1, k + 1):
        prod = 1
        for j in range(1, i + 1):
            prod *= primes[(j - 1) % len(primes)] ** i
        gens.append(Fraction(1, prod))
    return DirectChain(tuple(gens))


@dataclass(frozen=True)
class Certificate:
    c: int
    y: Element
    x: Element
    check: bool
    ladder: LadderResult

    def to_json(self) -> dict:
        return {"c": str(self.c), "y": self.y.to_json(with_shape=False),
                "x": self.x.to_json(with_shape=False), "check": self.check}


def divisibility_certificate(x: Element, inv: InverseChain, primes: Sequence[int], k: int) -> Certificate:
    """``(c, y)`` with ``y`` in ``M_k`` and ``c * phi_{0k}(y) == x``."""
    chain = big_div_chain(primes, k)
    result = run_ladder(map_from_value(inv.stages[0], x), inv, chain, k, samples=0)
    c = (chain.generators[0] / chain.generators[k]).numerator
    y = apply(result.maps[k], generator())
    check = apply(inv.down(k), y).scale(c) == x
    return Certificate(c, y, x, check, result)


# ---------------------------------------------------------------------------
# random configurations

LADDER_SHAPES = {
    "Q": ModuleShape((Family("a", QQ, 1),)),
    "Q/Z": ModuleShape((Family("a", QmodZ, 1),)),
    "Z(2^inf)+Q/Z": ModuleShape((Family("a", Pruefer(2), 1), Family("b", QmodZ, 1))),
    "Q+Z(3^inf)": ModuleShape((Family("a", QQ, 1), Family("b", Pruefer(3), 1))),
}


def random_surjection(shape: ModuleShape, rng: random.Random) -> Hom:
    """A random surjective endomorphism built from structural combinators, family by family."""
    parts: list[Hom] = []
    for fam in shape.families:
        one = ModuleShape((fam,))
        n = rng.choice([1, 2, 3, 4, 5, 6, -1, -2])
        choice = rng.randrange(3)
        if choice == 0:
            parts.append(Identity(one))
        elif fam.atom == QQ and choice == 1:
            parts.append(MultByRational(one, Fraction(n, rng.randint(1, 5))))
        elif fam.atom.kind == "pruefer" and choice == 1:
            parts.append(PrueferMultPk(one, fam.atom.modulus, rng.randint(0, 2)))
        else:
            parts.append(MultByInt(one, n))
    return direct_sum_of_homs(parts)


def random_inverse_chain(rng: random.Random, k: int, shape_name: str | None = None) -> InverseChain:
    name = shape_name or rng.choice(sorted(LADDER_SHAPES))
    shape = LADDER_SHAPES[name]
    maps = tuple(random_surjection(shape, rng) for _ in range(k))
    return InverseChain((shape,) * (k + 1), maps)
