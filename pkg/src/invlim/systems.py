"""Inverse systems built from an injective presentation ``0 -> A -> M -> N``.

Four constructions live here:

* the intersection system: ``P = M + N + N + ...`` (finite supports) with
  submodules ``P_D = {x : x_i = f(x_0) for i in D}`` over finite ``D``;
* fiber-sum systems over finite chains of set surjections, and the support
  bookkeeping of threads through them;
* surjective stages ``P_S = {x in M + N^S : sum_i x_i = f(x_0)}``;
* the countable system ``M_n = Q^n + (Q/Z)^omega`` whose limit is not
  divisible, on eventually-constant sequences.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from invlim.atoms import QQ, Atom, QmodZ
from invlim.homs import (
    CoordinateRoute,
    FiberSum,
    Hom,
    Identity,
    ReduceQ,
    apply,
    compose,
    direct_sum_of_homs,
    preimage,
)
from invlim.hull import InjectivePresentation, kernel_membership
from invlim.sums import Element, Family, ModuleShape, ShapeMismatch, direct_sum, power

M_PREFIX = "M/"
N_PREFIX = "N/"


class PreconditionError(ValueError):
    pass


def _n_family_index(n_shape: ModuleShape) -> dict[str, tuple[str, int]]:
    """Map flattened power-family ids back to ``(n_fid, j)``."""
    return {f"{N_PREFIX}{fid}[{j}]": (fid, j) for fid, j in n_shape.coordinates()}


def _as_n_shape(n: Atom | ModuleShape) -> ModuleShape:
    if isinstance(n, Atom):
        return ModuleShape((Family("x", n, 1),))
    return n


# ---------------------------------------------------------------------------
# the intersection system


@dataclass(frozen=True)
class SubmodSystem:
    """``P`` = M at index 0 plus a copy of N at every index ``i >= 1``.

    Copy ``i`` of N sits at position ``i - 1`` of the omega families.
    """

    pres: InjectivePresentation
    p_shape: ModuleShape = field(init=False)

    def __post_init__(self) -> None:
        shape = ModuleShape(direct_sum((M_PREFIX, self.pres.m_shape)).families
                            + power(self.pres.n_shape, None, N_PREFIX).families)
        object.__setattr__(self, "p_shape", shape)
        object.__setattr__(self, "_n_of", _n_family_index(self.pres.n_shape))
        object.__setattr__(self, "_fx_cache", {})

    def _check(self, x: Element) -> None:
        if x.shape != self.p_shape:
            raise ShapeMismatch(f"{x.shape} is not the P shape")

    def m_part(self, x: Element) -> Element:
        k = len(M_PREFIX)
        return Element(self.pres.m_shape, {(fid[k:], i): v for (fid, i), v in x.items()
                                           if fid.startswith(M_PREFIX)}, _trusted=True)

    def n_components(self, x: Element) -> dict[int, dict[tuple[str, int], object]]:
        """Nonzero N-coordinates grouped by index ``i >= 1``."""
        out: dict[int, dict] = {}
        n_of = self._n_of  # type: ignore[attr-defined]
        for (fid, pos), v in x.items():
            if fid in n_of:
                out.setdefault(pos + 1, {})[n_of[fid]] = v
        return out

    def component(self, x: Element, i: int) -> Element:
        self._check(x)
        if i == 0:
            return self.m_part(x)
        return Element(self.pres.n_shape, self.n_components(x).get(i, {}), _trusted=True)

    def assemble(self, parts: Mapping[int, Element]) -> Element:
        coords = {}
        for i, e in parts.items():
            if i == 0:
                if e.shape != self.pres.m_shape:
                    raise ShapeMismatch("index 0 takes an element of M")
                coords.update({(M_PREFIX + fid, j): v for (fid, j), v in e.items()})
            else:
                if i < 0 or e.shape != self.pres.n_shape:
                    raise ShapeMismatch(f"index {i} takes an element of N")
                coords.update({(f"{N_PREFIX}{fid}[{j}]", i - 1): v for (fid, j), v in e.items()})
        return Element(self.p_shape, coords, _trusted=True)

    def support_indices(self, x: Element) -> list[int]:
        idx = set(self.n_components(x))
        if not self.m_part(x).is_zero():
            idx.add(0)
        return sorted(idx)

    def f_of_x0(self, x: Element) -> dict:
        x0 = self.m_part(x)
        cache = self._fx_cache  # type: ignore[attr-defined]
        fx = cache.get(x0)
        if fx is None:
            fx = dict(apply(self.pres.f, x0).items())
            if len(cache) > 4096:
                cache.clear()
            cache[x0] = fx
        return fx


def _check_d(d: Iterable[int]) -> frozenset[int]:
    d = frozenset(d)
    if any(not isinstance(i, int) or i < 1 for i in d):
        raise ValueError("D must be a finite set of indices >= 1")
    return d


def pD_contains(sys: SubmodSystem, d: Iterable[int], x: Element) -> bool:
    """Whether ``x_i == f(x_0)`` for every ``i`` in ``d``."""
    sys._check(x)
    d = _check_d(d)
    fx = sys.f_of_x0(x)
    comps = sys.n_components(x)
    return all(comps.get(i, {}) == fx for i in d)


def intersection_member(sys: SubmodSystem, x: Element) -> Element | None:
    """The A-element ``x`` corresponds to if it lies in every ``P_D``, else None.

    A finite-support ``x`` lies in all ``P_D`` exactly when its N-part is zero
    and ``f(x_0) == 0``: any index past the support forces ``f(x_0) = 0``.
    """
    sys._check(x)
    if sys.n_components(x):
        return None
    return kernel_membership(sys.pres, sys.m_part(x))


def pD_isomorphism(sys: SubmodSystem, d: Iterable[int], direction: str, x: Element) -> Element:
    """``P_D`` versus the elements supported off ``D``: drop or rebuild the D-coordinates."""
    sys._check(x)
    d = _check_d(d)
    if direction == "drop":
        if not pD_contains(sys, d, x):
            raise PreconditionError("element is not in P_D")
        n_of = sys._n_of  # type: ignore[attr-defined]
        return x.restrict(lambda fid, pos: fid not in n_of or (pos + 1) not in d)
    if direction == "reinsert":
        comps = sys.n_components(x)
        if any(i in comps for i in d):
            raise PreconditionError("element is not supported off D")
        fx = Element(sys.pres.n_shape, sys.f_of_x0(x), _trusted=True)
        return x + sys.assemble({i: fx for i in d})
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# fiber-sum systems over chains of finite sets


@dataclass(frozen=True)
class SetChain:
    """Finite sets ``S_0, ..., S_L`` with surjections ``S_{k+1} -> S_k``."""

    stages: tuple[tuple[int, ...], ...]
    maps: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self) -> None:
        stages = tuple(tuple(sorted(set(s))) for s in self.stages)
        maps = tuple(tuple(sorted(dict(m).items())) for m in self.maps)
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "maps", maps)
        if not stages:
            raise ValueError("a set chain needs at least one stage")
        if any(not s for s in stages):
            raise ValueError("stages must be nonempty")
        if len(maps) != len(stages) - 1:
            raise ValueError("need one map per consecutive pair of stages")
        for k, m in enumerate(maps):
            md = dict(m)
            if set(md) != set(stages[k + 1]):
                raise ValueError(f"map {k} is not defined on exactly S_{k + 1}")
            if not set(md.values()) <= set(stages[k]):
                raise ValueError(f"map {k} leaves S_{k}")
            if set(md.values()) != set(stages[k]):
                raise ValueError(f"map {k} is not surjective")

    @classmethod
    def build(cls, stages: Sequence[Iterable[int]], maps: Sequence[Mapping[int, int]]) -> SetChain:
        return cls(tuple(tuple(s) for s in stages), tuple(tuple(dict(m).items()) for m in maps))

    @property
    def length(self) -> int:
        return len(self.stages) - 1

    def map(self, k: int) -> dict[int, int]:
        """The surjection ``S_{k+1} -> S_k``."""
        return dict(self.maps[k])

    def composite(self, k: int, l: int) -> dict[int, int]:
        """The set map ``S_l -> S_k`` for ``k <= l``."""
        out = {s: s for s in self.stages[l]}
        for step in range(l - 1, k - 1, -1):
            m = self.map(step)
            out = {s: m[t] for s, t in out.items()}
        return out

    def to_json(self) -> dict:
        return {"stages": [list(s) for s in self.stages],
                "maps": [[[a, b] for a, b in m] for m in self.maps]}

    @classmethod
    def from_json(cls, data: dict) -> SetChain:
        return cls.build(data["stages"], [dict((int(a), int(b)) for a, b in m) for m in data["maps"]])


def random_set_chain(rng: random.Random, length: int, max_size: int) -> SetChain:
    """Random chain of ``length + 1`` stages with nondecreasing sizes ``<= max_size``."""
    sizes = sorted(rng.randint(1, max_size) for _ in range(length + 1))
    stages = [tuple(range(1, n + 1)) for n in sizes]
    maps = []
    for k in range(length):
        lower, upper = stages[k], list(stages[k + 1])
        rng.shuffle(upper)
        m = {upper[i]: lower[i] for i in range(len(lower))}
        for s in upper[len(lower):]:
            m[s] = rng.choice(lower)
        maps.append(m)
    return SetChain.build(stages, maps)


def stage_shape(chain: SetChain, k: int, n: Atom | ModuleShape) -> ModuleShape:
    """``N`` summed over ``S_k``; label ``s`` sits at its position in sorted ``S_k``."""
    return power(_as_n_shape(n), len(chain.stages[k]), N_PREFIX)


def fiber_sum_map(chain: SetChain, k: int, n: Atom | ModuleShape) -> FiberSum:
    """``sum over S_{k+1} of N -> sum over S_k of N``, summing along fibers."""
    if not 0 <= k < chain.length:
        raise IndexError(f"stage {k} has no map (chain length {chain.length})")
    m = chain.map(k)
    pos = {s: i for i, s in enumerate(chain.stages[k])}
    index_map = [pos[m[s]] for s in chain.stages[k + 1]]
    return FiberSum(stage_shape(chain, k + 1, n), stage_shape(chain, k, n), index_map)


@dataclass(frozen=True)
class ThreadPrefix:
    """One element per stage, each the fiber-sum image of the next."""

    chain: SetChain
    n_shape: ModuleShape
    elements: tuple[Element, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) != len(self.chain.stages):
            raise ValueError("need one element per stage")
        for k, e in enumerate(self.elements):
            if e.shape != stage_shape(self.chain, k, self.n_shape):
                raise ShapeMismatch(f"element {k} has the wrong shape")
        for k in range(self.chain.length):
            if fiber_sum_map(self.chain, k, self.n_shape)(self.elements[k + 1]) != self.elements[k]:
                raise ValueError(f"thread is not compatible between stages {k} and {k + 1}")

    def support(self, k: int) -> frozenset[int]:
        """Labels of ``S_k`` where the stage-k element is nonzero."""
        labels = self.chain.stages[k]
        return frozenset(labels[pos] for (_, pos), _ in self.elements[k].items())


def push_down(chain: SetChain, n: Atom | ModuleShape, top: Element) -> ThreadPrefix:
    """The thread determined by an element of the last stage."""
    elems = [top]
    for k in range(chain.length - 1, -1, -1):
        elems.append(fiber_sum_map(chain, k, n)(elems[-1]))
    return ThreadPrefix(chain, _as_n_shape(n), tuple(reversed(elems)))


@dataclass(frozen=True)
class SupportReport:
    sizes: tuple[int, ...]
    monotone: bool
    bijection_checks: tuple[tuple[int, int, bool], ...]  # (k, l, verified)

    @property
    def ok(self) -> bool:
        return self.monotone and all(b for _, _, b in self.bijection_checks)

    def to_json(self) -> dict:
        return {"sizes": list(self.sizes), "monotone": self.monotone,
                "bijection_checks": [[k, l, b] for k, l, b in self.bijection_checks]}


def thread_support_analysis(thread: ThreadPrefix) -> SupportReport:
    """Support sizes along a thread, their monotonicity, and bijections where sizes tie."""
    supports = [thread.support(k) for k in range(len(thread.chain.stages))]
    sizes = tuple(len(t) for t in supports)
    monotone = all(sizes[k] <= sizes[l] for k in range(len(sizes)) for l in range(k, len(sizes)))
    checks = []
    for k, l in itertools.combinations(range(len(sizes)), 2):
        if sizes[k] != sizes[l] or sizes[k] == 0:
            continue
        fkl = thread.chain.composite(k, l)
        images = [fkl[s] for s in supports[l]]
        checks.append((k, l, len(set(images)) == len(images) and set(images) == supports[k]))
    return SupportReport(sizes, monotone, tuple(checks))


# ---------------------------------------------------------------------------
# surjective stages


@dataclass(frozen=True)
class OntoStage:
    """``P_S = {x in M + N^S : sum of the N-coordinates equals f(x_0)}``."""

    pres: InjectivePresentation
    s: tuple[int, ...]
    shape: ModuleShape = field(init=False)

    def __post_init__(self) -> None:
        s = tuple(sorted(set(self.s)))
        if not s:
            raise ValueError("S must be nonempty")
        object.__setattr__(self, "s", s)
        m_part = direct_sum((M_PREFIX, self.pres.m_shape))
        n_part = power(self.pres.n_shape, len(s), N_PREFIX)
        object.__setattr__(self, "m_part_shape", m_part)
        object.__setattr__(self, "n_part_shape", n_part)
        object.__setattr__(self, "shape", ModuleShape(m_part.families + n_part.families))
        object.__setattr__(self, "_n_of", _n_family_index(self.pres.n_shape))
        object.__setattr__(self, "_pos", {lab: i for i, lab in enumerate(s)})

    def _check(self, x: Element) -> None:
        if x.shape != self.shape:
            raise ShapeMismatch(f"{x.shape} is not the stage shape")

    def m_part(self, x: Element) -> Element:
        k = len(M_PREFIX)
        return Element(self.pres.m_shape, {(fid[k:], i): v for (fid, i), v in x.items()
                                           if fid.startswith(M_PREFIX)}, _trusted=True)

    def n_component(self, x: Element, label: int) -> Element:
        pos = self._pos[label]  # type: ignore[attr-defined]
        n_of = self._n_of  # type: ignore[attr-defined]
        return Element(self.pres.n_shape, {n_of[fid]: v for (fid, i), v in x.items()
                                           if fid in n_of and i == pos}, _trusted=True)

    def n_total(self, x: Element) -> Element:
        n_of = self._n_of  # type: ignore[attr-defined]
        return _sum_into(self.pres.n_shape, ((n_of[fid], v) for (fid, _), v in x.items() if fid in n_of))

    def assemble(self, x0: Element, comps: Mapping[int, Element]) -> Element:
        coords = {(M_PREFIX + fid, j): v for (fid, j), v in x0.items()}
        for label, e in comps.items():
            pos = self._pos[label]  # type: ignore[attr-defined]
            coords.update({(f"{N_PREFIX}{fid}[{j}]", pos): v for (fid, j), v in e.items()})
        return Element(self.shape, coords, _trusted=True)


def _sum_into(shape: ModuleShape, pairs: Iterable[tuple[tuple[str, int], object]]) -> Element:
    out: dict = {}
    for c, v in pairs:
        atom = shape.family(c[0]).atom
        w = atom.add(out.get(c, 0), v)
        if w != 0:
            out[c] = w
        else:
            out.pop(c, None)
    return Element(shape, out, _trusted=True)


def onto_stage_contains(stage: OntoStage, x: Element) -> bool:
    stage._check(x)
    return stage.n_total(x) == apply(stage.pres.f, stage.m_part(x))


def onto_stage_isomorphism(stage: OntoStage, i0: int, direction: str, x: Element) -> Element:
    """``P_S`` versus ``M + N^(S - {i0})``: drop or solve for the ``i0`` coordinate."""
    stage._check(x)
    if i0 not in stage.s:
        raise PreconditionError(f"{i0} is not in S")
    pos = stage._pos[i0]  # type: ignore[attr-defined]
    n_of = stage._n_of  # type: ignore[attr-defined]
    if direction == "drop":
        if not onto_stage_contains(stage, x):
            raise PreconditionError("element is not in P_S")
        return x.restrict(lambda fid, i: fid not in n_of or i != pos)
    if direction == "reinsert":
        if not stage.n_component(x, i0).is_zero():
            raise PreconditionError(f"element has a nonzero coordinate at {i0}")
        solved = apply(stage.pres.f, stage.m_part(x)) - stage.n_total(x)
        return x + stage.assemble(stage.pres.m_shape.zero(), {i0: solved})
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class OntoConnectingMap:
    """Identity on M, fiber sums on the N-coordinates, from ``P_beta`` to ``P_alpha``."""

    beta: OntoStage
    alpha: OntoStage
    hom: Hom

    def __call__(self, x: Element) -> Element:
        return apply(self.hom, x)

    def section(self, y: Element) -> Element:
        """Least-index preimage of ``y in P_alpha``; it lies in ``P_beta``."""
        if not onto_stage_contains(self.alpha, y):
            raise PreconditionError("target element is not in P_alpha")
        return preimage(self.hom, y)


def onto_connecting_map(beta: OntoStage, alpha: OntoStage, set_map: Mapping[int, int]) -> OntoConnectingMap:
    if beta.pres is not alpha.pres and beta.pres.m_shape != alpha.pres.m_shape:
        raise ValueError("stages come from different presentations")
    set_map = dict(set_map)
    if set(set_map) != set(beta.s) or set(set_map.values()) != set(alpha.s):
        raise ValueError("set map is not a surjection S_beta -> S_alpha")
    pos = {lab: i for i, lab in enumerate(alpha.s)}
    fs = FiberSum(beta.n_part_shape, alpha.n_part_shape,  # type: ignore[attr-defined]
                  [pos[set_map[s]] for s in beta.s])
    hom = direct_sum_of_homs([Identity(beta.m_part_shape), fs])  # type: ignore[attr-defined]
    return OntoConnectingMap(beta, alpha, hom)


# ---------------------------------------------------------------------------
# the countable system with non-divisible limit


@dataclass(frozen=True)
class EventuallyIntegerSeq:
    """Rationals ``head[0], head[1], ...`` followed by the integer ``tail`` forever.

    Trailing head entries equal to the tail are trimmed, so equal sequences
    compare equal.
    """

    head: tuple[Fraction, ...] = ()
    tail: int = 0

    def __post_init__(self) -> None:
        head = [Fraction(h) for h in self.head]
        while head and head[-1] == self.tail:
            head.pop()
        object.__setattr__(self, "head", tuple(head))
        object.__setattr__(self, "tail", int(self.tail))

    def __getitem__(self, i: int) -> Fraction:
        return self.head[i] if i < len(self.head) else Fraction(self.tail)

    def scale(self, k: int) -> EventuallyIntegerSeq:
        return EventuallyIntegerSeq(tuple(k * h for h in self.head), k * self.tail)

    def to_json(self) -> dict:
        from invlim.exact_arith import format_rational

        return {"head": [format_rational(h) for h in self.head], "tail": str(self.tail)}

    @classmethod
    def from_json(cls, data: dict) -> EventuallyIntegerSeq:
        from invlim.exact_arith import parse_rational

        return cls(tuple(parse_rational(h) for h in data.get("head", [])), int(data.get("tail", 0)))


def ex6_shape(n: int) -> ModuleShape:
    """``Q`` at coordinates ``0..n-1`` and ``Q/Z`` at ``i >= n`` (stored at ``i - n``)."""
    return ModuleShape((Family("Q", QQ, n), Family("QZ", QmodZ, None)))


def ex6_connecting_map(n: int, m: int) -> Hom:
    """``M_n -> M_m`` for ``m <= n``: reduce mod Z on coordinates ``m..n-1``."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    src, tgt = ex6_shape(n), ex6_shape(m)
    split = ModuleShape((Family("lo", QQ, m), Family("mid", QQ, n - m), Family("QZ", QmodZ, None)))
    into = CoordinateRoute(src, split, [("Q", 0, "lo", 0, m), ("Q", m, "mid", 0, n - m),
                                        ("QZ", 0, "QZ", 0, None)])
    lo, mid, qz = (ModuleShape((f,)) for f in split.families)
    middle = direct_sum_of_homs([Identity(lo), ReduceQ(mid), Identity(qz)])
    out = CoordinateRoute(middle.target, tgt, [("lo", 0, "Q", 0, m), ("mid", 0, "QZ", 0, n - m),
                                               ("QZ", 0, "QZ", n - m, None)])
    return compose(out, compose(middle, into))


def ex6_stage_project(seq: EventuallyIntegerSeq, n: int) -> Element:
    shape = ex6_shape(n)
    coords = {}
    for i in range(n):
        coords[("Q", i)] = seq[i]
    for i in range(n, len(seq.head)):
        coords[("QZ", i - n)] = QmodZ.canonical(seq[i])
    return Element(shape, coords)


@dataclass(frozen=True)
class Refutation:
    """``seq`` is not ``k``-divisible: every coordinate past the head is ``tail``, and ``k`` does not divide it."""

    k: int
    tail: int
    from_index: int

    def to_json(self) -> dict:
        return {"k": str(self.k), "tail": str(self.tail), "from_index": self.from_index,
                "witness": f"all coordinates i >= {self.from_index} equal {self.tail}, "
                           f"which is not divisible by {self.k}"}


def ex6_divisibility(seq: EventuallyIntegerSeq, k: int) -> EventuallyIntegerSeq | Refutation:
    """Divide by ``k`` in the limit, or say why no quotient exists."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if seq.tail % k:
        return Refutation(k, seq.tail, len(seq.head))
    return EventuallyIntegerSeq(tuple(h / k for h in seq.head), seq.tail // k)


def ex6_in_divisible_part(seq: EventuallyIntegerSeq, up_to: int = 12) -> bool:
    return all(isinstance(ex6_divisibility(seq, k), EventuallyIntegerSeq) for k in range(1, up_to + 1))


def ex6_divisible_preimage(x: Element, n: int) -> EventuallyIntegerSeq:
    """A tail-0 sequence (so divisible by everything) projecting to ``x`` in ``M_n``."""
    if x.shape != ex6_shape(n):
        raise ShapeMismatch("element is not in M_n")
    top = max([i + n for (fid, i), _ in x.items() if fid == "QZ"], default=n - 1)
    head = []
    for i in range(top + 1):
        head.append(Fraction(x[("Q", i)]) if i < n else Fraction(x[("QZ", i - n)]))
    return EventuallyIntegerSeq(tuple(head), 0)
