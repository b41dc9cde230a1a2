"""The five atomic groups: Z, Z/d, Q, Q/Z and the Pruefer groups Z(p^inf).

Every element is held as a canonical representative:

* ``ZZ``        -- an ``int``
* ``Cyclic(d)`` -- an ``int`` in ``[0, d)``
* ``QQ``        -- a ``Fraction``
* ``QmodZ``     -- a ``Fraction`` in ``[0, 1)``
* ``Pruefer(p)``-- a ``Fraction`` in ``[0, 1)`` whose denominator is a power of p

so equality of elements is plain equality of representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from invlim.exact_arith import format_rational, parse_rational

Value = Union[int, Fraction]

MAX_PRIME = 10**6

ATOM_KINDS = ("zz", "cyclic", "qq", "qmodz", "pruefer")


class NotDivisible(ArithmeticError):
    """Raised when ``n * y = x`` has no solution ``y``.

    ``where`` names the offending coordinate when the failure comes from a
    direct sum.
    """

    def __init__(self, n: int, value: object, where: object = None) -> None:
        self.n = n
        self.value = value
        self.where = where
        loc = f" at {where}" if where is not None else ""
        super().__init__(f"{value} is not divisible by {n}{loc}")


class AtomMismatch(TypeError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` if ``n == p**k`` with p prime and k >= 1, else None."""
    if n < 2:
        return None
    p = next((f for f in range(2, math.isqrt(n) + 1) if n % f == 0), n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return (p, k) if n == 1 else None


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization of ``n >= 1`` into ascending (p, k)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            k = 0
            while n % f == 0:
                n //= f
                k += 1
            out.append((f, k))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _p_power_exponent(den: int, p: int) -> int | None:
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    return k if den == 1 else None


@dataclass(frozen=True, order=True)
class Atom:
    kind: str
    modulus: int = 0  # d for cyclic, p for pruefer, unused otherwise

    def __post_init__(self) -> None:
        if self.kind not in ATOM_KINDS:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == "cyclic":
            if self.modulus < 2:
                raise ValueError(f"cyclic modulus must be >= 2, got {self.modulus}")
        elif self.kind == "pruefer":
            if self.modulus > MAX_PRIME:
                raise ValueError(f"Pruefer prime {self.modulus} exceeds {MAX_PRIME}")
            if not is_prime(self.modulus):
                raise ValueError(f"Pruefer parameter {self.modulus} is not prime")
        elif self.modulus != 0:
            raise ValueError(f"atom {self.kind} takes no parameter")

    def __str__(self) -> str:
        return {
            "zz": "Z",
            "qq": "Q",
            "qmodz": "Q/Z",
            "cyclic": f"Z/{self.modulus}",
            "pruefer": f"Z({self.modulus}^inf)",
        }[self.kind]

    @property
    def divisible(self) -> bool:
        return self.kind in ("qq", "qmodz", "pruefer")

    @property
    def torsion(self) -> bool:
        return self.kind in ("cyclic", "qmodz", "pruefer")

    # -- canonical forms ---------------------------------------------------

    def canonical(self, value: Value) -> Value:
        """Reduce an arbitrary representative to the canonical one."""
        k = self.kind
        if k == "zz":
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    raise ValueError(f"{value} is not an integer")
                value = value.numerator
            return int(value)
        if k == "cyclic":
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    raise ValueError(f"{value} is not an integer")
                value = value.numerator
            return int(value) % self.modulus
        q = Fraction(value)
        if k == "qq":
            return q
        q = q - (q.numerator // q.denominator)
        if k == "pruefer" and _p_power_exponent(q.denominator, self.modulus) is None:
            raise ValueError(f"{q} has denominator prime to {self.modulus}-powers")
        return q

    def is_canonical(self, value: object) -> bool:
        k = self.kind
        if k in ("zz", "cyclic"):
            if not isinstance(value, int) or isinstance(value, bool):
                return False
            return k == "zz" or 0 <= value < self.modulus
        if not isinstance(value, Fraction):
            return False
        if k == "qq":
            return True
        if not 0 <= value < 1:
            return False
        return k == "qmodz" or _p_power_exponent(value.denominator, self.modulus) is not None

    def zero(self) -> Value:
        return 0 if self.kind in ("zz", "cyclic") else Fraction(0)

    # -- group operations on representatives --------------------------------

    def add(self, a: Value, b: Value) -> Value:
        return self.canonical(a + b)

    def neg(self, a: Value) -> Value:
        return self.canonical(-a)

    def mul(self, n: int, a: Value) -> Value:
        return self.canonical(n * a)

    def divide(self, n: int, a: Value) -> Value:
        """Canonical ``y`` with ``n * y == a``; the least representative when not unique."""
        if n == 0:
            raise ValueError("division by zero")
        k = self.kind
        if k == "zz":
            if a % n:
                raise NotDivisible(n, a)
            return a // n
        if k == "cyclic":
            d = self.modulus
            g = math.gcd(n, d)
            if a % g:
                raise NotDivisible(n, a)
            dg = d // g
            if dg == 1:
                return 0
            # solutions are y0 + t*dg, and y0 < dg is the least one
            return (a // g) * pow((n // g) % dg, -1, dg) % dg
        if k == "qq":
            return a / n
        # torsion divisible atoms: fold the sign of n into a
        if n < 0:
            n, a = -n, self.canonical(-a)
        if k == "qmodz":
            return a / n
        p = self.modulus
        pk = 1
        u = n
        while u % p == 0:
            u //= p
            pk *= p
        # u acts invertibly on Z(p^inf); the p-power part then has the
        # solutions (z + t)/pk, least at t = 0
        den = a.denominator
        z = Fraction(a.numerator * pow(u, -1, den) % den, den) if den > 1 else Fraction(0)
        return z / pk

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict[str, str]:
        if self.kind == "cyclic":
            return {"atom": "cyclic", "d": str(self.modulus)}
        if self.kind == "pruefer":
            return {"atom": "pruefer", "p": str(self.modulus)}
        return {"atom": self.kind}

    @classmethod
    def from_json(cls, data: object) -> Atom:
        if not isinstance(data, dict) or "atom" not in data:
            raise ValueError(f"atom must be an object with an 'atom' tag, got {data!r}")
        kind = data["atom"]
        if kind == "cyclic":
            return Cyclic(int(data["d"]))
        if kind == "pruefer":
            return Pruefer(int(data["p"]))
        if kind in ("zz", "qq", "qmodz"):
            return cls(kind)
        raise ValueError(f"unknown atom tag {kind!r}")

    def value_to_json(self, value: Value) -> str:
        return format_rational(value)

    def value_from_json(self, text: str) -> Value:
        value = parse_rational(text)
        canon = self.canonical(value)
        if canon != value:
            raise ValueError(f"{text!r} is not a canonical representative for {self}")
        return canon


ZZ = Atom("zz")
QQ = Atom("qq")
QmodZ = Atom("qmodz")


def Cyclic(d: int) -> Atom:
    return Atom("cyclic", d)


def Pruefer(p: int) -> Atom:
    return Atom("pruefer", p)


@dataclass(frozen=True)
class AtomElement:
    """An element of one atom, normalized on construction."""

    atom: Atom
    value: Value

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.atom.canonical(self.value))

    def _check(self, other: AtomElement) -> None:
        if other.atom != self.atom:
            raise AtomMismatch(f"{self.atom} vs {other.atom}")

    def __add__(self, other: AtomElement) -> AtomElement:
        self._check(other)
        return AtomElement(self.atom, self.atom.add(self.value, other.value))

    def __neg__(self) -> AtomElement:
        return AtomElement(self.atom, self.atom.neg(self.value))

    def __sub__(self, other: AtomElement) -> AtomElement:
        return self + (-other)

    def __rmul__(self, n: int) -> AtomElement:
        return AtomElement(self.atom, self.atom.mul(n, self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self) -> str:
        v = format_rational(self.value)
        return f"[{v}] in {self.atom}" if self.atom.kind in ("qmodz", "pruefer") else f"{v} in {self.atom}"

    def to_json(self) -> dict[str, str]:
        return {**self.atom.to_json(), "value": format_rational(self.value)}

    @classmethod
    def from_json(cls, data: dict) -> AtomElement:
        atom = Atom.from_json({k: v for k, v in data.items() if k != "value"})
        return cls(atom, atom.value_from_json(data["value"]))


def atom_arith(op: str, x: AtomElement, y: AtomElement | None = None, n: int | None = None) -> AtomElement:
    """Dispatch ``add``, ``neg`` or ``scalar_mul`` on atom elements."""
    if op == "add":
        if y is None:
            raise ValueError("add needs two operands")
        return x + y
    if op == "neg":
        return -x
    if op == "scalar_mul":
        if n is None:
            raise ValueError("scalar_mul needs n")
        return n * x
    raise ValueError(f"unknown op {op!r}")


def atom_divide(n: int, x: AtomElement) -> AtomElement:
    return AtomElement(x.atom, x.atom.divide(n, x.value))


EMBED_KINDS = ("cyclic_into_pruefer", "reduce_Q_to_QmodZ", "pruefer_into_QmodZ")


def embed_target(kind: str, atom: Atom) -> Atom:
    """Target atom of an embedding kind, validating applicability."""
    if kind == "cyclic_into_pruefer":
        if atom.kind != "cyclic":
            raise AtomMismatch(f"cyclic_into_pruefer needs a cyclic atom, got {atom}")
        pk = prime_power(atom.modulus)
        if pk is None:
            raise ValueError(f"modulus {atom.modulus} is not a prime power")
        return Pruefer(pk[0])
    if kind == "reduce_Q_to_QmodZ":
        if atom != QQ:
            raise AtomMismatch(f"reduce_Q_to_QmodZ needs Q, got {atom}")
        return QmodZ
    if kind == "pruefer_into_QmodZ":
        if atom.kind != "pruefer":
            raise AtomMismatch(f"pruefer_into_QmodZ needs a Pruefer atom, got {atom}")
        return QmodZ
    raise ValueError(f"unknown embedding {kind!r}")


def embed_value(kind: str, atom: Atom, value: Value) -> Value:
    target = embed_target(kind, atom)
    if kind == "cyclic_into_pruefer":
        return target.canonical(Fraction(value, atom.modulus))
    return target.canonical(value)


def atom_embed(kind: str, x: AtomElement) -> AtomElement:
    target = embed_target(kind, x.atom)
    return AtomElement(target, embed_value(kind, x.atom, x.value))
