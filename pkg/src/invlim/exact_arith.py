"""Exact integer matrices and Smith normal form with transform tracking.

Scalars are Python ``int`` (arbitrary precision) and ``fractions.Fraction``
(always stored in lowest terms with a positive denominator), so nothing
here ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "IntMatrix",
    "SnfResult",
    "snf",
    "parse_rational",
    "format_rational",
]


def parse_rational(text: str | int) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` into a normalized Fraction."""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a rational string, got {text!r}")
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        den_i = int(den)
        if den_i == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), den_i)
    return Fraction(int(text))


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix with explicit dimensions (so 0 x n is representable)."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError(f"expected rows of length {self.cols}, got {len(r)}")
            for v in r:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise TypeError(f"matrix entries must be int, got {v!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(v) for v in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def diagonal(cls, rows: int, cols: int, diag: Iterable[int]) -> IntMatrix:
        grid = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            grid[i][i] = d
        return cls.from_rows(grid, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols_t = other.transpose().entries
        return IntMatrix(self.rows, other.cols,
                         tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols_t)
                               for r in self.entries))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.entries)

    def diagonal_entries(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, r in enumerate(self.entries)
                   for j, v in enumerate(r) if i != j)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse_unimodular(self) -> IntMatrix:
        """Integer inverse of a matrix with determinant +-1."""
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of a non-square matrix")
        aug = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)]
               for i, r in enumerate(self.entries)]
        for c in range(n):
            piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
            if piv is None:
                raise ValueError("matrix is singular")
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [v / pv for v in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    factor = aug[i][c]
                    aug[i] = [a - factor * b for a, b in zip(aug[i], aug[c])]
        out = []
        for r in aug:
            row = []
            for v in r[n:]:
                if v.denominator != 1:
                    raise ValueError("matrix is not unimodular")
                row.append(v.numerator)
            out.append(row)
        return IntMatrix.from_rows(out, n)

    def to_json(self) -> list[list[str]]:
        return [[str(v) for v in r] for r in self.entries]

    @classmethod
    def from_json(cls, data: object, cols: int | None = None) -> IntMatrix:
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise ValueError("matrix must be a JSON array of arrays")
        rows = []
        for r in data:
            row = []
            for v in r:
                if isinstance(v, bool) or not isinstance(v, (str, int)):
                    raise ValueError(f"matrix entry {v!r} is not a decimal integer string")
                row.append(int(v))
            rows.append(row)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("matrix rows have different lengths")
        return cls.from_rows(rows, cols)


@dataclass(frozen=True)
class SnfResult:
    """``u @ a @ v == s`` with ``s`` in Smith normal form."""

    u: IntMatrix
    s: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return self.s.diagonal_entries()


def snf(a: IntMatrix) -> SnfResult:
    """Smith normal form with unimodular row (u) and column (v) transforms.

    Diagonal entries come out nonnegative with ``d_i | d_{i+1}`` (zeros
    last). Pivot signs are absorbed into ``v``.
    """
    m, n = a.rows, a.cols
    s = [list(r) for r in a.entries]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            s[i], s[j] = s[j], s[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for r in s:
                r[i], r[j] = r[j], r[i]
            for r in v:
                r[i], r[j] = r[j], r[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row[dst] += q * row[src]
        s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        for r in s:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        # smallest nonzero entry of the trailing block becomes the pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if s[i][j] != 0 and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])

        while True:
            changed = False
            for i in range(t + 1, m):
                if s[i][t] != 0:
                    add_row(i, t, -(s[i][t] // s[t][t]))
            for j in range(t + 1, n):
                if s[t][j] != 0:
                    add_col(j, t, -(s[t][j] // s[t][t]))
            # any nonzero remainder is smaller than the pivot: promote it
            best = None
            for i in range(t + 1, m):
                if s[i][t] != 0 and (best is None or abs(s[i][t]) < abs(best[2])):
                    best = ("r", i, s[i][t])
            for j in range(t + 1, n):
                if s[t][j] != 0 and (best is None or abs(s[t][j]) < abs(best[2])):
                    best = ("c", j, s[t][j])
            if best is not None:
                if best[0] == "r":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                changed = True
            if changed:
                continue
            # row and column are clear; enforce divisibility of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if s[i][j] % s[t][t] != 0), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)

        if s[t][t] < 0:
            for r in s:
                r[t] = -r[t]
            for r in v:
                r[t] = -r[t]

    return SnfResult(IntMatrix.from_rows(u, m), IntMatrix.from_rows(s, n),
                     IntMatrix.from_rows(v, n))
