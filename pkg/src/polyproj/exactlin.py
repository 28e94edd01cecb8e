"""Exact rational linear algebra and positive-dependence decisions.

Everything here works on :class:`fractions.Fraction` values.  Matrices are
immutable row-major tuples wrapped in :class:`RationalMatrix`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a reduced Fraction."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational: {text!r}")
    value = Fraction(text)
    return value


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point input is not accepted; use Fraction or int")
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


class RationalMatrix:
    """Dense immutable matrix of exact rationals.

    ``cols`` is stored explicitly so that matrices with zero rows or zero
    columns keep their shape.
    """

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable], cols: int | None = None):
        data = tuple(tuple(as_fraction(x) for x in row) for row in rows)
        if cols is None:
            if not data:
                raise ValueError("column count required for a matrix without rows")
            cols = len(data[0])
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self._rows = data
        self._ncols = cols

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(size)] for i in range(size)], size)

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), self._ncols)

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return tuple(x for row in self._rows for x in row)

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self._rows]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self._rows)

    def __iter__(self):
        return iter(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __getitem__(self, key):
        if isinstance(key, tuple):
            i, j = key
            return self._rows[i][j]
        return self._rows[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._ncols, self._rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self._rows)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"

    @property
    def T(self) -> "RationalMatrix":
        if not self._rows:
            return RationalMatrix([[] for _ in range(self._ncols)], 0)
        return RationalMatrix(zip(*self._rows), self.rows)

    def select_rows(self, indices: Iterable[int]) -> "RationalMatrix":
        return RationalMatrix([self._rows[i] for i in indices], self._ncols)

    def select_cols(self, indices: Iterable[int]) -> "RationalMatrix":
        idx = list(indices)
        return RationalMatrix([[row[j] for j in idx] for row in self._rows], len(idx))

    def first_cols(self, k: int) -> "RationalMatrix":
        return RationalMatrix([row[:k] for row in self._rows], k)

    def stack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.cols != self.cols:
            raise ValueError("column mismatch in stack")
        return RationalMatrix(self._rows + other._rows, self._ncols)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.rows != self.rows:
            raise ValueError("row mismatch in hstack")
        return RationalMatrix(
            [a + b for a, b in zip(self._rows, other._rows)], self._ncols + other.cols
        )

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch in matmul")
            cols = list(zip(*other._rows)) if other.rows else [()] * other.cols
            return RationalMatrix(
                [[_dot(row, col) for col in cols] for row in self._rows], other.cols
            )
        vec = tuple(as_fraction(x) for x in other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch in matrix-vector product")
        return tuple(_dot(row, vec) for row in self._rows)

    def scale_rows(self, factors: Sequence) -> "RationalMatrix":
        return RationalMatrix(
            [[f * x for x in row] for f, row in zip(factors, self._rows)], self._ncols
        )

    def rank(self) -> int:
        return rank(self)

    def to_text(self) -> str:
        return "\n".join(" ".join(format_rational(x) for x in row) for row in self._rows)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            total += x * y
    return total


def dot(a: Sequence, b: Sequence) -> Fraction:
    return _dot([as_fraction(x) for x in a], [as_fraction(y) for y in b])


def matrix(rows, cols: int | None = None) -> RationalMatrix:
    if isinstance(rows, RationalMatrix):
        return rows
    return RationalMatrix(rows, cols)


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with the first usable row as pivot in each column."""
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        pivot = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work, pivots


def rank(M) -> int:
    M = matrix(M)
    if M.rows == 0 or M.cols == 0:
        return 0
    _, pivots = _rref(M.tolist(), M.cols)
    return len(pivots)


def det(M) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination."""
    M = matrix(M)
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    common = 1
    for x in M.entries:
        common = common * x.denominator // _gcd(common, x.denominator)
    a = [[int(x * common) for x in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return Fraction(sign * a[n - 1][n - 1], common**n)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def solve(M, rhs: Sequence) -> tuple[Fraction, ...] | None:
    """Unique solution of a square system, or None when singular."""
    M = matrix(M)
    n = M.rows
    if n != M.cols or len(rhs) != n:
        raise ValueError("solve needs a square system")
    aug = [list(row) + [as_fraction(b)] for row, b in zip(M, rhs)]
    work, pivots = _rref(aug, n)
    if len(pivots) < n or pivots[-1] >= n:
        return None
    return tuple(work[i][n] for i in range(n))


def inverse(M) -> RationalMatrix:
    M = matrix(M)
    n = M.rows
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    work, pivots = _rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return RationalMatrix([row[n:] for row in work], n)


def _primitive(vec: list[Fraction]) -> list[Fraction]:
    """Scale a nonzero vector to coprime integers, first nonzero entry kept in sign."""
    common = 1
    for x in vec:
        common = common * x.denominator // _gcd(common, x.denominator)
    ints = [int(x * common) for x in vec]
    g = 0
    for x in ints:
        g = _gcd(g, x)
    return [Fraction(x // g) for x in ints]


def nullspace_basis(M) -> RationalMatrix:
    """Columns spanning ``{x : M x = 0}``; one column per free variable of the RREF."""
    M = matrix(M)
    ncols = M.cols
    if M.rows == 0:
        return RationalMatrix.identity(ncols)
    work, pivots = _rref(M.tolist(), ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -work[r][f]
        basis.append(_primitive(vec))
    if not basis:
        return RationalMatrix([[] for _ in range(ncols)], 0)
    return RationalMatrix(basis).T


# ---------------------------------------------------------------------------
# Phase-one simplex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of ``A x = b, x >= 0``.

    Exactly one of ``point`` and ``farkas`` is set.  ``farkas`` is a vector
    ``z`` with ``A^T z >= 0`` and ``b . z < 0``.
    """

    point: tuple[Fraction, ...] | None
    farkas: tuple[Fraction, ...] | None

    @property
    def feasible(self) -> bool:
        return self.point is not None


def find_nonnegative_solution(A, b: Sequence) -> FeasibilityResult:
    """Decide ``A x = b, x >= 0`` by phase-one simplex with Bland's rule."""
    A = matrix(A)
    m, n = A.shape
    b = [as_fraction(x) for x in b]
    if len(b) != m:
        raise ValueError("rhs length mismatch")
    if m == 0:
        return FeasibilityResult(point=tuple(Fraction(0) for _ in range(n)), farkas=None)

    flip = [-1 if bi < 0 else 1 for bi in b]
    width = n + m
    # tableau rows: [A' | I | b']
    tab = []
    for i in range(m):
        row = [flip[i] * x for x in A[i]]
        row.extend(Fraction(int(i == j)) for j in range(m))
        row.append(flip[i] * b[i])
        tab.append(row)
    basis = list(range(n, n + m))
    # reduced costs for minimizing the sum of artificials
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    red = [cost[j] - sum(tab[i][j] for i in range(m)) for j in range(width)]
    red.append(-sum(tab[i][width] for i in range(m)))

    while True:
        entering = next((j for j in range(width) if red[j] < 0), None)
        if entering is None:
            break
        best = None
        leave = None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # cannot happen: phase one is bounded below by zero
            raise RuntimeError("unbounded phase-one problem")
        _pivot(tab, red, leave, entering)
        basis[leave] = entering

    objective = -red[width]
    if objective == 0:
        x = [Fraction(0)] * n
        for i, var in enumerate(basis):
            if var < n:
                x[var] = tab[i][width]
        return FeasibilityResult(point=tuple(x), farkas=None)
    # y_i = 1 - reduced cost of artificial i solves the phase-one dual
    y = [1 - red[n + i] for i in range(m)]
    z = tuple(-flip[i] * y[i] for i in range(m))
    return FeasibilityResult(point=None, farkas=z)


def _pivot(tab, red, r: int, c: int) -> None:
    prow = tab[r]
    inv = 1 / prow[c]
    prow[:] = [x * inv for x in prow]
    for i, row in enumerate(tab):
        if i != r:
            f = row[c]
            if f:
                row[:] = [x - f * y for x, y in zip(row, prow)]
    f = red[c]
    if f:
        red[:] = [x - f * y for x, y in zip(red, prow)]


# ---------------------------------------------------------------------------
# Positive dependence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpanCertificate:
    """Proof of (non-)positive dependence of the rows of a matrix ``G``.

    ``kind == "dependent"``: ``coefficients`` is ``lambda`` with every entry
    ``>= 1`` and ``G^T lambda = 0``.  ``kind == "witness"``: ``witness`` is a
    ``y`` with ``G y >= 0`` componentwise and ``G y != 0``.
    """

    kind: str
    coefficients: tuple[Fraction, ...] | None = None
    witness: tuple[Fraction, ...] | None = None

    def to_text(self) -> str:
        vec = self.coefficients if self.kind == "dependent" else self.witness
        return f"{self.kind}: " + " ".join(format_rational(x) for x in vec)


def positively_dependent(G) -> tuple[bool, SpanCertificate]:
    """Rows ``g_i`` of ``G`` admit ``sum lambda_i g_i = 0`` with all ``lambda_i >= 1``."""
    G = matrix(G)
    m, k = G.shape
    if m == 0:
        raise ValueError("positive dependence needs at least one vector")
    if k == 0:
        return True, SpanCertificate("dependent", coefficients=tuple(Fraction(1) for _ in range(m)))
    At = G.T  # k x m
    rhs = [-sum(row) for row in At]
    res = find_nonnegative_solution(At, rhs)
    if res.feasible:
        lam = tuple(1 + x for x in res.point)
        return True, SpanCertificate("dependent", coefficients=lam)
    return False, SpanCertificate("witness", witness=res.farkas)


def verify_span_certificate(G, cert: SpanCertificate) -> bool:
    """Independent check of a certificate against ``G`` (plain arithmetic only)."""
    G = matrix(G)
    m, k = G.shape
    if cert.kind == "dependent":
        lam = cert.coefficients
        if lam is None or len(lam) != m or any(x < 1 for x in lam):
            return False
        for j in range(k):
            if sum(lam[i] * G[i, j] for i in range(m)) != 0:
                return False
        return True
    if cert.kind == "witness":
        y = cert.witness
        if y is None or len(y) != k:
            return False
        values = [sum(G[i, j] * y[j] for j in range(k)) for i in range(m)]
        return all(v >= 0 for v in values) and any(v != 0 for v in values)
    return False


def positively_spanning(G) -> bool:
    G = matrix(G)
    if G.rows == 0:
        return G.cols == 0
    dependent, _ = positively_dependent(G)
    return dependent and rank(G) == G.cols


def dependent_row_subset(G) -> tuple[int, ...] | None:
    """First ``k``-row subset (lexicographic) of ``G`` that is singular, if any."""
    G = matrix(G)
    m, k = G.shape
    if m < k:
        raise ValueError(f"general position needs at least {k} rows, got {m}")
    for subset in itertools.combinations(range(m), k):
        if det(G.select_rows(subset)) == 0:
            return subset
    return None


def general_position_linear(G) -> bool:
    """Every ``k``-subset of the rows of an ``m x k`` matrix is a basis."""
    return dependent_row_subset(G) is None


__all__ = [
    "FeasibilityResult",
    "RationalMatrix",
    "SpanCertificate",
    "as_fraction",
    "dependent_row_subset",
    "det",
    "dot",
    "find_nonnegative_solution",
    "format_rational",
    "general_position_linear",
    "independent_rows",
    "inverse",
    "matrix",
    "nullspace_basis",
    "parse_rational",
    "positively_dependent",
    "positively_spanning",
    "rank",
    "solve",
    "verify_span_certificate",
]


def independent_rows(M) -> tuple[int, ...]:
    """Indices of a maximal set of linearly independent rows (first ones preferred)."""
    M = matrix(M)
    if M.rows == 0 or M.cols == 0:
        return ()
    _, pivots = _rref(M.T.tolist(), M.rows)
    return tuple(pivots)

