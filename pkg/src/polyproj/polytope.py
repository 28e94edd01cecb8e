"""H/V representations, face labels, brute-force hull oracles and f-vectors."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exactlin import (
    RationalMatrix,
    as_fraction,
    det,
    find_nonnegative_solution,
    format_rational,
    matrix,
    rank,
    solve,
)

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """Raised instead of silently truncating an oracle computation."""


def oracle_budget(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get("POLYPROJ_BUDGET")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"POLYPROJ_BUDGET must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError("POLYPROJ_BUDGET must be positive")
    return value


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HPolytope:
    """The polytope ``{x : A x <= b}`` with optional row labels."""

    A: RationalMatrix
    b: tuple[Fraction, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        A = matrix(self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", tuple(as_fraction(x) for x in self.b))
        if len(self.b) != A.rows:
            raise ValueError("right-hand side length differs from the row count")
        if A.rows < A.cols + 1:
            raise ValueError(f"need at least {A.cols + 1} inequalities in dimension {A.cols}")
        if self.labels is not None and len(self.labels) != A.rows:
            raise ValueError("one label per row required")

    @property
    def ambient_dim(self) -> int:
        return self.A.cols

    @property
    def n_rows(self) -> int:
        return self.A.rows

    def slack(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(bi - ax for bi, ax in zip(self.b, self.A @ x))

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(s >= 0 for s in self.slack(x))

    def tight_rows(self, x: Sequence[Fraction]) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.slack(x)) if s == 0)


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of the rows of ``V``."""

    V: RationalMatrix

    def __post_init__(self):
        object.__setattr__(self, "V", matrix(self.V))

    @property
    def ambient_dim(self) -> int:
        return self.V.cols

    @property
    def n_vertices(self) -> int:
        return self.V.rows

    def points(self) -> list[tuple[Fraction, ...]]:
        return [tuple(r) for r in self.V]

    def check_extreme(self) -> None:
        """Raise ``ValueError`` if some row is not a vertex of the hull."""
        for i in range(self.n_vertices):
            if not is_face(self, [i]):
                raise ValueError(f"point {i} is not extreme")


# ---------------------------------------------------------------------------
# Face labels
# ---------------------------------------------------------------------------


class SignVector(str):
    """A face of the combinatorial cube: ``0`` marks a free coordinate, ``+``/``-`` a tight side."""

    __slots__ = ()

    def __new__(cls, entries: str | Iterable[str]):
        text = entries if isinstance(entries, str) else "".join(entries)
        text = text.replace("−", "-")
        bad = set(text) - set("+-0")
        if bad:
            raise ValueError(f"invalid sign characters {sorted(bad)} in {text!r}")
        return super().__new__(cls, text)

    @property
    def dim(self) -> int:
        return self.count("0")

    @property
    def is_vertex(self) -> bool:
        return "0" not in self

    def equality_set(self) -> tuple[int, ...]:
        """Row indices in the paired layout: row ``2i`` is the ``+`` side of coordinate ``i``."""
        return tuple(2 * i + (0 if s == "+" else 1) for i, s in enumerate(self) if s != "0")

    def support(self) -> str:
        """0/1 string with 1 where the entry is tight."""
        return "".join("0" if s == "0" else "1" for s in self)

    def leq(self, other: "SignVector") -> bool:
        """Face inclusion: ``self`` is contained in ``other``."""
        return len(self) == len(other) and all(o == "0" or s == o for s, o in zip(self, other))


def cube_faces(n: int, dim: int | None = None) -> list[SignVector]:
    out = []
    for entries in itertools.product("+-0", repeat=n):
        if dim is None or entries.count("0") == dim:
            out.append(SignVector(entries))
    return sorted(out)


STAR = "*"


class PolygonLabel(tuple):
    """Face of a product of even ``m``-gons: one ``(even, odd)`` pair per factor, ``*`` = free."""

    __slots__ = ()

    def __new__(cls, pairs: Iterable[tuple]):
        norm = []
        for a, b in pairs:
            a = STAR if a == STAR else int(a)
            b = STAR if b == STAR else int(b)
            if a != STAR and a % 2:
                raise ValueError(f"first entry must be even or '*': {a}")
            if b != STAR and b % 2 == 0:
                raise ValueError(f"second entry must be odd or '*': {b}")
            norm.append((a, b))
        return super().__new__(cls, norm)

    @classmethod
    def parse(cls, text: str) -> "PolygonLabel":
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"malformed polygon label {text!r}")
        pairs = []
        for chunk in body[1:-1].split(")("):
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ValueError(f"malformed polygon label {text!r}")
            pairs.append(tuple(p.strip() for p in parts))
        return cls(pairs)

    def __str__(self) -> str:
        return "".join(f"({a},{b})" for a, b in self)

    def __repr__(self) -> str:
        return f"PolygonLabel({str(self)!r})"

    @property
    def dim(self) -> int:
        return sum((a == STAR) + (b == STAR) for a, b in self)

    def validate(self, m: int) -> None:
        for a, b in self:
            if a != STAR and not 0 <= a < m:
                raise ValueError(f"edge index {a} out of range for m={m}")
            if b != STAR and not 0 < b < m:
                raise ValueError(f"edge index {b} out of range for m={m}")
            if a != STAR and b != STAR and b not in ((a + 1) % m, (a - 1) % m):
                raise ValueError(f"({a},{b}) is not a vertex of the {m}-gon")

    def leq(self, other: "PolygonLabel") -> bool:
        return len(self) == len(other) and all(
            (oa == STAR or sa == oa) and (ob == STAR or sb == ob)
            for (sa, sb), (oa, ob) in zip(self, other)
        )

    def equality_set(self, m: int) -> tuple[int, ...]:
        """Rows tight on the face; polygon ``l`` owns rows ``l*m .. l*m+m-1`` indexed by edge.

        Rows come factor by factor, the even edge before the odd one, which
        matches the coordinate order of the corresponding cube face.
        """
        rows = []
        for ell, (a, b) in enumerate(self):
            for e in (a, b):
                if e != STAR:
                    rows.append(ell * m + e)
        return tuple(rows)

    def sort_key(self):
        return tuple((-1 if a == STAR else a, -1 if b == STAR else b) for a, b in self)


def polygon_faces(m: int) -> list[tuple]:
    """Face labels of one even ``m``-gon."""
    if m < 4 or m % 2:
        raise ValueError("m must be even and at least 4")
    faces = [(STAR, STAR)]
    faces += [(2 * i, STAR) for i in range(m // 2)]
    faces += [(STAR, 2 * i + 1) for i in range(m // 2)]
    for i in range(m // 2):
        for b in sorted({(2 * i + 1) % m, (2 * i - 1) % m}):
            faces.append((2 * i, b))
    return faces


def polygon_product_faces(r: int, m: int, dim: int | None = None) -> list[PolygonLabel]:
    single = polygon_faces(m)
    out = []
    for combo in itertools.product(single, repeat=r):
        label = PolygonLabel(combo)
        if dim is None or label.dim == dim:
            out.append(label)
    return sorted(out, key=PolygonLabel.sort_key)


# ---------------------------------------------------------------------------
# f-vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FVector:
    counts: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.counts)

    def euler_holds(self) -> bool:
        d = self.dim
        return sum((-1) ** i * f for i, f in enumerate(self.counts)) == 1 - (-1) ** d

    def fatness(self) -> Fraction:
        return fatness(self)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __iter__(self):
        return iter(self.counts)


def product_fvector(factors: Sequence[Sequence[int]]) -> FVector:
    """Multiply per-factor face-count polynomials ``sum_k c_k t^k`` and drop the top face.

    Each factor lists counts of nonempty faces by dimension including the
    factor itself, e.g. ``(2, 1)`` for a segment or ``(m, m, 1)`` for an
    ``m``-gon.
    """
    poly = [1]
    for factor in factors:
        if any(int(c) != c or c < 0 for c in factor):
            raise ValueError("factor coefficients must be nonnegative integers")
        out = [0] * (len(poly) + len(factor) - 1)
        for i, a in enumerate(poly):
            for j, c in enumerate(factor):
                out[i + j] += a * int(c)
        poly = out
    return FVector(tuple(poly[:-1]))


def fatness(f: FVector | Sequence[int]) -> Fraction:
    counts = tuple(f.counts if isinstance(f, FVector) else f)
    if len(counts) != 4:
        raise ValueError("fatness is defined for 4-dimensional f-vectors")
    denom = counts[0] + counts[3] - 10
    if denom == 0:
        raise ZeroDivisionError("f0 + f3 = 10")
    return Fraction(counts[1] + counts[2] - 20, denom)


# ---------------------------------------------------------------------------
# Vertex oracle
# ---------------------------------------------------------------------------


def vertex_from_equality_set(P: HPolytope, I: Sequence[int]):
    I = tuple(I)
    if len(I) != P.ambient_dim:
        raise ValueError(f"need exactly {P.ambient_dim} rows, got {len(I)}")
    x = solve(P.A.select_rows(I), [P.b[i] for i in I])
    if x is None or not P.contains(x):
        return None
    return x


def brute_force_vertices(P: HPolytope, budget: int | None = None) -> VPolytope:
    """Enumerate all feasible basic solutions; refuse when there are too many bases."""
    budget = oracle_budget() if budget is None else budget
    n, D = P.n_rows, P.ambient_dim
    total = math.comb(n, D)
    if total > budget:
        raise BudgetExceeded(f"{total} row subsets exceed the budget of {budget}")
    found = set()
    for I in itertools.combinations(range(n), D):
        x = vertex_from_equality_set(P, I)
        if x is not None:
            found.add(x)
    if not found:
        raise ValueError("the inequality system has no vertices")
    return VPolytope(RationalMatrix(sorted(found), D))


# ---------------------------------------------------------------------------
# Face test via LP
# ---------------------------------------------------------------------------


def is_face(Q: VPolytope, S: Iterable[int]) -> bool:
    """Is ``conv(V_S)`` a face of ``Q`` whose vertex set is exactly ``S``?

    Searches for ``(c, c0)`` with ``c.v = c0`` on ``S`` and ``c.v <= c0 - 1``
    elsewhere; free variables are split into positive and negative parts.
    """
    S = set(S)
    m, D = Q.V.shape
    others = [i for i in range(m) if i not in S]
    if not others:
        return True
    # variables: c+ (D), c- (D), c0+, c0-, slack per other point
    nvar = 2 * D + 2 + len(others)
    rows, rhs = [], []
    for i in range(m):
        v = Q.V[i]
        row = list(v) + [-x for x in v] + [Fraction(-1), Fraction(1)] + [Fraction(0)] * len(others)
        if i in S:
            rhs.append(Fraction(0))
        else:
            row[2 * D + 2 + others.index(i)] = Fraction(1)
            rhs.append(Fraction(-1))
        rows.append(row)
    return find_nonnegative_solution(RationalMatrix(rows, nvar), rhs).feasible


# ---------------------------------------------------------------------------
# Facet oracle
# ---------------------------------------------------------------------------


def _affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return rank(RationalMatrix(diffs, len(base))) if diffs else 0


def _integer_points(points: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Exact affine rescaling of the points to integer coordinates."""
    D = len(points[0])
    out = [[Fraction(0)] * D for _ in points]
    for k in range(D):
        col = [p[k] for p in points]
        lo = min(col)
        lcm = 1
        for x in col:
            lcm = lcm * (x - lo).denominator // math.gcd(lcm, (x - lo).denominator)
        for i, x in enumerate(col):
            out[i][k] = int((x - lo) * lcm)
    g = 0
    for row in out:
        for x in row:
            g = math.gcd(g, x)
    g = g or 1
    return [[x // g for x in row] for row in out]


def _int_det(rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return int(det(RationalMatrix(rows, n)))


def _normal(diffs: list[list[int]], D: int) -> list[int]:
    """Generalized cross product of ``D-1`` integer vectors in ``Z^D``."""
    normal = []
    for k in range(D):
        minor = [[row[j] for j in range(D) if j != k] for row in diffs]
        normal.append((-1) ** k * _int_det(minor))
    return normal


def _float_normals(P: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normals (and entrywise magnitude bounds) for hyperplanes through point tuples."""
    D = P.shape[1]
    base = P[idx[:, 0]]
    diffs = P[idx[:, 1:]] - base[:, None, :]  # (B, D-1, D)
    normals = np.empty((len(idx), D))
    mags = np.empty((len(idx), D))
    for k in range(D):
        cols = [j for j in range(D) if j != k]
        sub = diffs[:, :, cols]
        if D == 1:
            normals[:, k] = 1.0
            mags[:, k] = 1.0
            continue
        normals[:, k] = (-1) ** k * np.linalg.det(sub)
        mags[:, k] = np.prod(np.linalg.norm(sub, axis=2), axis=1)
    return normals, mags


def brute_force_facets(Q: VPolytope, budget: int | None = None) -> list[tuple[int, ...]]:
    """All facets of ``conv(Q)`` as sorted vertex-index tuples.

    Every ``D``-subset of points spans a candidate hyperplane.  A vectorized
    float pass discards hyperplanes that certainly have points on both sides;
    the survivors are decided in exact integer arithmetic.
    """
    pts = Q.points()
    m, D = len(pts), Q.ambient_dim
    if D == 0:
        raise ValueError("facets of a point are undefined")
    if len(set(pts)) != m:
        raise ValueError("duplicate points")
    if m < D + 1 or _affine_rank(pts) < D:
        raise ValueError("points do not span the ambient space")
    budget = oracle_budget() if budget is None else budget
    total = math.comb(m, D)
    if total > budget:
        raise BudgetExceeded(f"{total} point subsets exceed the budget of {budget}")

    ints = _integer_points(pts)
    scale = max(max(abs(x) for x in row) for row in ints) or 1
    P = np.array([[x / scale for x in row] for row in ints], dtype=float)
    Pi = ints
    facets: set[frozenset] = set()
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(m), D)),
        dtype=np.int64,
        count=total * D,
    ).reshape(total, D)
    batch = max(1, 200000 // max(m, 1))
    for start in range(0, total, batch):
        idx = combos[start : start + batch]
        normals, mags = _float_normals(P, idx)
        rel = P[None, :, :] - P[idx[:, 0]][:, None, :]  # (B, m, D)
        vals = np.einsum("bmd,bd->bm", rel, normals)
        absrel = np.abs(rel)
        bound = 1e-9 * (
            np.einsum("bmd,bd->bm", absrel, np.abs(normals))
            + mags.max(axis=1)[:, None] * absrel.sum(axis=2)
        ) + 1e-300
        mixed = (vals > bound).any(axis=1) & (vals < -bound).any(axis=1)
        for row in idx[~mixed]:
            subset = tuple(int(i) for i in row)
            if any(facet.issuperset(subset) for facet in facets):
                continue
            base = Pi[subset[0]]
            diffs = [[a - b for a, b in zip(Pi[j], base)] for j in subset[1:]]
            normal = _normal(diffs, D)
            if not any(normal):
                continue
            signs = [sum(c * (a - b) for c, a, b in zip(normal, p, base)) for p in Pi]
            if all(s >= 0 for s in signs) or all(s <= 0 for s in signs):
                facets.add(frozenset(i for i, s in enumerate(signs) if s == 0))
    return sorted(tuple(sorted(f)) for f in facets)


def planar_hull(points: Sequence[Sequence]) -> list[int]:
    """Indices of the strictly extreme points of a planar set, counter-clockwise."""
    pts = [tuple(as_fraction(x) for x in p) for p in points]
    if any(len(p) != 2 for p in pts):
        raise ValueError("planar hull needs 2-dimensional points")
    order = sorted(range(len(pts)), key=lambda i: pts[i])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and cross(pts[out[-2]], pts[out[-1]], pts[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    hull = lower[:-1] + upper[:-1]
    return hull


def facet_vertex_incidences(P: HPolytope, V: VPolytope) -> list[tuple[int, ...]]:
    """For each row of ``P``, the indices of the vertices on which it is tight."""
    out = []
    for i in range(P.n_rows):
        row, bi = P.A[i], P.b[i]
        out.append(tuple(j for j, v in enumerate(V.V) if sum(a * x for a, x in zip(row, v)) == bi))
    return out


def format_point(x: Sequence[Fraction]) -> str:
    return " ".join(format_rational(v) for v in x)


__all__ = [
    "BudgetExceeded",
    "FVector",
    "HPolytope",
    "PolygonLabel",
    "STAR",
    "SignVector",
    "VPolytope",
    "brute_force_facets",
    "brute_force_vertices",
    "cube_faces",
    "facet_vertex_incidences",
    "fatness",
    "is_face",
    "oracle_budget",
    "planar_hull",
    "polygon_faces",
    "polygon_product_faces",
    "product_fvector",
    "vertex_from_equality_set",
]
