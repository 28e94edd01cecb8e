"""Explicit inequality systems for deformed products, deformed cubes and products of polygons."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exactlin import (
    RationalMatrix,
    as_fraction,
    general_position_linear,
    dependent_row_subset,
    matrix,
    positively_dependent,
    rank,
    solve,
)
from .gale import GaleConfiguration, cyclic_polytope, gale_transform
from .polytope import (
    HPolytope,
    PolygonLabel,
    SignVector,
    VPolytope,
    brute_force_vertices,
    facet_vertex_incidences,
    planar_hull,
)

SEARCH_LIMIT = 40


class CalibrationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Generic deformed products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeformedProductSpec:
    P: HPolytope
    Q: HPolytope
    C: RationalMatrix
    M: Fraction = Fraction(1)

    def __post_init__(self):
        C = matrix(self.C)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "M", as_fraction(self.M))
        if C.shape != (self.Q.n_rows, self.P.ambient_dim):
            raise ValueError("C must have one row per inequality of Q and one column per coordinate of P")


def vertex_signature(H: HPolytope) -> frozenset[frozenset[int]]:
    """Tight-row sets of all vertices; equal signatures mean equal combinatorics
    when the rows correspond."""
    V = brute_force_vertices(H)
    return frozenset(frozenset(H.tight_rows(v)) for v in V.V)


def is_simple(H: HPolytope) -> bool:
    return all(len(s) == H.ambient_dim for s in vertex_signature(H))


def build_deformed_product(spec: DeformedProductSpec) -> HPolytope:
    if not is_simple(spec.Q):
        raise ValueError("Q must be simple")
    k, dP = spec.P.A.shape
    n, e = spec.Q.A.shape
    rows = [list(r) + [0] * e for r in spec.P.A]
    rows += [list(c) + list(bq) for c, bq in zip(spec.C, spec.Q.A)]
    rhs = list(spec.P.b) + [spec.M * x for x in spec.Q.b]
    return HPolytope(RationalMatrix(rows, dP + e), tuple(rhs))


def calibrate_M(spec: DeformedProductSpec) -> Fraction:
    """Smallest ``M`` in 1, 2, 4, ... keeping every fibre over a vertex of ``P`` equivalent to ``Q``."""
    target = vertex_signature(spec.Q)
    verts = brute_force_vertices(spec.P).V
    M = Fraction(1)
    failing = None
    for _ in range(SEARCH_LIMIT + 1):
        failing = None
        for v in verts:
            shift = spec.C @ v
            fibre = HPolytope(spec.Q.A, tuple(M * b - s for b, s in zip(spec.Q.b, shift)))
            try:
                ok = vertex_signature(fibre) == target
            except ValueError:
                ok = False
            if not ok:
                failing = v
                break
        if failing is None:
            return M
        M *= 2
    raise CalibrationError(f"no M up to 2^{SEARCH_LIMIT} works; fails over vertex {failing}")


@dataclass(frozen=True)
class AffineFunctional:
    c: tuple[Fraction, ...]
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(as_fraction(x) for x in self.c))
        object.__setattr__(self, "delta", as_fraction(self.delta))

    def __call__(self, x: Sequence) -> Fraction:
        return sum(a * as_fraction(b) for a, b in zip(self.c, x)) + self.delta

    def check_unit_range(self, P: HPolytope) -> bool:
        return all(0 <= self(v) <= 1 for v in brute_force_vertices(P).V)


def az_rank1_matrix(phi: AffineFunctional, b1: Sequence, b2: Sequence) -> tuple[RationalMatrix, tuple[Fraction, ...]]:
    """Rank-one coupling interpolating between right-hand sides ``b1`` (at 0) and ``b2`` (at 1)."""
    b1 = [as_fraction(x) for x in b1]
    b2 = [as_fraction(x) for x in b2]
    if len(b1) != len(b2):
        raise ValueError("b1 and b2 must have equal length")
    diff = [x - y for x, y in zip(b1, b2)]
    C = RationalMatrix([[di * cj for cj in phi.c] for di in diff], len(phi.c))
    b = tuple(x - phi.delta * di for x, di in zip(b1, diff))
    return C, b


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------


def deformed_cube_lhs(n: int, d: int, Gbar, eps) -> RationalMatrix:
    """``2n x n`` matrix; row ``2i`` is the ``+`` side of coordinate ``i``, row ``2i+1`` the ``-`` side."""
    if not 2 <= d <= n:
        raise ValueError("need 2 <= d <= n")
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    K = n - d
    Gbar = matrix(Gbar) if K else RationalMatrix([[] for _ in range(d - 1)], 0)
    if Gbar.shape != (d - 1, K):
        raise ValueError(f"Gbar must be {d - 1} x {K}, got {Gbar.rows} x {Gbar.cols}")
    rows = []
    for i in range(n):
        base = [Fraction(0)] * n
        if 1 <= i <= K:
            base[i - 1] = Fraction(1)
        elif i > K:
            base[:K] = list(Gbar[i - K - 1])
        for sign in (1, -1):
            row = list(base)
            row[i] = sign * eps
            rows.append(row)
    return RationalMatrix(rows, n)


def cube_levels(n: int, d: int, M: Fraction) -> list[Fraction]:
    K = n - d
    return [M ** min(t, K) for t in range(n)]


def polygon_normals(m: int, eps) -> list[tuple[Fraction, Fraction]]:
    if m < 4 or m % 2:
        raise ValueError("m must be even and at least 4")
    eps = as_fraction(eps)
    out = [(Fraction(-1), Fraction(0))]
    out += [(Fraction(1), eps * Fraction(m - 2 * i, m - 2)) for i in range(1, m)]
    return out


def polygon_system(m: int, eps) -> HPolytope:
    """The special ``m``-gon: tangents to a parabola, even rows scaled by ``eps``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    rows, rhs = [], []
    for i, (a, s) in enumerate(polygon_normals(m, eps)):
        scale = eps if i % 2 == 0 else Fraction(1)
        rows.append((scale * a, scale * s))
        rhs.append(scale * (1 + s * s))
    return HPolytope(RationalMatrix(rows, 2), tuple(rhs))


def dpp_lhs(r: int, m: int, d: int, Gbar, eps) -> RationalMatrix:
    """``(r m) x 2r`` matrix; polygon ``l`` owns rows ``l*m .. l*m+m-1`` in edge order."""
    if not 2 <= d <= 2 * r:
        raise ValueError("need 2 <= d <= 2r")
    K = 2 * r - d
    Gbar = matrix(Gbar) if K else RationalMatrix([[] for _ in range(d - 1)], 0)
    if Gbar.shape != (d - 1, K):
        raise ValueError(f"Gbar must be {d - 1} x {K}, got {Gbar.rows} x {Gbar.cols}")
    poly = polygon_system(m, eps).A
    n = 2 * r
    rows = []
    for ell in range(r):
        for e in range(m):
            row = [Fraction(0)] * n
            row[2 * ell], row[2 * ell + 1] = poly[e]
            t = 2 * ell + (0 if e % 2 == 0 else 1)  # 0-based cube coordinate of this row
            if t > K:
                row[:K] = list(Gbar[t - K - 1])
            elif e % 2 == 0 and 1 <= t:
                row[t - 1] = Fraction(1)
            rows.append(row)
    return RationalMatrix(rows, n)


def dpp_levels(r: int, m: int, d: int, M: Fraction) -> list[Fraction]:
    K = 2 * r - d
    cap = (K + 1) // 2
    return [M ** min(ell, cap) for ell in range(r)]


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def cube_vertex_labels(n: int) -> list[SignVector]:
    return [SignVector(s) for s in itertools.product("+-", repeat=n)]


def polygon_vertex_labels(r: int, m: int) -> list[PolygonLabel]:
    single = []
    for i in range(m // 2):
        for b in sorted({(2 * i + 1) % m, (2 * i - 1) % m}):
            single.append((2 * i, b))
    return [PolygonLabel(c) for c in itertools.product(single, repeat=r)]


def _block_solve(A: RationalMatrix, b, rows: Sequence[int], blocks: Sequence[Sequence[int]]):
    """Forward substitution for a block lower-triangular tight system.

    ``rows`` lists the tight rows grouped like ``blocks`` (consecutive column
    groups).  Returns ``None`` when a diagonal block is singular.
    """
    x = [Fraction(0)] * A.cols
    pos = 0
    for cols in blocks:
        R = rows[pos : pos + len(cols)]
        pos += len(cols)
        sub = RationalMatrix([[A[i, c] for c in cols] for i in R], len(cols))
        rhs = [b[i] - sum(A[i, j] * x[j] for j in range(cols[0]) if A[i, j]) for i in R]
        sol = solve(sub, rhs)
        if sol is None:
            return None
        for c, v in zip(cols, sol):
            x[c] = v
    return tuple(x)


@dataclass
class Construction:
    """Common behaviour of the deformed cube and the deformed product of polygons."""

    d: int
    eps: Fraction
    M: Fraction
    Gbar: RationalMatrix
    polytope: HPolytope
    Q: VPolytope | None = None
    _vertices: dict = field(default_factory=dict, repr=False)

    # subclasses provide: n, family, K, vertex_labels(), tight_rows(label), blocks()

    @property
    def K(self) -> int:
        return self.n - self.d

    def vertex(self, label):
        if label not in self._vertices:
            rows = self.tight_rows(label)
            self._vertices[label] = _block_solve(self.polytope.A, self.polytope.b, rows, self.blocks())
        return self._vertices[label]

    def vertices(self) -> list:
        return [self.vertex(v) for v in self.vertex_labels()]

    def projected_vertices(self) -> list[tuple[Fraction, ...]]:
        return [v[self.n - self.d :] for v in self.vertices()]

    def projected_polytope(self) -> VPolytope:
        return VPolytope(RationalMatrix(self.projected_vertices(), self.d))

    def truncated_tight_matrix(self, label) -> RationalMatrix:
        return self.polytope.A.select_rows(self.tight_rows(label)).first_cols(self.K)

    def product_certificate(self) -> tuple[bool, object]:
        """Every labelled basic solution is feasible and tight on exactly its own rows.

        For a simple arrangement this proves combinatorial equivalence to the
        orthogonal product: adjacent labels share all but one tight row, so the
        labelled vertices are closed under taking graph neighbours.
        """
        return _product_check(self.polytope, self.vertex_labels(), self.tight_rows, self.blocks())


def _product_check(H: HPolytope, labels, tight_rows, blocks):
    for label in labels:
        rows = tight_rows(label)
        x = _block_solve(H.A, H.b, rows, blocks)
        if x is None:
            return False, label
        slack = H.slack(x)
        rowset = set(rows)
        for i, s in enumerate(slack):
            if (i in rowset and s != 0) or (i not in rowset and s <= 0):
                return False, label
    return True, None


@dataclass
class DeformedCube(Construction):
    n: int = 0
    family: str = "ncp"

    def vertex_labels(self) -> list[SignVector]:
        return cube_vertex_labels(self.n)

    def tight_rows(self, label) -> tuple[int, ...]:
        return SignVector(label).equality_set()

    def blocks(self):
        return [[i] for i in range(self.n)]


@dataclass
class DeformedPolygonProduct(Construction):
    n: int = 0
    r: int = 0
    m: int = 0
    family: str = "pdpp"

    def vertex_labels(self) -> list[PolygonLabel]:
        return polygon_vertex_labels(self.r, self.m)

    def tight_rows(self, label) -> tuple[int, ...]:
        return PolygonLabel(label).equality_set(self.m)

    def blocks(self):
        return [[2 * ell, 2 * ell + 1] for ell in range(self.r)]


def assemble_cube(n: int, d: int, Gbar, eps, M) -> HPolytope:
    A = deformed_cube_lhs(n, d, Gbar, eps)
    levels = cube_levels(n, d, as_fraction(M))
    b = [lvl for lvl in levels for _ in (0, 1)]
    labels = [f"{i + 1}{s}" for i in range(n) for s in "+-"]
    return HPolytope(A, tuple(b), tuple(labels))


def assemble_dpp(r: int, m: int, d: int, Gbar, eps, M) -> HPolytope:
    A = dpp_lhs(r, m, d, Gbar, eps)
    base = polygon_system(m, eps).b
    levels = dpp_levels(r, m, d, as_fraction(M))
    b = [lvl * x for lvl in levels for x in base]
    labels = [f"{ell + 1}:{e}" for ell in range(r) for e in range(m)]
    return HPolytope(A, tuple(b), tuple(labels))


def _search_M(assemble: Callable, labels, tight_rows, blocks) -> Fraction:
    M = Fraction(1)
    last = None
    for _ in range(SEARCH_LIMIT + 1):
        H = assemble(M)
        ok, last = _product_check(H, labels, tight_rows, blocks)
        if ok:
            return M
        M *= 2
    raise CalibrationError(f"no M up to 2^{SEARCH_LIMIT}; vertex {last} fails")


def build_deformed_cube(n: int, d: int, Gbar, eps, M=None, Q: VPolytope | None = None) -> DeformedCube:
    eps = as_fraction(eps)
    A_probe = deformed_cube_lhs(n, d, Gbar, eps)  # validates shapes
    Gm = matrix(Gbar) if n > d else RationalMatrix([[] for _ in range(d - 1)], 0)
    labels = cube_vertex_labels(n)
    tight = lambda s: SignVector(s).equality_set()
    blocks = [[i] for i in range(n)]
    if M is None:
        M = _search_M(lambda mm: assemble_cube(n, d, Gm, eps, mm), labels, tight, blocks)
    H = assemble_cube(n, d, Gm, eps, M)
    assert H.A == A_probe
    return DeformedCube(d=d, eps=eps, M=as_fraction(M), Gbar=Gm, polytope=H, Q=Q, n=n)


def build_dpp(r: int, m: int, d: int, Gbar, eps, M=None, Q: VPolytope | None = None) -> DeformedPolygonProduct:
    eps = as_fraction(eps)
    Gm = matrix(Gbar) if 2 * r > d else RationalMatrix([[] for _ in range(d - 1)], 0)
    dpp_lhs(r, m, d, Gm, eps)
    labels = polygon_vertex_labels(r, m)
    tight = lambda a: PolygonLabel(a).equality_set(m)
    blocks = [[2 * ell, 2 * ell + 1] for ell in range(r)]
    if M is None:
        M = _search_M(lambda mm: assemble_dpp(r, m, d, Gm, eps, mm), labels, tight, blocks)
    H = assemble_dpp(r, m, d, Gm, eps, M)
    return DeformedPolygonProduct(d=d, eps=eps, M=as_fraction(M), Gbar=Gm, polytope=H, Q=Q, n=2 * r, r=r, m=m)


# ---------------------------------------------------------------------------
# Neighborly polytopes and their Gale data
# ---------------------------------------------------------------------------


def simplex_gale(N: int) -> GaleConfiguration:
    """Gale transform of ``N`` points of a 0-dimensional polytope: ``e_1..e_{N-1}, -1``."""
    k = N - 1
    rows = [[int(i == j) for j in range(k)] for i in range(k)]
    rows.append([-1] * k)
    return GaleConfiguration(RationalMatrix(rows, k), normalized=True)


def neighborly_gale(Q: VPolytope | None, N: int | None = None) -> GaleConfiguration:
    if Q is None:
        if N is None:
            raise ValueError("need Q or the number of points")
        return simplex_gale(N)
    return gale_transform(Q, normalized=True)


def _gale_family_signature(G: RationalMatrix, D: int) -> tuple:
    """Positive-dependence pattern on the subsets that fix a simplicial face lattice.

    Checks the full set, all complements of single points and all complements
    of ``D``-sets (the cofacet candidates).
    """
    N = G.rows
    sizes = sorted({N, N - 1, N - D} - {0})
    sig = []
    for size in sizes:
        for I in itertools.combinations(range(N), size):
            sig.append(positively_dependent(G.select_rows(I))[0])
    return tuple(sig)


@dataclass
class EpsCheck:
    ok: bool
    failing_label: object = None
    check: str = ""
    subset: tuple | None = None


def check_eps_conditions(construction: Construction, G: GaleConfiguration) -> EpsCheck:
    """Perturbed Gale data must keep the face lattice of ``Q`` and stay in general position."""
    K = construction.K
    if K == 0:
        return EpsCheck(True)
    D = construction.d - 2
    target = _gale_family_signature(G.G, D)
    seen = {}
    for label in construction.vertex_labels():
        T = construction.truncated_tight_matrix(label)
        if T in seen:
            if not seen[T].ok:
                return EpsCheck(False, label, seen[T].check, seen[T].subset)
            continue
        rest = T.select_rows(range(1, T.rows))
        if _gale_family_signature(rest, D) != target:
            result = EpsCheck(False, label, "coface family")
        else:
            bad = dependent_row_subset(T)
            result = EpsCheck(bad is None, label if bad else None, "" if bad is None else "general position", bad)
        seen[T] = result
        if not result.ok:
            return result
    return EpsCheck(True)


def calibrate_eps(family: str, d: int, Q: VPolytope | None, n: int | None = None,
                  r: int | None = None, m: int | None = None, start=Fraction(1, 2)):
    """Largest ``eps`` in ``1/2, 1/4, ...`` passing both perturbation checks; ``M`` is searched inside each trial."""
    if family == "ncp":
        N = n - 1
    elif family == "pdpp":
        N = 2 * r - 1
    else:
        raise ValueError(f"unknown family {family!r}")
    G = neighborly_gale(Q, N) if N - (d - 2) - 1 > 0 else None
    Gbar = G.Gbar if G is not None else None
    eps = as_fraction(start)
    last = None
    for _ in range(SEARCH_LIMIT):
        if family == "ncp":
            c = build_deformed_cube(n, d, Gbar, eps, Q=Q)
        else:
            c = build_dpp(r, m, d, Gbar, eps, Q=Q)
        if G is None:
            return c
        last = check_eps_conditions(c, G)
        if last.ok:
            return c
        eps /= 2
    raise CalibrationError(f"no eps down to 2^-{SEARCH_LIMIT}: {last.check} fails at {last.failing_label}")


def apply_seed_order(Q: VPolytope, order: Sequence[int] | None) -> VPolytope:
    if order is None:
        return Q
    order = list(order)
    if sorted(order) != list(range(Q.n_vertices)):
        raise ValueError("seed order must be a permutation of the vertex indices")
    return VPolytope(Q.V.select_rows(order))


def ncp(n: int, d: int, Q: VPolytope | None = None, eps=None) -> DeformedCube:
    """Calibrated deformed cube whose projection is the neighborly cubical polytope.

    ``Q`` defaults to ``cyc_{d-2}(n-1)``; for ``d = 2`` the Gale data of a
    0-dimensional configuration is used.
    """
    if not 2 <= d <= n:
        raise ValueError("need 2 <= d <= n")
    if Q is None and d > 2:
        Q = cyclic_polytope(d - 2, n - 1)
    if Q is not None and (Q.n_vertices != n - 1 or Q.ambient_dim != d - 2):
        raise ValueError(f"Q must have {n - 1} vertices in dimension {d - 2}")
    if eps is None:
        return calibrate_eps("ncp", d, Q, n=n)
    G = neighborly_gale(Q, n - 1) if n > d else None
    return build_deformed_cube(n, d, G.Gbar if G else None, eps, Q=Q)


def pdpp(r: int, m: int, d: int, Q: VPolytope | None = None, eps=None) -> DeformedPolygonProduct:
    if not 2 <= d <= 2 * r:
        raise ValueError("need 2 <= d <= 2r")
    if m < 4 or m % 2:
        raise ValueError("m must be even and at least 4")
    if Q is None and d > 2:
        Q = cyclic_polytope(d - 2, 2 * r - 1)
    if Q is not None and (Q.n_vertices != 2 * r - 1 or Q.ambient_dim != d - 2):
        raise ValueError(f"Q must have {2 * r - 1} vertices in dimension {d - 2}")
    if eps is None:
        return calibrate_eps("pdpp", d, Q, r=r, m=m)
    G = neighborly_gale(Q, 2 * r - 1) if 2 * r > d else None
    return build_dpp(r, m, d, G.Gbar if G else None, eps, Q=Q)


def polygon_is_convex_mgon(m: int, eps) -> bool:
    H = polygon_system(m, eps)
    V = brute_force_vertices(H)
    if V.n_vertices != m or len(planar_hull(V.points())) != m:
        return False
    return all(len(s) >= 2 for s in facet_vertex_incidences(H, V))


__all__ = [
    "AffineFunctional",
    "CalibrationError",
    "Construction",
    "DeformedCube",
    "DeformedPolygonProduct",
    "DeformedProductSpec",
    "EpsCheck",
    "apply_seed_order",
    "assemble_cube",
    "assemble_dpp",
    "az_rank1_matrix",
    "build_deformed_cube",
    "build_deformed_product",
    "build_dpp",
    "calibrate_M",
    "calibrate_eps",
    "check_eps_conditions",
    "cube_vertex_labels",
    "deformed_cube_lhs",
    "dpp_lhs",
    "is_simple",
    "ncp",
    "neighborly_gale",
    "pdpp",
    "polygon_is_convex_mgon",
    "polygon_normals",
    "polygon_system",
    "polygon_vertex_labels",
    "simplex_gale",
    "vertex_signature",
]
