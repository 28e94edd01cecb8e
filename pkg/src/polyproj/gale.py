"""Gale transforms, cyclic polytopes, regular subdivisions and lexicographic pyramids."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .convention import CALIBRATED, Convention
from .exactlin import (
    RationalMatrix,
    as_fraction,
    det,
    inverse,
    matrix,
    nullspace_basis,
    positively_dependent,
    rank,
    solve,
)
from .polytope import VPolytope, brute_force_facets

Cofacet = tuple[int, ...]


@dataclass(frozen=True)
class GaleConfiguration:
    """Rows are the Gale vectors, one per vertex, in vertex order."""

    G: RationalMatrix
    normalized: bool = False

    @property
    def m(self) -> int:
        return self.G.rows

    @property
    def k(self) -> int:
        return self.G.cols

    @property
    def Gbar(self) -> RationalMatrix:
        """Rows below the identity block of a normalized configuration."""
        if not self.normalized:
            raise ValueError("configuration is not in normalized form")
        return self.G.select_rows(range(self.k, self.m))


@dataclass(frozen=True)
class HeightVector:
    w: tuple[Fraction, ...]
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(as_fraction(x) for x in self.w))


def homogenize(Q: VPolytope) -> RationalMatrix:
    return RationalMatrix([list(v) + [1] for v in Q.V], Q.ambient_dim + 1)


def gale_transform(Q: VPolytope, normalized: bool = False) -> GaleConfiguration:
    m, D = Q.V.shape
    if m < D + 1:
        raise ValueError("need at least D+1 vertices")
    H = homogenize(Q)
    if rank(H) != D + 1:
        raise ValueError("vertices do not affinely span the ambient space")
    N = nullspace_basis(H.T)  # m x (m - D - 1)
    k = N.cols
    if not normalized or k == 0:
        return GaleConfiguration(N, normalized=normalized)
    top = N.select_rows(range(k))
    if det(top) == 0:
        raise ValueError(
            f"rows {tuple(range(k))} of the Gale transform are dependent; "
            "the last D+1 vertices are not affinely independent"
        )
    return GaleConfiguration(N @ inverse(top), normalized=True)


def verify_gale(Q: VPolytope, G: GaleConfiguration) -> bool:
    H = homogenize(Q)
    prod = G.G.T @ H if G.k else None
    ok_orth = prod is None or all(x == 0 for x in prod.entries)
    return ok_orth and rank(G.G) == Q.n_vertices - Q.ambient_dim - 1


def is_coface(G: GaleConfiguration | RationalMatrix, I: Iterable[int]) -> bool:
    """Rows ``G_I`` positively dependent, i.e. the complement of ``I`` spans a face."""
    GM = G.G if isinstance(G, GaleConfiguration) else matrix(G)
    I = sorted(set(I))
    if not I:
        raise ValueError("coface index set must be nonempty")
    dependent, _ = positively_dependent(GM.select_rows(I))
    return dependent


def cofacets_from_gale(G: GaleConfiguration | RationalMatrix, facet_size: int) -> list[Cofacet]:
    """0/1 vectors (1 = not in the facet) for all ``facet_size``-vertex faces."""
    GM = G.G if isinstance(G, GaleConfiguration) else matrix(G)
    m = GM.rows
    out = []
    for zeros in itertools.combinations(range(m), facet_size):
        I = [i for i in range(m) if i not in zeros]
        if I and is_coface(GM, I):
            out.append(tuple(0 if i in zeros else 1 for i in range(m)))
    return sorted(out)


def coface_family(G: GaleConfiguration | RationalMatrix) -> frozenset[frozenset[int]]:
    GM = G.G if isinstance(G, GaleConfiguration) else matrix(G)
    m = GM.rows
    family = set()
    for size in range(1, m + 1):
        for I in itertools.combinations(range(m), size):
            if is_coface(GM, I):
                family.add(frozenset(I))
    return frozenset(family)


# ---------------------------------------------------------------------------
# Cyclic polytopes
# ---------------------------------------------------------------------------


def cyclic_polytope(D: int, t: Sequence | int) -> VPolytope:
    if isinstance(t, int):
        t = range(1, t + 1)
    params = [as_fraction(x) for x in t]
    if len(set(params)) != len(params):
        raise ValueError("moment curve parameters must be distinct")
    if len(params) < D + 1:
        raise ValueError(f"need at least {D + 1} parameters")
    return VPolytope(RationalMatrix([[x**e for e in range(1, D + 1)] for x in params], D))


def parity_of(a: Sequence[int]) -> int | None:
    """Common parity of the number of zeros preceding each 1; ``None`` if mixed.

    A vector without ones returns ``-1`` (both parities hold).
    """
    seen = set()
    zeros = 0
    for x in a:
        if x == 0:
            zeros += 1
        else:
            seen.add(zeros % 2)
    if not seen:
        return -1
    if len(seen) == 2:
        return None
    return seen.pop()


def is_gale_cofacet(a: Sequence[int], D: int) -> bool:
    return list(a).count(0) == D and parity_of(a) is not None


def gale_evenness_cofacets(D: int, N: int) -> list[Cofacet]:
    if N < D + 1:
        raise ValueError("need N >= D + 1")
    out = []
    for zeros in itertools.combinations(range(N), D):
        a = tuple(0 if i in zeros else 1 for i in range(N))
        if parity_of(a) is not None:
            out.append(a)
    return sorted(out)


def cofacet_string(a: Sequence[int]) -> str:
    return "".join(str(int(x)) for x in a)


# ---------------------------------------------------------------------------
# Regular subdivisions
# ---------------------------------------------------------------------------


def normalize_heights(Q: VPolytope, w: Sequence) -> HeightVector:
    """Subtract the affine function through the last ``D+1`` lifted points."""
    m, D = Q.V.shape
    w = [as_fraction(x) for x in w]
    if len(w) != m:
        raise ValueError("one height per vertex required")
    last = range(m - D - 1, m)
    A = RationalMatrix([list(Q.V[i]) + [1] for i in last], D + 1)
    coef = solve(A, [w[i] for i in last])
    if coef is None:
        raise ValueError("the last D+1 vertices are affinely dependent")
    out = [w[i] - sum(c * x for c, x in zip(coef, list(Q.V[i]) + [1])) for i in range(m)]
    return HeightVector(tuple(out), normalized=True)


def _apex_height(Q: VPolytope, w: Sequence[Fraction]) -> Fraction:
    D = Q.ambient_dim
    wmax = max((abs(x) for x in w), default=Fraction(0))
    cmax = max((abs(x) for x in Q.V.entries), default=Fraction(0))
    return 1 + (D + 1) * wmax * (cmax + 1)


def regular_subdivision(Q: VPolytope, w: HeightVector | Sequence) -> list[tuple[int, ...]]:
    """Cells of the subdivision induced by lifting vertex ``i`` to height ``w_i``.

    The lifted points are joined with an apex above the centroid; the facets
    of that hull avoiding the apex are the cells.
    """
    heights = w.w if isinstance(w, HeightVector) else tuple(as_fraction(x) for x in w)
    m, D = Q.V.shape
    if len(heights) != m:
        raise ValueError("one height per vertex required")
    centroid = [sum(Q.V.column(j)) / m for j in range(D)]
    base_facets = brute_force_facets(Q)
    h0 = _apex_height(Q, heights)
    for _ in range(41):
        lifted = [[heights[i]] + list(Q.V[i]) for i in range(m)]
        lifted.append([h0] + centroid)
        facets = brute_force_facets(VPolytope(RationalMatrix(lifted, D + 1)))
        apex = m
        star = sorted(tuple(i for i in f if i != apex) for f in facets if apex in f)
        if star == base_facets:
            return sorted(f for f in facets if apex not in f)
        h0 *= 2
    raise RuntimeError("apex height search did not converge")


def heights_gale(G: GaleConfiguration, w: HeightVector, eps) -> RationalMatrix:
    """Stack ``-eps * wbar`` on top of a normalized Gale configuration."""
    if not G.normalized:
        raise ValueError("Gale configuration must be normalized")
    if not w.normalized:
        raise ValueError("heights must be normalized")
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = G.k
    if any(x != 0 for x in w.w[k:]):
        raise ValueError("normalized heights must vanish past the Gale columns")
    top = [-eps * x for x in w.w[:k]]
    return RationalMatrix([top] + [list(r) for r in G.G], k)


def lex_heights(N: int, D: int, k: int, gap: Fraction = Fraction(1, 8)) -> HeightVector:
    """Heights pushing ``v_1..v_{k-1}`` and pulling ``v_k`` with ``|w_{i+1}| = gap |w_i|``.

    ``k`` larger than ``N - D - 1`` pushes every free vertex.
    """
    free = N - D - 1
    w = []
    for i in range(1, free + 1):
        mag = gap ** (i - 1)
        w.append(-mag if i == k else mag)
        if i == k:
            w.extend(Fraction(0) for _ in range(free - i))
            break
    w.extend(Fraction(0) for _ in range(N - len(w)))
    return HeightVector(tuple(w), normalized=True)


def lexicographic_triangulation(Q: VPolytope, k: int) -> list[tuple[int, ...]]:
    """Push ``v_1..v_{k-1}``, pull ``v_k`` and return the cells (procedural oracle).

    Facets of each intermediate subpolytope come from the brute-force hull;
    ``k = N - D`` pushes every free vertex and keeps the final simplex.
    """
    m, D = Q.V.shape
    free = m - D - 1
    if not 1 <= k <= free + 1:
        raise ValueError(f"k must lie in 1..{free + 1}")

    def facets_of(start: int) -> set[tuple[int, ...]]:
        idx = list(range(start, m))
        sub = VPolytope(Q.V.select_rows(idx))
        return {tuple(idx[i] for i in f) for f in brute_force_facets(sub)}

    cells = []
    current = facets_of(0)
    for j in range(min(k, free + 1)):
        if j == free:  # everything pushed: the remaining simplex is a cell
            cells.append(tuple(range(free, m)))
            break
        nxt = facets_of(j + 1)
        if j + 1 < k:  # push v_{j+1}: cone over facets of the next subpolytope that are new
            cells.extend(tuple(sorted((j,) + f)) for f in sorted(nxt - current))
        else:  # pull v_{j+1}: cone over facets of the current subpolytope avoiding it
            cells.extend(tuple(sorted((j,) + f)) for f in sorted(current) if j not in f)
        current = nxt
    return sorted(cells)


def cells_to_cofacets(cells: Iterable[Sequence[int]], m: int, with_apex: bool = True) -> list[Cofacet]:
    """Cells of a subdivision as pyramid cofacet vectors (apex entry first, equal to 1)."""
    out = []
    for cell in cells:
        body = tuple(0 if i in cell else 1 for i in range(m))
        out.append(((1,) + body) if with_apex else body)
    return sorted(out)


def pyramid_cofacets(Q_facets: Iterable[Sequence[int]], m: int) -> list[Cofacet]:
    return sorted((0,) + tuple(0 if i in f else 1 for i in range(m)) for f in Q_facets)


def lex_pyramid_oracle(Q: VPolytope, k: int, procedural: bool = False) -> list[Cofacet]:
    """Cofacets of the k-th lexicographic pyramid computed geometrically."""
    m, D = Q.V.shape
    base = brute_force_facets(Q)
    if procedural:
        cells = lexicographic_triangulation(Q, k)
    else:
        w = lex_heights(m, D, k)
        cells = regular_subdivision(Q, w)
    return sorted(pyramid_cofacets(base, m) + cells_to_cofacets(cells, m))


def _parity_holds(tail: Sequence[int], want_even: bool, mode: str) -> bool:
    par = parity_of(tail)
    if par is None:
        return False
    if par == -1:
        return True
    if mode == "shifted":
        par ^= 1
    return par == (0 if want_even else 1)


def lex_pyramid_cofacets_cyclic(
    D: int, N: int, k: int, convention: Convention = CALIBRATED
) -> list[Cofacet]:
    """Cofacets of the ``k``-th lexicographic pyramid over ``cyc_D(N)`` by evenness rules.

    Vectors have length ``N+1`` with the apex first.  A vector whose first
    zero is the apex is a cone over a facet of the cyclic polytope.
    Otherwise let ``p`` be the label of the first zero (the apex carries
    label ``convention.apex_index``); the vector is a cell when ``p < k`` and
    the tail is "even", or ``p == k`` and the tail is "odd", with parity read
    per ``convention.lemma_parity``.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    if N < D + 1:
        raise ValueError("N must be at least D + 1")
    if not 1 <= k <= N - D + 1:
        raise ValueError(f"k={k} outside 1..{N - D + 1}")
    out = []
    for zeros in itertools.combinations(range(N + 1), D + 1):
        a = tuple(0 if i in zeros else 1 for i in range(N + 1))
        first = zeros[0]
        tail = a[first + 1 :]
        if first == 0:
            if is_gale_cofacet(tail, D):
                out.append(a)
            continue
        if tail.count(0) != D:
            continue
        p = first + convention.apex_index
        if p < k and _parity_holds(tail, True, convention.lemma_parity):
            out.append(a)
        elif p == k and _parity_holds(tail, False, convention.lemma_parity):
            out.append(a)
    return sorted(out)


def lex_pyramid_cofacets_gale(Q: VPolytope, k: int, eps=Fraction(1, 16)) -> list[Cofacet]:
    """Cofacets of ``L_k(Q)`` read from the stacked Gale configuration.

    ``eps`` is halved until the result agrees with the result at half the
    value, which implements "sufficiently small".
    """
    m, D = Q.V.shape
    G = gale_transform(Q, normalized=True)
    w = lex_heights(m, D, k)
    eps = as_fraction(eps)
    prev = None
    for _ in range(40):
        cur = cofacets_from_gale(heights_gale(G, w, eps), D + 1)
        if cur == prev:
            return cur
        prev = cur
        eps /= 2
    raise RuntimeError("Gale readout did not stabilize")


__all__ = [
    "Cofacet",
    "GaleConfiguration",
    "HeightVector",
    "cells_to_cofacets",
    "coface_family",
    "cofacet_string",
    "cofacets_from_gale",
    "cyclic_polytope",
    "gale_evenness_cofacets",
    "gale_transform",
    "heights_gale",
    "homogenize",
    "is_coface",
    "is_gale_cofacet",
    "lex_heights",
    "lex_pyramid_cofacets_cyclic",
    "lex_pyramid_cofacets_gale",
    "lex_pyramid_oracle",
    "lexicographic_triangulation",
    "normalize_heights",
    "parity_of",
    "pyramid_cofacets",
    "regular_subdivision",
    "verify_gale",
]
