"""Strict preservation under projection and the combinatorics of the projected polytopes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .convention import CALIBRATED, Convention
from .deformed import (
    Construction,
    DeformedCube,
    DeformedPolygonProduct,
    cube_vertex_labels,
    polygon_vertex_labels,
)
from .exactlin import (
    RationalMatrix,
    SpanCertificate,
    dependent_row_subset,
    det,
    independent_rows,
    nullspace_basis,
    positively_dependent,
    rank,
    verify_span_certificate,
)
from .gale import (
    Cofacet,
    cyclic_polytope,
    gale_evenness_cofacets,
    is_gale_cofacet,
    lex_pyramid_cofacets_cyclic,
    lex_pyramid_cofacets_gale,
    lex_pyramid_oracle,
    parity_of,
)
from .polytope import (
    STAR,
    FVector,
    HPolytope,
    PolygonLabel,
    SignVector,
    VPolytope,
    brute_force_facets,
    cube_faces,
    polygon_product_faces,
)

# ---------------------------------------------------------------------------
# Preservation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PreservationReport:
    """Decision for one face.  ``basis_rows`` proves full rank, ``null_vector`` its failure."""

    face: object
    rows: tuple[int, ...]
    preserved: bool
    certificate: SpanCertificate
    basis_rows: tuple[int, ...] | None = None
    null_vector: tuple[Fraction, ...] | None = None


def truncated_rows(P: HPolytope, I: Sequence[int], d: int) -> RationalMatrix:
    K = P.ambient_dim - d
    return P.A.select_rows(I).first_cols(K)


def is_preserved(P: HPolytope, I: Iterable[int], d: int, face=None) -> PreservationReport:
    I = tuple(sorted(set(I)))
    if not I:
        raise ValueError("equality set must be nonempty")
    if not 1 <= d <= P.ambient_dim:
        raise ValueError("target dimension out of range")
    T = truncated_rows(P, I, d)
    dependent, cert = positively_dependent(T)
    if not dependent:
        return PreservationReport(face, I, False, cert)
    basis = independent_rows(T)
    if len(basis) == T.cols:
        return PreservationReport(face, I, True, cert, basis_rows=basis)
    null = nullspace_basis(T)
    return PreservationReport(face, I, False, cert, null_vector=tuple(null.column(0)))


def verify_report(P: HPolytope, report: PreservationReport, d: int) -> bool:
    """Re-check a report from its certificates only."""
    T = truncated_rows(P, report.rows, d)
    if not verify_span_certificate(T, report.certificate):
        return False
    if report.certificate.kind == "witness":
        return not report.preserved
    if report.preserved:
        rows = report.basis_rows
        return rows is not None and len(rows) == T.cols and det(T.select_rows(rows)) != 0
    y = report.null_vector
    if y is None or not any(y):
        return False
    return all(sum(a * b for a, b in zip(row, y)) == 0 for row in T)


def face_rows(construction: Construction, label) -> tuple[int, ...]:
    if isinstance(construction, DeformedCube):
        return SignVector(label).equality_set()
    return PolygonLabel(label).equality_set(construction.m)


def k_face_labels(construction: Construction, k: int) -> list:
    if isinstance(construction, DeformedCube):
        return cube_faces(construction.n, k)
    return polygon_product_faces(construction.r, construction.m, k)


def preservation_reports(construction: Construction, k: int) -> list[PreservationReport]:
    P, d = construction.polytope, construction.d
    return [is_preserved(P, face_rows(construction, f), d, face=f) for f in k_face_labels(construction, k)]


def preserved_k_faces(construction: Construction, k: int) -> list:
    if not 0 <= k <= construction.d - 1:
        raise ValueError("k must lie in 0..d-1")
    return [r.face for r in preservation_reports(construction, k) if r.preserved]


def all_strict_condition(construction: Construction) -> tuple[bool, tuple | None]:
    """General position of every vertex's truncated tight rows; returns a failing witness."""
    if construction.K == 0:
        return True, None
    seen = set()
    for label in construction.vertex_labels():
        T = construction.truncated_tight_matrix(label)
        if T in seen:
            continue
        seen.add(T)
        bad = dependent_row_subset(T)
        if bad is not None:
            return False, (label, bad)
    return True, None


# ---------------------------------------------------------------------------
# Folding map
# ---------------------------------------------------------------------------


def fold_pair(pair: tuple, m: int) -> str:
    a, b = pair
    if a == STAR and b == STAR:
        return "00"
    if b == STAR:
        return "-0" if a == 0 else "+0"
    if a == STAR:
        # odd rows bound the second square coordinate; the sign follows the
        # slope of the tangent line, which changes sign at the middle row
        return "0+" if 2 * b < m else "0-"
    return ("-" if a == 0 else "+") + ("+" if 2 * b < m else "-")


def fold(label: PolygonLabel, m: int) -> SignVector:
    """Concatenate the per-factor images in the 2-cube face poset (``0`` = free)."""
    return SignVector("".join(fold_pair(p, m) for p in PolygonLabel(label)))


def fold_weights(m: int) -> dict[str, int]:
    """Number of faces of one even ``m``-gon folding onto each face of the square."""
    from .polytope import polygon_faces

    counts: dict[str, int] = {}
    for face in polygon_faces(m):
        key = fold_pair(face, m)
        counts[key] = counts.get(key, 0) + 1
    return counts


def fold_preimages(m: int) -> dict[str, list[tuple]]:
    from .polytope import polygon_faces

    out: dict[str, list[tuple]] = {}
    for face in polygon_faces(m):
        out.setdefault(fold_pair(face, m), []).append(face)
    return out


# ---------------------------------------------------------------------------
# Vertex figures and facet criteria
# ---------------------------------------------------------------------------


def default_index(K: int, convention: Convention = CALIBRATED) -> int:
    return K + convention.default_offset


def vertex_figure_index(v, K: int, convention: Convention = CALIBRATED, m: int | None = None) -> int:
    """Index ``p`` of the lexicographic pyramid describing the vertex figure at ``v``.

    ``K`` is the number of projected-away coordinates; polygon labels also
    need ``m``.
    """
    if isinstance(v, PolygonLabel) or (isinstance(v, tuple) and v and isinstance(v[0], tuple)):
        if m is None:
            raise ValueError("m is required for polygon labels")
        label = PolygonLabel(v)
        if label.dim != 0:
            raise ValueError("not a vertex label")
        signs, trigger = fold(label, m), convention.pdpp_trigger
    else:
        signs, trigger = SignVector(v), convention.ncp_trigger
        if not signs.is_vertex:
            raise ValueError("not a vertex label")
    hits = [i + 1 for i, s in enumerate(signs) if s == trigger]
    return min(hits + [default_index(K, convention)])


def _cubical_parity_ok(par: int, want_even: bool, convention: Convention) -> bool:
    if par == -1:
        return True
    if convention.cubical_parity == "shifted":
        par ^= 1
    return par == (0 if want_even else 1)


def is_cubical_gale_facet(alpha: str, d: int, convention: Convention = CALIBRATED) -> bool:
    alpha = SignVector(alpha)
    n, D = len(alpha), d - 2
    if alpha.count("0") != d - 1:
        return False
    p = alpha.index("0") + 1
    tail = [0 if c == "0" else 1 for c in alpha[p:]]
    if not is_gale_cofacet(tail, D):
        return False
    if p == 1:
        return True
    if any(c != "-" for c in alpha[: p - 2]):
        return False
    s = alpha[p - 2]
    return _cubical_parity_ok(parity_of(tail), s == "-", convention)


def cubical_gale_facets(n: int, d: int, convention: Convention = CALIBRATED) -> list[SignVector]:
    if not 2 <= d <= n:
        raise ValueError("need 2 <= d <= n")
    out = []
    for zeros in itertools.combinations(range(n), d - 1):
        for signs in itertools.product("+-", repeat=n - d + 1):
            it = iter(signs)
            alpha = "".join("0" if i in zeros else next(it) for i in range(n))
            if is_cubical_gale_facet(alpha, d, convention):
                out.append(SignVector(alpha))
    return sorted(out)


def pdpp_facets(r: int, m: int, d: int, convention: Convention = CALIBRATED) -> list[PolygonLabel]:
    pre = fold_preimages(m)
    out = []
    for alpha in cubical_gale_facets(2 * r, d, convention):
        choices = [pre.get(alpha[2 * i : 2 * i + 2], []) for i in range(r)]
        out.extend(PolygonLabel(c) for c in itertools.product(*choices))
    return sorted(out, key=PolygonLabel.sort_key)


def _face_from_cofacet(v, a: Sequence[int]):
    if isinstance(v, SignVector):
        return SignVector("".join(s if x else "0" for s, x in zip(v, a)))
    flat = [e for pair in v for e in pair]
    kept = [e if x else STAR for e, x in zip(flat, a)]
    return PolygonLabel(zip(kept[0::2], kept[1::2]))


def lex_cofacets_for(construction: Construction, p: int, convention: Convention = CALIBRATED) -> list[Cofacet]:
    """Cofacets of ``L_p(Q)`` for the construction's ``Q`` (cyclic rules or the Gale route)."""
    D = construction.d - 2
    N = construction.n - 1
    Q = construction.Q
    if Q is None:
        raise ValueError("vertex figures need a polytope Q (d >= 3)")
    if Q == cyclic_polytope(D, N):
        return lex_pyramid_cofacets_cyclic(D, N, p, convention)
    return lex_pyramid_cofacets_gale(Q, p)


def facets_via_vertex_figures(construction: Construction, convention: Convention = CALIBRATED) -> list:
    """Union over vertices of the faces predicted by the lexicographic pyramids."""
    cache: dict[int, list[Cofacet]] = {}
    m = getattr(construction, "m", None)
    faces = set()
    for v in construction.vertex_labels():
        p = vertex_figure_index(v, construction.K, convention, m=m)
        if p not in cache:
            cache[p] = lex_cofacets_for(construction, p, convention)
        for a in cache[p]:
            faces.add(_face_from_cofacet(v, a))
    key = PolygonLabel.sort_key if isinstance(construction, DeformedPolygonProduct) else None
    return sorted(faces, key=key)


# ---------------------------------------------------------------------------
# Geometric cross-checks
# ---------------------------------------------------------------------------


def label_vertex_set(construction: Construction, label) -> frozenset[int]:
    labels = construction.vertex_labels()
    return frozenset(i for i, v in enumerate(labels) if v.leq(label))


def join_label(construction: Construction, indices: Iterable[int]):
    labels = construction.vertex_labels()
    chosen = [labels[i] for i in indices]
    if isinstance(construction, DeformedCube):
        return SignVector("".join(col[0] if len(set(col)) == 1 else "0" for col in zip(*chosen)))
    flat = [[e for pair in v for e in pair] for v in chosen]
    kept = [col[0] if len(set(col)) == 1 else STAR for col in zip(*flat)]
    return PolygonLabel(zip(kept[0::2], kept[1::2]))


def geometric_facets(construction: Construction) -> list[frozenset[int]]:
    return [frozenset(f) for f in brute_force_facets(construction.projected_polytope())]


def geometric_facet_labels(construction: Construction) -> list:
    """Facets of the projected hull as face labels; raises if a facet is not a product face."""
    out = []
    for f in geometric_facets(construction):
        label = join_label(construction, f)
        if label_vertex_set(construction, label) != f:
            raise AssertionError(f"hull facet {sorted(f)} is not the image of a product face")
        out.append(label)
    key = PolygonLabel.sort_key if isinstance(construction, DeformedPolygonProduct) else None
    return sorted(out, key=key)


def combinatorial_facets(construction: Construction, convention: Convention = CALIBRATED) -> list:
    if isinstance(construction, DeformedCube):
        if construction.Q is not None and construction.Q == cyclic_polytope(construction.d - 2, construction.n - 1):
            return cubical_gale_facets(construction.n, construction.d, convention)
    elif construction.Q is not None and construction.Q == cyclic_polytope(construction.d - 2, 2 * construction.r - 1):
        return pdpp_facets(construction.r, construction.m, construction.d, convention)
    return facets_via_vertex_figures(construction, convention)


def vertex_figure_mismatches(construction: Construction, facet_labels: Iterable, convention: Convention = CALIBRATED) -> list:
    """Vertices whose incident facets differ from the cofacets of ``L_p(Q)``."""
    m = getattr(construction, "m", None)
    facet_labels = list(facet_labels)
    bad = []
    cache: dict[int, set] = {}
    for v in construction.vertex_labels():
        p = vertex_figure_index(v, construction.K, convention, m=m)
        if p not in cache:
            cache[p] = set(lex_cofacets_for(construction, p, convention))
        incident = set()
        for f in facet_labels:
            if v.leq(f):
                if isinstance(v, SignVector):
                    incident.add(tuple(0 if c == "0" else 1 for c in f))
                else:
                    incident.add(tuple(0 if e == STAR else 1 for pair in f for e in pair))
        if incident != cache[p]:
            bad.append((v, p))
    return bad


def face_lattice_counts(points: VPolytope, facets: Sequence[Iterable[int]]) -> FVector:
    """Face numbers of a polytope from its facet vertex sets (closure under intersection)."""
    D = points.ambient_dim
    V = points.V
    faces = {frozenset(f) for f in facets}
    frontier = set(faces)
    while frontier:
        new = set()
        for a in frontier:
            for b in faces | new:
                c = a & b
                if c and c not in faces and c not in new:
                    new.add(c)
        faces |= new
        frontier = new
    counts = [0] * D
    for f in faces:
        pts = [V[i] for i in sorted(f)]
        base = pts[0]
        diffs = [[x - y for x, y in zip(p, base)] for p in pts[1:]]
        dim = rank(RationalMatrix(diffs, D)) if diffs else 0
        counts[dim] += 1
    return FVector(tuple(counts))


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def _step(state, ch: str, D: int):
    kind = state[0]
    if kind == "A":
        if ch == "-":
            return ("A", True)
        if ch == "+":
            return ("B",)
        return ("C", "s-" if state[1] else "p1", 0, -1)
    if kind == "B":
        return ("C", "s+", 0, -1) if ch == "0" else None
    _, mode, z, par = state
    if ch == "0":
        return None if z + 1 > D else ("C", mode, z + 1, par)
    q = z % 2
    if par == -1:
        return ("C", mode, z, q)
    return ("C", mode, z, par) if par == q else None


def _accept(state, D: int, convention: Convention) -> bool:
    if state[0] != "C":
        return False
    _, mode, z, par = state
    if z != D:
        return False
    if mode == "p1":
        return True
    return _cubical_parity_ok(par, mode == "s-", convention)


def count_cubical_facets(n: int, d: int, pair_weights: dict[str, int] | None = None,
                         convention: Convention = CALIBRATED) -> int:
    """Weighted number of cubical Gale facet patterns by a left-to-right automaton.

    Without weights every pattern counts once.  With ``pair_weights`` the
    positions are consumed in pairs and each pair contributes the number of
    polygon faces folding onto it.
    """
    D = d - 2
    states: dict[tuple, int] = {("A", False): 1}
    if pair_weights is None:
        for _ in range(n):
            nxt: dict[tuple, int] = {}
            for st, cnt in states.items():
                for ch in "+-0":
                    s2 = _step(st, ch, D)
                    if s2 is not None:
                        nxt[s2] = nxt.get(s2, 0) + cnt
            states = nxt
    else:
        if n % 2:
            raise ValueError("pair weights need an even length")
        for _ in range(n // 2):
            nxt = {}
            for st, cnt in states.items():
                for pair, w in pair_weights.items():
                    if not w:
                        continue
                    s1 = _step(st, pair[0], D)
                    s2 = _step(s1, pair[1], D) if s1 is not None else None
                    if s2 is not None:
                        nxt[s2] = nxt.get(s2, 0) + cnt * w
            states = nxt
    return sum(cnt for st, cnt in states.items() if _accept(st, D, convention))


ENUMERATION_LIMIT = 200_000


def projected_fvector(family: str, d: int = 4, n: int | None = None, r: int | None = None,
                      m: int | None = None, mode: str = "auto",
                      convention: Convention = CALIBRATED) -> FVector:
    """f-vector of a 4-dimensional NCP or standard PDPP.

    ``f0`` and ``f1`` come from the preserved skeleton of the product, ``f3``
    from the facet criterion, ``f2`` from Euler's relation.
    """
    if d != 4:
        raise ValueError("combinatorial f-vectors are implemented for d = 4")
    if family == "ncp":
        if n is None or n < 4:
            raise ValueError("ncp needs n >= 4")
        f0, f1 = 2**n, n * 2 ** (n - 1)
        size = 3**n
        enum = lambda: len(cubical_gale_facets(n, d, convention))
        dp = lambda: count_cubical_facets(n, d, None, convention)
    elif family == "pdpp":
        if r is None or m is None or r < 2:
            raise ValueError("pdpp needs r >= 2 and m")
        f0, f1 = m**r, r * m**r
        size = (m * m + 2 * m + 1) ** r
        enum = lambda: len(pdpp_facets(r, m, d, convention))
        dp = lambda: count_cubical_facets(2 * r, d, fold_weights(m), convention)
    else:
        raise ValueError(f"unknown family {family!r}")
    if mode == "auto":
        mode = "enumerate" if size <= ENUMERATION_LIMIT else "dp"
    if mode == "enumerate":
        if size > ENUMERATION_LIMIT * 100:
            raise ValueError("too many labels to enumerate; use mode='dp'")
        f3 = enum()
    elif mode == "dp":
        f3 = dp()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    f2 = f1 + f3 - f0
    return FVector((f0, f1, f2, f3))


# ---------------------------------------------------------------------------
# Convention calibration
# ---------------------------------------------------------------------------


def _lemma_candidates():
    for apex in (0, 1):
        for parity in ("local", "shifted"):
            for offset in (-1, 0, 1):
                yield apex, parity, offset


def calibrate_lemma_convention(cases=None) -> list[tuple[int, str, int]]:
    """Readings of the cyclic lexicographic-pyramid rule that match the lifted-hull oracle."""
    if cases is None:
        cases = [(D, N) for D in (2, 3) for N in (5, 6, 7)]
    survivors = set(_lemma_candidates())
    for D, N in cases:
        Q = cyclic_polytope(D, N)
        free = N - D - 1
        for k in range(1, free + 2):
            oracle = lex_pyramid_oracle(Q, k)
            for cand in list(survivors):
                apex, parity, offset = cand
                conv = CALIBRATED.with_(apex_index=apex, lemma_parity=parity, default_offset=offset)
                kk = k if k <= free else free + offset
                if not 1 <= kk <= N - D + 1 or lex_pyramid_cofacets_cyclic(D, N, kk, conv) != oracle:
                    survivors.discard(cand)
    return sorted(survivors)


def calibrate_triggers(ncp_constructions, pdpp_constructions, base: Convention = CALIBRATED):
    """Trigger signs and cubical parity reading consistent with the oracles.

    NCP instances are compared against the projected hull; PDPP instances
    against per-face preservation decisions (which avoids a large hull).
    """
    ncp_ok = []
    for trig in ("+", "-"):
        conv = base.with_(ncp_trigger=trig)
        good = True
        for c in ncp_constructions:
            labels = geometric_facet_labels(c)
            if vertex_figure_mismatches(c, labels, conv):
                good = False
                break
        if good:
            ncp_ok.append(trig)
    parity_ok = []
    for par in ("local", "shifted"):
        conv = base.with_(cubical_parity=par)
        if all(cubical_gale_facets(c.n, c.d, conv) == geometric_facet_labels(c) for c in ncp_constructions):
            parity_ok.append(par)
    pdpp_ok = []
    for trig in ("+", "-"):
        conv = base.with_(pdpp_trigger=trig)
        good = True
        for c in pdpp_constructions:
            preserved = preserved_k_faces(c, c.d - 1)
            if vertex_figure_mismatches(c, preserved, conv):
                good = False
                break
        if good:
            pdpp_ok.append(trig)
    return ncp_ok, parity_ok, pdpp_ok


__all__ = [
    "PreservationReport",
    "all_strict_condition",
    "calibrate_lemma_convention",
    "calibrate_triggers",
    "combinatorial_facets",
    "count_cubical_facets",
    "cubical_gale_facets",
    "face_lattice_counts",
    "face_rows",
    "facets_via_vertex_figures",
    "fold",
    "fold_preimages",
    "fold_weights",
    "geometric_facet_labels",
    "geometric_facets",
    "is_cubical_gale_facet",
    "is_preserved",
    "join_label",
    "k_face_labels",
    "label_vertex_set",
    "lex_cofacets_for",
    "pdpp_facets",
    "preservation_reports",
    "preserved_k_faces",
    "projected_fvector",
    "verify_report",
    "vertex_figure_index",
    "vertex_figure_mismatches",
]
