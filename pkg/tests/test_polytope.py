import itertools
import random
from fractions import Fraction

import pytest

from polyproj.exactlin import RationalMatrix
from polyproj.gale import cyclic_polytope, gale_evenness_cofacets
from polyproj.polytope import (
    BudgetExceeded,
    FVector,
    HPolytope,
    PolygonLabel,
    SignVector,
    VPolytope,
    brute_force_facets,
    brute_force_vertices,
    cube_faces,
    fatness,
    is_face,
    oracle_budget,
    planar_hull,
    polygon_faces,
    polygon_product_faces,
    product_fvector,
    vertex_from_equality_set,
)

SQUARE = HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])


def test_vertex_from_equality_set():
    assert vertex_from_equality_set(SQUARE, [0, 2]) == (1, 1)
    assert vertex_from_equality_set(SQUARE, [0, 1]) is None


def test_vertex_from_equality_set_infeasible_basis():
    tri = HPolytope([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])
    assert vertex_from_equality_set(tri, [0, 1]) == (0, 0)
    big = HPolytope([[-1, 0], [0, -1], [1, 1], [1, 0]], [0, 0, 1, 2])
    assert vertex_from_equality_set(big, [1, 3]) is None


def test_square_vertices():
    V = brute_force_vertices(SQUARE)
    assert V.points() == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_triangle_times_triangle():
    rows, rhs = [], []
    tri = [([-1, 0], 0), ([0, -1], 0), ([1, 1], 1)]
    for a, b in tri:
        rows.append(a + [0, 0]); rhs.append(b)
    for a, b in tri:
        rows.append([0, 0] + a); rhs.append(b)
    assert brute_force_vertices(HPolytope(rows, rhs)).n_vertices == 9


def test_vertex_budget_refuses(monkeypatch):
    monkeypatch.setenv("POLYPROJ_BUDGET", "3")
    assert oracle_budget() == 3
    with pytest.raises(BudgetExceeded):
        brute_force_vertices(SQUARE)


def test_budget_env_validation(monkeypatch):
    monkeypatch.setenv("POLYPROJ_BUDGET", "lots")
    with pytest.raises(ValueError):
        oracle_budget()


def test_hpolytope_needs_enough_rows():
    with pytest.raises(ValueError):
        HPolytope([[1, 0], [0, 1]], [1, 1])


def test_triangle_facets():
    assert brute_force_facets(VPolytope([[0, 0], [1, 0], [0, 1]])) == [(0, 1), (0, 2), (1, 2)]


def test_octahedron_facets():
    pts = []
    for i in range(3):
        for s in (1, -1):
            p = [0, 0, 0]
            p[i] = s
            pts.append(p)
    facets = brute_force_facets(VPolytope(pts))
    assert len(facets) == 8 and all(len(f) == 3 for f in facets)


def test_cube_facets_are_merged():
    pts = list(itertools.product((0, 1), repeat=3))
    facets = brute_force_facets(VPolytope(pts))
    assert len(facets) == 6 and all(len(f) == 4 for f in facets)


def test_dimension_deficient_input_is_rejected():
    with pytest.raises(ValueError):
        brute_force_facets(VPolytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]))


@pytest.mark.parametrize("D,N", [(3, 6), (4, 7)])
def test_cyclic_facets_match_evenness(D, N):
    got = {tuple(f) for f in brute_force_facets(cyclic_polytope(D, N))}
    want = {tuple(i for i, x in enumerate(a) if x == 0) for a in gale_evenness_cofacets(D, N)}
    assert got == want


def test_facets_invariant_under_affine_map_and_permutation():
    Q = cyclic_polytope(3, 6)
    base = {frozenset(f) for f in brute_force_facets(Q)}
    T = [[2, 1, 0], [0, 1, 3], [1, 0, 1]]
    shift = [Fraction(1, 3), -2, 5]
    pts = [[sum(T[i][j] * p[j] for j in range(3)) + shift[i] for i in range(3)] for p in Q.points()]
    perm = list(range(len(pts)))
    random.Random(7).shuffle(perm)
    moved = VPolytope([pts[p] for p in perm])
    relabeled = {frozenset(perm[i] for i in f) for f in brute_force_facets(moved)}
    assert relabeled == base


def test_is_face():
    tri = VPolytope([[0, 0], [2, 0], [0, 2]])
    assert is_face(tri, [0, 1])
    sq = VPolytope([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert not is_face(sq, [0, 2])


def test_planar_hull_drops_interior():
    assert planar_hull([(0, 0), (1, 0), (1, 1), (0, 1), (Fraction(1, 2), Fraction(1, 2))]) == [0, 1, 2, 3]


# --- face labels ------------------------------------------------------------


def test_sign_vector_basics():
    s = SignVector("+0-")
    assert s.dim == 1
    assert s.equality_set() == (0, 5)
    assert SignVector("+-+").is_vertex
    assert SignVector("+0-").leq(SignVector("00-"))
    assert not SignVector("+0-").leq(SignVector("-00"))


def test_cube_face_counts():
    assert [len(cube_faces(3, k)) for k in range(4)] == [8, 12, 6, 1]


def test_three_cube_lattice_is_graded():
    faces = cube_faces(3)
    for a in faces:
        for b in faces:
            if a.leq(b) and a != b:
                # every cover relation raises the dimension by exactly one
                between = [c for c in faces if a.leq(c) and c.leq(b)]
                if len(between) == 2:
                    assert b.dim == a.dim + 1
    # rank counted from the empty face: #zeros + 1
    assert all(1 <= f.dim + 1 <= 4 for f in faces)


def test_polygon_label_parse_and_print():
    L = PolygonLabel.parse("(0,*)(*,3)")
    assert str(L) == "(0,*)(*,3)"
    assert L.dim == 2
    assert L.equality_set(6) == (0, 9)


def test_polygon_label_validation():
    PolygonLabel.parse("(0,5)").validate(6)
    with pytest.raises(ValueError):
        PolygonLabel.parse("(0,3)").validate(6)


def test_polygon_faces():
    faces = polygon_faces(6)
    assert len(faces) == 13
    assert len(polygon_product_faces(2, 6, 3)) == 12
    assert len(polygon_product_faces(2, 6, 0)) == 36


# --- f-vectors --------------------------------------------------------------


def test_product_fvector():
    assert product_fvector([[2, 1]] * 3).counts == (8, 12, 6)
    assert product_fvector([[6, 6, 1]]).counts == (6, 6)
    assert product_fvector([[4, 4, 1]] * 2).counts == (16, 32, 24, 8)


def test_euler():
    assert FVector((16, 32, 24, 8)).euler_holds()
    assert not FVector((16, 32, 24, 9)).euler_holds()


def test_fatness_values():
    assert fatness((16, 32, 24, 8)) == Fraction(18, 7)
    assert fatness((32, 80, 72, 24)) == Fraction(66, 23)


def test_fatness_errors():
    with pytest.raises(ZeroDivisionError):
        fatness((5, 10, 10, 5))
    with pytest.raises(ValueError):
        fatness((8, 12, 6))
