import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyproj.exactlin import (
    RationalMatrix,
    as_fraction,
    det,
    find_nonnegative_solution,
    format_rational,
    general_position_linear,
    inverse,
    nullspace_basis,
    parse_rational,
    positively_dependent,
    positively_spanning,
    rank,
    solve,
    verify_span_certificate,
)


def _mat(rows):
    return RationalMatrix(rows)


# --- rationals -------------------------------------------------------------


@pytest.mark.parametrize("text,value", [("3", Fraction(3)), ("-2/4", Fraction(-1, 2)), (" 7/1 ", Fraction(7))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["", "1.5", "1/", "a", "1/2/3"])
def test_parse_rational_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_format_rational_roundtrip():
    for v in [Fraction(0), Fraction(5), Fraction(-3, 7), Fraction(22, 6)]:
        assert parse_rational(format_rational(v)) == v
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-6, 4)) == "-3/2"


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_fraction(0.5)


# --- basic linear algebra ---------------------------------------------------


def test_nullspace_rank_one_row():
    B = nullspace_basis(_mat([[1, 1]]))
    assert B.shape == (2, 1)
    col = [B[i][0] for i in range(2)]
    assert col[0] == -col[1] != 0


def test_nullspace_identity_is_empty():
    B = nullspace_basis(_mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert B.cols == 0


def test_nullspace_unit_square():
    M = _mat([[0, 1, 1, 0], [0, 0, 1, 1], [1, 1, 1, 1]])
    B = nullspace_basis(M)
    assert B.cols == 1
    g = [B[i][0] for i in range(4)]
    assert all(sum(M[r][c] * g[c] for c in range(4)) == 0 for r in range(3))
    assert g[0] == -g[1] == g[2] == -g[3]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=4))
def test_nullspace_properties(rows):
    M = _mat(rows)
    B = nullspace_basis(M)
    assert B.cols == M.cols - rank(M)
    for j in range(B.cols):
        col = [B[i][j] for i in range(B.rows)]
        assert all(sum(a * b for a, b in zip(row, col)) == 0 for row in M)
    if B.cols:
        assert rank(B) == B.cols


def test_det_solve_inverse():
    A = _mat([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    assert det(A) == 18
    x = solve(A, [1, 2, 3])
    assert list(A @ x) == [1, 2, 3]
    Ainv = inverse(A)
    I = A @ Ainv
    assert [[I[i][j] for j in range(3)] for i in range(3)] == [[int(i == j) for j in range(3)] for i in range(3)]


def test_singular_solve_is_absent_or_raises():
    A = _mat([[1, 2], [2, 4]])
    assert det(A) == 0
    try:
        assert solve(A, [1, 1]) is None
    except ValueError:
        pass


# --- positive dependence ----------------------------------------------------


@pytest.mark.parametrize(
    "rows,expected",
    [
        ([[1], [-1]], True),
        ([[1, 0], [0, 1]], False),
        ([[1, 0], [-1, 1], [0, -1]], True),
    ],
)
def test_positively_dependent_examples(rows, expected):
    ok, cert = positively_dependent(_mat(rows))
    assert ok is expected
    assert verify_span_certificate(_mat(rows), cert)
    if expected:
        assert cert.kind == "dependent"
    else:
        assert cert.kind == "witness"


def test_witness_example_values():
    ok, cert = positively_dependent(_mat([[1, 0], [0, 1]]))
    G = _mat([[1, 0], [0, 1]])
    Gy = G @ cert.witness
    assert all(v >= 0 for v in Gy) and any(v != 0 for v in Gy)


@pytest.mark.parametrize(
    "rows,expected",
    [
        ([[1, 0], [-1, 0]], False),
        ([[1, 0], [-1, 1], [0, -1]], True),
        ([[1, 0], [0, 1]], False),
    ],
)
def test_positively_spanning_examples(rows, expected):
    assert positively_spanning(_mat(rows)) is expected


@pytest.mark.parametrize(
    "rows,expected",
    [
        ([[1, 0], [0, 1], [1, 1]], True),
        ([[1, 0], [2, 0], [0, 1]], False),
    ],
)
def test_general_position_examples(rows, expected):
    assert general_position_linear(_mat(rows)) is expected


def test_general_position_needs_enough_rows():
    with pytest.raises(ValueError):
        general_position_linear(_mat([[1, 0]]))


def _all_sign_matrices(max_rows=3, max_cols=3):
    for m in range(1, max_rows + 1):
        for k in range(1, max_cols + 1):
            for entries in itertools.product((-1, 0, 1), repeat=m * k):
                yield [list(entries[i * k : (i + 1) * k]) for i in range(m)]


def test_stiemke_alternative_exhaustive():
    """Every sign matrix up to 3x3 gets exactly one verifying certificate."""
    count = 0
    for rows in _all_sign_matrices():
        G = _mat(rows)
        ok, cert = positively_dependent(G)
        assert cert.kind == ("dependent" if ok else "witness")
        assert verify_span_certificate(G, cert), rows
        count += 1
    assert count == sum(3 ** (m * k) for m in range(1, 4) for k in range(1, 4))


def _solve_small(rows, rhs):
    """Unique solution of a square-or-tall exact system, or None."""
    n = len(rows[0])
    aug = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv_row = 0
    where = [-1] * n
    for c in range(n):
        sel = next((r for r in range(piv_row, len(aug)) if aug[r][c] != 0), None)
        if sel is None:
            return None
        aug[piv_row], aug[sel] = aug[sel], aug[piv_row]
        p = aug[piv_row][c]
        aug[piv_row] = [x / p for x in aug[piv_row]]
        for r in range(len(aug)):
            if r != piv_row and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[piv_row])]
        where[c] = piv_row
        piv_row += 1
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in aug):
        return None
    return [aug[where[c]][-1] for c in range(n)]


def _dependent_by_vertices(rows):
    """Is {lam >= 1, G^T lam = 0} nonempty?  Search its vertices directly."""
    m, k = len(rows), len(rows[0])
    eqs = [[rows[i][j] for i in range(m)] for j in range(k)]
    for size in range(m + 1):
        for S in itertools.combinations(range(m), size):
            system = eqs + [[int(i == s) for i in range(m)] for s in S]
            rhs = [0] * k + [1] * size
            lam = _solve_small(system, rhs)
            if lam is not None and all(x >= 1 for x in lam):
                return True
    return False


def test_lp_agrees_with_vertex_enumeration():
    rng = random.Random(20240611)
    for _ in range(400):
        m = rng.randint(1, 5)
        k = rng.randint(1, 3)
        rows = [[rng.randint(-2, 2) for _ in range(k)] for _ in range(m)]
        assert positively_dependent(_mat(rows))[0] == _dependent_by_vertices(rows), rows


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=1, max_size=5),
    st.randoms(use_true_random=False),
    st.lists(st.integers(1, 5), min_size=5, max_size=5),
)
def test_spanning_invariant_under_permutation_and_scaling(rows, rnd, scales):
    base = positively_spanning(_mat(rows))
    perm = list(range(len(rows)))
    rnd.shuffle(perm)
    moved = [[scales[i] * x for x in rows[p]] for i, p in enumerate(perm)]
    assert positively_spanning(_mat(moved)) == base


def test_feasibility_result_has_one_side():
    res = find_nonnegative_solution(_mat([[1, 1]]), [-1])
    assert res.point is None and res.farkas is not None
    res = find_nonnegative_solution(_mat([[1, 1]]), [2])
    assert res.point is not None and sum(res.point) == 2
