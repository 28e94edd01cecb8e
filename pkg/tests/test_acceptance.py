"""Acceptance suite: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import time
from fractions import Fraction


from polyproj.cli import run
from polyproj.convention import CALIBRATED
from polyproj.deformed import ncp, pdpp
from polyproj.gale import cyclic_polytope, gale_evenness_cofacets, lex_heights, lex_pyramid_cofacets_cyclic, lex_pyramid_oracle
from polyproj.io import read_model
from polyproj.polytope import brute_force_facets, brute_force_vertices, fatness, planar_hull
from polyproj.project import (
    calibrate_lemma_convention,
    calibrate_triggers,
    combinatorial_facets,
    cubical_gale_facets,
    face_lattice_counts,
    fold,
    geometric_facets,
    label_vertex_set,
    pdpp_facets,
    preservation_reports,
    projected_fvector,
    truncated_rows,
    vertex_figure_mismatches,
    geometric_facet_labels,
)

RESULTS: dict[int, str] = {}
SWEEP = [2**a for a in range(2, 11)]


def record(number: int, title: str, limit: float | None, check):
    """Run ``check`` (returns a detail string), time it, record and print one line."""
    start = time.perf_counter()
    ok, detail = False, ""
    try:
        detail = check()
        ok = True
    except AssertionError as exc:
        detail = f"assertion failed: {exc}"
    elapsed = time.perf_counter() - start
    if ok and limit is not None and elapsed > limit:
        ok = False
        detail += f"; over time limit {limit:g}s"
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} [{elapsed:7.2f}s] {title}: {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line


# --- independent certificate check -----------------------------------------


def _det(rows):
    rows = [list(r) for r in rows]
    n = len(rows)
    sign, total = 1, Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            sign = -sign
        total *= rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return sign * total


def independent_check(T, rep) -> bool:
    """Re-derive a preservation decision from its certificate with plain arithmetic."""
    rows = [list(r) for r in T]
    k = T.cols
    cert = rep.certificate
    if rep.preserved:
        lam = cert.coefficients
        if cert.kind != "dependent" or any(x < 1 for x in lam):
            return False
        if any(sum(l * r[j] for l, r in zip(lam, rows)) != 0 for j in range(k)):
            return False
        if k == 0:
            return True
        return rep.basis_rows is not None and _det([rows[i] for i in rep.basis_rows]) != 0
    if cert.kind == "witness":
        Gy = [sum(a * y for a, y in zip(r, cert.witness)) for r in rows]
        if all(v >= 0 for v in Gy) and any(v != 0 for v in Gy):
            return True
    v = rep.null_vector
    return v is not None and any(x != 0 for x in v) and all(sum(a * x for a, x in zip(r, v)) == 0 for r in rows)


# --- criteria -------------------------------------------------------------


def test_criterion_01_cube_identity(tmp_path):
    def check():
        path = tmp_path / "c4.pdp"
        assert run(["construct", "ncp", "--n", "4", "--d", "4", "-o", str(path)], *_sinks()) == 0
        V = brute_force_vertices(read_model(path))
        assert V.n_vertices == 16, V.n_vertices
        facets = brute_force_facets(V)
        f = face_lattice_counts(V, facets)
        assert f.counts == (16, 32, 24, 8), f.counts
        return f"vertices 16, f-vector {f.counts}"

    record(1, "cube identity", 1.0, check)


def test_criterion_02_two_to_the_n_gon():
    def check():
        out = []
        for n in range(4, 9):
            c = ncp(n, 2)
            pts = c.projected_vertices()
            assert len(set(pts)) == 2**n
            hull = planar_hull(pts)
            assert len(hull) == 2**n, (n, len(hull))
            out.append(f"n={n}:{len(hull)}")
        return "convex position " + " ".join(out)

    record(2, "2^n-gon", 10.0, check)


def test_criterion_03_skeleton():
    def check():
        parts = []
        for n, d in [(5, 4), (6, 4), (6, 6)]:
            c = ncp(n, d)
            counts = []
            for k in range(d // 2):
                reps = preservation_reports(c, k)
                assert all(r.preserved for r in reps), (n, d, k)
                assert all(independent_check(truncated_rows(c.polytope, r.rows, d), r) for r in reps)
                counts.append(len(reps))
            assert counts[0] == 2**n and counts[1] == n * 2 ** (n - 1), counts
            parts.append(f"({n},{d}) f0={counts[0]} f1={counts[1]}")
        return ", ".join(parts)

    record(3, "skeleton claim", 30.0, check)


def _as_sets(c, labels):
    return sorted(sorted(label_vertex_set(c, f)) for f in labels)


def test_criterion_04_two_oracle_facets():
    def check():
        parts = []
        cases = [("ncp", n) for n in (4, 5, 6)] + [("pdpp", m) for m in (4, 6)]
        expected = {("ncp", 5): 24, ("ncp", 6): 64}
        for fam, p in cases:
            c = ncp(p, 4) if fam == "ncp" else pdpp(2, p, 4)
            comb = _as_sets(c, combinatorial_facets(c))
            geo = sorted(sorted(f) for f in geometric_facets(c))
            assert comb == geo, (fam, p)
            if (fam, p) in expected:
                assert len(geo) == expected[(fam, p)]
            parts.append(f"{fam}{p}:{len(geo)}")
        return "combinatorial == geometric " + " ".join(parts)

    record(4, "two-oracle facet equality", 300.0, check)


def test_criterion_05_vertex_figures():
    def check():
        parts = []
        for n in (5, 6):
            c = ncp(n, 4)
            bad = vertex_figure_mismatches(c, geometric_facet_labels(c), CALIBRATED)
            assert bad == [], bad[:3]
            parts.append(f"n={n}: {len(c.vertex_labels())} vertices agree")
        return "; ".join(parts)

    record(5, "vertex-figure theorem", 60.0, check)


def test_criterion_06_lex_suite():
    def check():
        total = 0
        for D in (2, 3):
            for N in range(D + 2, 8):
                Q = cyclic_polytope(D, N)
                for k in range(1, N - D + 1):
                    w = [abs(x) for x in lex_heights(N, D, k).w if x != 0]
                    assert all(b <= Fraction(1, 8) * a for a, b in zip(w, w[1:]))
                    assert lex_pyramid_cofacets_cyclic(D, N, k, CALIBRATED) == lex_pyramid_oracle(Q, k), (D, N, k)
                    total += 1
        return f"{total} (D,N,k) cases agree with the lifted-hull oracle"

    record(6, "lexicographic triangulation suite", 60.0, check)


def test_criterion_07_gale_evenness():
    def check():
        total = 0
        for D in (1, 2, 3, 4):
            for N in range(D + 2, 9):
                want = sorted(tuple(0 if i in f else 1 for i in range(N)) for f in brute_force_facets(cyclic_polytope(D, N)))
                assert gale_evenness_cofacets(D, N) == want, (D, N)
                total += 1
        return f"{total} (D,N) cases agree with the hull oracle"

    record(7, "Gale evenness suite", 60.0, check)


def test_criterion_08_fatness_trend():
    def check():
        table = {}
        for m in SWEEP:
            for r in SWEEP:
                table[m, r] = fatness(projected_fvector("pdpp", 4, r=r, m=m, mode="dp"))
        for m in SWEEP:
            for a, b in zip(SWEEP, SWEEP[1:]):
                assert table[m, a] < table[m, b], ("r", m, a)
                assert table[a, m] < table[b, m], ("m", a, m)
        top = table[SWEEP[-1], SWEEP[-1]]
        assert top > Fraction(17, 2), float(top)
        assert all(v < 9 for v in table.values())
        for m in (4, 6, 8):
            for r in (2, 3):
                dp = projected_fvector("pdpp", 4, r=r, m=m, mode="dp")
                en = projected_fvector("pdpp", 4, r=r, m=m, mode="enumerate")
                assert dp == en, (m, r)
        return f"monotone, max {float(top):.6f} < 9 at (1024,1024); DP == enumeration for m<=8, r<=3"

    record(8, "fatness trend", 60.0, check)


def test_criterion_09_certificates():
    def check():
        pos = neg = 0
        builds = [ncp(5, 4), ncp(6, 4), ncp(5, 3), pdpp(2, 6, 3), pdpp(3, 4, 4), pdpp(3, 6, 4)]
        for c in builds:
            for k in range(c.d):
                for rep in preservation_reports(c, k):
                    T = truncated_rows(c.polytope, rep.rows, c.d)
                    assert independent_check(T, rep), (rep.face, k)
                    if rep.preserved:
                        pos += 1
                    else:
                        neg += 1
        assert pos and neg
        return f"{pos} positive and {neg} negative decisions re-verified"

    record(9, "certificate soundness", None, check)


def test_criterion_10_square_reduction():
    def check():
        total = 0
        for r in range(1, 5):
            for d in range(2, 2 * r + 1):
                images = [fold(f, 4) for f in pdpp_facets(r, 4, d)]
                assert len(set(images)) == len(images)
                assert sorted(images) == sorted(cubical_gale_facets(2 * r, d)), (r, d)
                total += 1
        return f"bijection in all {total} (r,d) cases with 2r <= 8"

    record(10, "m=4 reduction", 10.0, check)


def test_calibrated_convention_is_frozen():
    """The oracles single out exactly the frozen convention."""
    assert calibrate_lemma_convention() == [(CALIBRATED.apex_index, CALIBRATED.lemma_parity, CALIBRATED.default_offset)]
    ncp_ok, parity_ok, pdpp_ok = calibrate_triggers([ncp(5, 4), ncp(6, 4)], [pdpp(3, 4, 4), pdpp(3, 6, 4)])
    assert ncp_ok == [CALIBRATED.ncp_trigger]
    assert parity_ok == [CALIBRATED.cubical_parity]
    assert pdpp_ok == [CALIBRATED.pdpp_trigger]


def _sinks():
    import io

    return io.StringIO(), io.StringIO()


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    tests = [
        lambda: test_criterion_01_cube_identity(Path(tempfile.mkdtemp())),
        test_criterion_02_two_to_the_n_gon,
        test_criterion_03_skeleton,
        test_criterion_04_two_oracle_facets,
        test_criterion_05_vertex_figures,
        test_criterion_06_lex_suite,
        test_criterion_07_gale_evenness,
        test_criterion_08_fatness_trend,
        test_criterion_09_certificates,
        test_criterion_10_square_reduction,
    ]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
