"""Command-line entry point: ``polyproj <command> <family> [options]``.

Exit status is 0 on success, 1 when a verification or calibration check
fails, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from io import StringIO
from pathlib import Path

from .convention import CALIBRATED, named_convention
from .deformed import CalibrationError, DeformedPolygonProduct, apply_seed_order, ncp, pdpp
from .exactlin import format_rational, parse_rational
from .gale import cyclic_polytope
from .io import ModelParseError, emit_model, format_faces, read_model
from .polytope import (
    BudgetExceeded,
    FVector,
    HPolytope,
    VPolytope,
    brute_force_facets,
    brute_force_vertices,
    fatness,
)
from .project import (
    all_strict_condition,
    combinatorial_facets,
    face_lattice_counts,
    geometric_facet_labels,
    label_vertex_set,
    preserved_k_faces,
    projected_fvector,
)

COMMANDS = ("construct", "facets", "fvector", "fatness", "verify", "sweep")
FAMILIES = ("ncp", "pdpp", "raw")
SWEEP_DEFAULT = "4,8,16,32,64,128,256,512,1024"
CSV_HEADER = "m,r,f0,f1,f2,f3,fatness_exact,fatness_decimal"


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


def decimal6(x: Fraction) -> str:
    """Round half away from zero to six places using integer arithmetic only."""
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    scaled = abs(x) * 10**6
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    if q == 0:
        sign = ""
    return f"{sign}{q // 10**6}.{q % 10**6:06d}"


def summary_line(f: FVector) -> str:
    text = "# f-vector (" + ",".join(str(c) for c in f.counts) + ")"
    if len(f.counts) == 4:
        phi = fatness(f)
        text += f" fatness {format_rational(phi)} ~ {decimal6(phi)}"
    return text


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None
    if not values:
        raise UsageError("empty list")
    return values


def _parse_q(spec: str | None):
    if spec is None:
        return None
    kind, _, rest = spec.partition(":")
    if kind == "cyclic":
        parts = _int_list(rest)
        if len(parts) != 2:
            raise UsageError("--q cyclic:D,N needs two integers")
        D, N = parts
        if D < 1 or N < D + 1:
            raise UsageError("--q cyclic:D,N needs D >= 1 and N >= D + 1")
        return cyclic_polytope(D, N)
    if kind == "file":
        model = read_model(rest)
        if not isinstance(model, VPolytope):
            raise UsageError("--q file: expects a V-format model")
        return model
    raise UsageError(f"--q must be cyclic:D,N or file:PATH, got {spec!r}")


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} {args.family} needs {' '.join(missing)}")


def _build(args):
    """Calibrated construction for the ncp/pdpp families."""
    Q = _parse_q(args.q)
    eps = None
    if args.eps is not None:
        try:
            eps = parse_rational(args.eps)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--eps must be a rational, got {args.eps!r}") from None
        if eps <= 0:
            raise UsageError("--eps must be positive")
    if args.family == "ncp":
        _require(args, "n", "d")
        n, d = args.n, args.d
        if not 2 <= d <= n:
            raise UsageError("need 2 <= d <= n")
        N, D = n - 1, d - 2
    else:
        _require(args, "r", "m", "d")
        r, m, d = args.r, args.m, args.d
        if m < 4 or m % 2:
            raise UsageError("--m must be even and at least 4")
        if not 2 <= d <= 2 * r:
            raise UsageError("need 2 <= d <= 2r")
        N, D = 2 * r - 1, d - 2
    if args.seed_order is not None:
        if Q is None:
            if D == 0:
                raise UsageError("--seed-order needs a polytope Q (d >= 3)")
            Q = cyclic_polytope(D, N)
        order = _int_list(args.seed_order)
        if sorted(order) != list(range(1, Q.n_vertices + 1)):
            raise UsageError(f"--seed-order must be a permutation of 1..{Q.n_vertices}")
        Q = apply_seed_order(Q, [i - 1 for i in order])
    if Q is not None and (Q.n_vertices != N or Q.ambient_dim != D):
        raise UsageError(f"Q must have {N} vertices in dimension {D}")
    if args.family == "ncp":
        return ncp(args.n, args.d, Q=Q, eps=eps)
    return pdpp(args.r, args.m, args.d, Q=Q, eps=eps)


def _raw_model(args):
    if args.model is None:
        raise UsageError("the raw family needs a model file argument")
    model = read_model(args.model)
    if isinstance(model, HPolytope):
        model = brute_force_vertices(model)
    return model


def _is_standard(c) -> bool:
    if c.Q is None:
        return True
    return c.Q == cyclic_polytope(c.d - 2, c.n - 1)


def _construction_fvector(c, conv=CALIBRATED) -> FVector:
    if c.d == 4 and _is_standard(c) and c.K > 0:
        if isinstance(c, DeformedPolygonProduct):
            return projected_fvector("pdpp", 4, r=c.r, m=c.m, convention=conv)
        return projected_fvector("ncp", 4, n=c.n, convention=conv)
    # preserved faces are exactly the faces of the projection once the
    # calibration has certified the all-strict condition
    return FVector(tuple(len(preserved_k_faces(c, k)) for k in range(c.d)))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_construct(args, out):
    if args.family == "raw":
        raise UsageError("construct supports the ncp and pdpp families")
    c = _build(args)
    text = emit_model(c.polytope)
    print(f"eps {format_rational(c.eps)}", file=out)
    print(f"M {format_rational(c.M)}", file=out)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}", file=out)
    else:
        out.write(text)


def cmd_facets(args, out):
    conv = named_convention(args.convention)
    if args.family == "raw":
        model = _raw_model(args)
        facets = brute_force_facets(model)
        for f in facets:
            print(" ".join(str(i) for i in f), file=out)
        print(summary_line(face_lattice_counts(model, facets)), file=out)
        return
    c = _build(args)
    labels = combinatorial_facets(c, conv)
    out.write(format_faces(labels))
    if args.convention == "auto":
        print(summary_line(_construction_fvector(c)), file=out)
    else:
        print(f"# facets {len(labels)}", file=out)


def _fvector_for(args) -> FVector:
    if args.family == "raw":
        model = _raw_model(args)
        return face_lattice_counts(model, brute_force_facets(model))
    conv = named_convention(args.convention)
    if args.d == 4 and args.q is None and args.seed_order is None and args.eps is None:
        # the counts do not depend on the realization; skip the construction
        if args.family == "ncp":
            _require(args, "n")
            if args.n < 4:
                raise UsageError("need n >= 4 for d = 4")
            return projected_fvector("ncp", 4, n=args.n, convention=conv)
        _require(args, "r", "m")
        if args.m < 4 or args.m % 2 or args.r < 2:
            raise UsageError("need even m >= 4 and r >= 2 for d = 4")
        return projected_fvector("pdpp", 4, r=args.r, m=args.m, convention=conv)
    return _construction_fvector(_build(args), conv)


def cmd_fvector(args, out):
    f = _fvector_for(args)
    print(" ".join(str(c) for c in f.counts), file=out)
    print(summary_line(f), file=out)


def cmd_fatness(args, out):
    if args.family != "raw" and args.d != 4:
        raise UsageError("fatness is defined for d = 4")
    f = _fvector_for(args)
    if len(f.counts) != 4:
        raise UsageError("fatness is defined for 4-polytopes")
    phi = fatness(f)
    print(f"fatness {format_rational(phi)} ~ {decimal6(phi)}", file=out)
    print(summary_line(f), file=out)


def cmd_verify(args, out):
    if args.family == "raw":
        raise UsageError("verify supports the ncp and pdpp families")
    c = _build(args)
    conv = named_convention(args.convention)
    failures = []

    ok, _ = c.product_certificate()
    print(f"product: {len(c.vertex_labels())} vertices {'OK' if ok else 'FAIL'}", file=out)
    if not ok:
        failures.append("product")

    strict, bad = all_strict_condition(c)
    print(f"all-strict: {'OK' if strict else 'FAIL at ' + str(bad)}", file=out)
    if not strict:
        failures.append("all-strict")

    comb = combinatorial_facets(c, conv)
    geo = geometric_facet_labels(c)
    comb_sets = sorted(sorted(label_vertex_set(c, f)) for f in comb)
    geo_sets = sorted(sorted(label_vertex_set(c, f)) for f in geo)
    same = comb_sets == geo_sets
    rel = "==" if same else "!="
    print(f"facets: combinatorial {len(comb)} {rel} geometric {len(geo)} {'OK' if same else 'FAIL'}", file=out)
    if not same:
        failures.append("facets")
    if failures:
        raise CheckFailed(", ".join(failures))


def cmd_sweep(args, out):
    if args.family != "pdpp":
        raise UsageError("sweep supports the pdpp family")
    if args.d is not None and args.d != 4:
        raise UsageError("sweep computes d = 4 fatness")
    ms = _int_list(args.m_list or SWEEP_DEFAULT)
    rs = _int_list(args.r_list or SWEEP_DEFAULT)
    if any(m < 4 or m % 2 for m in ms) or any(r < 2 for r in rs):
        raise UsageError("sweep needs even m >= 4 and r >= 2")
    print(CSV_HEADER, file=out)
    for m in ms:
        for r in rs:
            f = projected_fvector("pdpp", 4, r=r, m=m, mode="dp")
            phi = fatness(f)
            row = [m, r, *f.counts, format_rational(phi), decimal6(phi)]
            print(",".join(str(x) for x in row), file=out)


HANDLERS = {
    "construct": cmd_construct,
    "facets": cmd_facets,
    "fvector": cmd_fvector,
    "fatness": cmd_fatness,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyproj", description="Deformed products, projections and their combinatorics.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("model", nargs="?", help="PDP/1 model file (raw family)")
    p.add_argument("--n", type=int, help="cube dimension (ncp)")
    p.add_argument("--d", type=int, help="target dimension")
    p.add_argument("--r", type=str, dest="r_list", help="number of polygons (sweep: comma list)")
    p.add_argument("--m", type=str, dest="m_list", help="polygon size (sweep: comma list)")
    p.add_argument("--q", help="cyclic:D,N or file:PATH")
    p.add_argument("--eps", help="fixed rational eps instead of calibration")
    p.add_argument("--seed-order", dest="seed_order", help="1-based permutation of Q's vertices, comma separated")
    p.add_argument("--convention", choices=("auto", "ncp", "pdpp"), default="auto")
    p.add_argument("-o", "--output", help="output file")
    return p


def _single(args, name):
    raw = getattr(args, f"{name}_list")
    if raw is None:
        return None
    values = _int_list(raw)
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single integer for {args.command}")
    return values[0]


def run(argv: list[str], out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command != "sweep":
            args.r, args.m = _single(args, "r"), _single(args, "m")
        if args.command == "construct" or args.output is None:
            HANDLERS[args.command](args, out)
        else:
            buf = StringIO()
            try:
                HANDLERS[args.command](args, buf)
            finally:
                Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return 2
    except ModelParseError as exc:
        print(f"parse error: {exc}", file=err)
        return 2
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=err)
        return 2
    except CheckFailed as exc:
        print(f"verification failed: {exc}", file=err)
        return 1
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=err)
        return 1
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc} (raise POLYPROJ_BUDGET to continue)", file=err)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=err)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
