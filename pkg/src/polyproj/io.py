"""Text formats: PDP/1 models and face lists.

A PDP/1 file is::

    PDP H 4 2
    1 0
    -1 0
    0 1
    0 -1
    b: 1 1 1 1

The header gives the kind (``H`` or ``V``), the number of matrix rows and
the number of columns.  ``V`` files stop after the matrix rows.  Emitting a
parsed canonical file reproduces it byte for byte.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .exactlin import RationalMatrix, format_rational, parse_rational
from .polytope import HPolytope, PolygonLabel, SignVector, VPolytope

MAGIC = "PDP"


class ModelParseError(ValueError):
    """Malformed model text; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_row(tokens: Sequence[str], lineno: int) -> list:
    out = []
    for tok in tokens:
        try:
            out.append(parse_rational(tok))
        except (ValueError, ZeroDivisionError):
            raise ModelParseError(lineno, f"bad rational {tok!r}") from None
    return out


def parse_model(text: str) -> HPolytope | VPolytope:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelParseError(1, "empty input")
    head = lines[0].split()
    if len(head) != 4 or head[0] != MAGIC:
        raise ModelParseError(1, "expected header 'PDP <H|V> <rows> <cols>'")
    kind = head[1]
    if kind not in ("H", "V"):
        raise ModelParseError(1, f"unknown kind {kind!r}")
    try:
        n, k = int(head[2]), int(head[3])
    except ValueError:
        raise ModelParseError(1, "row and column counts must be integers") from None
    if n < 1 or k < 1:
        raise ModelParseError(1, "row and column counts must be positive")
    expected = 1 + n + (1 if kind == "H" else 0)
    rows = []
    for i in range(n):
        lineno = i + 2
        if lineno > len(lines):
            raise ModelParseError(lineno, f"unexpected end of input: {n - i} matrix row(s) missing")
        tokens = lines[i + 1].split()
        if tokens and tokens[0] == "b:":
            raise ModelParseError(lineno, f"right-hand side found after {i} of {n} rows")
        if len(tokens) != k:
            raise ModelParseError(lineno, f"expected {k} entries, found {len(tokens)}")
        rows.append(_parse_row(tokens, lineno))
    if kind == "V":
        if len(lines) > expected:
            raise ModelParseError(expected + 1, "trailing content after the last vertex")
        return VPolytope(RationalMatrix(rows, k))
    lineno = n + 2
    if lineno > len(lines):
        raise ModelParseError(lineno, "unexpected end of input: missing 'b:' line")
    tokens = lines[n + 1].split()
    if not tokens or tokens[0] != "b:":
        raise ModelParseError(lineno, "expected 'b:' followed by the right-hand side")
    if len(tokens) - 1 != n:
        raise ModelParseError(lineno, f"expected {n} right-hand side entries, found {len(tokens) - 1}")
    b = _parse_row(tokens[1:], lineno)
    if len(lines) > expected:
        raise ModelParseError(expected + 1, "trailing content after the 'b:' line")
    try:
        return HPolytope(RationalMatrix(rows, k), tuple(b))
    except ValueError as exc:
        raise ModelParseError(1, str(exc)) from None


def emit_model(model: HPolytope | VPolytope) -> str:
    if isinstance(model, HPolytope):
        A = model.A
        body = [f"{MAGIC} H {A.rows} {A.cols}"]
        body += [" ".join(format_rational(x) for x in row) for row in A]
        body.append("b: " + " ".join(format_rational(x) for x in model.b))
    elif isinstance(model, VPolytope):
        V = model.V
        body = [f"{MAGIC} V {V.rows} {V.cols}"]
        body += [" ".join(format_rational(x) for x in row) for row in V]
    else:
        raise TypeError(f"cannot emit {type(model).__name__}")
    return "\n".join(body) + "\n"


def read_model(path: str | Path) -> HPolytope | VPolytope:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def write_model(model: HPolytope | VPolytope, path: str | Path) -> None:
    Path(path).write_text(emit_model(model), encoding="utf-8")


def format_faces(labels: Iterable) -> str:
    """One label per line (sign strings or polygon labels)."""
    return "".join(f"{label}\n" for label in labels)


def parse_faces(text: str) -> list:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("("):
                out.append(PolygonLabel.parse(line))
            elif set(line) <= set("+-0"):
                out.append(SignVector(line))
            else:
                raise ValueError(f"unrecognized face label {line!r}")
        except ValueError as exc:
            raise ModelParseError(lineno, str(exc)) from None
    return out


__all__ = [
    "ModelParseError",
    "emit_model",
    "format_faces",
    "parse_faces",
    "parse_model",
    "read_model",
    "write_model",
]
