"""Text formats.

Every format carries the version tag ``v1`` in its header and every writer
is deterministic, so ``store(load(x)) == x`` byte for byte for any ``x``
produced by a writer.

Triangulation (``.tri``)::

    tri <n> <class> v1
    <id> <twin> <next> <origin>      one line per dart, ids 0..m-1 in order

Distance matrix (``.mat``)::

    <count> v1
    d(1,0)
    d(2,0) d(2,1)
    ...                              strictly lower triangle, one row per line

Tables (CSV)::

    # blab v1 <kind>
    col1,col2,...
    ...

Manifests are JSON objects with ``"format": "v1"``, written with sorted keys.
"""
from __future__ import annotations

import csv
import io as _io
import json
import re
from pathlib import Path

import numpy as np

from .errors import ParseError, VersionMismatch
from .maps import Triangulation, TriangulationClass, build_from_rotation
from .metric import FiniteMetricSpace
from .seeding import FORMAT_VERSION

_UINT = r"(?:0|[1-9][0-9]*)"
_DART_LINE = re.compile(rf"{_UINT} {_UINT} {_UINT} {_UINT}")
_TRI_HEADER = re.compile(rf"tri ({_UINT}) (simple|general) (\S+)")


def _lines(text):
    if not text.endswith("\n"):
        raise ParseError("missing final newline", line=text.count("\n") + 1)
    return text[:-1].split("\n")


# ------------------------------------------------------------ triangulation


def format_triangulation(t: Triangulation) -> str:
    out = [f"tri {t.n} {t.cls.value} {FORMAT_VERSION}"]
    for d in range(t.map.dart_count):
        out.append(f"{d} {t.twin[d]} {t.next[d]} {t.origin[d]}")
    return "\n".join(out) + "\n"


def parse_triangulation(text: str) -> Triangulation:
    """Strict reader; any deviation from the format raises :class:`ParseError`.

    Structural problems (not a sphere triangulation, wrong class) raise the
    validation errors of :func:`blab.maps.build_from_rotation`.
    """
    lines = _lines(text)
    m = _TRI_HEADER.fullmatch(lines[0])
    if m is None:
        raise ParseError(f"bad header {lines[0]!r}", line=1)
    if m.group(3) != FORMAT_VERSION:
        raise VersionMismatch(f"format {m.group(3)!r}, expected {FORMAT_VERSION}", line=1)
    n = int(m.group(1))
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        if _DART_LINE.fullmatch(line) is None:
            raise ParseError(f"bad dart line {line!r}", line=k)
        row = tuple(int(x) for x in line.split(" "))
        if row[0] != k - 2:
            raise ParseError(f"dart id {row[0]} out of order, expected {k - 2}", line=k)
        rows.append(row)
    if not rows:
        raise ParseError("no darts", line=2)
    t = build_from_rotation(rows, cls=TriangulationClass(m.group(2)))
    if t.n != n:
        raise ParseError(f"header says n={n} but the map has {t.n} vertices", line=1)
    return t


def save_triangulation(t, path):
    Path(path).write_text(format_triangulation(t), encoding="ascii")


def load_triangulation(path):
    return parse_triangulation(Path(path).read_text(encoding="ascii"))


# ------------------------------------------------------------------- matrix


def format_matrix(X) -> str:
    d = X.d if isinstance(X, FiniteMetricSpace) else np.asarray(X, dtype=float)
    out = [f"{len(d)} {FORMAT_VERSION}"]
    for i in range(1, len(d)):
        out.append(" ".join(repr(float(v)) for v in d[i, :i]))
    return "\n".join(out) + "\n"


def parse_matrix(text: str) -> FiniteMetricSpace:
    lines = _lines(text)
    head = lines[0].split()
    if len(head) != 2 or not re.fullmatch(_UINT, head[0]):
        raise ParseError(f"bad header {lines[0]!r}", line=1)
    if head[1] != FORMAT_VERSION:
        raise VersionMismatch(f"format {head[1]!r}, expected {FORMAT_VERSION}", line=1)
    n = int(head[0])
    if n == 0:
        raise ParseError("empty space", line=1)
    if len(lines) != n:
        raise ParseError(f"expected {n - 1} rows, found {len(lines) - 1}",
                         line=min(len(lines), n) + 1)
    d = np.zeros((n, n))
    for i in range(1, n):
        tok = lines[i].split(" ") if lines[i] else []
        if len(tok) != i:
            raise ParseError(f"row {i} has {len(tok)} entries, expected {i}", line=i + 1)
        try:
            vals = [float(x) for x in tok]
        except ValueError as exc:
            raise ParseError(str(exc), line=i + 1) from None
        d[i, :i] = vals
        d[:i, i] = vals
    return FiniteMetricSpace(d)


def save_matrix(X, path):
    Path(path).write_text(format_matrix(X), encoding="ascii")


def load_matrix(path):
    return parse_matrix(Path(path).read_text(encoding="ascii"))


# ------------------------------------------------------------------- tables


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse_cell(s):
    if re.fullmatch(r"-?(?:0|[1-9][0-9]*)", s):
        return int(s)
    try:
        return float(s)
    except ValueError:
        return s


def format_table(kind, columns, rows) -> str:
    buf = _io.StringIO()
    buf.write(f"# blab {FORMAT_VERSION} {kind}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def parse_table(text):
    """Return ``(kind, columns, rows)``; numeric cells come back as int/float."""
    lines = _lines(text)
    m = re.fullmatch(r"# blab (\S+) (\S+)", lines[0])
    if m is None:
        raise ParseError(f"bad table header {lines[0]!r}", line=1)
    if m.group(1) != FORMAT_VERSION:
        raise VersionMismatch(f"format {m.group(1)!r}", line=1)
    if len(lines) < 2:
        raise ParseError("missing column row", line=2)
    reader = csv.reader(lines[1:])
    columns = next(reader)
    rows = []
    for k, r in enumerate(reader, start=3):
        if len(r) != len(columns):
            raise ParseError(f"expected {len(columns)} cells, got {len(r)}", line=k)
        rows.append(tuple(_parse_cell(c) for c in r))
    return m.group(2), columns, rows


def save_table(path, kind, columns, rows):
    Path(path).write_text(format_table(kind, columns, rows), encoding="ascii")


def load_table(path):
    return parse_table(Path(path).read_text(encoding="ascii"))


def format_profile(profile):
    return format_table("ball-growth", ["radius", "mean_volume"], profile.rows())


def format_ensemble(rows):
    """Rows of ``(n, seed, diameter, two_point)``."""
    return format_table("ensemble", ["n", "seed", "diameter", "two_point"], rows)


def format_summary(report, observable):
    return format_table("summary", ["n", "observable", "median", "iqr", "ks_to_next"],
                        report.rows(observable))


def format_measure(measure):
    th, ph = measure.mesh.centers
    rows = zip(range(len(th)), th, ph, measure.areas, measure.masses)
    return format_table("lqg-measure", ["cell_id", "theta", "phi", "area", "mass"], rows)


def format_field(theta, phi, values, header=""):
    """Whitespace-separated ``theta phi value`` rows."""
    out = [f"# blab {FORMAT_VERSION} field {header}".rstrip()]
    for a, b, c in zip(theta, phi, values):
        out.append(f"{float(a)!r} {float(b)!r} {float(c)!r}")
    return "\n".join(out) + "\n"


def parse_field(text):
    lines = _lines(text)
    m = re.fullmatch(r"# blab (\S+) field.*", lines[0])
    if m is None:
        raise ParseError(f"bad field header {lines[0]!r}", line=1)
    if m.group(1) != FORMAT_VERSION:
        raise VersionMismatch(f"format {m.group(1)!r}", line=1)
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        tok = line.split(" ")
        if len(tok) != 3:
            raise ParseError("expected 'theta phi value'", line=k)
        try:
            rows.append(tuple(float(x) for x in tok))
        except ValueError as exc:
            raise ParseError(str(exc), line=k) from None
    return lines[0], np.array(rows).reshape(-1, 3)


# ----------------------------------------------------------------- manifest


def format_manifest(obj) -> str:
    obj = dict(obj)
    obj.setdefault("format", FORMAT_VERSION)
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def parse_manifest(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("manifest must be a JSON object", line=1)
    if obj.get("format") != FORMAT_VERSION:
        raise VersionMismatch(f"manifest format {obj.get('format')!r}", line=1)
    return obj


def save_manifest(path, obj):
    Path(path).write_text(format_manifest(obj), encoding="utf-8")


def load_manifest(path):
    return parse_manifest(Path(path).read_text(encoding="utf-8"))
