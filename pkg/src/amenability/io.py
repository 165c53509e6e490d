"""Group, family and metric-space file formats.

Multiplication table::

    order=6
    generators=1            (optional; otherwise a greedy generating set)
    0,1,2,3,4,5
    ...

Permutation generators::

    degree=3
    1 0 2
    1 2 0

Family file: one member path per line, relative to the family file; blank
lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .errors import ParseError
from .group_core import (
    INFINITE,
    DEFAULT_CLOSURE_CAP,
    FamilySpec,
    FiniteGroup,
    FiniteMetricSpace,
    GeneratingSet,
    build_group_from_permutations,
    build_group_from_table,
    greedy_generators,
)

_MOD = "io"


def _perr(op: str, msg: str) -> ParseError:
    return ParseError(msg, module=_MOD, operation=op)


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _header(line: str, key: str, op: str, where: str) -> int:
    k, _, v = line.partition("=")
    if k.strip() != key or not v.strip():
        raise _perr(op, f"{where}: expected header '{key}=<int>', got {line!r}")
    try:
        return int(v)
    except ValueError:
        raise _perr(op, f"{where}: header value {v!r} is not an integer") from None


def parse_group(text: str, name: str = "G", cap: int = DEFAULT_CLOSURE_CAP,
                where: str = "<string>") -> tuple[FiniteGroup, GeneratingSet]:
    op = "read_group"
    lines = _content_lines(text)
    if not lines:
        raise _perr(op, f"{where}: empty group file")
    first = lines[0][1]
    if first.startswith("order"):
        n = _header(first, "order", op, f"{where}:{lines[0][0]}")
        rest = lines[1:]
        gens = None
        if rest and rest[0][1].startswith("generators"):
            _, _, v = rest[0][1].partition("=")
            try:
                gens = tuple(int(t) for t in v.replace(",", " ").split())
            except ValueError:
                raise _perr(op, f"{where}:{rest[0][0]}: bad generators line") from None
            rest = rest[1:]
        if len(rest) != n:
            raise _perr(op, f"{where}: expected {n} table rows, found {len(rest)}")
        table = []
        for lineno, line in rest:
            try:
                row = [int(t) for t in line.split(",")]
            except ValueError:
                raise _perr(op, f"{where}:{lineno}: non-integer entry in {line!r}") from None
            if len(row) != n:
                raise _perr(op, f"{where}:{lineno}: expected {n} entries, found {len(row)}")
            table.append(row)
        G = build_group_from_table(np.array(table, dtype=np.int64), name=name)
        return G, GeneratingSet(G, gens if gens is not None else greedy_generators(G))
    if first.startswith("degree"):
        d = _header(first, "degree", op, f"{where}:{lines[0][0]}")
        perms = []
        for lineno, line in lines[1:]:
            try:
                p = [int(t) for t in line.split()]
            except ValueError:
                raise _perr(op, f"{where}:{lineno}: non-integer image in {line!r}") from None
            if len(p) != d:
                raise _perr(op, f"{where}:{lineno}: expected {d} images, found {len(p)}")
            perms.append(p)
        return build_group_from_permutations(perms, degree=d, cap=cap, name=name)
    raise _perr(op, f"{where}:{lines[0][0]}: first line must be 'order=n' or 'degree=d'")


def read_group(path, cap: int = DEFAULT_CLOSURE_CAP) -> tuple[FiniteGroup, GeneratingSet]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise _perr("read_group", f"cannot read {path}: {exc.strerror}") from None
    return parse_group(text, name=path.stem, cap=cap, where=str(path))


def write_table_group(path, G: FiniteGroup, S: GeneratingSet | None = None) -> None:
    lines = [f"order={G.order}"]
    if S is not None:
        lines.append("generators=" + ",".join(str(s) for s in S.generators))
    lines += [",".join(str(int(x)) for x in row) for row in G.table]
    Path(path).write_text("\n".join(lines) + "\n")


def write_permutation_group(path, perms, degree: int | None = None) -> None:
    perms = [list(map(int, p)) for p in perms]
    d = degree if degree is not None else (len(perms[0]) if perms else 0)
    lines = [f"degree={d}"] + [" ".join(map(str, p)) for p in perms]
    Path(path).write_text("\n".join(lines) + "\n")


def read_family_paths(path) -> list[Path]:
    op = "read_family"
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise _perr(op, f"cannot read {path}: {exc.strerror}") from None
    members = [path.parent / line for _, line in _content_lines(text)]
    if not members:
        raise _perr(op, f"{path}: family file lists no members")
    return members


def read_family(path, cap: int = DEFAULT_CLOSURE_CAP) -> tuple[FamilySpec, list[Path]]:
    members = read_family_paths(path)
    return FamilySpec(tuple(read_group(p, cap=cap) for p in members)), members


def write_metric_csv(path, X: FiniteMetricSpace) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in X.dist:
        w.writerow(["inf" if v == INFINITE else int(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_metric_csv(path) -> FiniteMetricSpace:
    op = "read_metric_csv"
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            try:
                rows.append([INFINITE if v.strip() == "inf" else int(v) for v in row])
            except ValueError:
                raise _perr(op, f"{path}:{lineno}: non-integer distance") from None
    return FiniteMetricSpace(np.array(rows, dtype=np.int64))
