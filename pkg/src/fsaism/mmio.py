"""Matrix Market coordinate files (real / integer / pattern; general / symmetric)."""
from __future__ import annotations

from pathlib import Path

from .errors import ParseError, UnsupportedFormat
from .sparse_core import SparseMatrix, from_triplets

_FIELDS = {"real", "integer", "pattern", "double"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric"}


def read_matrix_market(path) -> SparseMatrix:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise ParseError("missing '%%MatrixMarket matrix ...' header", 1)
    fmt, field, symmetry = (h.lower() for h in header[2:])
    if fmt != "coordinate":
        raise UnsupportedFormat(f"only coordinate format is supported, got {fmt!r}")
    if field not in _FIELDS:
        raise UnsupportedFormat(f"unsupported field {field!r}")
    if symmetry not in _SYMMETRIES:
        raise UnsupportedFormat(f"unsupported symmetry {symmetry!r}")

    size = None
    entries = []
    expected = 0
    count = 0
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if size is None:
            try:
                rows, cols, expected = (int(p) for p in parts)
            except ValueError:
                raise ParseError(f"bad size line {s!r}", lineno) from None
            if rows != cols:
                raise UnsupportedFormat(f"matrix must be square, got {rows}x{cols}")
            if rows < 1:
                raise ParseError("matrix order must be positive", lineno)
            size = rows
            continue
        want = 2 if field == "pattern" else 3
        if len(parts) != want:
            raise ParseError(f"expected {want} fields, got {len(parts)}", lineno)
        try:
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            v = 1.0 if field == "pattern" else float(parts[2])
        except ValueError:
            raise ParseError(f"cannot parse entry {s!r}", lineno) from None
        if not (0 <= i < size and 0 <= j < size):
            raise ParseError(f"index ({i + 1}, {j + 1}) outside a {size}x{size} matrix", lineno)
        count += 1
        entries.append((i, j, v))
        if i != j and symmetry == "symmetric":
            entries.append((j, i, v))
        elif i != j and symmetry == "skew-symmetric":
            entries.append((j, i, -v))
    if size is None:
        raise ParseError("missing size line", len(lines))
    if count != expected:
        raise ParseError(f"size line announces {expected} entries, found {count}", len(lines))
    return from_triplets(entries, size)


def write_matrix_market(A: SparseMatrix, path, comment: str | None = None) -> None:
    out = ["%%MatrixMarket matrix coordinate real general"]
    if comment:
        out.extend(f"% {c}" for c in comment.splitlines())
    out.append(f"{A.n} {A.n} {A.nnz}")
    out.extend(f"{i + 1} {j + 1} {v:.17g}" for i, j, v in A.to_triplets())
    Path(path).write_text("\n".join(out) + "\n")
