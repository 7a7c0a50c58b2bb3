"""
Restricted triangular nonzero patterns for the factorized approximate inverse.

A lower pattern stores, for every row ``i``, the sorted column indices
``j <= i`` that the lower factor may occupy.  An upper pattern stores, for
every column ``j``, the sorted row indices ``i <= j`` of the upper factor.
Both therefore share one layout: ``rows[k]`` is the support of the k-th
local system, which makes ``transpose`` a relabelling of the orientation.

Indices are zero-based.  In a singular irreducible M-matrix setting the
lower factor must never contain the pair ``(n-1, n-2)`` and the upper factor
never ``(n-2, n-1)``; every builder silently strips that pair and silently
adds the diagonal.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidExclusion
from .sparse_core import SparseMatrix


class Orientation(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"

    def flipped(self) -> "Orientation":
        return Orientation.UPPER if self is Orientation.LOWER else Orientation.LOWER


def default_excluded_pair(n: int, orientation: Orientation):
    if n < 2:
        return None
    if orientation is Orientation.LOWER:
        return (n - 1, n - 2)
    return (n - 2, n - 1)


@dataclass(frozen=True)
class TriangularPattern:
    n: int
    orientation: Orientation
    rows: tuple  # rows[k]: sorted tuple of indices forming the k-th support
    excluded_pair: tuple | None

    @classmethod
    def from_pairs(cls, n, pairs, orientation, excluded_pair="default"):
        """
        Build a pattern verbatim from ``(i, j)`` pairs, without any repair.

        This is the only way to obtain an invalid pattern; use
        :func:`validate` to inspect it.
        """
        orientation = Orientation(orientation)
        if excluded_pair == "default":
            excluded_pair = default_excluded_pair(n, orientation)
        buckets = [set() for _ in range(n)]
        for i, j in pairs:
            i, j = int(i), int(j)
            owner, member = (i, j) if orientation is Orientation.LOWER else (j, i)
            if not (0 <= owner < n):
                raise IndexError(f"pair ({i}, {j}) outside an order-{n} pattern")
            buckets[owner].add(member)
        rows = tuple(tuple(sorted(b)) for b in buckets)
        if excluded_pair is not None:
            excluded_pair = (int(excluded_pair[0]), int(excluded_pair[1]))
        return cls(n, orientation, rows, excluded_pair)

    def pairs(self):
        """All ``(i, j)`` matrix positions in the pattern, sorted."""
        out = []
        for k, members in enumerate(self.rows):
            for m in members:
                out.append((k, m) if self.orientation is Orientation.LOWER else (m, k))
        return sorted(out)

    def __len__(self):
        return sum(len(r) for r in self.rows)

    def __contains__(self, pair):
        i, j = pair
        k, m = (i, j) if self.orientation is Orientation.LOWER else (j, i)
        return 0 <= k < self.n and m in self.rows[k]

    def transpose(self) -> "TriangularPattern":
        ex = None if self.excluded_pair is None else self.excluded_pair[::-1]
        return TriangularPattern(self.n, self.orientation.flipped(), self.rows, ex)

    def to_json(self):
        return {"n": self.n, "orientation": self.orientation.value,
                "pairs": [list(p) for p in self.pairs()],
                "excluded_pair": None if self.excluded_pair is None else list(self.excluded_pair)}

    @classmethod
    def from_json(cls, obj):
        ex = obj.get("excluded_pair", "default")
        return cls.from_pairs(obj["n"], obj["pairs"], obj["orientation"], ex)


def _repaired(n, orientation, supports, excluded_pair="default"):
    """Add the diagonal and drop the excluded pair from per-index supports."""
    orientation = Orientation(orientation)
    if excluded_pair == "default":
        excluded_pair = default_excluded_pair(n, orientation)
    ex_owner = ex_member = None
    if excluded_pair is not None:
        i, j = excluded_pair
        ex_owner, ex_member = (i, j) if orientation is Orientation.LOWER else (j, i)
    rows = []
    for k, s in enumerate(supports):
        s = set(int(m) for m in s)
        s.add(k)
        if k == ex_owner:
            s.discard(ex_member)
        rows.append(tuple(sorted(s)))
    return TriangularPattern(n, orientation, tuple(rows), excluded_pair)


def pattern_diagonal(n: int, orientation=Orientation.LOWER) -> TriangularPattern:
    """Only the diagonal (the ``fsaiD`` choice)."""
    return _repaired(n, orientation, [() for _ in range(n)])


def pattern_from_matrix(A: SparseMatrix, orientation=Orientation.LOWER) -> TriangularPattern:
    """Structural nonzeros of the lower (upper) triangle of ``A`` (``fsaiN``)."""
    orientation = Orientation(orientation)
    src = A if orientation is Orientation.LOWER else A.transpose()
    supports = []
    for k in range(src.n):
        cols, _ = src.row(k)
        supports.append(cols[cols <= k])
    return _repaired(A.n, orientation, supports)


def pattern_banded(n: int, bandwidth: int, orientation=Orientation.LOWER) -> TriangularPattern:
    """All ``(i, j)`` with ``0 <= i - j <= bandwidth`` (mirrored for upper)."""
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    return _repaired(n, orientation, [range(max(0, k - bandwidth), k + 1) for k in range(n)])


def pattern_complete(n: int, orientation=Orientation.LOWER, excluded_col=None) -> TriangularPattern:
    """
    Full triangle minus one last-row pair.

    ``excluded_col`` selects the removed pair ``(n-1, excluded_col)`` of the
    lower pattern (``(excluded_col, n-1)`` for upper) and defaults to ``n-2``.
    """
    orientation = Orientation(orientation)
    if n < 2:
        return _repaired(n, orientation, [()] * n, None)
    if excluded_col is None:
        excluded_col = n - 2
    excluded_col = int(excluded_col)
    if excluded_col == n - 1:
        raise InvalidExclusion("the diagonal pair (n-1, n-1) cannot be excluded")
    if not 0 <= excluded_col < n - 1:
        raise InvalidExclusion(f"excluded_col {excluded_col} outside [0, {n - 2}]")
    pair = (n - 1, excluded_col)
    if orientation is Orientation.UPPER:
        pair = pair[::-1]
    return _repaired(n, orientation, [range(k + 1) for k in range(n)], pair)


def validate(S: TriangularPattern) -> list[str]:
    """
    Return a list of human-readable rule violations; empty means valid.

    Every message starts with the offending pair so callers can filter.
    """
    violations = []
    lower = S.orientation is Orientation.LOWER
    for k, members in enumerate(S.rows):
        if k not in members:
            violations.append(f"({k}, {k}): diagonal missing")
        for m in members:
            pair = (k, m) if lower else (m, k)
            if not 0 <= m < S.n:
                violations.append(f"{pair}: index out of range")
            elif m > k:
                side = "upper" if lower else "lower"
                violations.append(f"{pair}: lies in the strict {side} triangle")
    if S.excluded_pair is None:
        if S.n >= 2:
            violations.append("(-, -): no excluded last-row pair declared")
        return violations
    i, j = S.excluded_pair
    last, other = (i, j) if lower else (j, i)
    if last != S.n - 1 or not 0 <= other < S.n - 1:
        violations.append(f"({i}, {j}): excluded pair must be an off-diagonal last-row pair")
    elif (i, j) in S:
        violations.append(f"({i}, {j}): forbidden pair present")
    return violations


def is_forbidden_pair_violation(message: str) -> bool:
    return message.endswith("forbidden pair present")


def supports_as_arrays(S: TriangularPattern):
    return [np.asarray(r, dtype=np.int64) for r in S.rows]
