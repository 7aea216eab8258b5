"""Integer Smith normal form and finitely generated abelian groups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class AbelianGroup:
    """Z^rank plus cyclic torsion summands, torsion[i] divides torsion[i+1]."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion coefficients must be at least 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion coefficients must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def torsion_order(self) -> int:
        order = 1
        for d in self.torsion:
            order *= d
        return order

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank == 1:
            parts.insert(0, "Z")
        elif self.rank > 1:
            parts.insert(0, f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"

    @classmethod
    def parse(cls, text: str) -> AbelianGroup:
        text = text.strip()
        if text in ("0", ""):
            return cls(0)
        rank, torsion = 0, []
        for part in text.split("+"):
            part = part.strip()
            if part == "Z":
                rank += 1
            elif part.startswith("Z^"):
                rank += int(part[2:])
            elif part.startswith("Z/"):
                torsion.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse group summand {part!r}")
        return cls(rank, tuple(sorted(torsion)))


def smith_diagonal(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form, in divisibility order.

    Works on a private copy with Python integers, so entries never overflow.
    """
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag: list[int] = []
    top = 0
    while top < rows and top < cols:
        pivot = None
        for i in range(top, rows):
            for j in range(top, cols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
                    if abs(a[i][j]) == 1:
                        break
            if pivot and abs(a[pivot[0]][pivot[1]]) == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]

        while True:
            p = a[top][top]
            dirty = False
            for i in range(top + 1, rows):
                if a[i][top]:
                    q = a[i][top] // p
                    if q:
                        ri, rt = a[i], a[top]
                        for j in range(top, cols):
                            ri[j] -= q * rt[j]
                    if a[i][top]:
                        dirty = True
            for j in range(top + 1, cols):
                if a[top][j]:
                    q = a[top][j] // p
                    if q:
                        for i in range(top, rows):
                            a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        dirty = True
            if not dirty:
                # Pivot now isolated; enforce divisibility of the remainder.
                bad = next(
                    (i for i in range(top + 1, rows)
                     for j in range(top + 1, cols) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                rb, rt = a[bad], a[top]
                for j in range(top, cols):
                    rt[j] += rb[j]
                continue
            # Move the smallest remaining entry of the pivot row/column up.
            best = (abs(p), top, top)
            for i in range(top + 1, rows):
                if a[i][top] and abs(a[i][top]) < best[0]:
                    best = (abs(a[i][top]), i, top)
            for j in range(top + 1, cols):
                if a[top][j] and abs(a[top][j]) < best[0]:
                    best = (abs(a[top][j]), top, j)
            _, bi, bj = best
            if bi != top:
                a[top], a[bi] = a[bi], a[top]
            if bj != top:
                for row in a:
                    row[top], row[bj] = row[bj], row[top]
        diag.append(abs(a[top][top]))
        top += 1
    return diag


def homology_group(boundary_out: Sequence[Sequence[int]],
                   boundary_in: Sequence[Sequence[int]],
                   n_cells: int) -> AbelianGroup:
    """Homology at a chain group of dimension ``n_cells``.

    ``boundary_out`` maps the group to the one below (rows = cells below),
    ``boundary_in`` maps the group above into it (rows = these cells).
    """
    rank_out = len(smith_diagonal(boundary_out)) if n_cells else 0
    diag_in = smith_diagonal(boundary_in) if n_cells else []
    free = n_cells - rank_out - len(diag_in)
    return AbelianGroup(free, tuple(d for d in diag_in if d > 1))
