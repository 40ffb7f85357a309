"""Filling a nice tile with a given element list while dodging per-line target sums."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .groups import FiniteGroup
from .skeletons import Cell, Tile

DFS_NODE_BUDGET = 5_000_000


class NotNice(ValueError):
    pass


@dataclass(frozen=True)
class FillRequest:
    tile: Tile
    s_list: tuple[int, ...]
    forbidden_rows: Mapping[int, tuple[int, int]] = field(default_factory=dict)
    forbidden_cols: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.s_list) != len(self.tile):
            raise ValueError(f"|S|={len(self.s_list)} but the tile has {len(self.tile)} cells")
        for i, (_, start) in self.forbidden_rows.items():
            if self.tile.row_starts.get(i) != start:
                raise ValueError(f"row {i}: start {start} differs from the tile's interval start")
        for j, (_, start) in self.forbidden_cols.items():
            if self.tile.col_starts.get(j) != start:
                raise ValueError(f"column {j}: start {start} differs from the tile's interval start")


@dataclass(frozen=True)
class TileFill:
    assignment: dict[Cell, int]


@dataclass(frozen=True)
class BoundReport:
    ex_rows: Fraction
    ex_cols: Fraction
    total: Fraction
    feasible: bool


def expected_zero_bound(m: int, n: int, h: int, k: int, lam: int) -> BoundReport:
    """Expected number of zero-sum lines of a uniformly random filling, as exact rationals."""
    ex_rows = lam * Fraction(m, m * h - h + 1)
    ex_cols = lam * Fraction(n, n * k - k + 1)
    total = ex_rows + ex_cols
    return BoundReport(ex_rows, ex_cols, total, total < 1)


def tile_bound(tile: Tile) -> BoundReport:
    """Sum over tile lines with ``c`` cells of ``1/(|S|-c+1)``."""
    size = len(tile)
    rows, cols = tile.line_sizes()
    ex_rows = sum((Fraction(1, size - c + 1) for c in rows.values()), Fraction(0))
    ex_cols = sum((Fraction(1, size - c + 1) for c in cols.values()), Fraction(0))
    total = ex_rows + ex_cols
    return BoundReport(ex_rows, ex_cols, total, total < 1)


def displayed_bound(family: str, b: int, case: int = 1) -> Fraction:
    """Closed-form bounds as stated for each tile family.

    ``case`` selects the diagonal-tile column pattern: 1 for ``b <= n-2``,
    3 for a tile spanning every column (``b = n``).
    """
    F = Fraction
    if family == "rect3b":
        return F(3, 2 * b + 1) + F(b, 3 * b - 2)
    if family == "rect2b":
        return F(2, b + 1) + F(b, 2 * b - 1)
    if family == "stair32":
        return F(3 * b, 6 * b - 1) + F(2 * b, 6 * b - 2)
    if family == "dstair21":
        return F(2 * b, 4 * b - 1) + F(b - 1, 4 * b - 3) + F(2, 4 * b - 1)
    if family == "dstair31":
        return F(3 * b, 6 * b - 1) + F(b - 1, 6 * b - 5) + F(2, 6 * b - 2)
    if family == "diag3b":
        if case == 1:
            return F(b, 3 * b - 2) + F(b - 2, 3 * b - 2) + F(2, 3 * b) + F(2, 3 * b - 1)
        if case == 2:
            # b = n-1: b-2 columns with 3 cells and 3 columns with 2 (the end columns merge)
            return F(b, 3 * b - 2) + F(b - 2, 3 * b - 2) + F(3, 3 * b - 1)
        if case == 3:
            return F(2 * b, 3 * b - 2)
    raise ValueError(f"no closed form for {family} case {case}")


def _line_orders(tile: Tile) -> list[tuple[str, int, list[Cell]]]:
    lines = []
    for i in sorted(tile.row_starts):
        lines.append(("row", i, tile.row_order(i)))
    for j in sorted(tile.col_starts):
        lines.append(("col", j, tile.col_order(j)))
    return lines


def _targets(req: FillRequest) -> list[tuple[list[Cell], int]]:
    """(ordered cells, forbidden sum) for every constrained line."""
    out = []
    for kind, idx, cells in _line_orders(req.tile):
        table = req.forbidden_rows if kind == "row" else req.forbidden_cols
        if idx in table:
            out.append((cells, table[idx][0]))
    return out


def fill_ok(G: FiniteGroup, req: FillRequest, assignment: Mapping[Cell, int]) -> bool:
    """Bijection onto S and every constrained line avoids its target."""
    if set(assignment) != set(req.tile.cells):
        return False
    if sorted(assignment.values()) != sorted(req.s_list):
        return False
    return all(G.total(assignment[c] for c in cells) != target for cells, target in _targets(req))


def fill_tile(G: FiniteGroup, req: FillRequest, seed: int = 0) -> TileFill:
    """Random placements first, then a pruned exhaustive search."""
    if len(set(req.s_list)) != len(req.s_list):
        raise ValueError("S must be duplicate-free")
    cells = sorted(req.tile.cells)
    targets = _targets(req)
    rng = random.Random(seed)
    values = list(req.s_list)
    for _ in range(64 * len(values)):
        rng.shuffle(values)
        assignment = dict(zip(cells, values))
        if all(G.total(assignment[c] for c in lc) != tg for lc, tg in targets):
            return TileFill(assignment)
    found = _dfs_fill(G, req, targets)
    if found is None:
        raise NotNice("no assignment of S avoids every target")
    return TileFill(found)


def _dfs_fill(G: FiniteGroup, req: FillRequest, targets) -> dict[Cell, int] | None:
    # place cells row by row so lines close as early as possible
    order: list[Cell] = []
    for i in sorted(req.tile.row_starts):
        order.extend(req.tile.row_order(i))
    position = {c: p for p, c in enumerate(order)}
    closing: dict[int, list[tuple[list[Cell], int]]] = {}
    for lc, tg in targets:
        closing.setdefault(max(position[c] for c in lc), []).append((lc, tg))

    values = sorted(req.s_list)
    used = [False] * len(values)
    assignment: dict[Cell, int] = {}
    nodes = 0

    def rec(p: int) -> bool:
        nonlocal nodes
        if p == len(order):
            return True
        nodes += 1
        if nodes > DFS_NODE_BUDGET:
            raise NotNice("exhaustive search budget exhausted")
        cell = order[p]
        for idx, x in enumerate(values):
            if used[idx]:
                continue
            assignment[cell] = x
            if all(G.total(assignment[c] for c in lc) != tg for lc, tg in closing.get(p, ())):
                used[idx] = True
                if rec(p + 1):
                    return True
                used[idx] = False
            del assignment[cell]
        return False

    return dict(assignment) if rec(0) else None


def brute_force_fillable(G: FiniteGroup, req: FillRequest) -> bool:
    """Plain enumeration of every bijection (test oracle)."""
    cells = sorted(req.tile.cells)
    targets = _targets(req)
    for perm in itertools.permutations(req.s_list):
        assignment = dict(zip(cells, perm))
        if all(G.total(assignment[c] for c in lc) != tg for lc, tg in targets):
            return True
    return False


def line_sum_vectors(G: FiniteGroup, tile: Tile, s_list: Sequence[int]) -> set[tuple[int, ...]]:
    """All vectors of ordered line sums (rows then columns) over every filling by S."""
    cells = sorted(tile.cells)
    lines = [lc for _, _, lc in _line_orders(tile)]
    out = set()
    for perm in itertools.permutations(s_list):
        assignment = dict(zip(cells, perm))
        out.add(tuple(G.total(assignment[c] for c in lc) for lc in lines))
    return out


def blocking_target(vectors: set[tuple[int, ...]]) -> dict[int, int] | None:
    """A partial target vector meeting every achievable sum vector, if one exists.

    If this returns None then every choice of targets can be avoided, i.e. the
    tile is nice for this S. Search is a hitting-set DFS: pick a vector not yet
    met and branch on which coordinate the target shares with it.
    """
    vecs = list(vectors)
    if not vecs:
        return {}
    L = len(vecs[0])

    def rec(target: dict[int, int]) -> dict[int, int] | None:
        unmet = next((p for p in vecs if all(target.get(i) != p[i] for i in range(L))), None)
        if unmet is None:
            return dict(target)
        for i in range(L):
            if i in target:
                continue
            target[i] = unmet[i]
            got = rec(target)
            if got is not None:
                return got
            del target[i]
        return None

    return rec({})


def is_nice_for(G: FiniteGroup, tile: Tile, s_list: Sequence[int]) -> bool:
    return blocking_target(line_sum_vectors(G, tile, s_list)) is None
