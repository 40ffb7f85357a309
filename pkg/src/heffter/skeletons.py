"""Cell layouts and their partitions into nice tiles.

All cells are 1-based ``(row, col)``; arithmetic on indices wraps modulo the
array dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

Cell = tuple[int, int]

FAMILIES = ("rect3b", "rect2b", "stair32", "dstair21", "dstair31", "diag3b", "diag4b", "diag5b")
DIAG_WIDTH = {"diag3b": 3, "diag4b": 4, "diag5b": 5}
MIN_B = {
    "rect3b": 3, "rect2b": 4, "stair32": 2, "dstair21": 3, "dstair31": 2,
    "diag3b": 4, "diag4b": 3, "diag5b": 2,
}


class BadParams(ValueError):
    pass


class FamilyBoundViolation(ValueError):
    pass


class NotCyclicInterval(ValueError):
    pass


class NoPlan(ValueError):
    pass


def _wrap(x: int, size: int) -> int:
    return (x - 1) % size + 1


def transpose_cells(cells: Iterable[Cell]) -> frozenset[Cell]:
    return frozenset((c, r) for r, c in cells)


def cyclic_start(indices: Iterable[int], size: int) -> int:
    """Start of the cyclic interval formed by ``indices`` (1-based, modulo ``size``).

    Raises NotCyclicInterval when the indices are not one cyclic interval.
    A full line starts at 1.
    """
    idx = set(indices)
    if not idx:
        raise NotCyclicInterval("empty line")
    if len(idx) == size:
        return 1
    starts = [i for i in idx if _wrap(i - 1, size) not in idx]
    if len(starts) != 1:
        raise NotCyclicInterval(f"{sorted(idx)} is not a cyclic interval mod {size}")
    return starts[0]


def cyclic_run(start: int, length: int, size: int) -> list[int]:
    return [_wrap(start + s, size) for s in range(length)]


@dataclass(frozen=True)
class CellSet:
    cells: frozenset[Cell]
    m: int
    n: int

    def __post_init__(self) -> None:
        for r, c in self.cells:
            if not (1 <= r <= self.m and 1 <= c <= self.n):
                raise BadParams(f"cell {(r, c)} outside {self.m}x{self.n}")

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(sorted(self.cells))

    def __contains__(self, cell: object) -> bool:
        return cell in self.cells

    def row_counts(self) -> list[int]:
        counts = [0] * (self.m + 1)
        for r, _ in self.cells:
            counts[r] += 1
        return counts[1:]

    def col_counts(self) -> list[int]:
        counts = [0] * (self.n + 1)
        for _, c in self.cells:
            counts[c] += 1
        return counts[1:]

    def transpose(self) -> CellSet:
        return CellSet(transpose_cells(self.cells), self.n, self.m)


@dataclass(frozen=True)
class Tile:
    cells: frozenset[Cell]
    family: str
    b: int
    m: int
    n: int
    anchor: Cell
    transposed: bool = False
    row_starts: dict[int, int] = field(init=False, compare=False, repr=False)
    col_starts: dict[int, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        rows: dict[int, list[int]] = {}
        cols: dict[int, list[int]] = {}
        for r, c in self.cells:
            rows.setdefault(r, []).append(c)
            cols.setdefault(c, []).append(r)
        object.__setattr__(self, "row_starts", {r: cyclic_start(cs, self.n) for r, cs in rows.items()})
        object.__setattr__(self, "col_starts", {c: cyclic_start(rs, self.m) for c, rs in cols.items()})

    def __len__(self) -> int:
        return len(self.cells)

    def row_order(self, i: int) -> list[Cell]:
        """Tile cells of row ``i`` in cyclic order from the start column."""
        start = self.row_starts[i]
        count = sum(1 for r, _ in self.cells if r == i)
        return [(i, c) for c in cyclic_run(start, count, self.n)]

    def col_order(self, j: int) -> list[Cell]:
        start = self.col_starts[j]
        count = sum(1 for _, c in self.cells if c == j)
        return [(r, j) for r in cyclic_run(start, count, self.m)]

    def line_sizes(self) -> tuple[dict[int, int], dict[int, int]]:
        rows: dict[int, int] = {}
        cols: dict[int, int] = {}
        for r, c in self.cells:
            rows[r] = rows.get(r, 0) + 1
            cols[c] = cols.get(c, 0) + 1
        return rows, cols

    def transpose(self) -> Tile:
        return Tile(
            transpose_cells(self.cells), self.family, self.b, self.n, self.m,
            (self.anchor[1], self.anchor[0]), not self.transposed,
        )

    def as_dict(self) -> dict[str, object]:
        return {
            "family": self.family,
            "b": self.b,
            "anchor": list(self.anchor),
            "transposed": self.transposed,
            "cells": [list(c) for c in sorted(self.cells)],
        }


def _native_cells(family: str, b: int, anchor: Cell, m: int, n: int) -> list[Cell]:
    r0, c0 = anchor
    out: list[Cell] = []
    if family in ("rect3b", "rect2b"):
        height = 3 if family == "rect3b" else 2
        for dr in range(height):
            for dc in range(b):
                out.append((r0 + dr, c0 + dc))
    elif family == "stair32":
        for i in range(b):
            for dr in range(3):
                for dc in range(2):
                    out.append((r0 + 3 * i + dr, c0 + 2 * i + dc))
    elif family in ("dstair21", "dstair31"):
        height = 2 if family == "dstair21" else 3
        for i in range(b):
            for dr in range(height):
                for dc in range(2):
                    out.append((r0 + height * i + dr, c0 + i + dc))
    elif family in DIAG_WIDTH:
        w = DIAG_WIDTH[family]
        for x in range(b):
            for c in range(w):
                out.append((r0 + x, c0 + x + c))
    else:
        raise ValueError(f"unknown tile family {family!r}")
    return [(_wrap(r, m), _wrap(c, n)) for r, c in out]


def _check_family_bounds(family: str, b: int, m: int, n: int) -> None:
    if b < MIN_B[family]:
        raise FamilyBoundViolation(f"{family} needs b >= {MIN_B[family]}, got {b}")
    if family == "rect3b" and (m < 3 or b > n):
        raise FamilyBoundViolation(f"rect3b with b={b} does not fit a {m}x{n} array")
    if family == "rect2b" and (m < 2 or b > n):
        raise FamilyBoundViolation(f"rect2b with b={b} does not fit a {m}x{n} array")
    if family == "stair32" and (3 * b > m or 2 * b > n):
        raise FamilyBoundViolation(f"stair32 of length {b} does not fit a {m}x{n} array")
    if family == "dstair21" and (2 * b > m or b > n):
        raise FamilyBoundViolation(f"dstair21 of length {b} does not fit a {m}x{n} array")
    if family == "dstair31" and (3 * b > m or b > n):
        raise FamilyBoundViolation(f"dstair31 of length {b} does not fit a {m}x{n} array")
    if family in DIAG_WIDTH:
        w = DIAG_WIDTH[family]
        if n < m or b > m or w >= n:
            raise FamilyBoundViolation(f"{family} needs n >= m, b <= m and width < n")
        if not (b <= n - (w - 1) or b == m):
            raise FamilyBoundViolation(f"{family} needs b <= n-{w - 1} or b = m, got b={b}")


def tile_catalog(
    family: str, b: int, anchor: Cell, m: int, n: int, transposed: bool = False
) -> Tile:
    """Place a tile of ``family`` and length ``b`` at ``anchor``, wrapping modulo ``(m, n)``.

    A transposed tile is the transpose of the native tile built in the
    transposed ``n x m`` array.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown tile family {family!r}")
    if transposed:
        native = tile_catalog(family, b, (anchor[1], anchor[0]), n, m)
        return native.transpose()
    _check_family_bounds(family, b, m, n)
    cells = _native_cells(family, b, anchor, m, n)
    if len(set(cells)) != len(cells):
        raise FamilyBoundViolation(f"{family} of length {b} overlaps itself in a {m}x{n} array")
    try:
        return Tile(frozenset(cells), family, b, m, n, (_wrap(anchor[0], m), _wrap(anchor[1], n)))
    except NotCyclicInterval as exc:
        raise FamilyBoundViolation(f"{family} of length {b} breaks line contiguity: {exc}") from exc


def certify_family(tile: Tile) -> None:
    """Re-derive the tile from its family description and compare cell sets."""
    rebuilt = tile_catalog(tile.family, tile.b, tile.anchor, tile.m, tile.n, tile.transposed)
    if rebuilt.cells != tile.cells:
        raise FamilyBoundViolation(f"tile cells do not match family {tile.family} b={tile.b}")


# --- skeletons -------------------------------------------------------------


def _r_of(m: int, n: int, h: int, k: int) -> int:
    if min(m, n, h, k) < 1 or n * k != m * h or h > n or k > m:
        raise BadParams(f"need nk = mh with 1 <= h <= n and 1 <= k <= m, got m={m} n={n} h={h} k={k}")
    lcm = m * n // math.gcd(m, n)
    if (n * k) % lcm:
        raise BadParams("lcm(m, n) does not divide nk")
    return n * k // lcm


def coset_skeleton(m: int, n: int, h: int, k: int) -> CellSet:
    """Union of ``r`` cosets ``H + (0, i)`` of ``H = <(1,1)>`` in ``Z_m x Z_n``."""
    r = _r_of(m, n, h, k)
    lcm = m * n // math.gcd(m, n)
    cells = set()
    for i in range(r):
        for x in range(lcm):
            cells.add((x % m + 1, (x + i) % n + 1))
    if len(cells) != r * lcm:
        raise BadParams("cosets overlap")
    out = CellSet(frozenset(cells), m, n)
    _assert_counts(out, h, k)
    return out


def block_skeleton(m: int, n: int, h: int, k: int) -> CellSet:
    """Translates of the ``(k/r) x (h/r)`` block ``Q`` along the block diagonal, ``r`` times."""
    r = _r_of(m, n, h, k)
    qh, qw = k // r, h // r
    g = math.gcd(m, n)
    cells: list[Cell] = []
    for j in range(r):
        for i in range(g):
            for dr in range(qh):
                for dc in range(qw):
                    cells.append((_wrap(1 + dr + i * qh, m), _wrap(1 + dc + j * qw + i * qw, n)))
    if len(set(cells)) != len(cells):
        raise BadParams(f"block translates overlap for m={m} n={n} h={h} k={k}")
    out = CellSet(frozenset(cells), m, n)
    _assert_counts(out, h, k)
    return out


def v3_skeleton(m: int, n: int, h: int, k: int) -> tuple[CellSet, CellSet, CellSet]:
    """Block skeleton ``B`` plus the row set ``H1`` (when 3 | k) and column set ``H2`` (when 3 | h)."""
    B = block_skeleton(m, n, h, k)
    h1: set[Cell] = set()
    h2: set[Cell] = set()
    if k % 3 == 0:
        rows = {_wrap(i * k, m) for i in range(1, math.ceil(n / h) + 1)}
        h1 = {c for c in B.cells if c[0] in rows}
    if h % 3 == 0:
        cols = {_wrap(j * h, n) for j in range(1, math.ceil(m / k) + 1)}
        h2 = {c for c in B.cells if c[1] in cols}
    return B, CellSet(frozenset(h1), m, n), CellSet(frozenset(h2), m, n)


def square_diagonal_skeleton(n: int, k: int) -> CellSet:
    """Cyclically ``k``-diagonal: column ``j`` filled in rows ``j, j+1, ..., j+k-1``."""
    if not 1 <= k <= n:
        raise BadParams(f"need 1 <= k <= n, got n={n} k={k}")
    cells = {(_wrap(j + c, n), j) for j in range(1, n + 1) for c in range(k)}
    return CellSet(frozenset(cells), n, n)


def _assert_counts(B: CellSet, h: int, k: int) -> None:
    if any(c != h for c in B.row_counts()) or any(c != k for c in B.col_counts()):
        raise BadParams(f"skeleton does not have {h} cells per row and {k} per column")


# --- decompositions --------------------------------------------------------


@lru_cache(maxsize=None)
def _decomposable(total: int, parts: tuple[int, ...]) -> bool:
    if total == 0:
        return True
    return any(p <= total and _decomposable(total - p, parts) for p in parts)


def decompose(total: int, allowed: Iterable[int]) -> list[int]:
    """Split ``total`` into allowed parts, minimising the largest part.

    Within that cap, parts are taken largest-first while the remainder stays
    decomposable; the result is returned in ascending order.
    """
    allowed = sorted(set(allowed))
    for cap in allowed:
        parts = tuple(p for p in allowed if p <= cap)
        if not _decomposable(total, parts):
            continue
        out = []
        rest = total
        while rest:
            for p in reversed(parts):
                if p <= rest and _decomposable(rest - p, parts):
                    out.append(p)
                    rest -= p
                    break
        return sorted(out)
    raise NoPlan(f"{total} cannot be split into parts from {allowed}")


# --- plans -----------------------------------------------------------------


@dataclass(frozen=True)
class TilePlan:
    tiles: tuple[Tile, ...]
    skeleton: CellSet
    kind: str

    @property
    def max_size(self) -> int:
        return max(len(t) for t in self.tiles)

    def sizes(self) -> list[int]:
        return [len(t) for t in self.tiles]

    def transpose(self) -> TilePlan:
        return TilePlan(tuple(t.transpose() for t in self.tiles), self.skeleton.transpose(), self.kind)

    def as_dict(self) -> dict[str, object]:
        return {
            "kind": self.kind,
            "m": self.skeleton.m,
            "n": self.skeleton.n,
            "max_size": self.max_size,
            "tiles": [t.as_dict() for t in self.tiles],
        }


def validate_plan(plan: TilePlan, max_allowed: int = 21) -> None:
    from .tiles import tile_bound

    seen: set[Cell] = set()
    for t in plan.tiles:
        if (t.m, t.n) != (plan.skeleton.m, plan.skeleton.n):
            raise NoPlan("tile dimensions differ from the skeleton")
        if seen & t.cells:
            raise NoPlan("tiles overlap")
        seen |= t.cells
        certify_family(t)
        if not tile_bound(t).feasible:
            raise NoPlan(f"{t.family} b={t.b} tile fails the expected-value bound")
    if seen != plan.skeleton.cells:
        raise NoPlan("tiles do not cover the skeleton")
    if plan.max_size > max_allowed:
        raise NoPlan(f"largest tile has {plan.max_size} cells > {max_allowed}")


def _rect_tiles(r0: int, c0: int, rows: int, cols: int, m: int, n: int) -> list[Tile]:
    """Tile a ``rows x cols`` rectangle at ``(r0, c0)`` with 2- and 3-row bands."""
    if rows > cols:
        sub = _rect_tiles(c0, r0, cols, rows, n, m)
        return [t.transpose() for t in sub]
    if rows < 2:
        raise NoPlan(f"{rows}x{cols} rectangle has a single row")
    if cols >= 4:
        bands = decompose(rows, (2, 3))
    elif cols == 3 and rows == 3:
        bands = [3]
    else:
        raise NoPlan(f"{rows}x{cols} rectangle cannot be tiled by 2xb (b>=4) / 3xb (b>=3) tiles")
    tiles = []
    r = r0
    for w in bands:
        widths = decompose(cols, (4, 5, 6, 7) if w == 2 else (3, 4, 5))
        c = c0
        for b in widths:
            tiles.append(tile_catalog("rect2b" if w == 2 else "rect3b", b, (r, c), m, n))
            c += b
        r += w
    return tiles


def _diag_b_parts(w: int, m: int) -> tuple[int, ...]:
    if w == 3:
        return (m,) if 4 <= m <= 7 else tuple(b for b in (4, 5, 6, 7) if b <= m - 4)
    if w == 4:
        return (m,) if m == 5 else tuple(b for b in (3, 4, 5) if b <= m - 3)
    return tuple(b for b in (2, 3) if b <= m - 4)


def plan_tiling(m: int, n: int, h: int, k: int) -> TilePlan:
    """Partition the appropriate skeleton for ``(m, n, h, k)`` into certified nice tiles."""
    r = _r_of(m, n, h, k)
    if h == n and k == m:
        plan = TilePlan(tuple(_rect_tiles(1, 1, m, n, m, n)),
                        CellSet(frozenset((i, j) for i in range(1, m + 1) for j in range(1, n + 1)), m, n),
                        "totally_filled")
    elif r == 1:
        plan = _plan_r1(m, n, h, k)
    elif r == 2:
        plan = _plan_r2(m, n, h, k)
    else:
        plan = _plan_diagonal(m, n, h, k, r)
    plan = TilePlan(tuple(sorted(plan.tiles, key=lambda t: t.anchor)), plan.skeleton, plan.kind)
    validate_plan(plan)
    return plan


def _plan_blocks(m: int, n: int, h: int, k: int, r: int, kind: str) -> TilePlan:
    B = block_skeleton(m, n, h, k)
    rows, cols = k // r, h
    g = math.gcd(m, n)
    tiles = []
    for i in range(g):
        tiles.extend(_rect_tiles(1 + i * rows, 1 + i * (h // r), rows, cols, m, n))
    return TilePlan(tuple(tiles), B, kind)


def _plan_r1(m: int, n: int, h: int, k: int) -> TilePlan:
    if h == 1 or k == 1:
        raise NoPlan("h = 1 or k = 1 is served by the direct column construction")
    if h > k:
        return _plan_r1(n, m, k, h).transpose()
    if (h, k) == (2, 3):
        g = math.gcd(m, n)
        if g < 2:
            raise NoPlan("a single (3,2)-stair block is the totally filled 3x2 array")
        B = block_skeleton(m, n, h, k)
        tiles = []
        step = 0
        for b in decompose(g, (2, 3)):
            tiles.append(tile_catalog("stair32", b, (1 + 3 * step, 1 + 2 * step), m, n))
            step += b
        return TilePlan(tuple(tiles), B, "r1_stairs")
    return _plan_blocks(m, n, h, k, 1, "r1_blocks")


def _plan_r2(m: int, n: int, h: int, k: int) -> TilePlan:
    if h == k:
        raise NoPlan("h = k = 2 squares are served by the direct two-diagonal construction")
    if h > k:
        return _plan_r2(n, m, k, h).transpose()
    B = block_skeleton(m, n, h, k)
    g = math.gcd(m, n)
    if h == 2 and k in (4, 6):
        family, height, parts = ("dstair21", 2, (3, 4, 5)) if k == 4 else ("dstair31", 3, (2, 3))
        tiles = []
        step = 0
        for b in decompose(g, parts):
            tiles.append(tile_catalog(family, b, (1 + height * step, 1 + step), m, n))
            step += b
        return TilePlan(tuple(tiles), B, "r2_double_stairs")
    return _plan_blocks(m, n, h, k, 2, "r2_blocks")


def _plan_diagonal(m: int, n: int, h: int, k: int, r: int) -> TilePlan:
    if m > n:
        return _plan_diagonal(n, m, k, h, r).transpose()
    B = coset_skeleton(m, n, h, k)
    lcm = m * n // math.gcd(m, n)
    tiles = []
    offset = 0
    for w in decompose(r, (3, 4, 5)):
        family = f"diag{w}b"
        parts = _diag_b_parts(w, m)
        if not parts:
            raise NoPlan(f"no admissible b for weight {w} with m={m}")
        x0 = 0
        for b in decompose(lcm, parts):
            tiles.append(tile_catalog(family, b, (x0 % m + 1, (x0 + offset) % n + 1), m, n))
            x0 += b
        offset += w
    return TilePlan(tuple(tiles), B, "diagonal_bands")


def plan_or_none(m: int, n: int, h: int, k: int) -> TilePlan | None:
    try:
        return plan_tiling(m, n, h, k)
    except (NoPlan, BadParams, FamilyBoundViolation):
        return None


def tile_from_cells(cells: Sequence[Cell], m: int, n: int, family: str = "custom") -> Tile:
    """Wrap an arbitrary cell set as an uncertified tile (for probes and oracles)."""
    cells = frozenset(cells)
    anchor = min(cells)
    return Tile(cells, family, len(cells), m, n, anchor)
