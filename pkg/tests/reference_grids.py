"""Hand-transcribed example grids over Z_3 (None marks an empty cell)."""

from __future__ import annotations

_ = None

GRID_7X7_L21 = [
    [1, -1, -1, _, _, _, _],
    [_, 1, 1, -1, _, _, _],
    [_, _, 1, -1, -1, _, _],
    [_, _, _, 1, 1, -1, _],
    [_, _, _, _, 1, -1, 1],
    [-1, _, _, _, _, 1, -1],
    [1, -1, _, _, _, _, 1],
]

GRID_4X6_L12 = [
    [1, 1, -1, _, _, _],
    [1, 1, -1, _, _, _],
    [_, _, _, 1, 1, -1],
    [_, _, _, 1, 1, -1],
]

# colour classes of the 7x7 skeleton figure
H1_AND_H2_7X7 = {(2, 2), (2, 3), (3, 3), (6, 6)}
H1_ONLY_7X7 = {(2, 4), (3, 4), (3, 5), (6, 1), (6, 7)}
H2_ONLY_7X7 = {(1, 2), (1, 3), (4, 6), (5, 6), (7, 2)}


def entries_mod(grid, v: int = 3) -> dict[tuple[int, int], int]:
    return {(i + 1, j + 1): x % v for i, row in enumerate(grid) for j, x in enumerate(row) if x is not None}
