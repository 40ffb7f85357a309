from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heffter.arrays import diagonal_profile
from heffter.skeletons import (
    FAMILIES,
    BadParams,
    FamilyBoundViolation,
    NoPlan,
    NotCyclicInterval,
    Tile,
    coset_skeleton,
    cyclic_run,
    cyclic_start,
    decompose,
    plan_or_none,
    plan_tiling,
    square_diagonal_skeleton,
    tile_catalog,
    v3_skeleton,
    validate_plan,
)

from reference_grids import GRID_7X7_L21, H1_AND_H2_7X7, H1_ONLY_7X7, H2_ONLY_7X7


def counts(cells):
    return Counter(r for r, _ in cells), Counter(c for _, c in cells)


def test_coset_skeleton_examples():
    assert len(coset_skeleton(3, 3, 3, 3).cells) == 9
    B = coset_skeleton(6, 4, 2, 3)
    assert B.cells == {(x % 6 + 1, x % 4 + 1) for x in range(12)}
    rows, cols = counts(B.cells)
    assert set(rows.values()) == {2} and set(cols.values()) == {3}
    assert diagonal_profile(coset_skeleton(7, 7, 3, 3).cells, 7) == ("cyclically_k_diagonal", 3)


def test_coset_skeleton_rejects_bad_params():
    with pytest.raises(BadParams):
        coset_skeleton(4, 6, 3, 3)
    with pytest.raises(BadParams):
        coset_skeleton(3, 3, 4, 4)


def test_v3_skeleton_matches_coloured_figure():
    B, H1, H2 = v3_skeleton(7, 7, 3, 3)
    filled = {(i + 1, j + 1) for i, row in enumerate(GRID_7X7_L21) for j, x in enumerate(row) if x is not None}
    assert B.cells == filled
    assert H1.cells & H2.cells == H1_AND_H2_7X7
    assert H1.cells - H2.cells == H1_ONLY_7X7
    assert H2.cells - H1.cells == H2_ONLY_7X7


def test_v3_skeleton_other_examples():
    _, H1, H2 = v3_skeleton(4, 6, 3, 2)
    assert H1.cells == frozenset()
    assert H2.cells == {(1, 3), (2, 3), (3, 6), (4, 6)}
    B, H1, H2 = v3_skeleton(3, 3, 3, 3)
    assert len(B.cells) == 9
    assert H1.cells == {(3, 1), (3, 2), (3, 3)}
    assert H2.cells == {(1, 3), (2, 3), (3, 3)}


@pytest.mark.parametrize("m,n,h,k", [(7, 7, 3, 3), (6, 6, 3, 3), (9, 6, 2, 3), (6, 9, 3, 2), (12, 8, 6, 9), (5, 10, 6, 3)])
def test_v3_hit_counts(m, n, h, k):
    B, H1, H2 = v3_skeleton(m, n, h, k)
    if k % 3 == 0:
        per_col = Counter(c for _, c in H1.cells)
        assert set(per_col.values()) <= {1, 2} and len(per_col) == n
    if h % 3 == 0:
        per_row = Counter(r for r, _ in H2.cells)
        assert set(per_row.values()) <= {1, 2} and len(per_row) == m
    assert H1.cells <= B.cells and H2.cells <= B.cells


def test_square_diagonal_examples():
    assert len(square_diagonal_skeleton(5, 2).cells) == 10
    assert len(square_diagonal_skeleton(3, 3).cells) == 9
    S = square_diagonal_skeleton(6, 3)
    rows, cols = counts(S.cells)
    assert len(S.cells) == 18 and set(rows.values()) == {3} and set(cols.values()) == {3}
    assert diagonal_profile(S.cells, 6) == ("cyclically_k_diagonal", 3)


def test_stair_figure():
    T = tile_catalog("stair32", 3, (1, 1), 9, 6)
    expected = {(3 * i + dr + 1, 2 * i + dc + 1) for i in range(3) for dr in range(3) for dc in range(2)}
    assert len(T) == 18 and T.cells == expected


def test_full_width_diagonal_tile():
    T = tile_catalog("diag3b", 5, (1, 1), 5, 5)
    rows, cols = counts(T.cells)
    assert len(T) == 15 and set(rows.values()) == {3} and set(cols.values()) == {3}


def test_family_bounds():
    with pytest.raises(FamilyBoundViolation):
        tile_catalog("rect2b", 3, (1, 1), 4, 8)
    with pytest.raises(FamilyBoundViolation):
        tile_catalog("diag3b", 7, (1, 1), 8, 8)  # b > n-2 and b != m
    with pytest.raises(FamilyBoundViolation):
        tile_catalog("stair32", 4, (1, 1), 9, 8)  # 12 rows needed
    with pytest.raises(ValueError):
        tile_catalog("hexagon", 3, (1, 1), 9, 9)


def test_tile_wraps_and_records_interval_starts():
    T = tile_catalog("rect3b", 4, (8, 7), 9, 9)
    assert T.row_starts == {8: 7, 9: 7, 1: 7}
    assert T.col_starts == {7: 8, 8: 8, 9: 8, 1: 8}
    assert T.row_order(9) == [(9, 7), (9, 8), (9, 9), (9, 1)]
    assert T.col_order(1) == [(8, 1), (9, 1), (1, 1)]


def test_cyclic_intervals():
    assert cyclic_start([5, 6, 1], 6) == 5
    assert cyclic_run(5, 3, 6) == [5, 6, 1]
    with pytest.raises(NotCyclicInterval):
        cyclic_start([1, 3], 6)
    with pytest.raises(NotCyclicInterval):
        Tile(frozenset({(1, 1), (1, 3)}), "custom", 2, 3, 4, (1, 1))


def test_transposed_tile_is_transpose_of_native():
    T = tile_catalog("dstair21", 3, (1, 1), 5, 6, transposed=True)
    native = tile_catalog("dstair21", 3, (1, 1), 6, 5)
    assert T.cells == {(c, r) for r, c in native.cells} and T.transposed


def test_decompose_examples():
    assert decompose(5, (2, 3)) == [2, 3]
    assert decompose(9, (4, 5, 6, 7)) == [4, 5]
    assert decompose(9, (3, 4, 5)) == [3, 3, 3]
    with pytest.raises(NoPlan):
        decompose(1, (2, 3))


@given(st.integers(2, 200), st.sampled_from([(2, 3), (3, 4, 5)]))
def test_decompositions_exist(total, parts):
    if parts == (3, 4, 5) and total < 3:
        return
    out = decompose(total, parts)
    assert sum(out) == total and set(out) <= set(parts)


@given(st.integers(4, 200))
def test_band_widths_decompose(total):
    out = decompose(total, (4, 5, 6, 7))
    assert sum(out) == total and set(out) <= {4, 5, 6, 7}


def test_plan_totally_filled_5x9():
    plan = plan_tiling(5, 9, 9, 5)
    got = [(t.family, t.b, t.anchor) for t in plan.tiles]
    assert got == [
        ("rect2b", 4, (1, 1)), ("rect2b", 5, (1, 5)),
        ("rect3b", 3, (3, 1)), ("rect3b", 3, (3, 4)), ("rect3b", 3, (3, 7)),
    ]


def test_plan_stairs_9x6():
    plan = plan_tiling(9, 6, 2, 3)
    assert plan.kind == "r1_stairs"
    assert all(t.family == "stair32" and t.b in (2, 3) for t in plan.tiles)
    assert set().union(*(t.cells for t in plan.tiles)) == plan.skeleton.cells


def test_plan_diagonal_7x7():
    plan = plan_tiling(7, 7, 3, 3)
    assert [(t.family, t.b) for t in plan.tiles] == [("diag3b", 7)]


def test_plan_outside_regimes():
    assert plan_or_none(4, 4, 1, 1) is None
    assert plan_or_none(3, 3, 2, 2) is None


def _plannable(max_cells: int):
    out = []
    for m in range(2, 16):
        for n in range(2, 16):
            for h in range(1, n + 1):
                if (m * h) % n:
                    continue
                k = m * h // n
                if 1 <= k <= m and m * h <= max_cells:
                    out.append((m, n, h, k))
    return out


@settings(max_examples=150)
@given(st.sampled_from(_plannable(120)))
def test_every_plan_is_a_valid_partition(params):
    m, n, h, k = params
    plan = plan_or_none(m, n, h, k)
    if plan is None:
        return
    validate_plan(plan)
    seen = [c for t in plan.tiles for c in t.cells]
    assert len(seen) == len(set(seen)) == m * h
    rows, cols = counts(plan.skeleton.cells)
    assert set(rows.values()) == {h} and set(cols.values()) == {k}
    assert all(t.family in FAMILIES for t in plan.tiles)
    assert [t.anchor for t in plan.tiles] == sorted(t.anchor for t in plan.tiles)
    limit = 15 if plan.kind == "totally_filled" else 21
    assert plan.max_size <= limit


@settings(max_examples=150)
@given(st.sampled_from(_plannable(200)))
def test_coset_skeleton_counts(params):
    m, n, h, k = params
    try:
        B = coset_skeleton(m, n, h, k)
    except BadParams:
        return
    rows, cols = counts(B.cells)
    assert set(rows.values()) == {h} and set(cols.values()) == {k}
