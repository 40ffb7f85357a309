from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heffter.arrays import (
    NotSquare,
    Params,
    PFArray,
    coverage_multiset,
    diagonal_cells,
    diagonal_profile,
    feasibility,
    infeasibility_reasons,
    line_sum,
    verify_array,
)
from heffter.constructors import BuildRequest, construct
from heffter.groups import cyclic, group_from_text, subgroup_of_order

from reference_grids import GRID_4X6_L12, GRID_7X7_L21, entries_mod

Z3 = cyclic(3)
J3 = subgroup_of_order(Z3, 1)
P7 = Params(7, 7, 3, 3, 21, 1, 3)


def grid7() -> PFArray:
    return PFArray(7, 7, Z3, entries_mod(GRID_7X7_L21))


def test_line_sum_of_first_example_row():
    assert line_sum(grid7(), "row", 1) == 2


def test_empty_line_sums_to_zero():
    A = PFArray(2, 2, Z3, {(1, 1): 1})
    assert line_sum(A, "row", 2) == 0 and line_sum(A, "col", 2) == 0


def test_line_sum_respects_order_in_s3(s3):
    a, b = 1, 2  # two transpositions
    assert s3.add(a, b) != s3.add(b, a)
    A = PFArray(1, 2, s3, {(1, 1): a, (1, 2): b})
    B = PFArray(1, 2, s3, {(1, 1): b, (1, 2): a})
    assert line_sum(A, "row", 1) == s3.add(a, b)
    assert line_sum(A, "row", 1) != line_sum(B, "row", 1)


def test_coverage_of_4x6_example():
    A = PFArray(4, 6, Z3, entries_mod(GRID_4X6_L12))
    cov = coverage_multiset(A, J3)
    assert cov == {0: 0, 1: 12, 2: 12}


def test_coverage_small_cases():
    Z7 = cyclic(7)
    J = subgroup_of_order(Z7, 1)
    assert set(coverage_multiset(PFArray(1, 1, Z7, {}), J).values()) == {0}
    cov = coverage_multiset(PFArray(1, 1, Z7, {(1, 1): 3}), J)
    assert cov == {0: 0, 1: 0, 2: 0, 3: 1, 4: 1, 5: 0, 6: 0}


def test_involutions_count_twice():
    Z2 = cyclic(2)
    A = PFArray(3, 3, Z2, {(i, j): 1 for i in range(1, 4) for j in range(1, 4)})
    assert coverage_multiset(A, subgroup_of_order(Z2, 1))[1] == 18
    assert verify_array(A, subgroup_of_order(Z2, 1), Params(3, 3, 3, 3, 18, 1, 2)).ok


def test_verify_reference_grids_pass():
    assert verify_array(grid7(), J3, P7).ok
    A = PFArray(4, 6, Z3, entries_mod(GRID_4X6_L12))
    assert verify_array(A, J3, Params(4, 6, 3, 2, 12, 1, 3)).ok


def test_verify_flags_zero_row_after_flipping_a_cell():
    A = grid7().with_entries({(1, 1): 2})
    rep = verify_array(A, J3, P7)
    assert not rep.nonzero_sums_ok and ("row_sum_zero", 1) in rep.failures


def test_verify_empty_array_fails_counts_everywhere():
    rep = verify_array(PFArray(3, 3, Z3, {}), J3, Params(3, 3, 3, 3, 6, 1, 3))
    assert not rep.row_counts_ok and not rep.col_counts_ok
    assert {f for f in rep.failures if f[0] in ("row_count", "col_count")} == {
        (kind, i) for kind in ("row_count", "col_count") for i in (1, 2, 3)
    }
    # empty lines are not reported as zero sums
    assert rep.nonzero_sums_ok


def test_pfarray_rejects_out_of_range_cells():
    with pytest.raises(ValueError):
        PFArray(2, 2, Z3, {(3, 1): 1})
    with pytest.raises(ValueError):
        PFArray(2, 2, Z3, {(1, 1): 5})


def test_feasibility_examples():
    assert feasibility(Z3, J3, P7).construction == "v3"
    Z2 = cyclic(2)
    f = feasibility(Z2, subgroup_of_order(Z2, 1), Params(3, 3, 3, 3, 18, 1, 2))
    assert f.construction == "z2_all_ones"


def test_small_odd_square_is_covered_by_the_abelian_square_construction():
    Z5 = cyclic(5)
    J = subgroup_of_order(Z5, 1)
    p = Params(2, 2, 2, 2, 2, 1, 5)
    assert feasibility(Z5, J, p).status == "feasible"
    res = construct(BuildRequest(Z5, J, p, 0))
    assert res.report.ok


@pytest.mark.parametrize(
    "group,t,params,needle",
    [
        ("z:3", 1, Params(7, 7, 3, 3, 20, 1, 3), "2nk/lambda"),
        ("z:3", 1, Params(7, 6, 3, 3, 21, 1, 3), "nk="),
        ("z:4", 1, Params(1, 3, 3, 1, 3, 1, 4), "involution"),
        ("z:2", 1, Params(2, 2, 2, 2, 8, 1, 2), "h*k must be odd"),
        ("e2:2", 1, Params(1, 6, 6, 1, 4, 1, 4), "elementary abelian"),
        ("z:5", 1, Params(2, 3, 4, 2, 4, 1, 5), "exceeds"),
    ],
)
def test_infeasibility_reasons(group, t, params, needle):
    G = group_from_text(group)
    reasons = infeasibility_reasons(G, subgroup_of_order(G, t), params)
    assert any(needle in r for r in reasons), reasons


def test_elementary_two_single_row_allowed_case():
    G = group_from_text("e2:2")
    J = subgroup_of_order(G, 2)
    # t=2, v-t=2, length 2 = 1*(v-t) with odd quotient
    assert infeasibility_reasons(G, J, Params(1, 2, 2, 1, 2, 2, 4)) == []
    assert infeasibility_reasons(G, J, Params(1, 4, 4, 1, 4, 2, 4)) != []


def test_diagonal_profiles():
    full = PFArray(3, 3, Z3, {(i, j): 1 for i in range(1, 4) for j in range(1, 4)})
    assert diagonal_profile(full) == ("cyclically_k_diagonal", 3)
    d12 = set(diagonal_cells(1, 5)) | set(diagonal_cells(2, 5))
    assert diagonal_profile(d12, 5) == ("cyclically_k_diagonal", 2)
    d13 = set(diagonal_cells(1, 5)) | set(diagonal_cells(3, 5))
    assert diagonal_profile(d13, 5) == ("k_diagonal", 2)
    assert diagonal_profile({(1, 1), (1, 2)}, 5) == ("other", 0)
    with pytest.raises(NotSquare):
        diagonal_profile(PFArray(2, 3, Z3, {}))


@st.composite
def random_array(draw):
    G = group_from_text(draw(st.sampled_from(["z:5", "z:6", "prod:3x2", "e2:2"])))
    m = draw(st.integers(1, 4))
    n = draw(st.integers(1, 4))
    cells = draw(st.sets(st.tuples(st.integers(1, m), st.integers(1, n))))
    entries = {c: draw(st.integers(0, G.v - 1)) for c in sorted(cells)}
    return PFArray(m, n, G, entries)


@settings(max_examples=80)
@given(random_array())
def test_coverage_total_is_twice_the_filled_count(A):
    J = subgroup_of_order(A.group, 1)
    if 0 in A.entries.values():
        return
    assert sum(coverage_multiset(A, J).values()) == 2 * len(A.entries)


@settings(max_examples=80)
@given(random_array())
def test_row_sums_fold_left_to_right(A):
    G = A.group
    for i in range(1, A.m + 1):
        acc = 0
        for j in range(1, A.n + 1):
            if (i, j) in A.entries:
                acc = G.add(acc, A.entries[(i, j)])
        assert line_sum(A, "row", i) == acc
