"""End-to-end constructions and the dispatcher that picks among them.

Every array returned by :func:`construct` has passed :func:`verify_array`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

from .arrays import Params, PFArray, VerifyReport, infeasibility_reasons, verify_array
from .groups import FiniteGroup, Subgroup, find_noncommuting_pair, find_noninvolution
from .orderings import Unsatisfiable, omega, ordered_complement, slice_lists
from .skeletons import (
    Cell,
    CellSet,
    Tile,
    TilePlan,
    coset_skeleton,
    cyclic_run,
    plan_or_none,
    square_diagonal_skeleton,
    v3_skeleton,
)
from .tiles import FillRequest, NotNice, fill_tile

GLOBAL_SEARCH_ATTEMPTS = 10_000
EXHAUSTIVE_NODE_BUDGET = 2_000_000
EXHAUSTIVE_MAX_NK = 8
EXHAUSTIVE_MAX_CELLS = 64
TILING_RETRIES = 8


class Infeasible(Exception):
    def __init__(self, reasons: list[str] | tuple[str, ...]):
        self.reasons = tuple(reasons)
        super().__init__("; ".join(self.reasons))


class Open(Exception):
    pass


class RegimeViolation(ValueError):
    pass


class RetriesExhausted(RuntimeError):
    pass


class PlanInconsistent(ValueError):
    pass


class SearchBudget(RuntimeError):
    pass


@dataclass(frozen=True)
class BuildRequest:
    group: FiniteGroup
    J: Subgroup
    params: Params
    seed: int = 0

    def transposed(self) -> BuildRequest:
        return BuildRequest(self.group, self.J, self.params.transposed(), self.seed)


@dataclass(frozen=True)
class BuildResult:
    array: PFArray
    construction: str
    report: VerifyReport
    seed_used: int
    plan: TilePlan | None = None


def _rng(seed: int, tag: str) -> random.Random:
    return random.Random(f"{seed}:{tag}")


def _check(req: BuildRequest, A: PFArray, tag: str) -> PFArray:
    report = verify_array(A, req.J, req.params)
    if not report.ok:
        raise RegimeViolation(f"{tag} output fails verification: {report.failures[:5]}")
    return A


def _omega_order(req: BuildRequest, adjacent: bool = False, lead: tuple[int, ...] = ()) -> list[int]:
    G, J, p = req.group, req.J, req.params
    odd = p.lam % 2 == 1
    ordering = ordered_complement(G, J, want_split=odd, want_adjacent_nonzero=adjacent, lead=lead)
    om = omega(G, J, p.lam, ordering)
    if len(om.elements) != p.nk:
        raise RegimeViolation(f"Omega has {len(om.elements)} elements but the array has {p.nk} cells")
    return list(om.elements)


# --- direct constructions ----------------------------------------------------


def construct_z2_all_ones(req: BuildRequest) -> PFArray:
    G, p = req.group, req.params
    if G.v != 2 or req.J.t != 1 or (p.h * p.k) % 2 == 0:
        raise RegimeViolation("all-ones construction needs Z_2, trivial J and h*k odd")
    B = coset_skeleton(p.m, p.n, p.h, p.k)
    A = PFArray(p.m, p.n, G, {c: 1 for c in B.cells})
    return _check(req, A, "z2_all_ones")


def construct_one_row(req: BuildRequest) -> PFArray:
    p = req.params
    if p.m != 1:
        if p.n == 1:
            return construct_one_row(req.transposed()).transpose()
        raise RegimeViolation("single-row construction needs m = 1 or n = 1")
    G, J = req.group, req.J
    pair = find_noncommuting_pair(G, J)
    lead: tuple[int, ...] = ()
    if pair is not None and p.n >= 2:
        lead = pair
    else:
        x = find_noninvolution(G, J)
        if x is not None:
            lead = (x,)
    try:
        row = _omega_order(req, lead=lead)
    except Unsatisfiable:
        row = _omega_order(req)
        lead = ()
    if G.total(row) == 0:
        if pair is not None and p.n >= 2 and tuple(row[:2]) == pair:
            row[0], row[1] = row[1], row[0]
        elif lead and G.neg(row[0]) != row[0]:
            row[0] = G.neg(row[0])
        else:
            raise RegimeViolation("row sums to zero and no swap or sign flip is available")
    A = PFArray(1, p.n, G, {(1, j + 1): x for j, x in enumerate(row)})
    return _check(req, A, "one_row")


def construct_v3(req: BuildRequest) -> PFArray:
    G, p = req.group, req.params
    if G.v != 3 or req.J.t != 1:
        raise RegimeViolation("v = 3 construction needs a group of order 3 and trivial J")
    B, H1, H2 = v3_skeleton(p.m, p.n, p.h, p.k)
    one, minus_one = 1, G.neg(1)
    entries = {c: one for c in B.cells}
    for c in H1.cells:
        entries[c] = minus_one
    for c in H2.cells:
        entries[c] = G.neg(entries[c])
    if p.k % 3 == 0:
        for j in range(1, p.n + 1):
            hits = sum(1 for c in H1.cells if c[1] == j)
            assert hits in (1, 2), f"column {j} meets H1 in {hits} cells"
    if p.h % 3 == 0:
        for i in range(1, p.m + 1):
            hits = sum(1 for c in H2.cells if c[0] == i)
            assert hits in (1, 2), f"row {i} meets H2 in {hits} cells"
    return _check(req, PFArray(p.m, p.n, G, entries), "v3")


def construct_square_odd_abelian(req: BuildRequest) -> PFArray:
    G, J, p = req.group, req.J, req.params
    if not G.abelian or G.v % 2 == 0 or p.m != p.n or p.h != p.k:
        raise RegimeViolation("square construction needs an abelian group of odd order and m = n, h = k")
    if G.v - J.t < 4:
        return construct_v3(req)
    n, k = p.n, p.k
    ordering = ordered_complement(G, J, want_split=True)
    half = ordering.half
    H = len(half)
    omega_list = list(half) * p.lam
    if len(omega_list) != p.nk:
        raise RegimeViolation(f"Omega has {len(omega_list)} elements but the array has {p.nk} cells")
    B = square_diagonal_skeleton(n, k)
    entries: dict[Cell, int] = {}
    if k >= 2:
        remaining = {x: p.lam for x in half}
        xs, ys = {}, {}
        for i in range(1, n + 1):
            xs[i] = half[(2 * i) % H]
            ys[i] = half[(2 * i - 1) % H]
            entries[(i % n + 1, i)] = xs[i]
            entries[(i, i)] = ys[i]
            remaining[xs[i]] -= 1
            remaining[ys[i]] -= 1
        if any(c < 0 for c in remaining.values()):
            raise RegimeViolation("x/y choices exceed the multiplicity of Omega")
        rest = []
        for x in omega_list:
            if remaining[x] > 0:
                rest.append(x)
                remaining[x] -= 1
        free = [c for c in sorted(B.cells) if c not in entries]
        entries.update(zip(free, rest))
        for i in range(1, n + 1):
            others = G.total(entries[(r, i)] for r in cyclic_run(i + 2, k - 2, n))
            y = ys[i]
            for s in (xs[i], G.neg(xs[i])):
                if G.add(G.add(others, s), y) != 0 and G.sub(G.add(others, s), y) != 0:
                    entries[(i % n + 1, i)] = s
                    break
            else:
                raise AssertionError(f"column {i}: neither sign of x avoids both zero totals")
        for i in range(1, n + 1):
            if G.total(entries[(i, c)] for c in range(1, n + 1) if (i, c) in entries) == 0:
                entries[(i, i)] = G.neg(entries[(i, i)])
    else:
        entries.update(zip(sorted(B.cells), omega_list))
    return _check(req, PFArray(n, n, G, entries), "square_odd_abelian")


def construct_h1(req: BuildRequest) -> PFArray:
    G, J, p = req.group, req.J, req.params
    if p.h != 1:
        if p.k == 1:
            return construct_h1(req.transposed()).transpose()
        raise RegimeViolation("column construction needs h = 1 or k = 1")
    if G.v - J.t < 4:
        raise RegimeViolation("column construction needs v - t >= 4")
    m, n, k = p.m, p.n, p.k
    values = _omega_order(req, adjacent=True)
    entries = {(i, (i - 1) // k + 1): values[i - 1] for i in range(1, m + 1)}

    def col_sum(j: int) -> int:
        return G.total(entries[(r, j)] for r in range((j - 1) * k + 1, j * k + 1))

    if k >= 3 and n >= 2:
        for j in range(1, n + 1):
            if col_sum(j) != 0:
                continue
            nxt = j % n + 1
            cells = [(j * k, j), ((nxt - 1) * k + 1, nxt), ((nxt - 1) * k + 2, nxt)]
            original = [entries[c] for c in cells]
            for perm in itertools.permutations(original):
                entries.update(zip(cells, perm))
                if col_sum(j) != 0 and col_sum(nxt) != 0:
                    break
            else:
                entries.update(zip(cells, original))
                raise RegimeViolation(f"could not repair column {j}")
    return _check(req, PFArray(m, n, G, entries), "h1")


def construct_nk2(req: BuildRequest) -> PFArray:
    G, J, p = req.group, req.J, req.params
    if p.m != p.n or p.h != 2 or p.k != 2:
        raise RegimeViolation("two-diagonal construction needs a square array with h = k = 2")
    if G.v - J.t < 4:
        raise RegimeViolation("two-diagonal construction needs v - t >= 4")
    n = p.n
    if p.lam % 2 == 0:
        seq = list(ordered_complement(G, J, want_adjacent_nonzero=True).sequence)
    else:
        seq = list(ordered_complement(G, J, want_split=True).half)
    L = len(seq)
    entries = {}
    for i in range(1, n + 1):
        entries[(i, i)] = seq[(2 * i - 2) % L]
        entries[(i, i % n + 1)] = seq[(2 * i - 1) % L]
    return _check(req, PFArray(n, n, G, entries), "nk2")


# --- tiling assembly ---------------------------------------------------------


def forbidden_targets(
    G: FiniteGroup, entries: dict[Cell, int], skeleton: CellSet, tile: Tile
) -> tuple[dict[int, tuple[int, int]], dict[int, tuple[int, int]]]:
    """Targets for the lines this tile closes: 0 when nothing else is there, else minus the prior sum."""
    m, n = skeleton.m, skeleton.n
    rows: dict[int, tuple[int, int]] = {}
    cols: dict[int, tuple[int, int]] = {}
    for i, beta in tile.row_starts.items():
        line = [c for c in skeleton.cells if c[0] == i]
        others = [c for c in line if c not in tile.cells]
        if any(c in entries for c in tile.cells if c[0] == i):
            raise PlanInconsistent(f"row {i} of the tile is already filled")
        if any(c not in entries for c in others):
            continue
        width = len(line) - len(others)
        after = (beta - 1 + width) % n
        prior = sorted(others, key=lambda c: (c[1] - 1 - after) % n)
        rows[i] = (G.neg(G.total(entries[c] for c in prior)), beta)
    for j, gamma in tile.col_starts.items():
        line = [c for c in skeleton.cells if c[1] == j]
        others = [c for c in line if c not in tile.cells]
        if any(c not in entries for c in others):
            continue
        height = len(line) - len(others)
        after = (gamma - 1 + height) % m
        prior = sorted(others, key=lambda c: (c[0] - 1 - after) % m)
        cols[j] = (G.neg(G.total(entries[c] for c in prior)), gamma)
    return rows, cols


def assemble_by_tiling(req: BuildRequest, plan: TilePlan | None = None) -> tuple[PFArray, TilePlan]:
    G, J, p = req.group, req.J, req.params
    if plan is None:
        plan = plan_or_none(p.m, p.n, p.h, p.k)
    if plan is None:
        raise RegimeViolation("no tiling plan for these dimensions")
    if plan.max_size > G.v - J.t:
        raise RegimeViolation(f"largest tile has {plan.max_size} cells > v - t = {G.v - J.t}")
    slices = slice_lists(_omega_order(req), plan.sizes())
    for attempt in range(TILING_RETRIES):
        rng = _rng(req.seed, f"tiling:{attempt}")
        entries: dict[Cell, int] = {}
        for tile, S in zip(plan.tiles, slices):
            fr, fc = forbidden_targets(G, entries, plan.skeleton, tile)
            fill = fill_tile(G, FillRequest(tile, tuple(S), fr, fc), seed=rng.getrandbits(64))
            entries.update(fill.assignment)
        A = PFArray(p.m, p.n, G, entries)
        if verify_array(A, J, p).ok:
            return A, plan
    raise RetriesExhausted("tiling assembly failed verification on every retry")


# --- searches ----------------------------------------------------------------


def exhaustive_search(req: BuildRequest, node_budget: int = EXHAUSTIVE_NODE_BUDGET) -> PFArray | None:
    """Complete backtracking over every skeleton and filling.

    Returns None only when no array exists; raises SearchBudget when the
    node budget runs out first.
    """
    G, J, p = req.group, req.J, req.params
    m, n, h, k, lam = p.m, p.n, p.h, p.k, p.lam
    outside = [x for x in range(G.v) if x not in J]
    cls = {x: min(x, G.neg(x)) for x in outside}
    weight = {x: 2 if G.neg(x) == x else 1 for x in outside}
    budget = {c: lam for c in set(cls.values())}
    row_cnt = [0] * (m + 1)
    col_cnt = [0] * (n + 1)
    row_sum = [0] * (m + 1)
    col_sum = [0] * (n + 1)
    entries: dict[Cell, int] = {}
    nodes = 0
    cells = [(r, c) for r in range(1, m + 1) for c in range(1, n + 1)]

    def rec(pos: int) -> bool:
        nonlocal nodes
        if pos == len(cells):
            return all(b == 0 for b in budget.values())
        nodes += 1
        if nodes > node_budget:
            raise SearchBudget("exhaustive search budget exhausted")
        r, c = cells[pos]
        options: list[int | None] = [None] + outside
        for x in options:
            if x is None:
                if row_cnt[r] + (n - c) < h or col_cnt[c] + (m - r) < k:
                    continue
            else:
                if row_cnt[r] >= h or col_cnt[c] >= k or budget[cls[x]] < weight[x]:
                    continue
            saved = (row_sum[r], col_sum[c])
            if x is not None:
                entries[(r, c)] = x
                row_cnt[r] += 1
                col_cnt[c] += 1
                budget[cls[x]] -= weight[x]
                row_sum[r] = G.add(row_sum[r], x)
                col_sum[c] = G.add(col_sum[c], x)
            ok = True
            if c == n and (row_cnt[r] != h or row_sum[r] == 0):
                ok = False
            if r == m and (col_cnt[c] != k or col_sum[c] == 0):
                ok = False
            if ok and rec(pos + 1):
                return True
            if x is not None:
                del entries[(r, c)]
                row_cnt[r] -= 1
                col_cnt[c] -= 1
                budget[cls[x]] += weight[x]
            row_sum[r], col_sum[c] = saved
        return False

    if rec(0):
        return PFArray(m, n, G, dict(entries))
    return None


def random_signed_omega(G: FiniteGroup, J: Subgroup, lam: int, rng: random.Random) -> list[int]:
    out = []
    for x in range(G.v):
        if x in J:
            continue
        nx = G.neg(x)
        if nx == x:
            out.extend([x] * (lam // 2))
        elif x < nx:
            out.extend(x if rng.random() < 0.5 else nx for _ in range(lam))
    return out


def global_random_search(req: BuildRequest, attempts: int = GLOBAL_SEARCH_ATTEMPTS) -> PFArray | None:
    G, J, p = req.group, req.J, req.params
    if p.lam % 2 and G.involution_set - J.elements:
        return None
    B = sorted(coset_skeleton(p.m, p.n, p.h, p.k).cells)
    rng = _rng(req.seed, "global")
    for _ in range(attempts):
        values = random_signed_omega(G, J, p.lam, rng)
        if len(values) != len(B):
            return None
        rng.shuffle(values)
        A = PFArray(p.m, p.n, G, dict(zip(B, values)))
        if verify_array(A, J, p).ok:
            return A
    return None


# --- dispatcher --------------------------------------------------------------

REGIMES: list[dict[str, object]] = [
    {"tag": "z2_all_ones", "when": "v = 2, trivial J, h*k odd"},
    {"tag": "one_row", "when": "m = 1 or n = 1"},
    {"tag": "v3", "when": "v = 3, trivial J"},
    {"tag": "square_odd_abelian", "when": "abelian G of odd order, m = n"},
    {"tag": "h1", "when": "h = 1 or k = 1, v - t >= 4"},
    {"tag": "nk2", "when": "m = n, h = k = 2, v - t >= 4"},
    {"tag": "tiling", "when": "a certified tile plan exists and its largest tile has at most v - t cells",
     "guaranteed": {"totally_filled": 15, "r1": 18, "r2": 20, "r_ge3": 21}},
    {"tag": "exhaustive", "when": f"nk <= {EXHAUSTIVE_MAX_NK} and m*n <= {EXHAUSTIVE_MAX_CELLS}"},
    {"tag": "global_search", "when": f"up to {GLOBAL_SEARCH_ATTEMPTS} random fillings of the coset skeleton"},
]


def regime_table() -> list[dict[str, object]]:
    return [dict(r) for r in REGIMES]


def _applicable(G: FiniteGroup, J: Subgroup, p: Params) -> list[str]:
    vt = G.v - J.t
    tags = []
    if G.v == 2:
        tags.append("z2_all_ones")
    if p.m == 1 or p.n == 1:
        tags.append("one_row")
    if G.v == 3 and J.t == 1:
        tags.append("v3")
    if p.m == p.n and p.h == p.k and G.abelian and G.v % 2 == 1:
        tags.append("square_odd_abelian")
    if (p.h == 1 or p.k == 1) and vt >= 4:
        tags.append("h1")
    if p.m == p.n and p.h == p.k == 2 and vt >= 4:
        tags.append("nk2")
    plan = plan_or_none(p.m, p.n, p.h, p.k)
    if plan is not None and plan.max_size <= vt:
        tags.append("tiling")
    return tags


def select_construction(G: FiniteGroup, J: Subgroup, params: Params) -> str | None:
    """First deterministic construction that applies, or None when only searches remain."""
    tags = _applicable(G, J, params)
    return tags[0] if tags else None


DIRECT: dict[str, Callable[[BuildRequest], PFArray]] = {
    "z2_all_ones": construct_z2_all_ones,
    "one_row": construct_one_row,
    "v3": construct_v3,
    "square_odd_abelian": construct_square_odd_abelian,
    "h1": construct_h1,
    "nk2": construct_nk2,
}


def construct(req: BuildRequest, global_attempts: int = GLOBAL_SEARCH_ATTEMPTS) -> BuildResult:
    G, J, p = req.group, req.J, req.params
    reasons = infeasibility_reasons(G, J, p)
    if reasons:
        raise Infeasible(reasons)

    def done(A: PFArray, tag: str, plan: TilePlan | None = None) -> BuildResult:
        report = verify_array(A, J, p)
        assert report.ok, f"{tag} returned an invalid array"
        return BuildResult(A, tag, report, req.seed, plan)

    for tag in _applicable(G, J, p):
        try:
            if tag == "tiling":
                A, plan = assemble_by_tiling(req)
                return done(A, tag, plan)
            return done(DIRECT[tag](req), tag)
        except (RegimeViolation, Unsatisfiable, RetriesExhausted, NotNice, ValueError):
            continue

    if p.nk <= EXHAUSTIVE_MAX_NK and p.m * p.n <= EXHAUSTIVE_MAX_CELLS:
        try:
            A = exhaustive_search(req)
        except SearchBudget:
            A = None
        else:
            if A is None:
                raise Infeasible(["no array exists (exhaustive search over all fillings)"])
        if A is not None:
            return done(A, "exhaustive")

    A = global_random_search(req, global_attempts)
    if A is not None:
        return done(A, "global_search")
    raise Open(f"no construction applies and {global_attempts} random fillings failed")
