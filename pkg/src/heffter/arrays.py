"""Partially filled arrays over a finite group and the non-zero sum verifier.

Cells are 1-based ``(row, col)`` tuples. Row sums run left to right and
column sums top to bottom, which matters once the group is non-abelian.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .groups import FiniteGroup, Subgroup

Cell = tuple[int, int]


class NotSquare(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    m: int
    n: int
    h: int
    k: int
    lam: int
    t: int
    v: int

    def transposed(self) -> Params:
        return Params(self.n, self.m, self.k, self.h, self.lam, self.t, self.v)

    @property
    def nk(self) -> int:
        return self.n * self.k

    @property
    def totally_filled(self) -> bool:
        return self.h == self.n and self.k == self.m

    def as_dict(self) -> dict[str, int]:
        return {
            "m": self.m, "n": self.n, "h": self.h, "k": self.k,
            "lambda": self.lam, "t": self.t, "v": self.v,
        }


@dataclass(frozen=True, eq=False)
class PFArray:
    m: int
    n: int
    group: FiniteGroup
    entries: Mapping[Cell, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        entries = dict(self.entries)
        for (r, c), x in entries.items():
            if not (1 <= r <= self.m and 1 <= c <= self.n):
                raise ValueError(f"cell {(r, c)} outside {self.m}x{self.n}")
            if not (0 <= x < self.group.v):
                raise ValueError(f"entry {x} at {(r, c)} is not a group element")
        object.__setattr__(self, "entries", entries)

    def __getitem__(self, cell: Cell) -> int:
        return self.entries[cell]

    def get(self, cell: Cell) -> int | None:
        return self.entries.get(cell)

    def __len__(self) -> int:
        return len(self.entries)

    def skeleton(self) -> frozenset[Cell]:
        return frozenset(self.entries)

    def row_cells(self, i: int) -> list[Cell]:
        return sorted(c for c in self.entries if c[0] == i)

    def col_cells(self, j: int) -> list[Cell]:
        return sorted(c for c in self.entries if c[1] == j)

    def row(self, i: int) -> list[int]:
        return [self.entries[c] for c in self.row_cells(i)]

    def col(self, j: int) -> list[int]:
        return [self.entries[c] for c in self.col_cells(j)]

    def cells_row_major(self) -> Iterator[tuple[Cell, int]]:
        for cell in sorted(self.entries):
            yield cell, self.entries[cell]

    def transpose(self) -> PFArray:
        return PFArray(self.n, self.m, self.group, {(c, r): x for (r, c), x in self.entries.items()})

    def with_entries(self, updates: Mapping[Cell, int]) -> PFArray:
        entries = dict(self.entries)
        entries.update(updates)
        return PFArray(self.m, self.n, self.group, entries)

    def grid(self) -> list[list[int | None]]:
        return [[self.entries.get((r, c)) for c in range(1, self.n + 1)] for r in range(1, self.m + 1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PFArray):
            return NotImplemented
        return (self.m, self.n, self.group.spec, self.entries) == (
            other.m, other.n, other.group.spec, other.entries)

    __hash__ = None  # type: ignore[assignment]


def line_sum(A: PFArray, kind: str, index: int) -> int:
    """Ordered sum of a row (``kind="row"``) or column (``kind="col"``)."""
    if kind == "row":
        if not 1 <= index <= A.m:
            raise IndexError(f"row {index} out of range")
        return A.group.total(A.row(index))
    if kind == "col":
        if not 1 <= index <= A.n:
            raise IndexError(f"column {index} out of range")
        return A.group.total(A.col(index))
    raise ValueError(f"kind must be 'row' or 'col', got {kind!r}")


def coverage_multiset(A: PFArray, J: Subgroup) -> dict[int, int]:
    """For ``x`` outside ``J``: occurrences of ``x`` plus occurrences of ``-x``.

    Involutions therefore count twice per occurrence. Elements of ``J`` map to
    their raw occurrence count.
    """
    G = A.group
    raw = Counter(A.entries.values())
    out = {}
    for x in range(G.v):
        if x in J:
            out[x] = raw[x]
        else:
            out[x] = raw[x] + raw[G.neg(x)]
    return out


@dataclass
class VerifyReport:
    row_counts_ok: bool
    col_counts_ok: bool
    coverage_ok: bool
    nonzero_sums_ok: bool
    failures: list[tuple[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.row_counts_ok and self.col_counts_ok and self.coverage_ok and self.nonzero_sums_ok

    def as_dict(self) -> dict[str, object]:
        return {
            "ok": self.ok,
            "row_counts_ok": self.row_counts_ok,
            "col_counts_ok": self.col_counts_ok,
            "coverage_ok": self.coverage_ok,
            "nonzero_sums_ok": self.nonzero_sums_ok,
            "failures": [[kind, where] for kind, where in self.failures],
        }


def verify_array(A: PFArray, J: Subgroup, params: Params) -> VerifyReport:
    if (A.m, A.n) != (params.m, params.n):
        raise ValueError(f"array is {A.m}x{A.n} but params say {params.m}x{params.n}")
    G = A.group
    failures: list[tuple[str, object]] = []

    row_counts = Counter(r for r, _ in A.entries)
    col_counts = Counter(c for _, c in A.entries)
    rows_ok = cols_ok = True
    for i in range(1, A.m + 1):
        if row_counts[i] != params.h:
            rows_ok = False
            failures.append(("row_count", i))
    for j in range(1, A.n + 1):
        if col_counts[j] != params.k:
            cols_ok = False
            failures.append(("col_count", j))

    cov = coverage_multiset(A, J)
    cov_ok = True
    for x in range(G.v):
        want = 0 if x in J else params.lam
        if cov[x] != want:
            cov_ok = False
            failures.append(("coverage", x))

    sums_ok = True
    for i in range(1, A.m + 1):
        if row_counts[i] and line_sum(A, "row", i) == 0:
            sums_ok = False
            failures.append(("row_sum_zero", i))
    for j in range(1, A.n + 1):
        if col_counts[j] and line_sum(A, "col", j) == 0:
            sums_ok = False
            failures.append(("col_sum_zero", j))

    return VerifyReport(rows_ok, cols_ok, cov_ok, sums_ok, failures)


def infeasibility_reasons(G: FiniteGroup, J: Subgroup, p: Params) -> list[str]:
    """Every necessary condition the parameters violate (empty list if none)."""
    reasons = []
    if min(p.m, p.n, p.h, p.k, p.lam, p.t) < 1:
        reasons.append("all of m, n, h, k, lambda, t must be positive")
        return reasons
    if p.v != G.v:
        reasons.append(f"v={p.v} differs from the group order {G.v}")
    if p.t != J.t:
        reasons.append(f"t={p.t} differs from the subgroup order {J.t}")
    if p.n * p.k != p.m * p.h:
        reasons.append(f"nk={p.n * p.k} != mh={p.m * p.h}")
    if p.h > p.n:
        reasons.append(f"h={p.h} exceeds n={p.n}")
    if p.k > p.m:
        reasons.append(f"k={p.k} exceeds m={p.m}")
    if G.v % p.t:
        reasons.append(f"t={p.t} does not divide v={G.v}")
    two_nk = 2 * p.n * p.k
    if two_nk % p.lam or two_nk // p.lam + p.t != G.v:
        reasons.append(f"v={G.v} != 2nk/lambda + t = {two_nk}/{p.lam} + {p.t}")
    outside_involution = any(x not in J for x in G.involution_set)
    if outside_involution and p.lam % 2:
        reasons.append("G\\J contains an involution, so lambda must be even")
    if G.v == 2 and (p.h * p.k) % 2 == 0:
        reasons.append("over Z_2 every entry is 1, so h*k must be odd")
    if G.is_elementary_abelian_2() and J.t < G.v and 1 in (p.m, p.n):
        length = p.n if p.m == 1 else p.m
        if p.m == 1 and p.n == 1:
            length = 1
        vt = G.v - J.t
        clause1 = J.t == 2 and length % vt == 0 and (length // vt) % 2 == 1
        clause2 = G.v == 2 and length % 2 == 1
        if not (clause1 or clause2):
            reasons.append(
                "elementary abelian 2-group with a single row/column needs t=2 and the "
                "line length an odd multiple of v-t (lambda/2 odd), or v=2 and odd length"
            )
    return reasons


@dataclass(frozen=True)
class Feasibility:
    status: str  # "infeasible" | "feasible" | "open"
    reasons: tuple[str, ...] = ()
    construction: str | None = None


def feasibility(G: FiniteGroup, J: Subgroup, params: Params) -> Feasibility:
    reasons = infeasibility_reasons(G, J, params)
    if reasons:
        return Feasibility("infeasible", tuple(reasons))
    from .constructors import select_construction

    tag = select_construction(G, J, params)
    if tag is None:
        return Feasibility("open")
    return Feasibility("feasible", construction=tag)


def diagonal_index(cell: Cell, n: int) -> int:
    """Index ``i`` of the diagonal ``D_i`` containing ``cell`` (residues 1..n)."""
    r, c = cell
    return (r - c) % n + 1


def diagonal_cells(i: int, n: int) -> list[Cell]:
    return [((i - 1 + x) % n + 1, x + 1) for x in range(n)]


def diagonal_profile(A: PFArray | Iterable[Cell], n: int | None = None) -> tuple[str, int]:
    """Classify a square skeleton as ``cyclically_k_diagonal``, ``k_diagonal`` or ``other``."""
    if isinstance(A, PFArray):
        if A.m != A.n:
            raise NotSquare(f"{A.m}x{A.n} array is not square")
        n = A.n
        cells = set(A.entries)
    else:
        if n is None:
            raise ValueError("n is required for a bare cell set")
        cells = set(A)
    used = sorted({diagonal_index(c, n) for c in cells})
    for i in used:
        if not all(c in cells for c in diagonal_cells(i, n)):
            return ("other", 0)
    k = len(used)
    if k == 0:
        return ("other", 0)
    used_set = set(used)
    for start in used:
        if all(((start - 1 + s) % n) + 1 in used_set for s in range(k)):
            return ("cyclically_k_diagonal", k)
    return ("k_diagonal", k)
