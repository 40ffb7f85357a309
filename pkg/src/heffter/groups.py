"""Finite groups in additive notation, backed by a Cayley table on indices.

Elements are the integers ``0..v-1`` and ``0`` is always the identity.
Non-abelian groups are also written additively: ``add(x, y)`` is ``x + y``
in that order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

EXHAUSTIVE_ASSOC_LIMIT = 64
SAMPLED_ASSOC_TRIPLES = 100_000


class CayleyInvalid(ValueError):
    """Raised when a Cayley table does not define a group."""


class NoSubgroup(ValueError):
    """Raised when the group has no subgroup of the requested order."""


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "cyclic" | "product" | "elementary2" | "cayley"
    orders: tuple[int, ...] = ()
    table: tuple[tuple[int, ...], ...] | None = None
    path: str | None = None

    @classmethod
    def cyclic(cls, v: int) -> GroupSpec:
        return cls("cyclic", (v,))

    @classmethod
    def product(cls, orders: Sequence[int]) -> GroupSpec:
        return cls("product", tuple(orders))

    @classmethod
    def elementary2(cls, r: int) -> GroupSpec:
        return cls("elementary2", (2,) * r)

    @classmethod
    def cayley(cls, table: Sequence[Sequence[int]], path: str | None = None) -> GroupSpec:
        return cls("cayley", (), tuple(tuple(int(x) for x in row) for row in table), path)

    def text(self) -> str:
        """Render back to the ``z:7`` / ``prod:3x2`` / ``e2:2`` / ``cayley:<path>`` syntax."""
        if self.kind == "cyclic":
            return f"z:{self.orders[0]}"
        if self.kind == "product":
            return "prod:" + "x".join(str(o) for o in self.orders)
        if self.kind == "elementary2":
            return f"e2:{len(self.orders)}"
        return f"cayley:{self.path or '<inline>'}"


def parse_group_spec(text: str) -> GroupSpec:
    """Parse ``z:7``, ``prod:3x2x2``, ``e2:4`` or ``cayley:<path>``."""
    kind, sep, arg = text.strip().partition(":")
    if not sep or not arg:
        raise ValueError(f"bad group spec {text!r}")
    kind = kind.lower()
    if kind == "z":
        return GroupSpec.cyclic(int(arg))
    if kind == "prod":
        return GroupSpec.product([int(p) for p in arg.lower().split("x")])
    if kind == "e2":
        return GroupSpec.elementary2(int(arg))
    if kind == "cayley":
        return GroupSpec.cayley(read_cayley_file(arg), path=arg)
    raise ValueError(f"unknown group kind {kind!r} in {text!r}")


def read_cayley_file(path: str | Path) -> list[list[int]]:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            rows.append([int(tok) for tok in line.split()])
    return rows


@dataclass(frozen=True)
class Subgroup:
    elements: frozenset[int]

    @property
    def t(self) -> int:
        return len(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self.elements

    def sorted(self) -> list[int]:
        return sorted(self.elements)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    spec: GroupSpec
    table: tuple[tuple[int, ...], ...]
    neg_table: tuple[int, ...]
    abelian: bool
    involution_set: frozenset[int]
    labels: tuple[str, ...] = field(repr=False)

    @property
    def v(self) -> int:
        return len(self.table)

    @property
    def is_cyclic_spec(self) -> bool:
        return self.spec.kind == "cyclic"

    def add(self, x: int, y: int) -> int:
        return self.table[x][y]

    def neg(self, x: int) -> int:
        return self.neg_table[x]

    def sub(self, x: int, y: int) -> int:
        """``x - y``, i.e. ``x + (-y)``."""
        return self.table[x][self.neg_table[y]]

    def total(self, xs: Iterable[int]) -> int:
        """Ordered sum, left to right."""
        acc = 0
        tab = self.table
        for x in xs:
            acc = tab[acc][x]
        return acc

    def multiple(self, d: int, x: int) -> int:
        acc = 0
        for _ in range(d):
            acc = self.table[acc][x]
        return acc

    def elements(self) -> range:
        return range(self.v)

    def label(self, x: int) -> str:
        return self.labels[x]

    def is_elementary_abelian_2(self) -> bool:
        return self.abelian and len(self.involution_set) == self.v - 1

    def __repr__(self) -> str:
        return f"FiniteGroup({self.spec.text()}, v={self.v})"


def _cyclic_table(v: int) -> list[list[int]]:
    return [[(x + y) % v for y in range(v)] for x in range(v)]


def _product_table(orders: Sequence[int]) -> tuple[list[list[int]], list[str]]:
    # mixed radix, last factor least significant
    tuples = list(itertools.product(*(range(o) for o in orders)))
    index = {tup: i for i, tup in enumerate(tuples)}
    table = []
    for a in tuples:
        table.append([index[tuple((x + y) % o for x, y, o in zip(a, b, orders))] for b in tuples])
    labels = ["(" + ",".join(str(c) for c in tup) + ")" for tup in tuples]
    return table, labels


def _validate_cayley(table: Sequence[Sequence[int]], rng_seed: int = 0) -> None:
    v = len(table)
    if v == 0:
        raise CayleyInvalid("empty table")
    full = set(range(v))
    for i, row in enumerate(table):
        if len(row) != v:
            raise CayleyInvalid(f"row {i} has length {len(row)}, expected {v}")
        if set(row) != full:
            raise CayleyInvalid(f"row {i} is not a permutation of 0..{v - 1}")
    for j in range(v):
        if {table[i][j] for i in range(v)} != full:
            raise CayleyInvalid(f"column {j} is not a permutation of 0..{v - 1}")
    for x in range(v):
        if table[0][x] != x or table[x][0] != x:
            raise CayleyInvalid("index 0 is not a two-sided identity")
    for x in range(v):
        right = table[x].index(0)
        if table[right][x] != 0:
            raise CayleyInvalid(f"element {x} has no two-sided inverse")
    if v <= EXHAUSTIVE_ASSOC_LIMIT:
        triples: Iterable[tuple[int, int, int]] = itertools.product(range(v), repeat=3)
    else:
        rng = random.Random(rng_seed)
        triples = (
            (rng.randrange(v), rng.randrange(v), rng.randrange(v))
            for _ in range(SAMPLED_ASSOC_TRIPLES)
        )
    for x, y, z in triples:
        if table[table[x][y]][z] != table[x][table[y][z]]:
            raise CayleyInvalid(f"not associative at ({x}, {y}, {z})")


def build_group(spec: GroupSpec) -> FiniteGroup:
    if spec.kind == "cyclic":
        (v,) = spec.orders
        if v < 1:
            raise ValueError("cyclic order must be positive")
        table = _cyclic_table(v)
        labels = [str(x) for x in range(v)]
    elif spec.kind in ("product", "elementary2"):
        if not spec.orders or any(o < 2 for o in spec.orders):
            raise ValueError(f"product orders must all be >= 2, got {spec.orders}")
        table, labels = _product_table(spec.orders)
    elif spec.kind == "cayley":
        if spec.table is None:
            raise CayleyInvalid("cayley spec without a table")
        table = [list(row) for row in spec.table]
        _validate_cayley(table)
        labels = [str(x) for x in range(len(table))]
    else:
        raise ValueError(f"unknown group kind {spec.kind!r}")

    v = len(table)
    neg = tuple(table[x].index(0) for x in range(v))
    abelian = all(table[x][y] == table[y][x] for x in range(v) for y in range(x + 1, v))
    involutions = frozenset(x for x in range(1, v) if table[x][x] == 0)
    return FiniteGroup(
        spec=spec,
        table=tuple(tuple(row) for row in table),
        neg_table=neg,
        abelian=abelian,
        involution_set=involutions,
        labels=tuple(labels),
    )


def cyclic(v: int) -> FiniteGroup:
    return build_group(GroupSpec.cyclic(v))


def group_from_text(text: str) -> FiniteGroup:
    return build_group(parse_group_spec(text))


def element_order(G: FiniteGroup, x: int) -> int:
    d, acc = 1, x
    while acc != 0:
        acc = G.add(acc, x)
        d += 1
    return d


def closure(G: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    """Subgroup generated by ``gens`` (finite, so closure under ``add`` suffices)."""
    gens = [g for g in gens]
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.add(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(seen)


def is_subgroup(G: FiniteGroup, elements: Iterable[int]) -> bool:
    els = set(elements)
    if 0 not in els:
        return False
    return all(G.sub(x, y) in els for x in els for y in els)


def subgroup_of_order(G: FiniteGroup, t: int) -> Subgroup:
    v = G.v
    if t < 1 or v % t:
        raise NoSubgroup(f"{t} does not divide {v}")
    if G.is_cyclic_spec:
        step = v // t
        return Subgroup(frozenset(range(0, v, step)))

    found: set[frozenset[int]] = set()
    for x in range(v):
        h = closure(G, [x])
        if len(h) == t:
            found.add(h)
    if not found:
        for x, y in itertools.combinations(range(1, v), 2):
            h = closure(G, [x, y])
            if len(h) == t:
                found.add(h)
    if not found and t <= 16:
        # join-closure over the whole lattice reachable from cyclic subgroups
        layer = {closure(G, [x]) for x in range(v)}
        seen = set(layer)
        while layer and not found:
            nxt = set()
            for h in layer:
                if len(h) >= t:
                    continue
                for x in range(v):
                    if x not in h:
                        bigger = closure(G, list(h) + [x])
                        if bigger not in seen:
                            seen.add(bigger)
                            nxt.add(bigger)
            found = {h for h in nxt if len(h) == t}
            layer = nxt
    if not found:
        raise NoSubgroup(f"no subgroup of order {t} in {G!r}")
    return Subgroup(min(found, key=lambda h: sorted(h)))


def subgroup_from_elements(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    els = frozenset(elements)
    if not is_subgroup(G, els):
        raise ValueError(f"{sorted(els)} is not a subgroup")
    return Subgroup(els)


def coset_partition(G: FiniteGroup, J: Subgroup) -> list[frozenset[int]]:
    """Left cosets ``x + J``, ordered by least element; ``J`` itself is part 0."""
    parts: list[frozenset[int]] = []
    covered: set[int] = set()
    for x in range(G.v):
        if x in covered:
            continue
        part = frozenset(G.add(x, j) for j in J.elements)
        parts.append(part)
        covered |= part
    return parts


def find_noncommuting_pair(G: FiniteGroup, J: Subgroup) -> tuple[int, int] | None:
    if G.abelian:
        return None
    outside = [x for x in range(G.v) if x not in J]
    for x in outside:
        for y in outside:
            if G.add(x, y) != G.add(y, x):
                return x, y
    return None


def find_noninvolution(G: FiniteGroup, J: Subgroup) -> int | None:
    for x in range(G.v):
        if x not in J and G.neg(x) != x:
            return x
    return None


def divisors(v: int) -> list[int]:
    return [d for d in range(1, v + 1) if v % d == 0]


def signed_label(G: FiniteGroup, x: int) -> str:
    """``x`` as a signed residue for cyclic groups, else the plain label."""
    if G.is_cyclic_spec and x > G.v // 2:
        return str(x - G.v)
    return G.label(x)
