"""Knight-tour orientations, compatible orderings and the face-traced biembedding."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field

from .arrays import PFArray
from .groups import FiniteGroup, Subgroup, coset_partition, element_order

Cell = tuple[int, int]
EXHAUSTIVE_LIMIT = 30


class SearchTooLarge(ValueError):
    pass


class NotFound(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Orientation:
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def as_dict(self) -> dict[str, list[int]]:
        return {"rows": list(self.rows), "cols": list(self.cols)}


@dataclass(frozen=True)
class KnightSequence:
    cells: tuple[Cell, ...]  # states visited, one per row-then-column move
    path: tuple[Cell, ...]  # every cell touched, including the row-step landing cells
    closed: bool
    covers_all: bool


@dataclass(frozen=True)
class CompatiblePair:
    omega_r: dict[Cell, Cell]
    omega_c: dict[Cell, Cell]

    def composition(self) -> dict[Cell, Cell]:
        """``omega_c . omega_r``: apply the row permutation first."""
        return {c: self.omega_c[self.omega_r[c]] for c in self.omega_r}


def _line_maps(A: PFArray) -> tuple[dict, dict]:
    """Next filled cell along each row/column, for both orientations."""
    row_next: dict[tuple[Cell, int], Cell] = {}
    col_next: dict[tuple[Cell, int], Cell] = {}
    for i in range(1, A.m + 1):
        cells = A.row_cells(i)
        for s, c in enumerate(cells):
            row_next[(c, 1)] = cells[(s + 1) % len(cells)]
            row_next[(c, -1)] = cells[(s - 1) % len(cells)]
    for j in range(1, A.n + 1):
        cells = A.col_cells(j)
        for s, c in enumerate(cells):
            col_next[(c, 1)] = cells[(s + 1) % len(cells)]
            col_next[(c, -1)] = cells[(s - 1) % len(cells)]
    return row_next, col_next


def knight_sequence(A: PFArray, orientation: Orientation, start: Cell) -> KnightSequence:
    if start not in A.entries:
        raise ValueError(f"start {start} is not a filled cell")
    row_next, col_next = _line_maps(A)
    states = [start]
    path = [start]
    cur = start
    while True:
        mid = row_next[(cur, orientation.rows[cur[0] - 1])]
        cur = col_next[(mid, orientation.cols[mid[1] - 1])]
        if mid != path[-1]:
            path.append(mid)
        if cur == start:
            break
        states.append(cur)
        if cur != path[-1]:
            path.append(cur)
    return KnightSequence(tuple(states), tuple(path), True, len(states) == len(A.entries))


def _orbit_covers(start: Cell, step: dict[Cell, Cell], total: int) -> bool:
    cur, count = step[start], 1
    while cur != start:
        cur = step[cur]
        count += 1
    return count == total


def _knight_step(A: PFArray, o: Orientation, row_next: dict, col_next: dict) -> dict[Cell, Cell]:
    step = {}
    for c in A.entries:
        mid = row_next[(c, o.rows[c[0] - 1])]
        step[c] = col_next[(mid, o.cols[mid[1] - 1])]
    return step


def solve_knight(A: PFArray, limit: int = EXHAUSTIVE_LIMIT) -> Orientation | None:
    """First solving orientation in lexicographic order (+1 before -1), first row fixed to +1."""
    if not A.entries:
        raise ValueError("empty array")
    if A.m + A.n > limit:
        raise SearchTooLarge(f"m + n = {A.m + A.n} exceeds the exhaustive limit {limit}")
    row_next, col_next = _line_maps(A)
    total = len(A.entries)
    start = min(A.entries)
    for bits in itertools.product((1, -1), repeat=A.m - 1 + A.n):
        o = Orientation((1,) + bits[: A.m - 1], bits[A.m - 1:])
        if _orbit_covers(start, _knight_step(A, o, row_next, col_next), total):
            return o
    return None


def random_knight(A: PFArray, budget: int, seed: int = 0) -> Orientation | None:
    rng = random.Random(seed)
    row_next, col_next = _line_maps(A)
    total = len(A.entries)
    start = min(A.entries)
    for _ in range(budget):
        o = Orientation(tuple(rng.choice((1, -1)) for _ in range(A.m)),
                        tuple(rng.choice((1, -1)) for _ in range(A.n)))
        if _orbit_covers(start, _knight_step(A, o, row_next, col_next), total):
            return o
    return None


def pair_from_orientation(A: PFArray, o: Orientation) -> CompatiblePair:
    row_next, col_next = _line_maps(A)
    omega_r = {c: row_next[(c, o.rows[c[0] - 1])] for c in A.entries}
    omega_c = {c: col_next[(c, o.cols[c[1] - 1])] for c in A.entries}
    return CompatiblePair(omega_r, omega_c)


def is_compatible(pair: CompatiblePair) -> bool:
    comp = pair.composition()
    if not comp:
        return False
    return _orbit_covers(min(comp), comp, len(comp))


def compatible_orderings(A: PFArray, budget: int = 20_000, seed: int = 0) -> CompatiblePair:
    """From a knight solution when one exists, else a random search over line cycles."""
    o = None
    if A.m + A.n <= EXHAUSTIVE_LIMIT:
        o = solve_knight(A)
    else:
        o = random_knight(A, budget, seed)
    if o is not None:
        pair = pair_from_orientation(A, o)
        if not is_compatible(pair):
            raise InvariantViolation("knight solution does not give a single cycle")
        return pair
    rng = random.Random(seed)
    rows = [A.row_cells(i) for i in range(1, A.m + 1)]
    cols = [A.col_cells(j) for j in range(1, A.n + 1)]
    for _ in range(budget):
        omega_r: dict[Cell, Cell] = {}
        omega_c: dict[Cell, Cell] = {}
        for lines, target in ((rows, omega_r), (cols, omega_c)):
            for line in lines:
                cyc = line[:1] + rng.sample(line[1:], len(line) - 1)
                for s, c in enumerate(cyc):
                    target[c] = cyc[(s + 1) % len(cyc)]
        pair = CompatiblePair(omega_r, omega_c)
        if is_compatible(pair):
            return pair
    raise NotFound("no compatible orderings within the budget")


# --- biembedding -------------------------------------------------------------

Dart = tuple[tuple[Cell, int], int]  # ((cell, base vertex), +1 forward / -1 backward)


@dataclass
class Embedding:
    v: int
    edges: int
    row_faces: list[list[int]]
    col_faces: list[list[int]]
    row_face_lines: list[int]
    col_face_lines: list[int]
    genus: int
    parts: list[frozenset[int]]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def faces(self) -> int:
        return len(self.row_faces) + len(self.col_faces)


def _cycle_order(start: Cell, perm: dict[Cell, Cell]) -> list[Cell]:
    out = [start]
    cur = perm[start]
    while cur != start:
        out.append(cur)
        cur = perm[cur]
    return out


def canonical_rotation(seq: list[int]) -> tuple[int, ...]:
    return min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))


def build_biembedding(A: PFArray, J: Subgroup, lam: int, pair: CompatiblePair) -> Embedding:
    """Trace row faces forward and column faces backward, then check every invariant."""
    G = A.group
    if not G.abelian:
        raise ValueError("face tracing is implemented for abelian groups only")
    if not is_compatible(pair):
        raise InvariantViolation("orderings are not compatible")
    v = G.v

    def trace(lines: list[list[Cell]], direction: int):
        faces, labels, darts = [], [], []
        used: set[tuple[Cell, int]] = set()
        for idx, cells in enumerate(lines):
            a0 = A.entries[cells[0]]
            for g0 in range(v):
                if (cells[0], g0 if direction == 1 else G.sub(g0, a0)) in used:
                    continue
                verts, fd = [g0], []
                g, s = g0, 0
                while True:
                    c = cells[s % len(cells)]
                    a = A.entries[c]
                    if direction == 1:
                        base, nxt = g, G.add(g, a)
                    else:
                        base, nxt = G.sub(g, a), G.sub(g, a)
                    used.add((c, base))
                    fd.append(((c, base), direction))
                    g, s = nxt, s + 1
                    if g == g0 and s % len(cells) == 0:
                        break
                    verts.append(g)
                faces.append(verts)
                labels.append(idx)
                darts.append(fd)
        return faces, labels, darts

    row_lines = []
    for i in range(1, A.m + 1):
        cells = A.row_cells(i)
        if cells:
            row_lines.append(_cycle_order(cells[0], pair.omega_r))
    col_lines = []
    for j in range(1, A.n + 1):
        cells = A.col_cells(j)
        if cells:
            col_lines.append(_cycle_order(cells[0], pair.omega_c))
    row_faces, row_lab, row_darts = trace(row_lines, 1)
    col_faces, col_lab, col_darts = trace(col_lines, -1)

    checks: dict[str, bool] = {}
    d_row = Counter(d[0] for f in row_darts for d in f)
    d_col = Counter(d[0] for f in col_darts for d in f)
    n_edges = v * len(A.entries)
    checks["double_cover"] = (
        d_row == d_col and len(d_row) == n_edges and all(x == 1 for x in d_row.values())
    )

    # undirected support: lambda edges between vertices in different cosets, none inside a coset
    parts = coset_partition(G, J)
    part_of = {x: i for i, p in enumerate(parts) for x in p}
    mult: Counter = Counter()
    for (c, g) in d_row:
        h = G.add(g, A.entries[c])
        mult[frozenset((g, h))] += 1
    support_ok = True
    for x in range(v):
        for y in range(x + 1, v):
            want = 0 if part_of[x] == part_of[y] else lam
            if mult[frozenset((x, y))] != want:
                support_ok = False
    checks["multipartite_support"] = support_ok

    # each vertex link must be a single cycle
    link: dict[int, dict[tuple, list[tuple]]] = {x: {} for x in range(v)}

    def end_at(dart, arriving: bool):
        (c, g), d = dart
        head = G.add(g, A.entries[c])
        # forward dart runs tail(0) -> head(1); backward runs head(1) -> tail(0)
        if d == 1:
            return ((c, g), 1, head) if arriving else ((c, g), 0, g)
        return ((c, g), 0, g) if arriving else ((c, g), 1, head)

    for fd in row_darts + col_darts:
        for s in range(len(fd)):
            a = end_at(fd[s], True)
            b = end_at(fd[(s + 1) % len(fd)], False)
            if a[2] != b[2]:
                raise InvariantViolation("face walk is not closed at a corner")
            x = a[2]
            link[x].setdefault(a[:2], []).append(b[:2])
            link[x].setdefault(b[:2], []).append(a[:2])
    links_ok = True
    for x in range(v):
        adj = link[x]
        if not adj or any(len(nb) != 2 for nb in adj.values()):
            links_ok = False
            continue
        start = next(iter(adj))
        seen, prev, cur = {start}, None, start
        while True:
            nb = adj[cur]
            nxt = nb[0] if nb[0] != prev or nb[0] == nb[1] else nb[1]
            if nxt == start:
                break
            if nxt in seen:
                break
            seen.add(nxt)
            prev, cur = cur, nxt
        if len(seen) != len(adj):
            links_ok = False
    checks["vertex_links_single_cycle"] = links_ok

    # connectivity of the underlying graph
    adjv: dict[int, set[int]] = {x: set() for x in range(v)}
    for pair_xy in mult:
        x, y = tuple(pair_xy)
        adjv[x].add(y)
        adjv[y].add(x)
    seen_v, stack = {0}, [0]
    while stack:
        x = stack.pop()
        for y in adjv[x] - seen_v:
            seen_v.add(y)
            stack.append(y)
    checks["connected"] = len(seen_v) == v

    F = len(row_faces) + len(col_faces)
    chi = v - n_edges + F
    checks["euler_genus_integral"] = chi <= 2 and (2 - chi) % 2 == 0
    genus = (2 - chi) // 2

    def lengths_ok(faces, labels, lines):
        for f, idx in zip(faces, labels):
            size = len(lines[idx])
            if len(f) % size or len(f) <= size:
                return False
        return True

    checks["row_face_lengths"] = lengths_ok(row_faces, row_lab, row_lines)
    checks["col_face_lengths"] = lengths_ok(col_faces, col_lab, col_lines)
    for face, idx in zip(row_faces, row_lab):
        s = G.total(A.entries[c] for c in row_lines[idx])
        if len(face) != len(row_lines[idx]) * element_order(G, s):
            checks["row_face_lengths"] = False

    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise InvariantViolation(f"embedding checks failed: {failed}")
    return Embedding(v, n_edges, row_faces, col_faces, row_lab, col_lab, genus, parts, checks)


def embedding_report(E: Embedding) -> dict[str, object]:
    row_hist = Counter(len(f) for f in E.row_faces)
    col_hist = Counter(len(f) for f in E.col_faces)
    q = len(E.parts)
    t = len(E.parts[0]) if E.parts else 0
    return {
        "vertices": E.v,
        "edges": E.edges,
        "faces": E.faces,
        "genus": E.genus,
        "euler_characteristic": E.v - E.edges + E.faces,
        "parts": [q, t],
        "row_face_lengths": {str(k): row_hist[k] for k in sorted(row_hist)},
        "col_face_lengths": {str(k): col_hist[k] for k in sorted(col_hist)},
        "checks": dict(E.checks),
        "ok": all(E.checks.values()),
    }
