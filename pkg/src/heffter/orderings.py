"""Orderings of G\\J and the element multiset Omega the constructions consume."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .groups import FiniteGroup, Subgroup


class Unsatisfiable(ValueError):
    pass


class OddLambdaWithInvolution(ValueError):
    pass


class SizeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class OrderedComplement:
    sequence: tuple[int, ...]
    plusminus_split: bool
    adjacent_nonzero: bool

    @property
    def half(self) -> tuple[int, ...]:
        return self.sequence[: len(self.sequence) // 2]

    def __len__(self) -> int:
        return len(self.sequence)


def complement(G: FiniteGroup, J: Subgroup) -> list[int]:
    return [x for x in range(G.v) if x not in J]


def has_split(G: FiniteGroup, seq: Sequence[int]) -> bool:
    half = len(seq) // 2
    if len(seq) % 2:
        return False
    second = set(seq[half:])
    return all(G.neg(x) in second for x in seq[:half])


def has_adjacent_nonzero(G: FiniteGroup, seq: Sequence[int]) -> bool:
    L = len(seq)
    return all(G.add(seq[i], seq[(i + 1) % L]) != 0 for i in range(L))


def _split_sequence(G: FiniteGroup, rest: list[int], lead: Sequence[int]) -> list[int]:
    first: list[int] = []
    taken: set[int] = set()
    for x in list(lead) + rest:
        if x in taken:
            continue
        nx = G.neg(x)
        if nx == x:
            raise Unsatisfiable(f"{x} is an involution, no plus/minus split exists")
        first.append(x)
        taken.update((x, nx))
    return first + [G.neg(x) for x in first]


def _adjacent_backtrack(G: FiniteGroup, elements: list[int], lead: Sequence[int]) -> list[int] | None:
    L = len(elements)
    seq = list(lead)
    used = Counter(seq)
    pool = sorted(elements)

    if any(G.add(seq[i], seq[i + 1]) == 0 for i in range(len(seq) - 1)):
        return None

    def rec() -> bool:
        if len(seq) == L:
            return L < 2 or G.add(seq[-1], seq[0]) != 0
        prev = seq[-1] if seq else None
        for x in pool:
            if used[x]:
                continue
            if prev is not None and G.add(prev, x) == 0:
                continue
            seq.append(x)
            used[x] += 1
            if rec():
                return True
            seq.pop()
            used[x] -= 1
        return False

    return seq if rec() else None


def ordered_complement(
    G: FiniteGroup,
    J: Subgroup,
    want_split: bool = False,
    want_adjacent_nonzero: bool = False,
    lead: Sequence[int] = (),
) -> OrderedComplement:
    """Deterministic ordering ``g_1..g_{v-t}`` of ``G\\J`` with the requested flags.

    With ``want_split`` the first half holds one element of each ``{x, -x}``
    pair (first-fit in index order after any ``lead`` elements) and the second
    half lists their negatives in the same order. ``lead`` pins the first
    elements of the sequence.
    """
    rest = complement(G, J)
    if any(x in J for x in lead) or len(set(lead)) != len(lead):
        raise Unsatisfiable(f"lead elements {list(lead)} must be distinct elements of G\\J")
    rest_wo_lead = [x for x in rest if x not in set(lead)]

    if want_split:
        seq = _split_sequence(G, rest_wo_lead, lead)
        if list(seq[: len(lead)]) != list(lead):
            raise Unsatisfiable("lead elements are not compatible with a plus/minus split")
        if want_adjacent_nonzero and not has_adjacent_nonzero(G, seq):
            raise Unsatisfiable("no split ordering with non-zero adjacent sums (need v-t >= 4)")
    elif want_adjacent_nonzero:
        found = _adjacent_backtrack(G, rest, lead)
        if found is None:
            raise Unsatisfiable("no ordering of G\\J has all cyclic adjacent sums non-zero")
        seq = found
    else:
        seq = list(lead) + rest_wo_lead

    return OrderedComplement(
        tuple(seq),
        plusminus_split=want_split,
        adjacent_nonzero=want_adjacent_nonzero,
    )


@dataclass(frozen=True)
class Omega:
    elements: tuple[int, ...]  # in consumption order
    lam: int
    half_set: tuple[int, ...]

    def counter(self) -> Counter:
        return Counter(self.elements)


def omega(G: FiniteGroup, J: Subgroup, lam: int, ordering: OrderedComplement) -> Omega:
    """Multiset ``Omega`` with ``+-Omega = (G\\J)^lambda``, laid out in consumption order.

    Even ``lambda``: ``lambda/2`` passes over the ordering. Odd ``lambda``:
    ``(lambda-1)/2`` full passes followed by the first half of the ordering.
    """
    seq = ordering.sequence
    if lam % 2 == 0:
        elements = seq * (lam // 2)
        half: tuple[int, ...] = ()
    else:
        if any(x not in J for x in G.involution_set):
            raise OddLambdaWithInvolution("odd lambda but G\\J contains an involution")
        if not has_split(G, seq):
            raise OddLambdaWithInvolution("odd lambda needs a plus/minus split ordering")
        half = ordering.half
        elements = seq * ((lam - 1) // 2) + half
    om = Omega(tuple(elements), lam, half)
    _assert_plusminus(G, J, om)
    return om


def plusminus_counts(G: FiniteGroup, elements: Sequence[int]) -> Counter:
    pm: Counter = Counter()
    for x in elements:
        pm[x] += 1
        pm[G.neg(x)] += 1
    return pm


def _assert_plusminus(G: FiniteGroup, J: Subgroup, om: Omega) -> None:
    pm = plusminus_counts(G, om.elements)
    for x in range(G.v):
        want = 0 if x in J else om.lam
        if pm[x] != want:
            raise AssertionError(f"+-Omega has {pm[x]} copies of {x}, expected {want}")


def slice_lists(omega_order: Sequence[int], tile_sizes: Sequence[int]) -> list[tuple[int, ...]]:
    """Cut the consumption order into consecutive repeat-free lists of the given sizes."""
    if sum(tile_sizes) != len(omega_order):
        raise SizeMismatch(f"tile sizes sum to {sum(tile_sizes)}, Omega has {len(omega_order)}")
    out = []
    pos = 0
    for size in tile_sizes:
        chunk = tuple(omega_order[pos : pos + size])
        if len(set(chunk)) != len(chunk):
            raise SizeMismatch(f"slice {len(out) + 1} of size {size} repeats an element")
        out.append(chunk)
        pos += size
    return out
