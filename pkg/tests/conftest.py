from __future__ import annotations

import itertools

import pytest

from heffter.groups import GroupSpec, build_group


def _perm_table(perms: list[tuple[int, ...]]) -> list[list[int]]:
    # x + y means "apply y, then x" written as composition x∘y
    index = {p: i for i, p in enumerate(perms)}
    return [[index[tuple(x[y[i]] for i in range(len(x)))] for y in perms] for x in perms]


def s3_table() -> list[list[int]]:
    perms = list(itertools.permutations(range(3)))  # identity first
    return _perm_table(perms)


def q8_table() -> list[list[int]]:
    # quaternion units as (sign, letter) with letter in 1,i,j,k
    letters = "1ijk"
    mult = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    units = [(s, c) for c in letters for s in (1, -1)]  # index 0 = +1, index 1 = -1
    index = {u: i for i, u in enumerate(units)}
    table = []
    for s1, c1 in units:
        row = []
        for s2, c2 in units:
            s, c = mult[(c1, c2)]
            row.append(index[(s1 * s2 * s, c)])
        table.append(row)
    return table


@pytest.fixture(scope="session")
def s3():
    return build_group(GroupSpec.cayley(s3_table()))


@pytest.fixture(scope="session")
def q8():
    return build_group(GroupSpec.cayley(q8_table()))


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
