"""JSON serialisation of arrays together with their parameters."""

from __future__ import annotations

import json
from pathlib import Path

from .arrays import Params, PFArray
from .groups import FiniteGroup, Subgroup, group_from_text, subgroup_from_elements


class ArrayFormatError(ValueError):
    pass


def array_to_dict(A: PFArray, J: Subgroup, params: Params) -> dict[str, object]:
    return {
        "group": A.group.spec.text(),
        "m": params.m,
        "n": params.n,
        "h": params.h,
        "k": params.k,
        "lambda": params.lam,
        "t": params.t,
        "subgroup": J.sorted(),
        "cells": [{"r": r, "c": c, "v": x} for (r, c), x in A.cells_row_major()],
    }


def dumps_array(A: PFArray, J: Subgroup, params: Params) -> str:
    return json.dumps(array_to_dict(A, J, params), sort_keys=True, indent=1) + "\n"


def array_from_dict(data: dict) -> tuple[PFArray, Subgroup, Params, FiniteGroup]:
    try:
        G = group_from_text(str(data["group"]))
        J = subgroup_from_elements(G, [int(x) for x in data["subgroup"]])
        params = Params(int(data["m"]), int(data["n"]), int(data["h"]), int(data["k"]),
                        int(data["lambda"]), int(data["t"]), G.v)
        entries = {}
        for cell in data["cells"]:
            key = (int(cell["r"]), int(cell["c"]))
            if key in entries:
                raise ArrayFormatError(f"cell {key} listed twice")
            entries[key] = int(cell["v"])
        A = PFArray(params.m, params.n, G, entries)
    except (KeyError, TypeError) as exc:
        raise ArrayFormatError(f"malformed array document: {exc!r}") from exc
    return A, J, params, G


def read_array(path: str | Path) -> tuple[PFArray, Subgroup, Params, FiniteGroup]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ArrayFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ArrayFormatError(f"{path}: expected a JSON object")
    return array_from_dict(data)


def write_array(path: str | Path, A: PFArray, J: Subgroup, params: Params) -> None:
    Path(path).write_text(dumps_array(A, J, params))
