"""Parameter sweeps over many tuples, with deterministic per-tuple seeds."""

from __future__ import annotations

import csv
import hashlib
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

from .arrays import Params, infeasibility_reasons, verify_array
from .constructors import BuildRequest, Infeasible, Open, construct
from .groups import divisors, group_from_text, subgroup_of_order

CSV_FIELDS = ["group", "t", "lambda", "m", "n", "h", "k", "outcome", "construction", "verified"]


@dataclass(frozen=True)
class SweepTuple:
    group: str
    t: int
    lam: int
    m: int
    n: int
    h: int
    k: int


@dataclass(frozen=True)
class SweepRow:
    tup: SweepTuple
    outcome: str  # infeasible | built | open
    construction: str
    verified: bool
    seconds: float = 0.0

    def csv_row(self, timing: bool = False) -> list[object]:
        t = self.tup
        row: list[object] = [t.group, t.t, t.lam, t.m, t.n, t.h, t.k, self.outcome,
                             self.construction, int(self.verified)]
        if timing:
            row.append(f"{self.seconds:.4f}")
        return row


def tuple_seed(master: int, tup: SweepTuple) -> int:
    key = f"{master}|{tup.group}|{tup.t}|{tup.lam}|{tup.m}|{tup.n}|{tup.h}|{tup.k}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def shapes(nk: int) -> Iterator[tuple[int, int, int, int]]:
    """All ``(m, n, h, k)`` with ``nk = mh``, ``h <= n``, ``k <= m`` and the given cell count."""
    for m in divisors(nk):
        h = nk // m
        for n in divisors(nk):
            k = nk // n
            if h <= n and k <= m:
                yield m, n, h, k


def feasible_tuples(group: str, max_nk: int, t_values: Iterable[int] | None = None) -> list[SweepTuple]:
    """Every tuple over ``group`` passing the necessary conditions with at most ``max_nk`` filled cells."""
    G = group_from_text(group)
    out = []
    for t in t_values if t_values is not None else divisors(G.v):
        if t >= G.v:
            continue
        J = subgroup_of_order(G, t)
        vt = G.v - t
        lam = 1
        while lam * vt <= 2 * max_nk:
            if (lam * vt) % 2 == 0:
                nk = lam * vt // 2
                for m, n, h, k in shapes(nk):
                    p = Params(m, n, h, k, lam, t, G.v)
                    if not infeasibility_reasons(G, J, p):
                        out.append(SweepTuple(group, t, lam, m, n, h, k))
            lam += 1
    return out


def run_tuple(tup: SweepTuple, master_seed: int = 0) -> SweepRow:
    start = time.perf_counter()
    G = group_from_text(tup.group)
    J = subgroup_of_order(G, tup.t)
    p = Params(tup.m, tup.n, tup.h, tup.k, tup.lam, tup.t, G.v)
    req = BuildRequest(G, J, p, tuple_seed(master_seed, tup))
    try:
        res = construct(req)
    except Infeasible:
        return SweepRow(tup, "infeasible", "", False, time.perf_counter() - start)
    except Open:
        return SweepRow(tup, "open", "", False, time.perf_counter() - start)
    ok = verify_array(res.array, J, p).ok
    return SweepRow(tup, "built", res.construction, ok, time.perf_counter() - start)


def _run_star(args: tuple[SweepTuple, int]) -> SweepRow:
    return run_tuple(*args)


def run_sweep(tuples: list[SweepTuple], master_seed: int = 0, workers: int = 1) -> list[SweepRow]:
    """Results come back in input order whatever the worker count."""
    jobs = [(t, master_seed) for t in tuples]
    if workers <= 1:
        return [_run_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_run_star, jobs, chunksize=8))


def rows_to_csv(rows: list[SweepRow], timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS + (["seconds"] if timing else []))
    for r in rows:
        w.writerow(r.csv_row(timing))
    return buf.getvalue()
