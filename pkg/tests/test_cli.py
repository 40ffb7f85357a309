from __future__ import annotations

import csv
import io
import json

import pytest

from heffter.arrays import Params, PFArray, verify_array
from heffter.cli import main
from heffter.fileio import ArrayFormatError, array_from_dict, dumps_array, read_array, write_array
from heffter.groups import cyclic, subgroup_of_order
from heffter.sweep import CSV_FIELDS

from reference_grids import GRID_7X7_L21, entries_mod


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def build_file(capsys, tmp_path, name, *argv):
    path = tmp_path / name
    code, _, _ = run(capsys, "construct", *argv, "--out", str(path))
    assert code == 0
    return path


def test_construct_reference_grid(capsys):
    code, out, _ = run(capsys, "--json", "construct", "--group", "z:3", "--t", "1", "--lambda", "21",
                       "--m", "7", "--n", "7", "--h", "3", "--k", "3")
    assert code == 0
    doc = json.loads(out)
    got = {(c["r"], c["c"]): c["v"] for c in doc["array"]["cells"]}
    assert got == entries_mod(GRID_7X7_L21)
    assert doc["report"]["ok"]


def test_construct_all_ones(capsys):
    code, out, _ = run(capsys, "construct", "--json", "--group", "z:2", "--lambda", "18",
                       "--m", "3", "--n", "3", "--h", "3", "--k", "3")
    assert code == 0
    cells = json.loads(out)["array"]["cells"]
    assert len(cells) == 9 and {c["v"] for c in cells} == {1}


def test_construct_infeasible_cites_parity(capsys):
    code, out, _ = run(capsys, "--json", "construct", "--group", "e2:2", "--t", "2", "--lambda", "4",
                       "--m", "1", "--n", "8")
    assert code == 2
    doc = json.loads(out)
    assert doc["status"] == "infeasible"
    assert any("odd multiple" in r for r in doc["reasons"])


def test_construct_open_exits_3(capsys, monkeypatch):
    from heffter import constructors as C

    def no_budget(*a, **kw):
        raise C.SearchBudget("budget")

    monkeypatch.setattr(C, "exhaustive_search", no_budget)
    monkeypatch.setattr(C, "global_random_search", lambda *a, **kw: None)
    code, out, _ = run(capsys, "construct", "--group", "z:13", "--lambda", "1",
                       "--m", "2", "--n", "3", "--h", "3", "--k", "2")
    assert code == 3 and out.startswith("open")


@pytest.mark.parametrize("argv", [
    ["construct", "--group", "q:9", "--lambda", "1", "--m", "1", "--n", "3"],
    ["construct", "--group", "z:7", "--t", "3", "--lambda", "1", "--m", "1", "--n", "3"],
    ["construct", "--group", "z:7"],
    ["frobnicate"],
    ["bound", "--m", "3"],
])
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 64


def test_verify_reference_and_mutations(capsys, tmp_path):
    path = build_file(capsys, tmp_path, "a.json", "--group", "z:3", "--lambda", "21",
                      "--m", "7", "--n", "7", "--h", "3", "--k", "3")
    assert run(capsys, "verify", str(path))[0] == 0

    doc = json.loads(path.read_text())
    # rows of the 7x7 grid: three cells each; make row 1 sum to zero
    row1 = [c for c in doc["cells"] if c["r"] == 1]
    row1[0]["v"] = (-(row1[1]["v"] + row1[2]["v"])) % 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "--json", "verify", str(bad))
    assert code == 1
    kinds = [f[0] for f in json.loads(out)["failures"]]
    assert ["row_sum_zero", 1] in json.loads(out)["failures"]
    assert "row_sum_zero" in kinds

    doc = json.loads(path.read_text())
    doc["cells"] = [c for c in doc["cells"] if (c["r"], c["c"]) != (2, 2)]
    short = tmp_path / "short.json"
    short.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "--json", "verify", str(short))
    assert code == 1
    failures = json.loads(out)["failures"]
    assert ["row_count", 2] in failures and ["col_count", 2] in failures


def test_verify_parse_errors_exit_65(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(capsys, "verify", str(broken))[0] == 65
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"group": "z:3"}))
    assert run(capsys, "verify", str(missing))[0] == 65
    assert run(capsys, "verify", str(tmp_path / "nope.json"))[0] == 65


def test_tour_and_embed_on_a_single_row(capsys, tmp_path):
    path = build_file(capsys, tmp_path, "row.json", "--group", "z:7", "--lambda", "1", "--m", "1", "--n", "3")
    code, out, _ = run(capsys, "--json", "tour", str(path))
    assert code == 0 and json.loads(out)["status"] == "found"
    code, out, _ = run(capsys, "--json", "embed", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert rep["vertices"] - rep["edges"] + rep["faces"] == 2 - 2 * rep["genus"]


def test_full_pipeline_5x5_over_z31(capsys, tmp_path):
    path = build_file(capsys, tmp_path, "sq.json", "--group", "z:31", "--lambda", "1",
                      "--m", "5", "--n", "5", "--h", "3", "--k", "3")
    assert run(capsys, "tour", str(path))[0] == 0
    code, out, _ = run(capsys, "--json", "embed", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["edges"] == 31 * 15


def test_tour_none_and_budget_exhausted(capsys, tmp_path):
    # the full 2x2 has no knight tour at all
    path = build_file(capsys, tmp_path, "sq2.json", "--group", "z:5", "--lambda", "2", "--m", "2", "--n", "2")
    assert run(capsys, "tour", str(path))[0] == 1
    assert run(capsys, "tour", str(path), "--limit", "1", "--budget", "5")[0] == 3
    code, out, _ = run(capsys, "--json", "embed", str(path), "--budget", "5")
    assert code == 3 and json.loads(out)["status"] == "budget_exhausted"


def test_sweep_csv(capsys, tmp_path):
    out_path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--groups", "z:7,z:9", "--max-nk", "12", "--out", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert rows and list(rows[0]) == CSV_FIELDS
    assert all(r["outcome"] == "built" and r["verified"] == "1" for r in rows)
    code, _, _ = run(capsys, "sweep", "--groups", "z:7,z:9", "--max-nk", "12", "--timing",
                     "--out", str(tmp_path / "t.csv"))
    assert code == 0
    assert (tmp_path / "t.csv").read_text().splitlines()[0].split(",") == CSV_FIELDS + ["seconds"]


def test_bound_command(capsys):
    code, out, _ = run(capsys, "--json", "bound", "--m", "5", "--n", "5", "--lambda", "1")
    assert code == 0 and json.loads(out) == {"rows": "5/21", "cols": "5/21", "total": "10/21", "feasible": True}
    code, out, _ = run(capsys, "bound", "--json", "--family", "rect3b", "--b", "3", "--m", "3", "--n", "9")
    assert code == 0 and json.loads(out)["total"] == "6/7"


def test_dump_plan(capsys, tmp_path):
    plan = tmp_path / "plan.json"
    code, out, _ = run(capsys, "--dump-plan", str(plan), "construct", "--group", "z:42", "--t", "2",
                       "--lambda", "1", "--m", "5", "--n", "5", "--h", "4", "--k", "4")
    assert code == 0 and out.startswith("built via tiling")
    doc = json.loads(plan.read_text())
    assert doc["kind"] == "diagonal_bands" and sum(len(t["cells"]) for t in doc["tiles"]) == 20


def test_outputs_are_byte_identical(capsys, tmp_path):
    argv = ["--seed", "11", "--json", "construct", "--group", "z:31", "--t", "1", "--lambda", "3",
            "--m", "5", "--n", "9", "--h", "9", "--k", "5"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0


def test_fileio_roundtrip(tmp_path):
    G = cyclic(7)
    J = subgroup_of_order(G, 1)
    A = PFArray(1, 3, G, {(1, 1): 1, (1, 2): 2, (1, 3): 3})
    params = Params(1, 3, 3, 1, 1, 1, 7)
    path = tmp_path / "x.json"
    write_array(path, A, J, params)
    A2, J2, p2, G2 = read_array(path)
    assert A2.entries == A.entries and p2 == params and J2.sorted() == J.sorted()
    assert verify_array(A2, J2, p2).ok
    assert dumps_array(A2, J2, p2) == path.read_text()
    doc = json.loads(path.read_text())
    doc["cells"].append(doc["cells"][0])
    with pytest.raises(ArrayFormatError):
        array_from_dict(doc)
