import csv
import json
import os

import pytest

from cutproject.cli import main, parse_list, UsageError
from cutproject.fixtures import FIXTURES, write_fixtures


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixtures")
    write_fixtures(str(d))
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def scheme(fixture_dir, name):
    return fixture_dir / (name + ".json")


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


def cube_scheme():
    """Quartic-field scheme with a 3-dimensional internal space and a cube window."""
    def e(*c):
        return [str(x) for x in c]
    zero = e(0, 0, 0, 0)
    cube = [[e("1/7" if a == 0 else "3/7", 0, 0, 0) for a in (x, y, w)]
            for x in (0, 1) for y in (0, 1) for w in (0, 1)]
    return {
        "field": FIXTURES["generic_square"]()["field"], "k": 4, "d": 1, "n": 3,
        "proj_physical": [[e(1, 0, 0, 0), e(0, 1, 0, 0), e(0, 0, 1, 0), e(0, 0, 0, 1)]],
        "proj_internal": [[e(1, 0, 0, 0), e(0, -1, 0, 0), zero, zero],
                          [zero, e(1, 0, 0, 0), e(0, -1, 0, 0), zero],
                          [zero, zero, e(1, 0, 0, 0), e(0, -1, 0, 0)]],
        "window": [{"vertices": cube}],
    }


# ---------------------------------------------------------------- exit codes

def test_validate_ok(capsys, fixture_dir):
    code, out, _ = run(capsys, "validate", "--scheme", scheme(fixture_dir, "fibonacci"))
    assert code == 0 and json.loads(out)["valid"]


def test_validate_invalid_scheme_exits_one(capsys, fixture_dir):
    code, out, _ = run(capsys, "validate", "--scheme", scheme(fixture_dir, "rational_slope"))
    assert code == 1 and not json.loads(out)["valid"]


def test_missing_file_exits_two(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--scheme", tmp_path / "nope.json")
    assert code == 2 and "error" in json.loads(err)


def test_malformed_json_reports_position(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "k": 2,\n  "d": oops\n}\n')
    code, _, err = run(capsys, "validate", "--scheme", path)
    payload = json.loads(err)
    assert code == 2 and payload["line"] == 3 and payload["column"] == 8


def test_unknown_key_exits_two(capsys, tmp_path):
    obj = FIXTURES["fibonacci"]()
    obj["extra"] = 1
    code, _, _ = run(capsys, "validate", "--scheme", write_json(tmp_path / "x.json", obj))
    assert code == 2


def test_internal_dimension_three_exits_three(capsys, tmp_path):
    path = write_json(tmp_path / "cube.json", cube_scheme())
    code, _, err = run(capsys, "empirics", "--scheme", path, "--radii", "1", "--out", tmp_path / "o")
    assert code == 3 and "skip-cut-regions" in json.loads(err)["error"]


def test_singular_generation_exits_four(capsys, tmp_path):
    obj = FIXTURES["fibonacci"]()
    obj["window"] = [{"vertices": [[["0", "0"]], [["0", "1"]]]}]
    path = write_json(tmp_path / "singular.json", obj)
    code, _, err = run(capsys, "generate", "--scheme", path, "--box", 5, "--out", tmp_path / "o")
    assert code == 4 and "lattice_point" in json.loads(err)


def test_bad_radii_exit_two(capsys, fixture_dir, tmp_path):
    code, _, _ = run(capsys, "empirics", "--scheme", scheme(fixture_dir, "fibonacci"),
                     "--radii", "4,2", "--out", tmp_path)
    assert code == 2


def test_parse_list_forms():
    assert parse_list("2^4..2^6") == [16, 32, 64]
    assert parse_list("1,3,13") == [1, 3, 13]
    with pytest.raises(UsageError):
        parse_list("a,b")


# ---------------------------------------------------------------- analyze and LR dispatch

def test_analyze_ammann_beenker(capsys, fixture_dir):
    code, out, _ = run(capsys, "analyze", "--scheme", scheme(fixture_dir, "ammann_beenker"))
    rep = json.loads(out)
    assert code == 0
    assert (rep["n_subspaces"], rep["alpha"], rep["C"]) == (4, 2, True)
    assert rep["homogeneity"] == "homogeneous" and rep["decomposition"] == "indecomposable"


def test_penrose_reduced_automatically(capsys, fixture_dir):
    code, out, _ = run(capsys, "validate", "--scheme", scheme(fixture_dir, "penrose"))
    rep = json.loads(out)
    assert code == 0 and rep["cyclic_reduced"] and rep["valid"]


@pytest.mark.parametrize("name, line", [
    ("fibonacci", "LR: certified-consistent"),
    ("liouville", "LR: fails (D necessary)"),
    ("generic_square", "LR: fails (C fails)"),
])
def test_lr_lines(capsys, fixture_dir, name, line):
    code, out, _ = run(capsys, "diophantine", "--scheme", scheme(fixture_dir, name))
    assert code == 0 and json.loads(out)["LR"] == line


def test_analyze_embeds_diophantine_block(capsys, fixture_dir):
    code, out, _ = run(capsys, "analyze", "--scheme", scheme(fixture_dir, "fibonacci"), "--dioph")
    assert json.loads(out)["diophantine"]["LR"] == "LR: certified-consistent"


def test_diophantine_csv_per_run(capsys, fixture_dir, tmp_path):
    code, _, _ = run(capsys, "diophantine", "--scheme", scheme(fixture_dir, "fibonacci"),
                     "--check", "DF", "--scale-n", 2, "--schedule", "16,64,256", "--out", tmp_path)
    assert code == 0
    files = sorted(os.listdir(tmp_path))
    assert files == ["diophantine_DF_0.csv", "diophantine_DF_1.csv"]
    with open(tmp_path / files[0]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["R", "target_index", "c_R"]
    assert {r[0] for r in rows[1:]} == {"16", "64", "256"}


# ---------------------------------------------------------------- outputs

def test_generate_unlabelled_has_empty_label_column(capsys, fixture_dir, tmp_path):
    code, out, _ = run(capsys, "generate", "--scheme", scheme(fixture_dir, "ammann_beenker"),
                       "--box", 30, "--out", tmp_path)
    with open(tmp_path / "points.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert code == 0 and len(rows) == json.loads(out)["points"]
    assert all(r["label"] == "" for r in rows)
    assert set(rows[0]) == {"x1", "x2", "label", "g1", "g2", "g3", "g4"}


def test_empirics_writes_tables(capsys, fixture_dir, tmp_path):
    code, out, _ = run(capsys, "empirics", "--scheme", scheme(fixture_dir, "fibonacci"),
                       "--radii", "2,4,8", "--box", 200, "--out", tmp_path)
    assert code == 0
    assert json.loads(out)["files"] == ["complexity.csv", "cutregions.csv", "repetitivity.csv"]
    with open(tmp_path / "complexity.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["p_hat"]) for r in rows] == [7, 13, 25]


def test_fixtures_command(capsys, tmp_path):
    code, out, _ = run(capsys, "fixtures", "--out", tmp_path, "--name", "fibonacci")
    assert code == 0 and os.listdir(tmp_path) == ["fibonacci.json"]
    code, _, _ = run(capsys, "fixtures", "--out", tmp_path, "--name", "nonsense")
    assert code == 2


def test_thread_count_does_not_change_outputs(capsys, fixture_dir, tmp_path):
    outs = []
    for threads in (1, 8):
        d = tmp_path / str(threads)
        run(capsys, "empirics", "--scheme", scheme(fixture_dir, "ammann_beenker"), "--radii", "2,3",
            "--box", 20, "--threads", threads, "--out", d)
        run(capsys, "generate", "--scheme", scheme(fixture_dir, "ammann_beenker"), "--box", 20,
            "--threads", threads, "--out", d)
        outs.append({f: (d / f).read_bytes() for f in sorted(os.listdir(d))})
    assert outs[0] == outs[1]
