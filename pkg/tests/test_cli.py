import io
import json

import pytest

from oracles import random_graph, seeded
from threeway.cli import curve_rows, main, read_curve_csv, write_curve_csv
from threeway.relation import Relation, write_edge_list


@pytest.fixture
def files(tmp_path):
    def make(name, edges):
        path = tmp_path / name
        path.write_text("".join(f"{a}\t{b}\n" for a, b in edges), encoding="utf-8")
        return str(path)

    return make


@pytest.fixture
def triple(files):
    return [files("r.txt", [(1, 2)]), files("s.txt", [(2, 3)]), files("t.txt", [(3, 4)])]


def run(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def field(text, key):
    for line in text.splitlines():
        if line.startswith(f"{key}: "):
            return line.split(": ", 1)[1]
    raise KeyError(key)


def test_run_cascade(triple):
    code, out = run(["run", "--algo", "2-3J", "--dataset", *triple])
    assert code == 0
    assert field(out, "paper_cost") == "8"


def test_run_one_round(triple):
    code, out = run(["run", "--algo", "1-3J", "--k1", "2", "--k2", "3", "--dataset", *triple])
    assert code == 0
    assert field(out, "paper_cost") == "9"


def test_run_selfjoin_single_loop(files):
    # A single self-loop joined with itself is the same one-tuple path.
    path = files("tiny.txt", [(1, 1)])
    assert field(run(["run", "--algo", "2-3J", "--dataset", path])[1], "paper_cost") == "8"


def test_run_triangles(files):
    code, out = run(["run", "--algo", "triangles", "--dataset", files("cycle3.txt", [(1, 2), (2, 3), (3, 1)])])
    assert code == 0
    assert out.splitlines()[0] == "triangles: 1"


def test_triangles_self_loops(files):
    path = files("loopy.txt", [(1, 2), (2, 3), (3, 1), (5, 5)])
    assert run(["run", "--algo", "triangles", "--dataset", path])[1].splitlines()[0] == "triangles: 1"
    assert run(["run", "--algo", "triangles", "--keep-self-loops", "--dataset", path])[0] == 2


def test_run_report_json(tmp_path, files):
    G = random_graph(seeded(9), 40, 150)
    path = str(tmp_path / "g.txt")
    write_edge_list(G, path)
    report = tmp_path / "report.json"
    assert run(["run", "--algo", "2-3JA", "--dataset", path, "--output", str(report)])[0] == 0
    data = json.loads(report.read_text())
    r = len(G)
    assert data["paper_cost"] == 6 * r + 2 * data["r_prime"] + 2 * data["r_double_prime"]
    assert data["shrink_ratio"] == data["r_double_prime"] / data["r_prime"]
    assert data["final_output_ratio"] == data["second_join_output"] / data["r_triple_prime"]
    assert len(data["per_round"]) == 4

    report2 = tmp_path / "report2.json"
    run(["run", "--algo", "2-3JA", "--dataset", path, "--output", str(report2)])
    assert report2.read_text() == report.read_text()


def test_run_1_3JA_with_k(tmp_path):
    G = random_graph(seeded(10), 30, 100)
    path = str(tmp_path / "g.txt")
    write_edge_list(G, path)
    report = tmp_path / "r.json"
    assert run(["run", "--algo", "1-3JA", "--k", "9", "--dataset", path, "--output", str(report)])[0] == 0
    data = json.loads(report.read_text())
    r = len(G)
    assert (data["k1"], data["k2"]) == (3, 3)
    assert data["paper_cost"] == 4 * r + 2 * r * 3 + 2 * data["r_triple_prime"]


def test_usage_errors(triple):
    assert run(["run", "--algo", "2-3J", "--k", "4", "--dataset", *triple])[0] == 1
    assert run(["run", "--algo", "1-3J", "--dataset", *triple])[0] == 1
    assert run(["run", "--algo", "1-3J", "--k1", "2", "--dataset", *triple])[0] == 1
    assert run(["run", "--algo", "1-3J", "--k1", "0", "--k2", "2", "--dataset", *triple])[0] == 1
    assert run(["run", "--algo", "2-3J", "--dataset", *triple[:2]])[0] == 1
    with pytest.raises(SystemExit) as err:
        main(["run", "--algo", "nope", "--dataset", triple[0]])
    assert err.value.code == 1


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n0 x\n", encoding="utf-8")
    assert run(["run", "--algo", "2-3J", "--dataset", str(bad)])[0] == 2
    assert run(["run", "--algo", "2-3J", "--dataset", str(tmp_path / "missing.txt")])[0] == 2


def test_size_and_skew_aborts(files):
    star = files("star.txt", [(0, i) for i in range(1, 30)] + [(i, 0) for i in range(1, 30)])
    assert run(["run", "--algo", "1-3J", "--k", "4", "--max-records", "100", "--dataset", star])[0] == 3
    assert run(["run", "--algo", "2-3J", "--group-cap", "5", "--dataset", star])[0] == 3


def test_curve_shape(tmp_path):
    G = random_graph(seeded(500), 120, 500)
    path = str(tmp_path / "g.txt")
    write_edge_list(G, path)
    out_csv = tmp_path / "curve.csv"
    assert run(["curve", "--dataset", path, "--ks", "1,4,9,16", "--output", str(out_csv)])[0] == 0
    with open(out_csv, encoding="utf-8") as fh:
        rows = read_curve_csv(fh)
    measured_1 = [row["measured_1_3J"] for row in rows]
    assert all(a < b for a, b in zip(measured_1, measured_1[1:]))
    assert len({row["measured_2_3J"] for row in rows}) == 1
    assert all(row["analytic_1_3J"] == row["measured_1_3J"] for row in rows)
    assert all(row["analytic_2_3J"] == row["measured_2_3J"] for row in rows)
    r = len(G)
    assert rows[0]["measured_1_3J"] == 2 * (3 * r)


def test_curve_empty_graph(files):
    code, out = run(["curve", "--dataset", files("empty.txt", []), "--k-range", "1:5"])
    assert code == 0
    rows = read_curve_csv(io.StringIO(out))
    assert len(rows) == 4
    assert all(row[c] == 0 for row in rows for c in ("analytic_1_3J", "measured_1_3J", "analytic_2_3J", "measured_2_3J"))


def test_curve_csv_roundtrip():
    G = random_graph(seeded(3), 20, 60)
    rows = curve_rows(G.renamed("R"), G.renamed("S"), G.renamed("T"), [1, 2, 4])
    buf = io.StringIO()
    write_curve_csv(rows, buf)
    assert read_curve_csv(io.StringIO(buf.getvalue())) == rows


def test_crossover_j_equals_3r(files):
    k4 = [(a, b) for a in range(4) for b in range(4) if a != b]
    code, out = run(["crossover", "--dataset", files("k4.txt", k4)])
    assert code == 0
    assert field(out, "j") == "36" and field(out, "r") == "12"
    assert (field(out, "k1"), field(out, "k2"), field(out, "k")) == ("4", "4", "16")
    assert float(field(out, "machines")) == 2.0


def test_crossover_no_composable_edges(files):
    code, out = run(["crossover", "--dataset", files("matching.txt", [(0, 1), (2, 3)])])
    assert code == 0
    assert (field(out, "k1"), field(out, "k2")) == ("1", "2")
    assert float(field(out, "k_real")) == 1.0


def test_crossover_via_run(files):
    path = files("k4.txt", [(a, b) for a in range(4) for b in range(4) if a != b])
    assert field(run(["run", "--algo", "crossover", "--dataset", path])[1], "k") == "16"


def test_two_way_run(files):
    code, out = run(["run", "--algo", "2way", "--dataset", files("c.txt", [(1, 2), (2, 3), (3, 1)])])
    assert code == 0
    assert field(out, "paper_cost") == str(2 * 3 + 2 * 3)
