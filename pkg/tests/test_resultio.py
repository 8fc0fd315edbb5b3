import json
import math

from cascadelab.resultio import ResultTable, aggregate, read_table, render_csv, write_table


def table():
    rows = [[i, 0.1 * i + 1e-13, (-1) ** i * math.pi * i, "x" if i % 2 else "y", None] for i in range(20)]
    return ResultTable(["rep", "w", "L_U", "tag", "y"], rows, {"seed": 3, "config": {"a": 1}})


def test_csv_precision_and_header():
    text = render_csv(table())
    lines = text.splitlines()
    assert lines[0] == "# schema: 1"
    assert json.loads(lines[1][len("# metadata: "):])["seed"] == 3
    assert lines[2] == "rep,w,L_U,tag,y"
    assert lines[4].split(",")[2] == f"{-math.pi:.12g}"


def test_round_trip_aggregates(tmp_path):
    t = table()
    for fmt in ("csv", "json"):
        p = tmp_path / f"t.{fmt}"
        write_table(t, p, fmt)
        back = read_table(p)
        assert back.metadata == t.metadata and back.columns == t.columns
        a, b = aggregate(t), aggregate(back)
        assert a.keys() == b.keys()
        for k in a:
            assert a[k][0] == b[k][0]
            assert math.isclose(a[k][1], b[k][1], rel_tol=1e-11, abs_tol=1e-11)


def test_json_llrs_exact(tmp_path):
    t = table()
    p = tmp_path / "t.json"
    write_table(t, p, "json")
    doc = json.loads(p.read_text())
    assert all(isinstance(r[2], str) for r in doc["rows"])
    assert read_table(p).column("L_U") == t.column("L_U")


def test_written_file_round_trips_exactly(tmp_path):
    p, q = tmp_path / "a.csv", tmp_path / "b.csv"
    write_table(table(), p)
    write_table(read_table(p), q)
    assert p.read_text() == q.read_text()
