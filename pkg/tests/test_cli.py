import json
import math

import numpy as np
import pytest

from gelfand_turan import cyclic, dihedral
from gelfand_turan import io as gio
from gelfand_turan.cli import main
from gelfand_turan.groups import GroupError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_angle():
    assert gio.parse_angle("pi") == math.pi
    assert gio.parse_angle("pi/2") == math.pi / 2
    assert gio.parse_angle("3*pi/4") == 3 * math.pi / 4
    assert gio.parse_angle("0.5") == 0.5
    with pytest.raises(ValueError):
        gio.parse_angle("tau")


def test_group_file_round_trip(tmp_path):
    G = dihedral(4)
    p = tmp_path / "g.json"
    gio.write_json(p, gio.group_to_json(G))
    H = gio.load_group(str(p))
    assert np.array_equal(H.table, G.table)
    bad = {"name": "x", "order": 2, "table": [[1, 0], [0, 1]]}
    with pytest.raises(GroupError):
        gio.group_from_json(bad)
    with pytest.raises(GroupError):
        gio.group_from_json({"order": 3, "table": [[0, 1], [1, 0]]})


def test_kernel_csv_round_trip():
    from gelfand_turan import as_subgroup
    G = cyclic(4)
    vals = np.arange(16.0).reshape(4, 4) / 3
    text = gio.kernel_csv(vals, G.name, as_subgroup(G, [0]))
    meta, back = gio.read_kernel_csv(text)
    assert meta["m"] == "4" and np.array_equal(back, vals)


def test_group_inspect(capsys, tmp_path):
    code, out, _ = run(["group-inspect", "cyclic(6)"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["abelian"] and rep["order"] == 6
    code, out, _ = run(["group-inspect", "dihedral(4)"], capsys)
    assert code == 0 and not json.loads(out)["abelian"]
    p = tmp_path / "loop.json"
    t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    p.write_text(json.dumps({"name": "loop", "order": 5, "table": t}))
    code, _, err = run(["group-inspect", str(p)], capsys)
    assert code == 2 and "associative" in err and "*" in err


def test_gelfand_command(capsys, tmp_path):
    code, out, _ = run(["gelfand", "dihedral(3)", "--K", "0,3", "--out", str(tmp_path)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["gelfand"] and rep["s"] == 2
    assert np.allclose(rep["spherical_table"]["omega"], [[1, 1], [1, -0.5]])
    table = json.loads((tmp_path / "spherical_table.json").read_text())
    assert set(table) == {"classes", "omega", "weights"}
    code, out, _ = run(["gelfand", "dihedral(4)", "--K", ",".join(map(str, range(8)))], capsys)
    assert json.loads(out)["s"] == 1
    code, out, _ = run(["gelfand", "dihedral(4)", "--K", "0"], capsys)
    assert code == 0 and not json.loads(out)["gelfand"]


def write_instance(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_delsarte_command(capsys, tmp_path):
    cases = [
        ({"group": "cyclic(4)", "K": [0], "U": [0, 1, 2, 3], "V": "ALL"}, "1"),
        ({"group": "cyclic(4)", "K": [0], "U": [0], "V": "NONE"}, "1/4"),
        ({"group": "cyclic(4)", "K": [0], "U": [0, 1, 3], "V": [0, 1, 3]}, "1/2"),
    ]
    for i, (data, value) in enumerate(cases):
        path = write_instance(tmp_path, f"i{i}.json", data)
        out_dir = tmp_path / f"o{i}"
        code, out, _ = run(["delsarte", path, "--out", str(out_dir)], capsys)
        rep = json.loads(out)
        assert code == 0
        assert rep["solution"]["exact_value"] == value
        assert rep["conventions"]["haar_mass"] == 1 and rep["seed"] == 0
        assert (out_dir / "extremal.csv").exists() and (out_dir / "kernel.csv").exists()


def test_delsarte_group_file_reference(capsys, tmp_path):
    gio.write_json(tmp_path / "d4.json", gio.group_to_json(dihedral(4)))
    path = write_instance(tmp_path, "inst.json", {"group": "d4.json", "K": [0, 4], "U": [0, 4], "V": "ALL"})
    code, out, _ = run(["delsarte", path], capsys)
    assert code == 0 and abs(json.loads(out)["solution"]["value"] - 0.25) < 1e-12


def test_delsarte_bad_instance(capsys, tmp_path):
    path = write_instance(tmp_path, "bad.json", {"group": "cyclic(4)", "K": [0], "U": [0, 1]})
    code, _, err = run(["delsarte", path], capsys)
    assert code == 2 and "symmetric" in err


def test_sphere_command(capsys, tmp_path):
    code, out, _ = run(["sphere-turan", "--d", "2", "--c", "pi", "--out", str(tmp_path)], capsys)
    rep = json.loads(out)
    row = rep["rows"][0]
    assert code == 0
    assert abs(row["lower"] - 2 * math.pi) < 1e-8 and abs(row["upper"] - 2 * math.pi) < 1e-8
    assert rep["conventions"]["omega_d"] == pytest.approx(4 * math.pi)
    header = (tmp_path / "sphere_bounds.csv").read_text().splitlines()[0].split(",")
    assert header[:7] == ["c", "d", "N", "M", "lower", "upper", "gap"]
    code, out, _ = run(["sphere-turan", "--c", "pi/4,pi/2,3*pi/4"], capsys)
    rows = json.loads(out)["rows"]
    assert code == 0 and all(r["lower"] <= r["upper"] for r in rows)


def test_conv_root_command(capsys, tmp_path):
    p = write_instance(tmp_path, "one.json", {"group": "dihedral(3)", "K": [0, 3], "function": [1, 1]})
    code, out, _ = run(["conv-root", p], capsys)
    assert code == 0 and np.allclose(json.loads(out)["root"], 1)
    rng = np.random.default_rng(0)
    from gelfand_turan import autocorrelate
    f = np.real(autocorrelate(cyclic(6), rng.normal(size=6)))
    p = write_instance(tmp_path, "r.json", {"group": "cyclic(6)", "K": [0], "function": f.tolist()})
    code, out, _ = run(["conv-root", p], capsys)
    assert code == 0 and json.loads(out)["residual"] < 1e-9
    p = write_instance(tmp_path, "bad.json", {"group": "cyclic(5)", "K": [0], "function": [1, 0.9, 0, 0, 0.9]})
    code, out, err = run(["conv-root", p], capsys)
    assert code == 1 and "coefficient 3" in err
    assert json.loads(out)["offending_index"] == 3
    p = write_instance(tmp_path, "s.json", {"d": 2, "coefficients": [0.5, 0.3, 0.2]})
    code, out, _ = run(["conv-root", p], capsys)
    assert code == 0


def test_outputs_byte_identical(capsys, tmp_path):
    path = write_instance(tmp_path, "i.json", {"group": "dihedral(5)", "K": [0, 5], "U": [0, 5, 1, 4, 6, 9], "V": "ALL"})
    for tag in ("a", "b"):
        assert main(["delsarte", path, "--seed", "3", "--out", str(tmp_path / tag)]) == 0
        assert main(["sphere-turan", "--c", "pi/2,pi", "--out", str(tmp_path / tag)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
