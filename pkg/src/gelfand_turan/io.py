"""File formats: group and subset files, Delsarte instances, reports, kernels and sphere tables.

All indices are 0-based and element 0 is the identity.  JSON is written with
sorted keys so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .groups import FiniteGroup, GroupError, Subgroup, as_subgroup, build_group

CONVENTIONS = {
    "haar_mass": 1,
    "coset_measure_mass": 1,
    "sphere_measure": "unnormalized surface measure (total omega_d)",
}


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    return x


def write_json(path: Path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: malformed JSON ({e})") from None


# ---------------------------------------------------------------------------
# groups and subsets


def group_to_json(G: FiniteGroup) -> dict:
    return {"name": G.name, "order": G.order, "table": G.table.tolist()}


def group_from_json(data: dict) -> FiniteGroup:
    if not isinstance(data, dict) or "table" not in data:
        raise GroupError("group file needs a 'table' entry")
    table = data["table"]
    n = len(table)
    if data.get("order", n) != n:
        raise GroupError(f"order {data['order']} does not match table size {n}")
    if any(len(row) != n for row in table):
        raise GroupError("group table is not square")
    if list(table[0]) != list(range(n)) or [row[0] for row in table] != list(range(n)):
        raise GroupError("element 0 must be the identity")
    return build_group({"type": "table", "table": table, "name": data.get("name", "")})


def load_group(ref, base: Path | None = None) -> FiniteGroup:
    """A group from a file path, a descriptor string such as ``dihedral(4)``, or an inline dict."""
    if isinstance(ref, dict):
        return group_from_json(ref) if "table" in ref and "type" not in ref else build_group(ref)
    ref = str(ref)
    path = Path(ref) if base is None or Path(ref).is_absolute() else Path(base) / ref
    if path.suffix == ".json" or path.exists():
        return group_from_json(read_json(path))
    return build_group(ref)


def subset_from_json(data) -> list[int]:
    if isinstance(data, dict):
        data = data.get("elements")
    if not isinstance(data, list) or not all(isinstance(x, int) for x in data):
        raise ValueError("subset must be a list of integer indices")
    return data


def load_subgroup(G: FiniteGroup, ref, base: Path | None = None) -> Subgroup:
    if isinstance(ref, str):
        path = Path(ref) if base is None else Path(base) / ref
        ref = read_json(path)
    return as_subgroup(G, subset_from_json(ref))


# ---------------------------------------------------------------------------
# Delsarte instances


def load_instance_file(path) -> dict:
    """Parsed instance file: group, K, U and V (list, "ALL" or "NONE")."""
    path = Path(path)
    data = read_json(path)
    missing = [k for k in ("group", "K", "U") if k not in data]
    if missing:
        raise ValueError(f"{path}: instance file lacks {', '.join(missing)}")
    G = load_group(data["group"], base=path.parent)
    K = load_subgroup(G, data["K"], base=path.parent)
    U = subset_from_json(data["U"])
    V = data.get("V", "U")
    if not isinstance(V, str):
        V = subset_from_json(V)
    return {"group": G, "K": K, "U": U, "V": V}


def extremal_csv(classes, values, exact=None) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["class", "representative", "size", "value"] + (["exact_value"] if exact else [])
    w.writerow(header)
    for j, (cls, v) in enumerate(zip(classes, values)):
        row = [j, cls[0], len(cls), repr(float(v))]
        if exact:
            row.append(str(exact[j]))
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# kernels


def kernel_csv(values, group_name: str, subgroup: Subgroup) -> str:
    m = len(values)
    buf = _io.StringIO()
    buf.write(f"# group={group_name} subgroup={list(subgroup.elements)} m={m} coset_measure_mass=1\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in values:
        w.writerow([str(x) if isinstance(x, Fraction) else repr(float(x)) for x in row])
    return buf.getvalue()


def read_kernel_csv(text: str) -> tuple[dict, np.ndarray]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("kernel CSV needs a header line")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split() if "=" in tok)
    rows = [[float(x) for x in r] for r in csv.reader(lines[1:])]
    return meta, np.array(rows)


# ---------------------------------------------------------------------------
# sphere


SPHERE_COLUMNS = ["c", "d", "N", "M", "lower", "upper", "gap", "b0_lower", "b0_upper"]


def sphere_csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SPHERE_COLUMNS)
    for r in rows:
        w.writerow([r[k] if isinstance(r[k], int) else repr(float(r[k])) for k in SPHERE_COLUMNS])
    return buf.getvalue()


def plot_data_csv(t, values) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "psi"])
    for a, b in zip(t, values):
        w.writerow([repr(float(a)), repr(float(b))])
    return buf.getvalue()


def parse_angle(text: str) -> float:
    """Angles such as ``pi``, ``pi/2``, ``3*pi/4`` or ``0.5``."""
    s = text.strip().lower().replace(" ", "")
    if not s:
        raise ValueError("empty angle")
    num, _, den = s.partition("/")
    factor = 1.0
    if num.endswith("pi"):
        head = num[:-2].rstrip("*")
        factor = math.pi
        num = head or "1"
    try:
        value = float(num) * factor
        if den:
            value /= float(den)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None
    return value
