"""Smoke test for the pyhyptw extension module.

Builds the extension with cargo when it cannot be imported, loads it from a
temporary directory and exercises the main entry points.
"""

import importlib
import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("pyhyptw")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "hyptw-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libpyhyptw.so"
    tmp = Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "pyhyptw.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("pyhyptw")


def main():
    h = load()

    o = h.Point.origin(2)
    p = h.Point([0.5, 0.0], "ball")
    assert abs(o.dist(p) - 2 * 0.5493061443340549) < 1e-12
    assert abs(h.Point(p.coords("klein"), "klein").dist(p)) < 1e-9

    inst = h.Instance.random(40, seed=3)
    assert inst.n == 40 and inst.check_membership() is None
    back = h.Instance.from_text(inst.graph_text(), inst.points_text())
    assert back.edges() == inst.edges()

    sep = h.separator(inst, seed=3)
    assert sep["valid"]

    dec = h.decompose(inst, seed=3)
    value, witness = h.solve(inst, "is", dec)
    edges = set(inst.edges())
    assert len(witness) == value
    assert all((u, v) not in edges for u in witness for v in witness if u < v)
    assert h.solve(inst, "is")[0] == value
    assert h.solve(inst, "vc")[0] == inst.n - value

    gt, hinst, target, formula = h.lowerbound(2, 3, seed=7)
    assert hinst.n == formula and json.loads(gt)["k"] == 2

    csv = h.experiment(json.dumps({"kind": "full", "name": "smoke", "ns": [12], "seeds": [1]}))
    assert csv.splitlines()[0] == "exp,n,d,seed,trial,stage,metric,value,status"
    assert "matches_oracle,1,ok" in csv

    print(f"ok: n={inst.n} m={inst.m} is={value} separator={sep['size']} lowerbound={hinst.n}")


if __name__ == "__main__":
    main()
