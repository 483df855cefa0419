"""Smoke test for the fiwalk_py extension.

Builds the extension with cargo unless FIWALK_PY_DIR points at a directory
that already holds fiwalk_py.so (or an installed wheel is importable).
"""

import os
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "fiwalk-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libfiwalk_py.so"
    out = Path(tempfile.mkdtemp(prefix="fiwalk_py_"))
    shutil.copy(lib, out / "fiwalk_py.so")
    return out


def load():
    try:
        import fiwalk_py

        return fiwalk_py
    except ImportError:
        pass
    where = os.environ.get("FIWALK_PY_DIR") or str(build())
    sys.path.insert(0, where)
    import fiwalk_py

    return fiwalk_py


def main():
    fw = load()

    assert "kneser:2" in fw.families()

    g = fw.instantiate("kneser:2", 5)
    assert (g["vertices"], g["edges"]) == (10, 15)
    assert fw.instantiate("variety", 6)["orbits"] == {"red": 120, "blue": 15, "green": 90}

    q = dict(fw.hitting_times("complete"))
    off = next(v for k, v in q.items() if k.endswith("[]"))
    assert str(off) == "n - 1", off
    assert off.eval(12) == Fraction(11)
    assert off == fw.RationalFunc("n - 1")

    m = fw.moments("complete", order=2)
    var = m["central"]["vertex>vertex[]"][1]
    assert var.eval(10) == Fraction(72), var

    prof = fw.mixing_profile("complete", 20, t_max=4)
    assert prof["d"][1] == Fraction(1, 20)
    assert prof["t_mix"]["1/4"] == 1

    lazy = fw.mixing_profile("star", 8, t_max=40, walk="lazy:1/2")
    assert lazy["t_mix"]["1/4"] is not None
    try:
        fw.mixing_profile("star", 8)
    except ValueError as e:
        assert "periodic" in str(e)
    else:
        raise AssertionError("periodic walk accepted")

    assert str(fw.rho("complete", list(range(4, 14)))) == "1"
    r = fw.rho("different_orbits", list(range(9, 23)))
    assert r.growth() == -2

    eig = fw.spectrum("complete", 6)
    assert abs(eig[0] + 1) < 1e-9 and abs(eig[-1] - 5) < 1e-9

    cells = fw.verify("bottleneck:2")
    assert len(cells) == 3 and all(c["pass"] for c in cells)

    report = fw.run(["cutoff", "--family", "complete", "--n-range", "5:15"])
    assert report

    try:
        fw.instantiate("nosuch", 5)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown family accepted")

    print("fiwalk_py smoke test passed")


if __name__ == "__main__":
    main()
