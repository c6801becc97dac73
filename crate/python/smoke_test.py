"""Smoke test for the quasimin_py extension module."""

import json
import math
import pathlib
import tempfile

import quasimin_py as qm

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"

ANALYTIC = json.dumps({
    "family": {"tag": "E42-i", "m": 0, "F": 1, "b0": -1, "db0": 0},
    "domain": {"s": [0.5, 2.0], "t": [-1.0, 1.0]},
    "grid": [10, 10],
})


def test_list_families():
    lines = qm.list_families().splitlines()
    assert len(lines) == 6
    assert lines[0].startswith("E42-i")


def test_analytic_mean_curvature():
    h = qm.mean_curvature(ANALYTIC, 1.25, 0.3)
    want = -1.0 / (2.0 * 1.25)
    assert math.isclose(h[0], want, rel_tol=1e-7)
    assert math.isclose(h[3], want, rel_tol=1e-7)
    assert abs(h[1]) < 1e-7 and abs(h[2]) < 1e-7
    assert qm.relative_nullity(ANALYTIC, 1.25, 0.3) == 1


def test_certify_and_generate():
    text = (CONFIGS / "s42-trig-linear.json").read_text()
    report = json.loads(qm.certify(text, grid=(6, 6)))
    assert report["pass"] is True
    assert report["grid"] == [6, 6]
    with tempfile.TemporaryDirectory() as tmp:
        out = qm.generate(ANALYTIC, pathlib.Path(tmp) / "grid.csv")
        rows = pathlib.Path(out).read_text().splitlines()
        assert len(rows) == 101
        assert (pathlib.Path(tmp) / "grid.json").exists()


def test_errors():
    text = (CONFIGS / "inadmissible-trig-exp.json").read_text()
    try:
        qm.certify(text)
    except qm.InadmissibleError as e:
        assert "b''-b" in str(e)
    else:
        raise AssertionError("expected InadmissibleError")
    try:
        qm.certify("{}")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
