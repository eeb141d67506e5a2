"""Secondary component: figure rendering from golden CSVs."""

import importlib.util
import json
import sys
from pathlib import Path

import pytest

_RENDER = Path(__file__).resolve().parents[1] / "render.py"
spec = importlib.util.spec_from_file_location("render", _RENDER)
render_mod = importlib.util.module_from_spec(spec)
sys.modules["render"] = render_mod
spec.loader.exec_module(render_mod)

GOLDEN = Path(__file__).resolve().parent / "golden"


def write_spec(tmp_path, **kw):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(kw))
    return path


@pytest.mark.parametrize("kind,csv", [
    ("study-curves", "study_summary.csv"),
    ("return-levels", "return_levels.csv"),
    ("dimension-curves", "dimension_summary.csv"),
])
def test_renders_each_kind(tmp_path, kind, csv):
    out = tmp_path / f"{kind}.png"
    sp = write_spec(tmp_path, kind=kind, input=str(GOLDEN / csv),
                    output=str(out))
    assert render_mod.main(["--spec", str(sp)]) == 0
    assert out.stat().st_size > 10_000


@pytest.mark.parametrize("kind,csv", [
    ("study-curves", "study_summary.csv"),
    ("return-levels", "return_levels.csv"),
])
def test_deterministic_bytes(tmp_path, kind, csv):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for out in (a, b):
        render_mod.render({"kind": kind, "input": str(GOLDEN / csv),
                           "output": str(out)})
    assert a.read_bytes() == b.read_bytes()


def test_log_scales_applied(tmp_path):
    import matplotlib.pyplot as plt

    frame = render_mod.load_frame(GOLDEN / "study_summary.csv", "study-curves")
    captured = {}
    orig = render_mod._save

    def grab(fig, path):
        captured["scales"] = [ax.get_yscale() for ax in fig.axes]
        captured["xscales"] = [ax.get_xscale() for ax in fig.axes]
        orig(fig, path)

    render_mod._save = grab
    try:
        render_mod.render_study_curves(frame, str(tmp_path / "f.png"), {})
        assert captured["scales"] == ["linear", "log", "log"]
        frame_rl = render_mod.load_frame(GOLDEN / "return_levels.csv",
                                         "return-levels")
        render_mod.render_return_levels(frame_rl, str(tmp_path / "g.png"), {})
        assert captured["scales"] == ["linear", "linear", "log", "log"]
        assert all(s == "log" for s in captured["xscales"])
    finally:
        render_mod._save = orig


def test_missing_column_names_it(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("estimator,alpha_true\nthr4,0.5\n")
    sp = write_spec(tmp_path, kind="study-curves", input=str(bad),
                    output=str(tmp_path / "x.png"))
    rc = render_mod.main(["--spec", str(sp)])
    assert rc == 2


def test_empty_csv_rejected(tmp_path):
    bad = tmp_path / "empty.csv"
    bad.write_text("estimator,alpha_true,tuning,bias,se,rmse\n")
    with pytest.raises(render_mod.SchemaError):
        render_mod.load_frame(bad, "study-curves")


def test_unknown_kind(tmp_path):
    sp = write_spec(tmp_path, kind="pie", input="x.csv", output="y.png")
    assert render_mod.main(["--spec", str(sp)]) == 2
