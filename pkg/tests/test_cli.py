import json

import numpy as np
import pytest

from positfx.analysis import LayerTensor
from positfx.cli import main
from positfx.reports import load_report
from positfx.tensorio import TensorFormatError, load_tensor, save_tensor


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def test_table_matches_reference_lookup(capsys):
    code, out, _ = run(capsys, "table", "--n", "4", "--es", "0")
    assert code == 0
    rows = [line.split() for line in out.strip().splitlines()[1:]]
    assert len(rows) == 16
    got = {r[0]: (r[1], r[2], r[4], r[5], r[7]) for r in rows}
    assert got["0000"] == ("0", "-3", "0", "0", "000")
    assert got["0011"] == ("0", "-1", "0.5", "0.75", "011")
    assert got["1000"] == ("1", "-3", "0", "NaR", "-")
    assert got["1100"] == ("1", "0", "0", "-1", "100")
    assert got["0111"] == ("0", "2", "0", "4", "-")


def test_table_tiny_config(capsys):
    code, out, _ = run(capsys, "table", "--n", "2", "--es", "0")
    assert code == 0
    values = [line.split()[5] for line in out.strip().splitlines()[1:]]
    assert values == ["0", "1", "NaR", "-1"]


def test_table_width_guard(capsys):
    code, _, err = run(capsys, "table", "--n", "20", "--es", "0")
    assert code == 2
    assert "16" in err


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def test_convert_normalized_bits(capsys):
    code, out, _ = run(
        capsys, "convert", "--posit-bits", "010", "--n", "4", "--es", "0",
        "--m", "8", "--variant", "normalized",
    )
    assert code == 0
    assert "magnitude=1000000" in out
    assert "fxp_value: 0.5" in out


def test_convert_value_zero(capsys):
    code, out, _ = run(
        capsys, "convert", "--value", "0", "--n", "4", "--es", "0", "--m", "8",
    )
    assert code == 0
    assert "magnitude=0000000" in out
    assert "overflow=1" in out
    assert "fxp_value: 0" in out


def test_convert_nar_is_domain_error(capsys):
    code, _, err = run(
        capsys, "convert", "--posit-bits", "1000", "--n", "4", "--es", "0",
        "--variant", "general",
    )
    assert code == 3
    assert "NaR" in err


def test_convert_requires_exactly_one_input(capsys):
    code, _, err = run(capsys, "convert", "--n", "4", "--es", "0")
    assert code == 2
    code, _, err = run(
        capsys, "convert", "--value", "1", "--posit-bits", "010",
        "--n", "4", "--es", "0",
    )
    assert code == 2


def test_convert_trace(capsys):
    code, out, _ = run(
        capsys, "convert", "--posit-bits", "011", "--n", "4", "--es", "0",
        "--m", "8", "--trace",
    )
    assert code == 0
    assert "\nA sign=0" in out
    assert "D mag_before=0x60 mag_after=0x60" in out


# ---------------------------------------------------------------------------
# tensor files
# ---------------------------------------------------------------------------


def test_tensor_round_trip(tmp_path):
    t = LayerTensor("demo", (2, 3), np.linspace(-1, 1, 6))
    side = tmp_path / "demo.json"
    save_tensor(t, side)
    back = load_tensor(side)
    assert back.name == "demo"
    assert back.shape == (2, 3)
    # 32-bit storage rounds: values must match at float32 resolution exactly
    assert back.data.tolist() == np.linspace(-1, 1, 6).astype("<f4").astype(
        np.float64
    ).reshape(2, 3).tolist()


def test_tensor_csv(tmp_path):
    path = tmp_path / "vals.csv"
    path.write_text("0.25\n-0.5\n\n1.0\n")
    t = load_tensor(path)
    assert t.data.tolist() == [0.25, -0.5, 1.0]


def test_tensor_rejects_nan(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nan\n")
    with pytest.raises(TensorFormatError):
        load_tensor(path)


def test_tensor_rejects_short_binary(tmp_path):
    t = LayerTensor("demo", (4,), np.ones(4))
    side = tmp_path / "demo.json"
    save_tensor(t, side)
    (tmp_path / "demo.bin").write_bytes(b"\x00" * 12)
    with pytest.raises(TensorFormatError):
        load_tensor(side)


def test_missing_tensor_is_io_error(capsys, tmp_path):
    code, _, err = run(
        capsys, "analyze", "--weights", str(tmp_path / "nope.csv"),
        "--schemes", "fxp:8:7", "--out", str(tmp_path / "r.json"),
    )
    assert code == 4


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def test_analyze_single_value(capsys, tmp_path):
    weights = tmp_path / "w.csv"
    weights.write_text("0.3\n")
    out = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "analyze", "--weights", str(weights),
        "--schemes", "posit:4:0", "fxp:8:7", "--out", str(out),
    )
    assert code == 0
    report = load_report(out)
    by_scheme = {r["scheme"]: r["error"] for r in report["results"]}
    assert by_scheme["posit:4:0"]["avg_abs_error"] == pytest.approx(0.05, rel=1e-6)
    assert by_scheme["fxp:8:7"]["avg_abs_error"] == pytest.approx(
        0.3 - 38 / 128, rel=1e-6
    )


def test_analyze_zero_tensor(capsys, tmp_path):
    weights = tmp_path / "w.csv"
    weights.write_text("0\n0\n0\n")
    out = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "analyze", "--weights", str(weights),
        "--schemes", "pofx:6:1:8", "--out", str(out),
    )
    assert code == 0
    err = load_report(out)["results"][0]["error"]
    assert err["avg_abs_error"] == 0.0
    assert err["count_excluded_zeros"] == 3


def test_analyze_bad_scheme_is_usage_error(capsys, tmp_path):
    weights = tmp_path / "w.csv"
    weights.write_text("0.1\n")
    code, _, err = run(
        capsys, "analyze", "--weights", str(weights),
        "--schemes", "bogus:1:2", "--out", str(tmp_path / "r.json"),
    )
    assert code == 2


# ---------------------------------------------------------------------------
# pareto
# ---------------------------------------------------------------------------


COSTS = """kind,n,es,m,pdp,luts,cpd,power
fxp,0,0,8,1.0,100,2.0,0.5
posit,4,0,0,2.0,300,4.0,0.8
pofx,6,1,8,1.1,120,2.2,0.55
"""


def _write_reports(capsys, tmp_path):
    weights = tmp_path / "w.csv"
    weights.write_text("0.3\n-0.2\n0.05\n")
    rdir = tmp_path / "reports"
    rdir.mkdir()
    code, _, _ = run(
        capsys, "analyze", "--weights", str(weights),
        "--schemes", "fxp:8:7", "posit:4:0", "pofx:6:1:8",
        "--out", str(rdir / "layer.json"),
    )
    assert code == 0
    costs = tmp_path / "costs.csv"
    costs.write_text(COSTS)
    return rdir, costs


def test_pareto_pipeline(capsys, tmp_path):
    rdir, costs = _write_reports(capsys, tmp_path)
    out = tmp_path / "pareto.json"
    code, _, _ = run(
        capsys, "pareto", "--reports", str(rdir), "--costs", str(costs),
        "--objectives", "pdp,luts,avg_abs_error", "--out", str(out),
    )
    assert code == 0
    report = load_report(out)
    assert report["hypervolume"] >= report["hypervolume_without_converted_schemes"]
    assert len(report["points"]) == 3
    assert report["improvement_percent"] >= 0.0


def test_pareto_missing_cost_row(capsys, tmp_path):
    rdir, costs = _write_reports(capsys, tmp_path)
    costs.write_text("kind,n,es,m,pdp,luts,cpd,power\nfxp,0,0,8,1,1,1,1\n")
    code, _, err = run(
        capsys, "pareto", "--reports", str(rdir), "--costs", str(costs),
        "--objectives", "pdp", "--out", str(tmp_path / "p.json"),
    )
    assert code == 3
    assert "no row" in err


def test_pareto_unknown_objective(capsys, tmp_path):
    rdir, costs = _write_reports(capsys, tmp_path)
    code, _, err = run(
        capsys, "pareto", "--reports", str(rdir), "--costs", str(costs),
        "--objectives", "latency", "--out", str(tmp_path / "p.json"),
    )
    assert code == 2


def test_pareto_env_var_supplies_costs(capsys, tmp_path, monkeypatch):
    rdir, costs = _write_reports(capsys, tmp_path)
    monkeypatch.setenv("EXPAND_COSTS", str(costs))
    code, _, _ = run(
        capsys, "pareto", "--reports", str(rdir),
        "--objectives", "pdp,avg_abs_error", "--out", str(tmp_path / "p.json"),
    )
    assert code == 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _write_layer(tmp_path, rng):
    w = LayerTensor("fc", (16, 4), rng.uniform(-0.4, 0.4, size=(16, 4)))
    a = LayerTensor("acts", (5, 16), rng.uniform(-1, 1, size=(5, 16)))
    save_tensor(w, tmp_path / "w.json")
    save_tensor(a, tmp_path / "a.json")
    return tmp_path / "w.json", tmp_path / "a.json"


def test_simulate_pipeline(capsys, tmp_path):
    rng = np.random.default_rng(5)
    wpath, apath = _write_layer(tmp_path, rng)
    out = tmp_path / "sim.json"
    code, _, _ = run(
        capsys, "simulate", "--weights", str(wpath), "--activations", str(apath),
        "--designs", "fxp:8", "pofxmove:5:0:8", "pofxmovestore:5:0:8",
        "--out", str(out),
    )
    assert code == 0
    report = load_report(out)
    designs = {d["design"]: d for d in report["comparison"]["designs"]}
    assert designs["pofxmovestore:5:0:8"]["stored_ratio_vs_baseline"] == 0.625
    assert (
        designs["pofxmove:5:0:8"]["output_digest"]
        == designs["pofxmovestore:5:0:8"]["output_digest"]
    )


def test_simulate_bad_design_spec(capsys, tmp_path):
    rng = np.random.default_rng(5)
    wpath, apath = _write_layer(tmp_path, rng)
    code, _, _ = run(
        capsys, "simulate", "--weights", str(wpath), "--activations", str(apath),
        "--designs", "warp:1:2:3", "--out", str(tmp_path / "x.json"),
    )
    assert code == 2


def test_simulate_shape_mismatch(capsys, tmp_path):
    rng = np.random.default_rng(5)
    w = LayerTensor("fc", (16, 4), rng.uniform(-0.4, 0.4, size=(16, 4)))
    a = LayerTensor("acts", (5, 9), rng.uniform(-1, 1, size=(5, 9)))
    save_tensor(w, tmp_path / "w.json")
    save_tensor(a, tmp_path / "a.json")
    code, _, _ = run(
        capsys, "simulate", "--weights", str(tmp_path / "w.json"),
        "--activations", str(tmp_path / "a.json"),
        "--designs", "fxp:8", "positall:6:0:8", "--out", str(tmp_path / "x.json"),
    )
    assert code == 3


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


def test_reports_are_byte_identical_across_runs(capsys, tmp_path):
    rng = np.random.default_rng(11)
    wpath, apath = _write_layer(tmp_path, rng)
    weights_csv = tmp_path / "w.csv"
    weights_csv.write_text("".join(f"{v}\n" for v in rng.uniform(-1, 1, 50)))

    def one_pass(tag):
        d = tmp_path / tag
        d.mkdir()
        run(
            capsys, "analyze", "--weights", str(weights_csv),
            "--schemes", "fxp:8:7", "posit:6:1", "pofx:5:1:8", "fpf:8:5:1",
            "--out", str(d / "analyze.json"),
        )
        run(
            capsys, "simulate", "--weights", str(wpath),
            "--activations", str(apath),
            "--designs", "fxp:8", "positall:6:0:8", "pofxmovestore:5:0:8",
            "--out", str(d / "sim.json"),
        )
        return [(d / "analyze.json").read_bytes(), (d / "sim.json").read_bytes()]

    assert one_pass("run1") == one_pass("run2")


def test_report_floats_round_trip(tmp_path):
    from positfx.reports import dump_report

    payload = {"x": 0.1 + 0.2, "nested": {"y": [1e-17, 3.0, 2**-45]}}
    path = tmp_path / "float.json"
    dump_report(payload, path)
    assert json.loads(path.read_text()) == payload
