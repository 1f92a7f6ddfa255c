import json
import subprocess
import sys
from pathlib import Path

import pytest

from varconv import cli
from varconv.cli import ConfigError, main, parse_config, run_analysis

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_meta(rep):
    rep = dict(rep)
    rep.pop("meta", None)
    return rep


def test_bounds_f1(capsys):
    code, out, _ = run(["bounds", str(CONFIGS / "f1.json")], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["bounds"]["varco_bound"] == {"value": 0.0, "op": "varco_bound"}
    assert rep["bounds"]["tilt_bound"]["value"] == "not-tilt-stable"
    # at s = varco the point-based criterion alone cannot decide
    assert rep["summary"]["verdicts"] == ["s=0: at bound (oracles needed to decide)"]
    code, out, _ = run(["analyze", str(CONFIGS / "f1.json")], capsys)
    assert code == 0
    assert json.loads(out)["summary"]["verdicts"] == ["s=0: not variationally convex at bound"]


def test_analyze_f2_text(capsys, tmp_path):
    out_path = tmp_path / "rep.txt"
    code, out, _ = run(["analyze", "--config", str(CONFIGS / "f2.json"), "--format", "text",
                        "--out", str(out_path)], capsys)
    assert code == 0 and out == ""
    text = out_path.read_text()
    assert "variationally convex at bound" in text
    assert "status   : ok" in text


def test_overrides_and_inf_encoding(capsys):
    code, out, _ = run(["bounds", str(CONFIGS / "quad2.json"), "--s", "1", "--s", "3", "--eps", "0.1"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["input"]["s"] == [1.0, 3.0] and rep["input"]["eps"] == 0.1
    assert [v["pointbased"]["passed"] for v in rep["verdicts"]] == [True, False]
    cfg = parse_config({"function": "abs", "anchor": 0, "subgradient": 0})
    rep = run_analysis(cfg, ("bounds",))
    assert rep["bounds"]["varco_bound"]["value"] == "inf"
    json.dumps(rep, allow_nan=False)


def test_compare_flagship(capsys):
    code, out, _ = run(["compare", str(CONFIGS / "flagship.json")], capsys)
    rep = json.loads(out)
    assert code == 0
    text = json.dumps(rep)
    assert set(rep["modes"]) == {"attentive", "plain"}
    assert rep["modes"]["attentive"]["closedness"]["passed"]
    assert not rep["modes"]["plain"]["closedness"]["passed"]


def test_catalog_listing(capsys):
    code, out, _ = run(["catalog"], capsys)
    assert code == 0 and "flagship_jump" in out and "orthant_quad" in out
    code, out, _ = run(["catalog", "--format", "json"], capsys)
    names = [r["name"] for r in json.loads(out)]
    assert any(n.startswith("quad") for n in names)


def test_determinism_excluding_meta(capsys):
    reps = []
    for _ in range(2):
        code, out, _ = run(["analyze", str(CONFIGS / "f1.json"), "--seedless"], capsys)
        assert code == 0
        reps.append(strip_meta(json.loads(out)))
    assert reps[0] == reps[1]


@pytest.mark.parametrize(
    "config, fragment",
    [
        ('{"function": "abs", "anchor": 0}', "subgradient"),
        ('{"function": "abs",\n "anchor": 0,\n "subgradient": 0,\n "eps": -1}', "line 4, field eps"),
        ('{"function": "abs", "anchor": 0, "subgradient": 0, "bogus": 1}', "bogus"),
        ('{"function": "nope", "anchor": 0, "subgradient": 0}', "field function"),
        ('{"function": "abs", "anchor": 0, "subgradient": 3}', "invalid anchor pair"),
        ('{"function": "abs", "anchor": [0, 0], "subgradient": 0}', "dimension"),
        ('{"function": "abs", "anchor": 0,', "line 1"),
    ],
)
def test_config_errors(tmp_path, capsys, config, fragment):
    p = tmp_path / "bad.json"
    p.write_text(config)
    with pytest.raises(ConfigError, match=fragment):
        parse_config(p)
    code, _, err = run(["bounds", str(p)], capsys)
    assert code == 2 and "config error" in err


def test_missing_config_exit_code(capsys):
    code, _, err = run(["analyze"], capsys)
    assert code == 2 and "config" in err


def test_cross_check_failure_exit_code(monkeypatch, capsys):
    real = cli.run_analysis

    def broken(cfg, sections):
        rep = real(cfg, sections)
        rep["summary"]["disagreements"] = 1
        return rep

    monkeypatch.setattr(cli, "run_analysis", broken)
    code, _, _ = run(["bounds", str(CONFIGS / "f2.json")], capsys)
    assert code == 1


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "varconv.cli", "bounds", str(CONFIGS / "quad2.json")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["bounds"]["tilt_bound"]["value"] == 0.5


def test_parse_config_defaults_and_anchor_validation():
    cfg = parse_config({"function": "f1_neg_quartic", "anchor": 0, "subgradient": 0})
    assert cfg["eps"] == 0.25 and cfg["resolution"] == 201 and cfg["s"] == [0.0]
    assert cfg["rho"] == 0.25 and all(cfg["oracles"].values())
    cfg = parse_config(CONFIGS / "orthant.json")
    assert cfg["f"].dim == 2 and cfg["resolution"] == 41
    with pytest.raises(ConfigError, match="invalid anchor pair"):
        parse_config({"function": "f2_zero", "anchor": 0, "subgradient": 0.5})


def test_quad2_report_values(capsys):
    code, out, _ = run(["analyze", str(CONFIGS / "quad2.json")], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["bounds"]["varco_bound"]["value"] == 2.0
    assert rep["bounds"]["tilt_bound"]["value"] == 0.5
    assert rep["tilt_probe"]["lipschitz"]["value"] == pytest.approx(0.5, rel=1e-3)
    assert all(c["status"] == "ok" for c in rep["cross_checks"])


def test_numbers_are_tagged_with_operation():
    rep = run_analysis(parse_config(CONFIGS / "f2.json"))

    def tagged(obj):
        return isinstance(obj, dict) and set(obj) >= {"value", "op"}

    assert tagged(rep["anchor"]["fval"])
    assert all(tagged(v) for k, v in rep["bounds"].items() if k in ("varco_bound", "tilt_bound"))
    for row in rep["verdicts"]:
        for key in ("pointbased", "neighborhood", "growth", "monotone_attentive", "monotone_plain"):
            assert tagged(row[key]["margin"])
    for key in ("s_pass", "s_fail"):
        assert tagged(rep["varco_empirical"][key])
    assert tagged(rep["prox_parameter"]) and tagged(rep["tilt_probe"]["lipschitz"])


def test_emit_report_formats(tmp_path):
    rep = run_analysis(parse_config(CONFIGS / "f1.json"))
    text = cli.emit_report(rep, "json")
    assert json.loads(text) == json.loads(json.dumps(rep))
    summary = cli.emit_report(rep, "text")
    assert "varco    :" in summary and "tilt     :" in summary
    assert "pointbased" in summary and "monotone_attentive" in summary
    p = tmp_path / "r.json"
    cli.emit_report(rep, "json", p)
    assert json.loads(p.read_text())["summary"] == rep["summary"]


def test_json_is_byte_identical_without_meta(tmp_path, capsys):
    texts = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["analyze", str(CONFIGS / "flagship.json"), "--out", str(out), "--seedless"]) == 0
        rep = json.loads(out.read_text())
        rep.pop("meta")
        texts.append(json.dumps(rep, indent=2))
    assert texts[0] == texts[1]
