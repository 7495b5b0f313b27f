import io
import json
import os

import pytest

from startensor.cli import ConfigError, EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, parse_config
from startensor.fpmod import QuotientRing

from conftest import DATA

EXAMPLE = os.path.join(DATA, "example.json")

RING = {
    "field": "Q",
    "vars": ["x", "y", "z"],
    "weights": [3, 4, 5],
    "relations": ["y^2 - x*z", "x^2*y - z^2", "x^3 - y*z"],
}


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# ---------------------------------------------------------------- parse_config


def test_ring_block():
    cfg = parse_config(dict(RING))
    assert isinstance(cfg.ring, QuotientRing)
    R = cfg.ring
    assert R.S.weights == (3, 4, 5)
    assert not R.elem("z^2 - x^2*y")
    assert R.elem("z^2")
    assert len(R.jgb) == 3


def test_empty_relations_is_polynomial_ring():
    cfg = parse_config({"vars": ["x", "y"], "relations": []})
    assert not cfg.ring.jgb
    assert cfg.ring.domain


def test_unknown_variable_named():
    bad = dict(RING, relations=["y^2-x*w"])
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    assert "`w`" in str(exc.value)
    assert exc.value.path == "$.relations[0]"


@pytest.mark.parametrize(
    "patch,path",
    [
        ({"colour": 1}, "$.colour"),
        ({"weights": [3, 4]}, "$.weights"),
        ({"weights": [3, 0, 5]}, "$.weights[1]"),
        ({"vars": ["x", "x", "z"]}, "$.vars"),
        ({"relations": ["x^2", "x*(y"]}, "$.relations[1]"),
        ({"field": "R"}, "$.field"),
        ({"modules": {"N": {"ngens": 2, "rels": [["x"]]}}}, "$.modules.N.rels[0]"),
        ({"modules": {"N": {"ngens": 1, "gens": []}}}, "$.modules.N.gens"),
        ({"modules": {"R": {"ngens": 1}}}, "$.modules.R"),
        ({"scenario": {"name": "other"}}, "$.scenario.name"),
    ],
)
def test_schema_errors_carry_json_path(patch, path):
    with pytest.raises(ConfigError) as exc:
        parse_config(dict(RING, **patch))
    assert exc.value.path == path


def test_parse_error_position():
    with pytest.raises(ConfigError) as exc:
        parse_config(dict(RING, relations=["x +* y"]))
    assert "position" in str(exc.value)


def test_invalid_json_text():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"vars": [')
    assert exc.value.path == "$" and "line 1" in str(exc.value)


def test_fp_field():
    cfg = parse_config(dict(RING, field={"Fp": 7}))
    assert cfg.field.p == 7


def test_example_config_file():
    cfg = parse_config(EXAMPLE)
    assert set(cfg.modules) == {"I", "M"}
    assert cfg.modules["M"].ngens == 3


# ---------------------------------------------------------------- subcommands


def test_toric_command():
    code, out, _ = run("toric", "3,4,5")
    assert code == EXIT_OK
    assert out.split("\n")[:3] == ["x^2*y - z^2", "x^3 - y*z", "y^2 - x*z"]


def test_gb_command():
    code, out, _ = run("gb", "--vars", "x,y,z", "--weights", "3,4,5", *RING["relations"])
    assert code == EXIT_OK
    assert sorted(out.strip().split("\n")) == ["x^2*y - z^2", "x^3 - y*z", "y^2 - x*z"]
    # in R, x*x^2 = x^3 = y*z and y*x^2 = z^2
    code, out, _ = run("gb", "x*y", "x^2", "--semigroup", "3,4,5")
    assert code == EXIT_OK and sorted(out.split()) == ["x*y", "x^2", "y*z", "z^2"]


def test_colon_command():
    code, out, _ = run("colon", "--semigroup", "3,4,5", "--target", "x", "--by", "x", "y")
    assert code == EXIT_OK
    cfg = parse_config(dict(RING))
    from startensor.fpmod import ideals_equal

    assert ideals_equal(cfg.ring, out.split(), ["x", "y", "z"])


def test_nf_command():
    code, out, _ = run("nf", "x^2*y", "--semigroup", "3,4,5")
    assert code == EXIT_OK and out.strip() == "z^2"


def test_gb_with_relations_and_syz():
    code, out, _ = run("syz", "x", "y", "--semigroup", "3,4,5")
    assert code == EXIT_OK and out.strip()


def test_module_commands():
    cfg = EXAMPLE
    code, out, _ = run("module", "mu", "--config", cfg, "--module", "M")
    assert code == EXIT_OK and json.loads(out) == {"mu": 3}
    code, out, _ = run("module", "rank", "--config", cfg, "--module", "M")
    assert code == EXIT_OK and json.loads(out)["rank"] == 2


def test_star_and_oracle_commands():
    code, out, _ = run("star", "theta", "--C", "0,1;-1,0", "--a", "-1")
    assert code == EXIT_OK and json.loads(out)["ok"]
    code, out, _ = run("oracle", "--n", "2", "--ring", "f2")
    res = json.loads(out)
    assert code == EXIT_OK and res["involutions"] == res["certificates"] == 4


# ---------------------------------------------------------------- exit codes


def test_exit_input_errors():
    assert run("run", "nope")[0] == EXIT_INPUT
    assert run("gb", "--vars", "x,y", "x*w")[0] == EXIT_INPUT
    assert run("gb", "--vars", "x,y", "x+")[0] == EXIT_INPUT
    assert run("module", "mu", "--config", os.path.join(DATA, "missing.json"), "--module", "M")[0] == EXIT_INPUT


def test_exit_resource_cap():
    code, _, err = run("toric", "3,4,5", "--degree-cap", "5")
    assert code == EXIT_CAP and "cap" in err


def test_exit_failed_check(tmp_path):
    data = json.loads(open(EXAMPLE).read())
    data["scenario"] = {"checks": [{"op": "mu", "module": "M", "expect": 2}]}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    code, out, _ = run("run", "custom", "--config", str(p), "--no-times")
    assert code == EXIT_FAIL
    assert json.loads(out)["verdict"] == "fail"


def test_custom_config_passes():
    code, out, _ = run("run", "custom", "--config", EXAMPLE, "--no-times")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["verdict"] == "pass"
    assert len(rep["checks"]) == 8


# ---------------------------------------------------------------- scenarios and reports


def test_run_toric():
    code, out, _ = run("run", "toric", "--gens", "3,4,5")
    rep = json.loads(out)
    assert code == EXIT_OK
    rels = rep["checks"][0]["witness"]["relations"]
    assert sorted(rels) == ["x^2*y - z^2", "x^3 - y*z", "y^2 - x*z"]


def test_run_matrix_star():
    code, out, _ = run("run", "matrix-star", "--n", "2", "--ring", "z4")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["verdict"] == "pass"
    assert {c["name"] for c in rep["checks"]} == {"involutions_vs_certificates", "dense_tensor"}


def test_reports_byte_identical():
    a = run("run", "matrix-star", "--n", "1", "--ring", "z4", "--no-times")[1]
    b = run("run", "matrix-star", "--n", "1", "--ring", "z4", "--no-times")[1]
    assert a == b


def test_report_hash_excludes_times():
    a = json.loads(run("run", "toric", "--gens", "3,5,7")[1])
    b = json.loads(run("run", "toric", "--gens", "3,5,7")[1])
    assert a["report_hash"] == b["report_hash"]
    assert a["input_hash"] == b["input_hash"]
    assert all("seconds" in c for c in a["checks"])
    quiet = json.loads(run("run", "toric", "--gens", "3,5,7", "--no-times")[1])
    assert all("seconds" not in c for c in quiet["checks"])
    assert quiet["report_hash"] == a["report_hash"]


def test_every_check_has_anchor():
    rep = json.loads(run("run", "custom", "--config", EXAMPLE, "--no-times")[1])
    rep2 = json.loads(run("run", "matrix-star", "--n", "1", "--ring", "f2")[1])
    for c in rep["checks"] + rep2["checks"]:
        assert isinstance(c["anchor"], str) and c["anchor"]


def test_out_file(tmp_path):
    p = tmp_path / "rep.json"
    code, out, _ = run("run", "toric", "--gens", "3,4,5", "--out", str(p))
    assert code == EXIT_OK
    assert "verdict: pass" in out
    assert json.loads(p.read_text())["verdict"] == "pass"
