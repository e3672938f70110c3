import csv
import io
import json
import subprocess
import sys

import pytest

from fauxpas import scenario as sc
from fauxpas.cli import main, parse_structured
from fauxpas.report import PredictionProfile, prediction_profile


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_both_variants(capsys):
    code, out, _ = run(capsys, "run", "--scenario", "curtains", "--variant", "both", "--format", "table")
    assert code == 0
    assert "shared - diverging" in out
    header = next(l for l in out.splitlines() if l.startswith("field"))
    assert "shared" in header and "diverging" in header
    row = next(l for l in out.splitlines() if l.startswith("faux_pas"))
    assert len(row.split()) == 3


def test_csv_one_row_per_field(capsys):
    code, out, _ = run(capsys, "run", "--variant", "shared", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["variant", "field", "value"]
    numeric = list(PredictionProfile.__dataclass_fields__)[1:]
    assert [r[1] for r in rows[1:]] == numeric + ["faux_pas", "expected_insult"]
    assert all(r[0] == "shared" for r in rows[1:])


def test_structured_round_trip_is_bit_exact(capsys, spec):
    code, out, _ = run(capsys, "run", "--format", "json")
    assert code == 0
    parsed = parse_structured(out)
    for v in sc.VARIANTS:
        assert parsed[v] == prediction_profile(spec, v)
    doc = json.loads(out)
    assert doc["config"]["scenario"] == sc.to_document(spec)
    assert doc["question_map"]["delta_eval"] == "Q1"


def test_table_and_structured_agree(capsys):
    _, table, _ = run(capsys, "run")
    _, structured, _ = run(capsys, "run", "--format", "json")
    profiles = parse_structured(structured)
    rows = {l.split()[0]: l.split() for l in table.splitlines() if l and l.split()[0] in
            profiles["shared"].numbers()}
    for k, row in rows.items():
        nums = [float(x) for x in row if x[0] in "-0123456789" and x not in ("-",)]
        assert nums[0] == profiles["shared"].numbers()[k]
        assert nums[1] == profiles["diverging"].numbers()[k]


def test_oracle_deviation(capsys):
    code, out, _ = run(capsys, "run", "--oracle", "--format", "json")
    assert code == 0
    assert json.loads(out)["oracle_max_abs_deviation"] < 1e-9
    _, table, _ = run(capsys, "run", "--oracle")
    assert "oracle max |deviation|" in table


def test_overrides_are_echoed(capsys):
    code, out, _ = run(capsys, "run", "--format", "json", "--epsilon", "0.1", "--rationality", "2",
                       "--theta-eval", "-0.5", "--hypothesis-prior", "harmful=0.3",
                       "--hypothesis-prior", "benign=0.7", "--seed", "7")
    assert code == 0
    cfg = json.loads(out)["config"]
    assert cfg["scenario"]["epsilon"] == 0.1
    assert cfg["scenario"]["speaker_model"] == {"theta_info": 1.0, "theta_eval": -0.5, "rationality": 2.0}
    assert [h["prior"] for h in cfg["scenario"]["hypotheses"]] == [0.7, 0.3]
    assert cfg["seed"] == 7


def test_list(capsys, tmp_path):
    code, out, _ = run(capsys, "list")
    assert code == 0 and out.split() == list(sc.PRESETS)
    _, out, _ = run(capsys, "list", "--user-dir", str(tmp_path))
    assert out.split() == list(sc.PRESETS)
    (tmp_path / "office.json").write_text(sc.serialize(sc.ScenarioSpec(name="office")))
    _, out, _ = run(capsys, "list", "--user-dir", str(tmp_path))
    assert out.split() == list(sc.PRESETS) + ["office"]


def test_user_scenario_file(capsys, tmp_path):
    path = tmp_path / "office.json"
    path.write_text(sc.serialize(sc.ScenarioSpec(name="office")))
    code, out, _ = run(capsys, "run", "--scenario", str(path), "--variant", "diverging")
    assert code == 0 and "scenario office" in out


@pytest.mark.parametrize("argv", [
    ["run", "--epsilon", "1.5"],
    ["run", "--scenario", "nowhere.json"],
    ["run", "--hypothesis-prior", "harmful=0.5"],
    ["run", "--hypothesis-prior", "sneaky=0.5"],
    ["run", "--rationality", "-1"],
])
def test_spec_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and "scenario error" in err and out == ""


def test_unknown_field_exit_2_unless_lenient(capsys, tmp_path):
    path = tmp_path / "odd.json"
    path.write_text(json.dumps({"colour": "blue"}))
    assert run(capsys, "run", "--scenario", str(path))[0] == 2
    assert run(capsys, "run", "--scenario", str(path), "--lenient")[0] == 0


def test_impossible_observation_exit_3(capsys, tmp_path):
    # a listener who never acts, scripted to act
    path = tmp_path / "never.json"
    path.write_text(json.dumps({"priors": {"modify": 0.0}}))
    code, _, err = run(capsys, "run", "--scenario", str(path))
    assert code == 3 and "impossible observation" in err


def test_explosion_exit_4(capsys):
    code, _, err = run(capsys, "run", "--history-cap", "10")
    assert code == 4 and "history explosion" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fauxpas", "list"], capture_output=True, text=True, check=True)
    assert out.stdout.split() == list(sc.PRESETS)
