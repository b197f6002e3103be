import io
import json
import subprocess
import sys

import pytest

import goldens
from qgres.cli import RunConfig, family_formula, in_ell, main, run
from qgres.secular import resonance_families
from fractions import Fraction


def call(command, path, **kw):
    out, err = io.StringIO(), io.StringIO()
    code = run(RunConfig(command, str(path), **kw), out, err)
    return code, out.getvalue(), err.getvalue()


def records(command, path, **kw):
    code, text, _ = call(command, path, format="records", **kw)
    assert code == 0
    return [json.loads(line) for line in text.splitlines()]


def write_graph(tmp_path, data, name="g.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


def test_in_ell():
    assert in_ell(Fraction(2), Fraction(1)) == "2·ℓ"
    assert in_ell(Fraction(5, 2), Fraction(1)) == "5/2·ℓ"


def test_classify_line():
    code, text, _ = call("classify", goldens.STAR)
    assert code == 0
    assert text.splitlines()[0] == "non-Weyl, W = 2·ℓ, vol = 3·ℓ"
    code, text, _ = call("classify", goldens.INTERVAL)
    assert text.splitlines()[0].startswith("Weyl")


def test_malformed_input_exits_1(tmp_path):
    assert call("classify", write_graph(tmp_path, "{not json"))[0] == 1
    assert call("classify", tmp_path / "missing.json")[0] == 1
    bad = {"vertices": [{"id": "a", "leads": 0}], "edges": [{"id": "1", "from": "a", "to": "z", "length": "1"}]}
    code, _, err = call("classify", write_graph(tmp_path, bad))
    assert code == 1 and err.startswith("error:")


def test_precondition_exits_2(tmp_path):
    uneven = {
        "vertices": [{"id": "a", "leads": 1}, {"id": "b", "leads": 1}],
        "edges": [{"id": "1", "from": "a", "to": "b", "length": "1"}, {"id": "2", "from": "a", "to": "b", "length": "2"}],
    }
    path = write_graph(tmp_path, uneven)
    code, _, err = call("secular", path, exact=True)
    assert code == 2 and "NotEquilateral" in err
    assert call("reduce", path)[0] == 2
    assert call("bounds", path)[0] == 2
    # classification still works through the determinant test
    assert call("classify", path)[0] == 0


def test_cap_exceeded_exits_2():
    code, _, err = call("orbits", goldens.K4, cap=10)
    assert code == 2 and "CapExceeded" in err
    assert call("verify", goldens.K4, cap=10)[0] == 2


@pytest.mark.parametrize("path", [goldens.STAR, goldens.SQUARE, goldens.K4, goldens.INTERVAL])
def test_verify_succeeds(path):
    code, text, _ = call("verify", path)
    assert code == 0 and "NO" not in text


def test_k4_family_lines():
    code, text, _ = call("resonances", goldens.K4)
    lines = text.splitlines()
    assert code == 0
    assert "c = 1 (mult 3): k = (1/ℓ) 2nπ" in lines
    assert "c = -1 (mult 2): k = (1/ℓ) (2n+1)π" in lines
    assert "c = -1/3 (mult 3): k = (1/ℓ)[(2n+1)π - i ln 3]" in lines


def test_family_formula_generic(square):
    forms = {str(f.exact_c): family_formula(f) for f in resonance_families(square)}
    assert forms["-2/3"] == "k = (1/ℓ)[(2n+1)π - i ln 3/2]"


def test_records_are_json_and_deterministic():
    for cmd in ("classify", "secular", "resonances", "orbits", "reduce", "bounds", "verify"):
        a = records(cmd, goldens.STAR)
        b = records(cmd, goldens.STAR)
        assert a == b and a
        assert all(r["command"] == cmd and "kind" in r for r in a)


def test_disc_record():
    recs = records("resonances", goldens.K4, radius=10.0)
    disc = [r for r in recs if r["kind"] == "disc"]
    assert len(disc) == 1 and disc[0]["count"] == 29


def test_reduce_with_plan(tmp_path):
    plan = write_graph(tmp_path, goldens.SQUARE_PLAN, "plan.json")
    code, text, _ = call("reduce", goldens.SQUARE, plan=str(plan))
    assert code == 0
    assert "polynomial preserved: yes" in text
    assert "zero columns: 1^, 2^, 3^, 4^" in text
    conflict = write_graph(tmp_path, [{"vertex": "v1", "bond": "1^"}, {"vertex": "v1", "bond": "4"}], "c.json")
    code, _, err = call("reduce", goldens.SQUARE, plan=str(conflict))
    assert code == 2 and "PlanConflict" in err


def test_orbits_with_plan_drop_long_orbits(tmp_path):
    plan = write_graph(tmp_path, [{"vertex": "v4", "bond": "3"}], "plan.json")
    recs = records("orbits", goldens.STAR, plan=str(plan))
    assert max(r["total_bonds"] for r in recs) == 4
    assert sum(r["total_bonds"] == 2 for r in recs) == 4


def test_bounds_records():
    (rec,) = [r for r in records("bounds", goldens.SQUARE) if r["kind"] == "bounds"]
    assert rec["n_bal"] == 4 and rec["bound_main"] == "3" and rec["W_actual"] == "5/2"


def test_secular_at_k():
    code, text, _ = call("secular", goldens.STAR, k=complex(3.141592653589793))
    assert code == 0
    assert text.startswith("det(exp(ikL) S(k) - I) at k = ")
    value = complex(text.splitlines()[0].split(": ")[1].replace("i", "j"))
    assert abs(value) < 1e-12


def test_main_and_module_entry(capsys):
    assert main(["classify", "-i", str(goldens.SQUARE)]) == 0
    assert "W = 5/2·ℓ" in capsys.readouterr().out
    proc = subprocess.run(
        [sys.executable, "-m", "qgres", "bounds", "-i", str(goldens.K4), "--format", "records"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert all(json.loads(line) for line in proc.stdout.splitlines())
