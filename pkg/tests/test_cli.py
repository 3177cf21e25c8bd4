import json
import math

import pytest

from conftest import DATA
from tightframe.cli import dumps, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


class TestAnalyze:
    def test_scaled_basis(self, capsys):
        code, rep = run(capsys, "analyze", DATA / "scaled_basis.json")
        assert code == 0
        assert rep["alpha"] == pytest.approx(5.0, rel=1e-15)
        assert rep["spectrum"] == pytest.approx([2.0, 2.0, 1.0], abs=1e-14)
        assert rep["c"][3] == pytest.approx(2.125, rel=1e-14)
        assert rep["rhs_infinite"] == pytest.approx(19 / 9, rel=1e-14)

    def test_mercedes(self, capsys):
        code, rep = run(capsys, "analyze", DATA / "mercedes.json")
        assert code == 0
        assert rep["h"] == pytest.approx(1.0, abs=1e-12)
        assert rep["unit_norm_min_count"] == 1
        assert rep["cholesky_route_count_exact_norm"] == 3

    def test_empty_family_needs_dim(self, capsys, tmp_path):
        path = write(tmp_path, "empty.json", {"vectors": [], "norms": {"kind": "constant", "value": 1}})
        assert main(["analyze", str(path)]) == 3
        capsys.readouterr()
        code, rep = run(capsys, "analyze", path, "--dim", 2)
        assert code == 0 and rep["n"] == 2 and rep["alpha"] == 0.0


class TestMinCountAndFeasible:
    def test_min_count_scaled_basis(self, capsys):
        code, rep = run(capsys, "min-count", DATA / "scaled_basis.json")
        assert code == 0
        assert (rep["r0"], rep["case"]) == (1, "Case1")
        assert rep["c"] == pytest.approx(2.0, rel=1e-15)

    def test_feasible_scaled_basis(self, capsys):
        for r, expected in [(1, True), (2, False), (5, False)]:
            code, rep = run(capsys, "feasible", DATA / "scaled_basis.json", "--r", r)
            assert code == 0 and rep["feasible"] is expected
        code, rep = run(capsys, "feasible", DATA / "scaled_basis.json", "--r", 5)
        assert rep["violations"]

    def test_feasible_infinite(self, capsys, tmp_path):
        # constant norms never sum to a finite trace
        code, rep = run(capsys, "feasible", DATA / "mercedes.json")
        assert code == 0 and rep["r"] == "infinite" and rep["feasible"] is False
        # rhs over the whole tail is 2, above c_2 = 7/4
        vectors = json.loads((DATA / "mercedes.json").read_text())["vectors"]
        path = write(tmp_path, "geo.json", {"vectors": vectors, "norms": {"kind": "geometric", "first": 1, "ratio": 0.5}})
        code, rep = run(capsys, "feasible", path)
        assert code == 0 and rep["feasible"] is True


class TestCompleteVerify:
    def test_mercedes_round_trip(self, capsys, tmp_path):
        cert_path = tmp_path / "cert.json"
        assert main(["complete", str(DATA / "mercedes.json"), "--out", str(cert_path)]) == 0
        cert = json.loads(cert_path.read_text())
        assert cert["r"] == 1 and len(cert["vectors"]) == 1
        assert cert["c"] == pytest.approx(1.5, rel=1e-15)
        assert cert["tightness_residual"] < 1e-10 and cert["norm_residual"] < 1e-10
        code, rep = run(capsys, "verify", DATA / "mercedes.json", cert_path)
        assert code == 0 and rep["passed"] is True

    def test_cholesky_method(self, capsys, tmp_path):
        cert_path = tmp_path / "cert.json"
        assert main(["complete", str(DATA / "mercedes.json"), "--method", "theorem-c", "--out", str(cert_path)]) == 0
        cert = json.loads(cert_path.read_text())
        assert cert["method"] == "theorem-c" and cert["r"] == 4
        assert cert["c"] == pytest.approx(3.0, rel=1e-14)
        code, rep = run(capsys, "verify", DATA / "mercedes.json", cert_path)
        assert code == 0 and rep["passed"]

    def test_exact_norm_flag(self, capsys):
        code, cert = run(capsys, "complete", DATA / "mercedes.json", "--method", "theorem-c", "--exact-norm")
        assert code == 0 and cert["r"] == 3

    def test_tampered_certificate_fails(self, capsys, tmp_path):
        code, cert = run(capsys, "complete", DATA / "scaled_basis.json")
        assert code == 0
        cert["vectors"][0][0] += 1e-3
        bad = write(tmp_path, "bad.json", cert)
        code, rep = run(capsys, "verify", DATA / "scaled_basis.json", bad)
        assert code == 4 and rep["passed"] is False

    def test_csv_vectors(self, capsys):
        code, rep = run(capsys, "min-count", DATA / "mercedes_csv.json")
        assert code == 0 and rep["r0"] == 1
        assert rep["c"] == pytest.approx(1.5, rel=1e-14)

    def test_empty_certificate_for_tight_family(self, capsys, tmp_path):
        path = write(tmp_path, "onb.json", {"vectors": [[1, 0], [0, 1]], "norms": {"kind": "constant", "value": 1}})
        cert = write(tmp_path, "cert.json", {"method": "optimal", "r": 0, "c": 1.0, "vectors": []})
        code, rep = run(capsys, "verify", path, cert)
        assert code == 0 and rep["passed"]
        # min_count counts r >= 1 only, so the strict answer here is n unit vectors
        code, rep = run(capsys, "min-count", path)
        assert rep["r0"] == 2 and rep["c"] == pytest.approx(2.0)


class TestExitCodes:
    def test_infeasible(self, capsys):
        code, rep = run(capsys, "complete", DATA / "scaled_basis.json", "--r", 3)
        assert code == 2 and rep["error"] == "InfeasibleError"
        assert "r = 3" in rep["reason"]

    def test_budget(self, capsys, tmp_path):
        path = write(tmp_path, "short.json", {"vectors": [[1, 0]], "norms": {"kind": "finite", "values": [0.5]}})
        code, rep = run(capsys, "complete", path, "--r", 2)
        assert code == 2 and rep["error"] == "BudgetError"

    def test_malformed_json_reports_position(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "vectors": [[1, 0],\n  "norms": 3\n}', encoding="utf-8")
        code, rep = run(capsys, "analyze", path)
        assert code == 3 and rep["error"] == "parse"
        assert "broken.json:3:" in rep["reason"]

    def test_ragged_rows(self, capsys, tmp_path):
        path = write(tmp_path, "ragged.json", {"vectors": [[1, 0], [1]], "norms": {"kind": "constant", "value": 1}})
        assert run(capsys, "analyze", path)[0] == 3

    def test_bad_norm_spec(self, capsys, tmp_path):
        for norms in [{"kind": "geometric", "first": 1, "ratio": 1.5}, {"kind": "finite", "values": [1, 2]}, {"kind": "nope"}]:
            path = write(tmp_path, "bad.json", {"vectors": [[1, 0]], "norms": norms})
            assert run(capsys, "analyze", path)[0] == 3

    def test_csv_line_number(self, capsys, tmp_path):
        (tmp_path / "v.csv").write_text("1,0\n0,x\n", encoding="utf-8")
        path = write(tmp_path, "p.json", {"vectors": "v.csv", "norms": {"kind": "constant", "value": 1}})
        code, rep = run(capsys, "analyze", path)
        assert code == 3 and "v.csv:2" in rep["reason"]

    def test_usage_error_is_parse_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["complete", str(DATA / "mercedes.json"), "--method", "qr"])
        assert exc.value.code == 3
        capsys.readouterr()


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["analyze", "scaled_basis.json"],
        ["min-count", "mercedes.json"],
        ["complete", "scaled_basis.json"],
        ["complete", "mercedes.json", "--method", "theorem-c"],
    ])
    def test_byte_identical(self, capsys, argv):
        full = [argv[0], str(DATA / argv[1]), *argv[2:]]
        main(full)
        first = capsys.readouterr().out
        main(full)
        assert capsys.readouterr().out == first

    def test_float_format(self):
        assert dumps({"x": 0.1, "y": math.inf, "z": [1, 2.5]}) == '{\n  "x": 0.10000000000000001,\n  "y": "infinite",\n  "z": [1, 2.5]\n}\n'

    def test_round_trips_exactly(self):
        x = 2 / 3
        assert json.loads(dumps([x]))[0] == x
