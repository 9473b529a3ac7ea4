import csv
import json
import math

import pytest

from piecewise_melnikov.cli import main
from piecewise_melnikov.melnikov import PerturbationSpec
from piecewise_melnikov.specfile import (
    SpecFileError,
    load_spec,
    save_spec,
    spec_from_dict,
    spec_to_dict,
)


@pytest.fixture
def b101_spec(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"n": 1, "mode": "four-zone", "zones": {"1": {"b": [[0, 1, 1.0]]}}}))
    return path


class TestSpecFile:
    def test_missing_coefficients_default_zero(self):
        spec = spec_from_dict({"n": 2, "mode": "four-zone", "zones": {}})
        assert spec.coeffs == {}

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(SpecFileError, match="unknown top-level"):
            spec_from_dict({"n": 1, "mode": "four-zone", "zones": {}, "extra": 1})

    def test_unknown_table_rejected(self):
        with pytest.raises(SpecFileError, match="unknown table"):
            spec_from_dict({"n": 1, "mode": "four-zone", "zones": {"1": {"c": []}}})

    def test_zone_outside_mode_rejected(self):
        with pytest.raises(SpecFileError, match="zone '2' not valid"):
            spec_from_dict({"n": 1, "mode": "two-zone-upper", "zones": {"2": {"a": []}}})

    def test_index_outside_triangle_rejected(self):
        with pytest.raises(SpecFileError, match="triangle"):
            spec_from_dict(
                {"n": 1, "mode": "four-zone", "zones": {"1": {"a": [[1, 1, 0.5]]}}}
            )

    def test_json_error_has_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 1,\n  "mode": four-zone}\n')
        with pytest.raises(SpecFileError, match="line 2"):
            load_spec(path)

    def test_rational_strings_parse_exactly(self):
        spec = spec_from_dict(
            {"n": 1, "mode": "four-zone", "zones": {"1": {"b": [[0, 1, "3/4"]]}}}
        )
        from fractions import Fraction

        assert spec.coeff(1, "b", 0, 1) == Fraction(3, 4)

    def test_round_trip_bit_equal(self, tmp_path):
        from fractions import Fraction

        spec = PerturbationSpec(
            1,
            "four-zone",
            {
                (1, "b", 0, 1): Fraction(0.12345678901234567),
                (2, "a", 1, 0): Fraction(-1.9999999999999998),
                (3, "b", 0, 0): Fraction(1, 3),
            },
        )
        path = tmp_path / "round.json"
        save_spec(spec, path)
        again = load_spec(path)
        assert again.coeffs == spec.coeffs


class TestCli:
    def test_bound(self, capsys):
        assert main(["bound", "--n", "2", "--mode", "four-zone"]) == 0
        assert capsys.readouterr().out.strip() == "8"

    def test_eval_both_methods(self, b101_spec, capsys):
        assert main(["eval", "--spec", str(b101_spec), "--h", "2", "--method", "both"]) == 0
        out = capsys.readouterr().out
        vals = dict(line.split(" = ") for line in out.strip().splitlines())
        assert float(vals["M_direct"]) == pytest.approx(math.pi / 2 - 1, abs=1e-10)
        assert float(vals["M_canonical"]) == pytest.approx(math.pi / 2 - 1, abs=1e-12)
        assert abs(float(vals["difference"])) < 1e-10

    def test_eval_grid_csv(self, b101_spec, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        rc = main(
            [
                "eval", "--spec", str(b101_spec), "--h-grid", "0.5:5:7", "--log",
                "--method", "canonical", "--out", str(out),
            ]
        )
        assert rc == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0].keys()) == ["h", "M_canonical"]
        hs = [float(r["h"]) for r in rows]
        assert hs == sorted(hs) and len(hs) == 7
        assert hs[0] == pytest.approx(0.5) and hs[-1] == pytest.approx(5.0)

    def test_structure_emits_exact_strings(self, b101_spec, capsys):
        assert main(["structure", "--spec", str(b101_spec)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["canonical"]["alpha_h"] == ["1"]
        assert doc["canonical"]["bounds_satisfied"] is True
        # P coefficients are (rational, rational*pi) string pairs
        assert doc["u_form"]["P_u"][1] == ["0", "1/2"]
        assert doc["u_form"]["Qc_v"] == ["-2"]

    def test_realize_zeros_pipeline(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        rc = main(
            ["realize", "--mode", "two-zone-upper", "--targets", "0.1,0.2,0.3", "--out", str(out)]
        )
        assert rc == 0
        rc = main(["zeros", "--spec", str(out)])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["count"] == 3
        assert doc["bound"] == 3 and doc["bound_satisfied"] is True

    def test_realize_round_trip_bit_equal(self, tmp_path):
        out = tmp_path / "r.json"
        assert (
            main(["realize", "--mode", "four-zone", "--targets", "0.1,0.2,0.3,0.4", "--out", str(out)])
            == 0
        )
        first = load_spec(out)
        save_spec(first, out)
        assert load_spec(out).coeffs == first.coeffs

    def test_simulate(self, b101_spec, capsys):
        rc = main(["simulate", "--spec", str(b101_spec), "--eps", "1e-3", "--h", "2"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "displacement" in out and out.count("y=") == 4

    def test_cycles_and_verify(self, tmp_path, capsys):
        spec_path = tmp_path / "r.json"
        main(["realize", "--mode", "two-zone-upper", "--targets", "0.1,0.2,0.3", "--out", str(spec_path)])
        capsys.readouterr()
        rc = main(
            ["cycles", "--spec", str(spec_path), "--eps", "1e-2", "--h-range", "0.006:0.17"]
        )
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["count"] == 3
        rc = main(["verify", "--spec", str(spec_path), "--eps-list", "1e-2,1e-3"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["validation_ok"] is True
        assert [e["count"] for e in doc["eps_results"]] == [3, 3]

    def test_identities_exit_code(self, capsys):
        assert main(["identities", "--seed", "5"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and out.count("PASS") >= 9

    def test_error_paths(self, tmp_path, capsys):
        missing = tmp_path / "missing.json"
        assert main(["eval", "--spec", str(missing), "--h", "2", "--method", "direct"]) == 1
        assert "error" in capsys.readouterr().err
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 1, "mode": "four-zone", "zones": {}, "bogus": 0}')
        assert main(["zeros", "--spec", str(bad)]) == 1
        assert "bogus" in capsys.readouterr().err
