"""CLI behavior: formats, determinism, error codes, unit conversion."""

import csv
import io
import json
import math

import pytest

from tailforge.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestExponentsCommand:
    def test_grid_columns_and_ordering(self, capsys):
        code, out, _ = run_cli(
            capsys, "exponents", "--gamma", "0.25", "--grid", "0:1:11"
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == [
            "gamma",
            "delta",
            "azuma",
            "cor2_f",
            "thm2",
            "thm3",
            "cor4",
            "pinsker",
            "refined_pinsker",
            "cor3",
            "chung_lu",
        ]
        assert len(rows) == 11
        mid = rows[5]  # delta = 0.5
        vals = dict(zip(header, mid))
        assert float(vals["thm2"]) >= float(vals["thm3"]) >= float(vals["cor2_f"])
        assert float(vals["cor2_f"]) >= float(vals["azuma"])
        assert float(vals["thm2"]) >= float(vals["cor4"]) >= float(vals["cor2_f"])

    def test_zero_row_and_inf_token(self, capsys):
        code, out, _ = run_cli(
            capsys, "exponents", "--gamma", "0.5", "--grid", "0:1.5:4"
        )
        header, rows = parse_csv(out)
        first = dict(zip(header, rows[0]))
        assert all(
            first[c] == "0" for c in header if c not in ("gamma", "delta")
        )
        last = dict(zip(header, rows[-1]))  # delta = 1.5
        assert last["thm2"] == "inf" and last["cor4"] == "inf"
        assert last["azuma"] != "inf"  # azuma stays finite beyond delta = 1

    def test_byte_identical_reruns(self, capsys):
        a = run_cli(capsys, "exponents", "--gamma", "0.3", "--grid", "0:1:21")
        b = run_cli(capsys, "exponents", "--gamma", "0.3", "--grid", "0:1:21")
        assert a == b

    def test_round_trip_at_precision(self, capsys):
        _, out, _ = run_cli(
            capsys, "exponents", "--gamma", "0.7", "--grid", "0:1:7",
            "--precision", "9",
        )
        header, rows = parse_csv(out)
        for row in rows:
            for cell in row:
                if cell == "inf":
                    continue
                assert format(float(cell), ".9g") == cell

    def test_bits_conversion(self, capsys):
        _, nats, _ = run_cli(capsys, "exponents", "--gamma", "0.5", "--grid", "1:1:1")
        _, bits, _ = run_cli(
            capsys, "exponents", "--gamma", "0.5", "--grid", "1:1:1",
            "--units", "bits",
        )
        header, rows_n = parse_csv(nats)
        _, rows_b = parse_csv(bits)
        i = header.index("thm2")
        assert float(rows_b[0][i]) == pytest.approx(
            float(rows_n[0][i]) / math.log(2), rel=1e-5
        )

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "exponents", "--gamma", "0.5", "--grid", "0:1:3",
            "--format", "json",
        )
        doc = json.loads(out)
        assert doc["columns"][0] == "gamma"
        assert len(doc["rows"]) == 3

    def test_missing_gamma_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "exponents")
        assert code == 2
        assert "config error" in err

    def test_gamma_out_of_range_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "exponents", "--gamma", "1.5")
        assert code == 2
        assert "config error" in err

    def test_grid_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "grid.json"
        cfg.write_text(json.dumps({"gamma": [0.25, 0.5], "delta": [0.0, 0.5, 1.0]}))
        code, out, _ = run_cli(capsys, "exponents", "--config", str(cfg))
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 6


class TestPairwiseCommand:
    def test_table_row(self, capsys):
        code, out, _ = run_cli(
            capsys, "pairwise", "--qary", "2,5", "0.04", "--m", "2,10",
            "--precision", "4",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["channel", "zB", "z1", "z2_2", "z2_10"]
        bsc_row = dict(zip(header, rows[0]))
        assert bsc_row["zB"] == "0.3919"
        assert bsc_row["z1"] == "0.3919"
        q5 = dict(zip(header, rows[1]))
        assert q5["z1"] == "0.5297"
        assert q5["z2_10"] == "0.4866"

    def test_tilde_columns(self, capsys):
        _, out, _ = run_cli(
            capsys, "pairwise", "--qary", "10", "0.04", "--m", "10", "--tilde",
            "--precision", "4",
        )
        header, rows = parse_csv(out)
        assert "z2tilde_10" in header
        assert dict(zip(header, rows[0]))["z2tilde_10"] == "0.6417"

    def test_q_range_syntax(self, capsys):
        _, out, _ = run_cli(capsys, "pairwise", "--qary", "2..4", "0.04", "--m", "2")
        _, rows = parse_csv(out)
        assert len(rows) == 3

    def test_channel_config(self, capsys, tmp_path):
        cfg = tmp_path / "chan.json"
        cfg.write_text(
            json.dumps(
                {
                    "outputs": [0, 1],
                    "p0": [0.9, 0.1],
                    "p1": [0.1, 0.9],
                    "sym": [1, 0],
                }
            )
        )
        code, out, _ = run_cli(
            capsys, "pairwise", "--config", str(cfg), "--m", "2", "--precision", "6"
        )
        assert code == 0
        header, rows = parse_csv(out)
        want = math.sqrt(4 * 0.1 * 0.9)
        assert float(dict(zip(header, rows[0]))["z1"]) == pytest.approx(
            want, abs=1e-6
        )

    def test_malformed_channel_json(self, capsys, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(
            json.dumps(
                {"outputs": [0, 1], "p0": [0.9, 0.2], "p1": [0.1, 0.9], "sym": [1, 0]}
            )
        )
        code, _, err = run_cli(capsys, "pairwise", "--config", str(cfg))
        assert code == 2
        assert "p0" in err

    def test_not_json(self, capsys, tmp_path):
        cfg = tmp_path / "nope.json"
        cfg.write_text("{broken")
        code, _, err = run_cli(capsys, "pairwise", "--config", str(cfg))
        assert code == 2


class TestHypothesisCommand:
    def test_example_values(self, capsys):
        code, out, _ = run_cli(
            capsys, "hypothesis", "--p1", "0.4,0.6", "--p2", "0.6,0.4",
            "--precision", "3",
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: r[1] for r in rows}
        assert table["chernoff_information"] == "0.0204"
        assert table["refined_error"] == "0.0177"
        assert table["azuma_error"] == "0.0139"
        assert float(table["gamma1"]) == pytest.approx(2 / 3, abs=1e-3)
        assert float(table["gamma2"]) == pytest.approx(7 / 9, abs=1e-3)

    def test_config_with_thresholds(self, capsys, tmp_path):
        cfg = tmp_path / "pair.json"
        cfg.write_text(
            json.dumps(
                {
                    "p1": [0.4, 0.6],
                    "p2": [0.6, 0.4],
                    "thresholds": {"lambda_bar": 0.02, "lambda_under": -0.02},
                }
            )
        )
        code, out, _ = run_cli(capsys, "hypothesis", "--config", str(cfg))
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert table["exact_err_or_erasure"] <= table["exact_error"]

    def test_invalid_threshold_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "hypothesis", "--p1", "0.4,0.6", "--p2", "0.6,0.4",
            "--thresholds", "0.5,-0.5",
        )
        assert code == 2

    def test_eta_adds_mdp_rows(self, capsys):
        code, out, _ = run_cli(
            capsys, "hypothesis", "--p1", "0.4,0.6", "--p2", "0.6,0.4",
            "--eta", "0.75", "--eps1", "0.05", "--mdp-n", "10000",
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert 0.0 < table["mdp_bound"] <= 1.0
        assert table["mdp_asymptotic_slope"] < 0.0

    def test_eta_below_validity_threshold(self, capsys):
        code, _, err = run_cli(
            capsys, "hypothesis", "--p1", "0.4,0.6", "--p2", "0.6,0.4",
            "--eta", "0.9", "--eps1", "5.0", "--mdp-n", "2",
        )
        assert code == 2


class TestLdpcCommand:
    def test_regular_ensemble(self, capsys):
        code, out, _ = run_cli(
            capsys, "ldpc", "--regular", "3,6", "--n", "64", "--alpha", "1.5"
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert table["design_rate"] == pytest.approx(0.5)
        assert table["avg_right_degree"] == pytest.approx(6.0)
        assert table["beta"] == pytest.approx(0.5)
        assert table["bound"] <= table["azuma_bound"]


class TestOfdmCommand:
    def test_bounds_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "ofdm", "--n", "64", "--alpha", "4", "--precision", "4"
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert table["azuma_bound"] == pytest.approx(2 * math.exp(-2), abs=5e-4)
        assert table["refined_limit"] == pytest.approx(2 * math.exp(-4), abs=5e-5)

    def test_alpha_two_clips_to_one(self, capsys):
        _, out, _ = run_cli(capsys, "ofdm", "--n", "64", "--alpha", "2")
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert table["azuma_bound"] == 1.0

    def test_check_requires_seed(self, capsys):
        code, _, err = run_cli(
            capsys, "ofdm", "--n", "8", "--alpha", "2", "--check", "--trials", "20"
        )
        assert code == 2
        code, out, _ = run_cli(
            capsys, "ofdm", "--n", "8", "--alpha", "2", "--check",
            "--trials", "20", "--seed", "5",
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: r[1] for r in rows}
        assert table["violations"] == "0"
        assert table["trig_identity"] == "1/4"


class TestSimulateCommand:
    def test_requires_seed(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--law", "twopoint")
        assert code == 2
        assert "seed" in err

    def test_twopoint_reproduces_comparison(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--law", "twopoint", "--eps", "0.5", "--d", "1",
            "--x", "1", "--k", "10", "--seed", "3", "--trials", "2000",
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert table["thm2_bound"] == pytest.approx(2**-10, rel=1e-4)
        assert table["exact_tail"] == pytest.approx(2**-10, rel=1e-4)
        assert table["mc_wilson_lower"] <= table["exact_tail"] <= 1.0

    def test_custom_law(self, capsys, tmp_path):
        cfg = tmp_path / "law.json"
        cfg.write_text(json.dumps({"values": [1.0, -1.0], "probs": [0.5, 0.5]}))
        code, out, _ = run_cli(
            capsys, "simulate", "--law", str(cfg), "--k", "10",
            "--threshold", "10", "--seed", "1", "--trials", "500",
            "--precision", "12",
        )
        assert code == 0
        header, rows = parse_csv(out)
        table = {r[0]: float(r[1]) for r in rows}
        assert table["exact_tail"] == pytest.approx(2**-10, rel=1e-9)

    def test_infeasible_dp_is_numerical_failure(self, capsys, tmp_path):
        cfg = tmp_path / "law6.json"
        vals = [1.0, 0.5, 0.25, -0.25, -0.5, -1.0]
        cfg.write_text(json.dumps({"values": vals, "probs": [1 / 6.0] * 6}))
        code, _, err = run_cli(
            capsys, "simulate", "--law", str(cfg), "--k", "64",
            "--threshold", "1.0", "--seed", "2",
        )
        assert code == 3
        assert "numerical failure" in err

    def test_determinism_to_file(self, capsys, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (out1, out2):
            code = main(
                [
                    "simulate", "--law", "twopoint", "--eps", "0.1", "--x", "0.5",
                    "--k", "12", "--seed", "77", "--trials", "1500",
                    "--out", str(path),
                ]
            )
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestPrecisionFlag:
    def test_out_of_range(self, capsys):
        code, _, err = run_cli(
            capsys, "exponents", "--gamma", "0.5", "--precision", "22"
        )
        assert code == 2
