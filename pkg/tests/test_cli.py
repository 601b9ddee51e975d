import json

import numpy as np
import pytest

from erasurekit.cli import main
from erasurekit.serialize import (
    channel_from_dict,
    channel_to_dict,
    decode_matrix,
    encode_matrix,
    ensemble_from_dict,
    measurement_from_dict,
)
from erasurekit import hadamard_measurement, preset, random_ensemble


class TestSerialization:
    def test_matrix_round_trip(self):
        m = np.array([[1 + 2j, 0.25], [-1j, 3.5 - 0.125j]])
        assert np.array_equal(decode_matrix(encode_matrix(m)), m)

    def test_channel_round_trip(self):
        ch = preset("amplitude_damping", gamma=0.3)
        again = channel_from_dict(channel_to_dict(ch))
        assert again.dim == 2
        for a, b in zip(again.operators, ch.operators):
            assert np.array_equal(a, b)

    def test_channel_preset_form(self):
        ch = channel_from_dict({"preset": "dephasing", "params": {"p": 0.5}})
        assert ch.kraus_count == 2

    def test_ensemble_and_measurement_files(self):
        ens = random_ensemble(np.eye(2) / 2, 3, 1)
        again = ensemble_from_dict({"members": [encode_matrix(m) for m in ens.members]})
        assert again.size == 3
        meas = measurement_from_dict({"mixing": encode_matrix(hadamard_measurement().mixing)})
        assert meas.outcomes == 2

    def test_float17_round_trips(self):
        from erasurekit.serialize import fmt17

        rng = np.random.default_rng(55)
        for x in rng.normal(size=200) * 10.0 ** rng.integers(-12, 12, size=200):
            assert float(fmt17(x)) == x


class TestAnalyze:
    def test_perfect_erasure_configuration(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(
            [
                "analyze",
                "--preset",
                "dephasing",
                "--state",
                "mixed",
                "--mixing",
                "hadamard",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["direct"]["f_ea"] == pytest.approx(1.0, abs=1e-9)
        assert payload["direct"]["mutual_info"] <= 1e-10
        assert payload["config"]["seed"] == 0
        assert payload["config"]["mixing"] == "hadamard"

    def test_identity_channel(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["analyze", "--preset", "identity", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["direct"]["f_e"] == pytest.approx(1.0, abs=1e-9)
        assert payload["direct"]["f_ea"] == pytest.approx(1.0, abs=1e-9)

    def test_broken_channel_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        eye = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        scaled = [[[0.3162277660168379, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        bad.write_text(json.dumps({"dim": 2, "kraus": [eye, scaled]}))
        code = main(["analyze", "--channel", str(bad), "--out", str(tmp_path / "r.json")])
        assert code == 1
        assert "NotTracePreserving" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["analyze", "--channel", str(bad), "--out", str(tmp_path / "r.json")])
        assert code == 1

    @pytest.mark.parametrize(
        "payload",
        [
            {},
            {"kraus": []},
            {"kraus": [[["oops", 0.0]]]},
            {"kraus": [[[1.0]]]},
            {"kraus": [[[1.0, 0.0], [0.0, 0.0]]], "dim": 5},
            {"preset": "no_such_thing"},
            {"preset": "dephasing", "params": {"p": 7}},
        ],
    )
    def test_malformed_channel_payloads(self, tmp_path, capsys, payload):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(payload))
        code = main(["analyze", "--channel", str(bad), "--out", str(tmp_path / "r.json")])
        assert code == 1
        assert capsys.readouterr().err.startswith("error: ")

    def test_missing_file(self, tmp_path, capsys):
        code = main(
            ["analyze", "--channel", str(tmp_path / "nope.json"), "--out", str(tmp_path / "r.json")]
        )
        assert code == 1

    def test_channel_and_preset_exclusive(self, tmp_path, capsys):
        code = main(["analyze", "--preset", "identity", "--channel", "x.json"])
        assert code == 1

    def test_custom_state_file(self, tmp_path):
        state = tmp_path / "state.json"
        state.write_text(
            json.dumps({"matrix": [[[0.75, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.25, 0.0]]]})
        )
        out = tmp_path / "report.json"
        code = main(
            ["analyze", "--preset", "amplitude_damping", "--param", "0.5",
             "--state", str(state), "--out", str(out)]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert 0 <= payload["direct"]["f_ea"] <= 1 + 1e-9

    def test_ensemble_file(self, tmp_path):
        from erasurekit.serialize import encode_matrix

        ens = random_ensemble(np.eye(2) / 2, 3, 5)
        path = tmp_path / "ens.json"
        path.write_text(json.dumps({"members": [encode_matrix(m) for m in ens.members]}))
        out = tmp_path / "report.json"
        code = main(
            ["analyze", "--preset", "eraser_cnot", "--ensemble", str(path), "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text())["config"]["ensemble"] == {"file": str(path)}

    def test_mismatched_ensemble(self, tmp_path, capsys):
        from erasurekit.serialize import encode_matrix

        ens = random_ensemble(np.diag([0.75, 0.25]).astype(complex), 3, 5)
        path = tmp_path / "ens.json"
        path.write_text(json.dumps({"members": [encode_matrix(m) for m in ens.members]}))
        code = main(
            ["analyze", "--preset", "eraser_cnot", "--ensemble", str(path),
             "--out", str(tmp_path / "r.json")]
        )
        assert code == 1
        assert "EnsembleMismatch" in capsys.readouterr().err

    def test_analyze_byte_identical(self, tmp_path):
        out = tmp_path / "report.json"
        args = ["analyze", "--preset", "amplitude_damping", "--param", "0.3",
                "--seed", "9", "--out", str(out)]
        assert main(args) == 0
        first = out.read_bytes()
        assert main(args) == 0
        assert out.read_bytes() == first


class TestScenario:
    def test_eraser_curve_csv(self, tmp_path):
        out = tmp_path / "curve.csv"
        code = main(["scenario", "--name", "eraser", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "theta,f_ea,mutual_info"
        assert len(lines) == 2 + 33
        for line in lines[2:]:
            theta, f_ea, info = (float(x) for x in line.split(","))
            assert f_ea == pytest.approx((1 + abs(np.sin(2 * theta))) / 2, abs=1e-10)

    def test_teleport_curve_csv(self, tmp_path):
        out = tmp_path / "curve.csv"
        code = main(
            ["scenario", "--name", "teleport", "--grid", "5", "--restarts", "2", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "lambda0,f_ea_canonical,f_ea_optimized"
        values = [tuple(float(x) for x in line.split(",")) for line in lines[2:]]
        for lam0, canonical, optimized in values:
            assert canonical == pytest.approx(
                (1 + 2 * np.sqrt(lam0 * (1 - lam0))) / 2, abs=1e-10
            )
            assert optimized >= canonical - 1e-9

    def test_tiny_grid(self, tmp_path, capsys):
        code = main(["scenario", "--name", "eraser", "--grid", "1", "--out", "x.csv"])
        assert code == 1


class TestVerify:
    def test_short_sweep_passes(self, tmp_path, capsys):
        out = tmp_path / "verify.csv"
        code = main(["verify", "--trials", "6", "--seed", "1", "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["pass"] is True
        assert summary["worst_slack"] >= -1e-9
        lines = out.read_text().splitlines()
        assert len(lines) == 2 + 6

    def test_zero_trials(self, capsys):
        code = main(["verify", "--trials", "0"])
        assert code == 1
        assert "trials must be >= 1" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["verify", "--trials", "4", "--seed", "7", "--out", str(a)]) == 0
        assert main(["verify", "--trials", "4", "--seed", "7", "--out", str(b)]) == 0
        content_a, content_b = a.read_bytes(), b.read_bytes()
        assert content_a.replace(str(a).encode(), b"OUT") == content_b.replace(
            str(b).encode(), b"OUT"
        )

    def test_full_sweep(self, tmp_path, capsys):
        out = tmp_path / "verify.csv"
        code = main(["verify", "--trials", "1000", "--seed", "1", "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["worst_slack"] >= -1e-9
        assert len(out.read_text().splitlines()) == 2 + 1000

    def test_thread_cap_preserves_output(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["verify", "--trials", "8", "--seed", "3", "--out", str(a)]) == 0
        monkeypatch.setenv("ERASUREKIT_THREADS", "4")
        assert main(["verify", "--trials", "8", "--seed", "3", "--out", str(b)]) == 0
        content_a, content_b = a.read_bytes(), b.read_bytes()
        assert content_a.replace(str(a).encode(), b"OUT") == content_b.replace(
            str(b).encode(), b"OUT"
        )


class TestOptimize:
    def test_dephasing_preset(self, tmp_path):
        out = tmp_path / "opt.json"
        code = main(["optimize", "--preset", "dephasing", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["best_value"] >= 1 - 1e-6
        assert payload["random_unitary"]["is_random_unitary"] is True

    def test_amplitude_damping_with_oracle(self, tmp_path):
        out = tmp_path / "opt.json"
        code = main(
            ["optimize", "--preset", "amplitude_damping", "--param", "0.5",
             "--oracle", "2000", "--out", str(out)]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["best_value"] >= payload["result"]["oracle_value"] - 1e-3
        assert payload["random_unitary"]["is_random_unitary"] is False

    def test_identity_channel(self, tmp_path):
        out = tmp_path / "opt.json"
        code = main(["optimize", "--preset", "identity", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["best_value"] == pytest.approx(1.0, abs=1e-12)
        verdict = payload["random_unitary"]
        assert verdict["is_random_unitary"] is True
        assert len(verdict["witness"]) == 1
        assert verdict["witness"][0]["weight"] == pytest.approx(1.0, abs=1e-12)

    def test_trace_csv(self, tmp_path):
        out = tmp_path / "opt.json"
        trace = tmp_path / "trace.csv"
        code = main(
            ["optimize", "--preset", "eraser_cnot", "--restarts", "2",
             "--out", str(out), "--trace-csv", str(trace)]
        )
        assert code == 0
        lines = trace.read_text().splitlines()
        assert lines[0] == "restart,iteration,value"
        assert len(lines) > 2

    def test_optimize_byte_identical(self, tmp_path):
        out = tmp_path / "opt.json"
        args = ["optimize", "--preset", "random", "--dim", "2", "--kraus", "3",
                "--restarts", "4", "--seed", "11", "--out", str(out)]
        assert main(args) == 0
        first = out.read_bytes()
        assert main(args) == 0
        assert out.read_bytes() == first
