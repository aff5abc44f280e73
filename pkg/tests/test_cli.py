import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from opaherald import cli, verify
from opaherald.fock import Truncation, coherent_state
from opaherald.heralded import gain_displaced_number, gain_orthogonal_photon_added


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse(text):
    """Split CLI output into (comment dict, header, float rows)."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(" = ")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


class TestState:
    def test_default_shows_fock_node(self, capsys):
        code, out, _ = run(capsys, "state")
        assert code == 0
        meta, header, rows = parse(out)
        assert header == ["n", "re_c", "im_c", "abs2_c", "re_ref", "im_ref", "abs2_ref"]
        assert float(meta["gain"]) == pytest.approx(1 / math.sqrt(0.9), rel=1e-15)
        assert rows[9, 0] == 9 and rows[9, 3] < 1e-14

    def test_unity_gain_is_coherent(self, capsys):
        _, out, _ = run(capsys, "state", "--alpha-re", "1.5", "--alpha-im", "-0.5", "--gain", "1")
        meta, _, rows = parse(out)
        ref = coherent_state(1.5 - 0.5j, Truncation(int(meta["dim"])))
        np.testing.assert_allclose(rows[:, 1] + 1j * rows[:, 2], ref.amps, atol=1e-15)
        np.testing.assert_allclose(rows[:, 1:4], rows[:, 4:7], atol=1e-15)

    def test_round_trip_is_lossless(self, capsys):
        _, out, _ = run(capsys, "state", "--alpha-re", "2", "--gain", "1.3")
        _, _, rows = parse(out)
        _, out2, _ = run(capsys, "state", "--alpha-re", "2", "--gain", "1.3")
        assert out == out2
        for value in rows[:, 1]:
            assert cli.fmt(value) in out

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "state.csv"
        code, out, _ = run(capsys, "state", "--gain", "1.2", "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_text().startswith("# opaherald state\n")


class TestSweep:
    def test_special_rows(self, capsys):
        code, out, _ = run(capsys, "sweep", "--gain-steps", "5")
        assert code == 0
        meta, header, rows = parse(out)
        assert header[:5] == ["g", "p_success", "p_coh", "p_pacs", "p_disp"]
        col = {name: i for i, name in enumerate(header)}
        g = rows[:, col["g"]]
        assert len(g) == 7
        i0 = int(np.argmin(abs(g - gain_displaced_number(2.0))))
        i1 = int(np.argmin(abs(g - gain_orthogonal_photon_added(2.0))))
        assert rows[i0, col["p_coh"]] < 1e-12
        assert rows[i0, col["p_disp"]] > 1 - 1e-10
        assert rows[i1, col["p_pacs"]] < 1e-12
        assert float(meta["g0"]) == g[i0]

    def test_unity_gain_row(self, capsys):
        _, out, _ = run(capsys, "sweep", "--gain-steps", "3", "--no-special")
        _, header, rows = parse(out)
        assert rows.shape[0] == 3
        assert rows[0, 0] == 1.0 and rows[0, 1] == 1.0
        assert math.isinf(rows[0, header.index("n0")])

    def test_log_spacing(self, capsys):
        _, out, _ = run(capsys, "sweep", "--gain-start", "1", "--gain-stop", "100", "--gain-steps", "3",
                        "--gain-log", "--no-special")
        _, _, rows = parse(out)
        np.testing.assert_allclose(rows[:, 0], [1, 10, 100])


class TestQGrid:
    def test_default_panels(self, capsys):
        code, out, _ = run(capsys, "qgrid", "--nodes", "61", "--half-width", "6")
        assert code == 0
        meta, header, rows = parse(out)
        assert header == ["g", "x", "y", "Q"]
        gains = np.unique(rows[:, 0])
        assert len(gains) == 4
        assert rows.shape[0] == 4 * 61 * 61
        assert rows[:, 3].min() >= 0 and rows[:, 3].max() <= 1 / math.pi + 1e-12

        first = rows[rows[:, 0] == 1.0]
        peak = first[np.argmax(first[:, 3])]
        assert (peak[1], peak[2]) == pytest.approx((2.0, 0.0), abs=1e-12)
        assert peak[3] == pytest.approx(1 / math.pi, rel=1e-12)

        g0 = gain_displaced_number(2.0)
        key = next(k for k in meta if k.startswith(f"q-zero g={cli.fmt(g0)}"))
        refined = key.split("refined ")[1].split()
        assert float(refined[0]) == pytest.approx(math.sqrt(3), abs=1e-6)
        assert float(refined[2].removeprefix("Q=").rstrip(";")) < 1e-12

    def test_explicit_gains(self, capsys):
        _, out, _ = run(capsys, "qgrid", "--gains", "1.5", "--nodes", "5")
        _, _, rows = parse(out)
        assert set(rows[:, 0]) == {1.5}


class TestFidelity:
    def test_columns(self, capsys):
        code, out, _ = run(capsys, "fidelity", "--d-steps", "6", "--losses", "0,0.2")
        assert code == 0
        _, header, rows = parse(out)
        assert header == ["d", "l", "F_lower", "F_full"]
        assert rows.shape == (12, 4)
        assert rows[0, 2] == pytest.approx(1.0, abs=1e-12)
        zero_d = rows[rows[:, 0] == 0.0]
        np.testing.assert_allclose(zero_d[:, 2], 1 - zero_d[:, 1], atol=1e-12)
        for l in (0.0, 0.2):
            f = rows[rows[:, 1] == l, 2]
            assert np.all(np.diff(f) <= 1e-12)
        assert np.all(rows[:, 3] >= rows[:, 2])


class TestConfig:
    def test_file_matches_flags(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sweep setup\nalpha_re = 1.5\ngain-steps = 4\nno-special = true\n")
        _, from_file, _ = run(capsys, "sweep", "--config", str(cfg))
        _, from_flags, _ = run(capsys, "sweep", "--alpha-re", "1.5", "--gain-steps", "4", "--no-special")
        assert from_file == from_flags

    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("gain = 1.5\n")
        _, out, _ = run(capsys, "state", "--config", str(cfg), "--gain", "1.2")
        meta, _, _ = parse(out)
        assert float(meta["gain"]) == 1.2

    @pytest.mark.parametrize("text", ["colour = blue\n", "just words\n", "no-special = maybe\n"])
    def test_bad_file(self, capsys, tmp_path, text):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(text)
        code, _, err = run(capsys, "sweep", "--config", str(cfg))
        assert code == cli.EXIT_CONFIG and "error" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "state", "--config", str(tmp_path / "nope.cfg"))
        assert code == cli.EXIT_CONFIG


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ("sweep", "--gain-start", "0.5"),
            ("sweep", "--gain-steps", "0"),
            ("state", "--alpha-re", "0.5"),
            ("state", "--gain", "0.9"),
            ("fidelity", "--losses", "0.2,x"),
            ("fidelity", "--losses", "1.5"),
            ("qgrid", "--nodes", "1"),
            ("state", "--alpha-re", "nan"),
            ("state", "--dim", "1"),
            ("bogus",),
            ("state", "--gain"),
        ],
    )
    def test_config_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == cli.EXIT_CONFIG

    def test_truncation_failure(self, capsys):
        code, _, err = run(capsys, "state", "--dim", "10")
        assert code == cli.EXIT_NUMERICAL
        assert "numerical failure" in err

    def test_verify_reports_failures(self, capsys, monkeypatch):
        fake = (verify.CheckResult("1", "ok", True, "fine"), verify.CheckResult("2", "bad", False, "off"))
        monkeypatch.setattr(verify, "run_checks", lambda: list(fake))
        code, out, _ = run(capsys, "verify")
        assert code == cli.EXIT_NUMERICAL
        assert "[PASS]" in out and "[FAIL]" in out and "1/2 checks passed" in out

    def test_verify_all_pass(self, capsys, monkeypatch):
        monkeypatch.setattr(verify, "run_checks", lambda: [verify.CheckResult("1", "ok", True, "fine")])
        assert run(capsys, "verify")[0] == cli.EXIT_OK


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "opaherald", "sweep", "--gain-steps", "2", "--no-special"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("# opaherald sweep")
