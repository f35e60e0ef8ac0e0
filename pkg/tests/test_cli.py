"""Command-line interface: outputs, manifests, exit codes, determinism."""

import json

import numpy as np
import pytest

import eitlab as el
from eitlab.cli import main


def read_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def spectrum_from_csv(path) -> el.Spectrum:
    data = read_csv(path)
    block = np.column_stack([
        data["re_rho_ba"] + 1j * data["im_rho_ba"],
        data["re_rho_ca"] + 1j * data["im_rho_ca"],
        data["re_rho_da"] + 1j * data["im_rho_da"],
        data["re_rho_ea"] + 1j * data["im_rho_ea"],
    ])
    return el.Spectrum(delta_p=data["delta_p"], coherences=block)


class TestSpectrumCommand:
    def test_fig4a_reproduction(self, tmp_path):
        out = tmp_path / "a"
        assert main(["spectrum", "--config", "fig4a", "--out", str(out)]) == 0
        spec = spectrum_from_csv(out / "spectrum.csv")
        assert el.count_peaks(spec) == 4
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["subcommand"] == "spectrum"
        assert manifest["grid"]["points"] == 2001
        assert "spectrum.csv" in manifest["outputs"]

    def test_fig4c_reproduction(self, tmp_path):
        out = tmp_path / "c"
        assert main(["spectrum", "--config", "fig4c", "--out", str(out)]) == 0
        assert el.count_peaks(spectrum_from_csv(out / "spectrum.csv")) == 2

    def test_malformed_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken", encoding="utf-8")
        assert main(["spectrum", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_preset_exits_2(self, tmp_path):
        assert main(["spectrum", "--config", "nonexistent",
                     "--out", str(tmp_path / "o")]) == 2

    def test_grid_flags(self, tmp_path):
        out = tmp_path / "g"
        assert main(["spectrum", "--config", "fig4a", "--out", str(out),
                     "--grid-min", "-1", "--grid-max", "1", "--grid-points", "11"]) == 0
        data = read_csv(out / "spectrum.csv")
        assert data["delta_p"].size == 11
        assert data["delta_p"][0] == -1.0

    def test_domain_error_exits_3(self, tmp_path):
        cfg = {
            "controls": [1.0, 1.0, 0.0, 0.0],
            "probe": 0.01,
            "detunings": {"p": 0.0, "two": 0.0, "three": 0.0},
            "decays": {"b": 1.0, "e": 1.0},
            "eta": 1.0,
        }
        path = tmp_path / "no_upper.json"
        path.write_text(json.dumps(cfg), encoding="utf-8")
        assert main(["eigen", "--config", str(path), "--out", str(tmp_path / "o")]) == 3

    def test_numerical_failure_exits_4(self, tmp_path):
        # regime B on full resonance: the response denominator is exactly
        # singular at the carrier, so the dispersion expansion must refuse
        assert main(["dispersion", "--config", "fig4b",
                     "--out", str(tmp_path / "o")]) == 4


class TestEigenCommand:
    def test_closed_form_regimes_and_shapes(self, tmp_path, fig4a):
        out = tmp_path / "e"
        assert main(["eigen", "--config", "fig4a", "--out", str(out)]) == 0
        payload = json.loads((out / "eigen.json").read_text())
        assert payload["situation"] == "A"
        assert payload["method"] == "closed_form_a"
        system = el.eigensystem_a(fig4a)
        assert np.allclose(payload["eigenvalues"], system.eigenvalues)
        vec0 = np.array([re + 1j * im for re, im in payload["eigenvectors"][0]])
        assert np.linalg.norm(vec0) == pytest.approx(1.0, abs=1e-12)

    def test_numeric_fallback_for_regime_c(self, tmp_path):
        out = tmp_path / "e"
        assert main(["eigen", "--config", "fig4c", "--out", str(out)]) == 0
        payload = json.loads((out / "eigen.json").read_text())
        assert payload["situation"] == "C"
        assert payload["method"] == "numeric"


class TestDispersionSolitonCommands:
    def test_reference_group_velocity(self, tmp_path):
        out = tmp_path / "d"
        assert main(["dispersion", "--config", "cs_soliton", "--out", str(out)]) == 0
        payload = json.loads((out / "dispersion.json").read_text())
        assert payload["v_g_over_c"] == pytest.approx(7e-3, rel=0.15)
        assert payload["kappa0"][1] > 0  # absorbing, not amplifying

    def test_soliton_report(self, tmp_path):
        out = tmp_path / "s"
        assert main(["soliton", "--config", "cs_soliton", "--out", str(out)]) == 0
        payload = json.loads((out / "soliton.json").read_text())
        # exact coefficients of this parameter set sit in the bright regime
        assert payload["soliton_type"] == "bright"
        assert payload["amplitude_width_product"] == pytest.approx(
            np.sqrt(2.0) * payload["reference_amplitude_width_product"], rel=1e-12)


class TestPropagateCommand:
    def test_single_final_snapshot_by_default(self, tmp_path):
        out = tmp_path / "p"
        assert main(["propagate", "--config", "cs_soliton", "--mode", "ideal",
                     "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["checkpoints"] == [1.0]
        names = manifest["outputs"]
        assert "snapshot_001.csv" in names and "waterfall.csv" in names
        assert "snapshot_002.csv" not in names
        header = (out / "snapshot_001.csv").read_text().splitlines()[0]
        assert header == "tau_ret,abs,re,im"

    def test_checkpoints_and_waterfall(self, tmp_path):
        out = tmp_path / "p2"
        assert main(["propagate", "--config", "cs_soliton", "--mode", "ideal",
                     "--checkpoints", "0.5,1.0", "--out", str(out)]) == 0
        waterfall = (out / "waterfall.csv").read_text().splitlines()
        zetas = {line.split(",")[0] for line in waterfall[1:]}
        assert zetas == {"0.5", "1"}

    def test_linear_mode_snapshot_header(self, tmp_path):
        out = tmp_path / "p3"
        assert main(["propagate", "--config", "cs_soliton", "--mode", "linear",
                     "--checkpoints", "0.2", "--out", str(out)]) == 0
        header = (out / "snapshot_001.csv").read_text().splitlines()[0]
        assert header == "t,re,im,abs"

    def test_bad_checkpoints_exit_2(self, tmp_path):
        assert main(["propagate", "--config", "cs_soliton", "--mode", "ideal",
                     "--checkpoints", "1.0,0.5", "--out", str(tmp_path / "x")]) == 2


class TestScanCommand:
    def test_phase_sweep_regime_transition(self, tmp_path):
        out = tmp_path / "scan"
        assert main(["scan", "--config", "fig4b", "--sweep", "phi",
                     "--sweep-start", "0", "--sweep-stop", str(np.pi),
                     "--sweep-points", "3", "--out", str(out)]) == 0
        lines = (out / "scan.csv").read_text().splitlines()
        rows = [line.split(",") for line in lines[1:]]
        situations = [r[2] for r in rows]
        assert situations[0] == "B" and situations[-1] == "C"
        first_absorption = float(rows[0][3])
        last_absorption = float(rows[-1][3])
        assert first_absorption > 0.01
        assert abs(last_absorption) < 1e-12

    def test_empty_range_header_only(self, tmp_path):
        out = tmp_path / "scan0"
        assert main(["scan", "--config", "fig4b", "--sweep", "phi",
                     "--sweep-start", "0", "--sweep-stop", "1",
                     "--sweep-points", "0", "--out", str(out)]) == 0
        lines = (out / "scan.csv").read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith("field,value,situation")

    def test_degenerate_rows_do_not_crash(self, tmp_path):
        cfg = {
            "controls": [0.5, 0.0, 0.7, 0.7],
            "probe": 0.01,
            "detunings": {"p": 0.0, "two": 0.0, "three": 0.0},
            "decays": {"b": 1.0, "e": 1.0},
            "eta": 1.0,
        }
        path = tmp_path / "sweepable.json"
        path.write_text(json.dumps(cfg), encoding="utf-8")
        out = tmp_path / "scan_deg"
        assert main(["scan", "--config", str(path), "--sweep", "controls[0].amplitude",
                     "--sweep-start", "0", "--sweep-stop", "0.5",
                     "--sweep-points", "3", "--out", str(out)]) == 0
        lines = (out / "scan.csv").read_text().splitlines()
        assert len(lines) == 4
        assert lines[1].split(",")[2] == "Degenerate"

    def test_unknown_field_exits_2(self, tmp_path):
        assert main(["scan", "--config", "fig4b", "--sweep", "bogus.path",
                     "--sweep-start", "0", "--sweep-stop", "1",
                     "--sweep-points", "2", "--out", str(tmp_path / "x")]) == 2


class TestDeterminism:
    def test_identical_runs_are_byte_identical(self, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert main(["spectrum", "--config", "fig4a", "--out", str(out),
                         "--grid-points", "201", "--seed", "7"]) == 0
            outs.append(out)
        a, b = outs
        assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
        # manifests differ only in the output directory path
        ma = json.loads((a / "manifest.json").read_text())
        mb = json.loads((b / "manifest.json").read_text())
        ma.pop("output_dir"), mb.pop("output_dir")
        assert ma == mb

    def test_thread_cap_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EITLAB_THREADS", "1")
        out = tmp_path / "serial"
        assert main(["spectrum", "--config", "fig4a", "--out", str(out),
                     "--grid-points", "101"]) == 0
        monkeypatch.setenv("EITLAB_THREADS", "4")
        out2 = tmp_path / "parallel"
        assert main(["spectrum", "--config", "fig4a", "--out", str(out2),
                     "--grid-points", "101"]) == 0
        assert (out / "spectrum.csv").read_bytes() == (out2 / "spectrum.csv").read_bytes()
