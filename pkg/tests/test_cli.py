import csv
import json
import math

import pytest

from photomirror.cli import RunConfig, main, read_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(text.splitlines()))


class TestVisibility:
    def test_curve(self, capsys):
        code, out, _ = run(capsys, "visibility", "--k", "1", "--omega-m", "1", "--periods", "1",
                           "--samples", "512", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "t,visibility,phase,mirror_purity,overlap_re,overlap_im"
        rows = csv_rows(out)
        assert len(rows) == 512
        assert min(float(r["visibility"]) for r in rows) == pytest.approx(math.exp(-2), abs=1e-4)

    def test_uncoupled(self, capsys):
        _, out, _ = run(capsys, "visibility", "--k", "0", "--samples", "16")
        assert all(float(r["visibility"]) == 1 for r in csv_rows(out))

    def test_gamma_in_period_units(self, capsys):
        _, out, _ = run(capsys, "visibility", "--k", "1", "--gamma", "1.0", "--samples", "32")
        assert float(csv_rows(out)[-1]["visibility"]) == pytest.approx(math.exp(-1), abs=1e-9)

    def test_gamma_absolute(self, capsys):
        _, out, _ = run(capsys, "visibility", "--k", "1", "--gamma", "0.5", "--gamma-absolute",
                        "--samples", "32")
        assert float(csv_rows(out)[-1]["visibility"]) == pytest.approx(math.exp(-math.pi), abs=1e-9)

    def test_twelve_significant_digits(self, capsys):
        _, out, _ = run(capsys, "visibility", "--k", "1", "--samples", "3")
        mid = csv_rows(out)[1]["visibility"]
        assert mid == f"{math.exp(-2):.12g}"

    def test_cutoff_exit(self, capsys):
        code, _, err = run(capsys, "visibility", "--k", "2", "--n-max", "10")
        assert code == 3
        assert "n_max" in err

    def test_bad_flag(self, capsys):
        code, _, _ = run(capsys, "visibility", "--k", "banana")
        assert code == 2

    def test_json_output(self, capsys):
        _, out, _ = run(capsys, "visibility", "--samples", "4", "--format", "json")
        doc = json.loads(out)
        assert len(doc["curve"]["visibility"]) == 4


class TestEvolveCheck:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "evolve-check", "--k", "1", "--n-max", "40", "--samples", "64")
        assert code == 0
        assert json.loads(out)["defect"] <= 1e-6

    def test_cutoff(self, capsys):
        code, _, _ = run(capsys, "evolve-check", "--k", "2", "--n-max", "10")
        assert code == 3

    def test_uncoupled(self, capsys):
        code, out, _ = run(capsys, "evolve-check", "--k", "0")
        assert code == 0
        assert json.loads(out)["defect"] <= 1e-12

    def test_tolerance_failure(self, capsys):
        # an impossible tolerance forces the failure path
        code, _, _ = run(capsys, "evolve-check", "--k", "2", "--tol", "-1")
        assert code == 1


class TestCollapse:
    def test_frequencies(self, capsys):
        code, out, _ = run(capsys, "collapse", "--k", "1", "--t-over-tm", "0.5",
                           "--draws", "100000", "--seed", "42")
        assert code == 0
        doc = json.loads(out)
        for f in doc["frequencies"]:
            assert f == pytest.approx(0.5, abs=0.005)
        assert sum(doc["counts"]) == 100000
        assert doc["weights"] == pytest.approx([0.5, 0.5])
        assert doc["chi_square"] >= 0

    def test_interfering(self, capsys):
        code, _, err = run(capsys, "collapse", "--k", "1", "--t-over-tm", "0.01")
        assert code == 4
        assert "overlap" in err

    def test_single_certain_draw(self, capsys):
        code, out, _ = run(capsys, "collapse", "--k", "1", "--draws", "1", "--weights", "1,0")
        assert code == 0
        assert json.loads(out)["counts"] == [1, 0]


class TestPacketCheck:
    def test_alpha(self, capsys):
        code, out, _ = run(capsys, "packet-check", "--alpha", "5", "--threshold", "10")
        assert code == 0
        doc = json.loads(out)
        ratios = {r["observable"]: r["ratio"] for r in doc["ratios"]}
        assert ratios["X"] == pytest.approx(10.0, abs=1e-4)
        assert ratios["P"] == 0
        assert doc["verdict"] is False

    def test_vacuum(self, capsys):
        _, out, _ = run(capsys, "packet-check", "--alpha", "0")
        doc = json.loads(out)
        assert all(r["ratio"] == 0 for r in doc["ratios"])
        assert doc["verdict"] is False

    def test_cat(self, capsys):
        _, out, _ = run(capsys, "packet-check", "--cat", "5")
        doc = json.loads(out)
        assert doc["ratios"][0]["ratio"] < 1e-10
        assert doc["verdict"] is False

    def test_both_quadratures(self, capsys):
        _, out, _ = run(capsys, "packet-check", "--alpha", "5+5j")
        assert json.loads(out)["verdict"] is True

    def test_malformed(self, capsys):
        assert run(capsys, "packet-check", "--alpha", "five")[0] == 2
        assert run(capsys, "packet-check", "--alpha", "1", "--cat", "2")[0] == 2

    def test_csv_table(self, capsys):
        _, out, _ = run(capsys, "packet-check", "--alpha", "5", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "observable,mean,deviation,ratio"
        assert lines[-1].startswith("verdict,false")


class TestDiscriminate:
    def test_relative(self, capsys):
        code, out, _ = run(capsys, "discriminate", "--k", "1.5")
        assert code == 0
        assert json.loads(out)["verdict"] == "RelativeDecoherence"

    def test_absolute(self, capsys):
        code, out, _ = run(capsys, "discriminate", "--k", "1.5", "--gamma", "2")
        assert code == 5
        assert json.loads(out)["revival_visibility"] == pytest.approx(math.exp(-2), abs=1e-9)

    def test_inconclusive(self, capsys):
        code, out, _ = run(capsys, "discriminate", "--k", "1", "--suppression-tol", "0.1")
        assert code == 6
        assert json.loads(out)["verdict"] == "Inconclusive"

    def test_gate(self, capsys):
        assert run(capsys, "discriminate", "--k", "0.5")[0] == 2


class TestConfigAndDeterminism:
    def test_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# defaults\nk = 0.5\nsuppression-tol = 0.1\n")
        # config k=0.5 would fail the gate; the explicit flag wins
        code, out, _ = run(capsys, "discriminate", "--config", str(cfg), "--k", "1")
        assert code == 6
        doc = json.loads(out)
        assert doc["config"]["k"] == 1.0
        assert doc["tolerances"]["suppression_tol"] == 0.1
        assert run(capsys, "discriminate", "--config", str(cfg))[0] == 2

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("warp = 9\n")
        assert run(capsys, "visibility", "--config", str(cfg))[0] == 2
        with pytest.raises(ValueError):
            read_config(str(cfg))

    @pytest.mark.parametrize("argv", [
        ["visibility", "--k", "1.3", "--samples", "64"],
        ["collapse", "--k", "1", "--draws", "5000", "--seed", "3"],
        ["discriminate", "--k", "2", "--gamma", "0.3"],
    ])
    def test_byte_identical_files(self, tmp_path, argv):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        main(argv + ["--output", str(a)])
        main(argv + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()
        assert a.stat().st_size > 0

    def test_json_round_trip(self, capsys):
        _, out, _ = run(capsys, "collapse", "--k", "1.2", "--draws", "100", "--seed", "5")
        doc = json.loads(out)
        config = RunConfig(**doc["config"])
        assert config.command == "collapse"
        assert config.seed == 5 and config.k == 1.2
        for key in ("weights", "counts", "frequencies", "chi_square"):
            assert key in doc
