"""CLI behavior: subcommands, config files, determinism, exit codes."""

import csv
import json

import pytest

from qfp import backend
from qfp.cli import main, parse_length, parse_time


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestUnits:
    def test_lengths(self):
        assert parse_length("10km") == 10_000.0
        assert parse_length("250m") == 250.0
        assert parse_length("123") == 123.0

    def test_times(self):
        assert parse_time("1ns") == 1e-9
        assert parse_time("3us") == 3e-6
        assert parse_time("2.5ms") == 2.5e-3
        assert parse_time("1") == 1.0

    def test_bad_units(self):
        with pytest.raises(ValueError):
            parse_length("10kg")
        with pytest.raises(ValueError):
            parse_time("abc")


class TestRunCommand:
    def test_exact_hadamard_neighbors(self, tmp_path):
        out = tmp_path / "run.csv"
        code = main(["run", "--code", "hadamard", "--n", "4", "--x", "0000",
                     "--y", "0001", "--exact", "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["pN_exact"]) == pytest.approx(0.5, abs=1e-12)
        assert rows[0]["verdict"] == "NotEqual"
        assert rows[0]["x_hex"] == "0" and rows[0]["y_hex"] == "1"
        assert rows[0]["k"] == "" and rows[0]["seed"] == ""

    def test_phase_protocol_all_pairs_average(self, tmp_path):
        out = tmp_path / "phase.csv"
        code = main(["run", "--q", "3", "--phase-protocol", "--all-pairs",
                     "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 9
        for row in rows:
            assert float(row["avg_error"]) == pytest.approx(1 / 6, abs=1e-12)
            x, y = int(row["x"]), int(row["y"])
            expected = 0.0 if x == y else 0.75
            assert float(row["pN_exact"]) == pytest.approx(expected,
                                                           abs=1e-12)

    def test_sampled_deterministic_bytes(self, tmp_path):
        argv = ["run", "--code", "hadamard", "--n", "4", "--x", "0000",
                "--y", "0001", "--k", "10", "--trials", "200",
                "--seed", "42"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_backends_emit_identical_bytes(self, tmp_path):
        if not backend.HAVE_NUMBA:
            pytest.skip("numba not installed")
        argv = ["run", "--code", "hadamard", "--n", "4", "--x", "0000",
                "--y", "1111", "--k", "5", "--trials", "300", "--seed", "7"]
        previous = backend.active()
        try:
            backend.set_backend("numba")
            nb = tmp_path / "numba.csv"
            assert main(argv + ["--out", str(nb)]) == 0
            backend.set_backend("numpy")
            nv = tmp_path / "numpy.csv"
            assert main(argv + ["--out", str(nv)]) == 0
        finally:
            backend.set_backend(previous)
        assert nb.read_bytes() == nv.read_bytes()

    def test_json_mirror_field_names(self, tmp_path):
        out = tmp_path / "run.csv"
        jpath = tmp_path / "run.json"
        assert main(["run", "--code", "identity", "--n", "3", "--x", "101",
                     "--y", "100", "--k", "2", "--trials", "3", "--seed",
                     "1", "--out", str(out), "--json", str(jpath)]) == 0
        payload = json.loads(jpath.read_text())
        assert payload["master_seed"] == 1
        csv_fields = read_csv(out)[0].keys()
        assert set(payload["rows"][0]) == set(csv_fields)

    def test_sampled_epsilon_sets_k(self, tmp_path, capsys):
        assert main(["run", "--code", "hadamard", "--n", "3", "--x", "000",
                     "--y", "001", "--epsilon", "0.01", "--trials", "1",
                     "--seed", "0"]) == 0
        out = capsys.readouterr().out
        assert "k = 7" in out  # (1/2)^7 <= 0.01
        assert "master_seed = 0" in out

    def test_code_file_input(self, tmp_path):
        code_path = tmp_path / "code.txt"
        assert main(["codes", "export", "--kind", "hadamard", "--n", "3",
                     "--out", str(code_path)]) == 0
        out = tmp_path / "run.csv"
        assert main(["run", "--code-file", str(code_path), "--x", "000",
                     "--y", "111", "--exact", "--out", str(out)]) == 0
        assert float(read_csv(out)[0]["pN_exact"]) == pytest.approx(0.5)

    def test_missing_inputs_usage_error(self, capsys):
        assert main(["run", "--code", "hadamard", "--n", "4"]) == 1
        assert "--x" in capsys.readouterr().err


class TestClassicalCommand:
    def test_brute_force_report(self, tmp_path, capsys):
        out = tmp_path / "smp.csv"
        jpath = tmp_path / "smp.json"
        assert main(["classical", "--q", "3", "--alice", "3", "--bob", "2",
                     "--out", str(out), "--json", str(jpath)]) == 0
        row = read_csv(out)[0]
        assert row["min_avg_error"] == "2/9"
        assert row["strategies_searched"] == "13824"
        stdout = capsys.readouterr().out
        assert "alice map" in stdout and "referee table" in stdout
        witness = json.loads(jpath.read_text())["witness"]
        assert len(witness["alice_map"]) == 3
        assert len(witness["referee"]) == 3

    def test_bounds_arithmetic(self, tmp_path):
        out = tmp_path / "bounds.csv"
        assert main(["classical", "--bounds", "--n", "10000000000",
                     "--out", str(out)]) == 0
        row = read_csv(out)[0]
        assert float(row["max_lower"]) == pytest.approx(5000.0)
        assert float(row["shared_bit_lower"]) == pytest.approx(2500.0)

    def test_breakeven_prints_both_sides(self, capsys):
        assert main(["classical", "--breakeven", "--epsilon", "0.01",
                     "--mu", "2"]) == 0
        out = capsys.readouterr().out
        assert "break-even n* = " in out
        assert "at n*:" in out and "at n*/2:" in out
        n_star = int(out.split("break-even n* = ")[1].split()[0])
        assert 10**9 <= n_star <= 10**11

    def test_oversized_search_exits_2(self, capsys):
        assert main(["classical", "--q", "4", "--alice", "4",
                     "--bob", "4"]) == 2
        assert "resource limit" in capsys.readouterr().err


class TestFeasibilityCommand:
    def test_slot_report(self, tmp_path):
        jpath = tmp_path / "feas.json"
        assert main(["feasibility", "--L", "10km", "--period", "1ns",
                     "--index", "1", "--json", str(jpath)]) == 0
        payload = json.loads(jpath.read_text())
        assert payload["d_vacuum"] == 33356
        assert payload["d_nominal_3us"] == 3000
        assert payload["separation_m"] == 10000.0
        assert payload["pulse_period_s"] == 1e-9

    def test_zero_period_is_domain_error(self, capsys):
        assert main(["feasibility", "--period", "0s"]) == 1
        assert "pulse_period" in capsys.readouterr().err

    def test_photon_statistics_echo(self, capsys):
        assert main(["feasibility", "--mu-photon", "0.1"]) == 0
        out = capsys.readouterr().out
        assert "p1 = 0.0904" in out

    def test_noise_run_and_seed_echo(self, tmp_path, capsys):
        out = tmp_path / "noise.csv"
        assert main(["feasibility", "--noise", "--pn", "0.5", "--k", "3",
                     "--trials", "2000", "--seed", "11",
                     "--deterministic-source", "--out", str(out)]) == 0
        assert "master_seed = 11" in capsys.readouterr().out
        row = read_csv(out)[0]
        assert row["parameter"] == "dark_count_prob"
        assert 0.0 <= float(row["false_equal_rate"]) <= 1.0

    def test_dark_sweep_rows(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["feasibility", "--sweep-dark", "0,1e-4,1e-3",
                     "--pn", "0", "--k", "2", "--trials", "500",
                     "--seed", "3", "--slots", "50",
                     "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [float(r["value"]) for r in rows] == [0.0, 1e-4, 1e-3]
        assert float(rows[0]["false_notequal_rate"]) == 0.0


class TestCodesCommand:
    def test_export_show_verify_cycle(self, tmp_path, capsys):
        path = tmp_path / "had.code"
        assert main(["codes", "export", "--kind", "hadamard", "--n", "4",
                     "--out", str(path)]) == 0
        assert main(["codes", "show", "--in", str(path)]) == 0
        assert "n=4 m=16 t=8" in capsys.readouterr().out
        assert main(["codes", "verify", "--in", str(path)]) == 0
        assert "distance verified" in capsys.readouterr().out

    def test_verify_catches_tampered_distance(self, tmp_path, capsys):
        path = tmp_path / "bad.code"
        assert main(["codes", "export", "--kind", "identity", "--n", "3",
                     "--out", str(path)]) == 0
        path.write_text(path.read_text().replace("3 3 1", "3 3 2"))
        assert main(["codes", "verify", "--in", str(path)]) == 1
        assert "MISMATCH" in capsys.readouterr().err

    def test_random_export_is_seeded(self, tmp_path):
        a, b = tmp_path / "a.code", tmp_path / "b.code"
        for path in (a, b):
            assert main(["codes", "export", "--kind", "random", "--n", "4",
                         "--m", "10", "--seed", "9", "--out",
                         str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_action(self, capsys):
        assert main(["codes"]) == 1
        assert "export, import, show, verify" in capsys.readouterr().err

    def test_import_alias_loads_file(self, tmp_path, capsys):
        path = tmp_path / "rep.code"
        assert main(["codes", "export", "--kind", "repetition", "--n", "2",
                     "--r", "3", "--out", str(path)]) == 0
        capsys.readouterr()
        assert main(["codes", "import", "--in", str(path)]) == 0
        assert "n=2 m=6 t=3" in capsys.readouterr().out


class TestConfigFiles:
    def test_config_supplies_defaults_flags_win(self, tmp_path):
        conf = tmp_path / "exp.cfg"
        conf.write_text(
            "[run]\ncode = hadamard\nn = 4\nx = 0000\ny = 0001\n"
            "exact = true\n")
        out1 = tmp_path / "a.csv"
        assert main(["run", "--config", str(conf), "--out",
                     str(out1)]) == 0
        assert float(read_csv(out1)[0]["pN_exact"]) == pytest.approx(0.5)
        # explicit flag overrides the config value
        out2 = tmp_path / "b.csv"
        assert main(["run", "--config", str(conf), "--y", "1111", "--out",
                     str(out2)]) == 0
        assert read_csv(out2)[0]["y_hex"] == "f"
        assert read_csv(out1)[0]["y_hex"] == "1"

    def test_unknown_key_rejected(self, tmp_path, capsys):
        conf = tmp_path / "bad.cfg"
        conf.write_text("[run]\ncode = hadamard\nbogus_key = 3\n")
        assert main(["run", "--config", str(conf)]) == 1
        assert "bogus_key" in capsys.readouterr().err

    def test_bad_value_reported_with_key(self, tmp_path, capsys):
        conf = tmp_path / "bad.cfg"
        conf.write_text("[run]\nn = four\n")
        assert main(["run", "--config", str(conf)]) == 1
        err = capsys.readouterr().err
        assert "n" in err and "four" in err

    def test_syntax_error_reports_line(self, tmp_path, capsys):
        conf = tmp_path / "broken.cfg"
        conf.write_text("[run]\nthis is not a key value pair\n")
        assert main(["run", "--config", str(conf)]) == 1
        assert "line" in capsys.readouterr().err.lower()

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "nope.cfg")]) == 1
        assert "cannot read config" in capsys.readouterr().err

    def test_config_for_feasibility_with_units(self, tmp_path):
        conf = tmp_path / "f.cfg"
        conf.write_text("[feasibility]\nseparation = 10km\nperiod = 1ns\n"
                        "index = 1.0\n")
        jpath = tmp_path / "feas.json"
        assert main(["feasibility", "--config", str(conf), "--json",
                     str(jpath)]) == 0
        assert json.loads(jpath.read_text())["d_vacuum"] == 33356


class TestTopLevel:
    def test_no_command_is_usage_error(self, capsys):
        assert main([]) == 1

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["run", "--nonsense"]) == 1
        assert "nonsense" in capsys.readouterr().err

    def test_unit_equivalence_end_to_end(self, tmp_path):
        j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["feasibility", "--L", "10km", "--period", "1ns",
                     "--index", "1", "--json", str(j1)]) == 0
        assert main(["feasibility", "--L", "10000m", "--period", "1ns",
                     "--index", "1", "--json", str(j2)]) == 0
        assert j1.read_bytes() == j2.read_bytes()
