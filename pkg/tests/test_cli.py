"""Command-line interface: subcommands, config handling, determinism."""
import json

import pytest

from wpcnrelay.cli import (
    ConfigError,
    RunConfig,
    dump_config,
    main,
    parse_config_text,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfig:
    def test_defaults_round_trip(self):
        cfg = RunConfig()
        assert parse_config_text(dump_config(cfg)) == cfg

    def test_overridden_round_trip(self):
        cfg = parse_config_text("d1 = 7.25\nrb = 5e3\nschemes = no_coop\nseed = 9")
        assert parse_config_text(dump_config(cfg)) == cfg
        assert cfg.d1 == 7.25
        assert cfg.schemes == ("no_coop",)

    def test_comments_and_blanks(self):
        cfg = parse_config_text("# comment\n\nd2 = 4.0   # trailing\n")
        assert cfg.d2 == 4.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="betaa"):
            parse_config_text("betaa = 0.5")

    def test_bad_value_names_field(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_config_text("beta = 1.5").system_params()

    def test_sweep_bounds_validated(self):
        with pytest.raises(ConfigError, match="sweep_steps"):
            parse_config_text("sweep_steps = 1")

    def test_bad_scheme_rejected(self):
        with pytest.raises(ConfigError, match="schemes"):
            parse_config_text("schemes = warp_drive")


class TestSolveCommand:
    def test_plain_output(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--scheme", "no_coop")
        assert code == 0
        assert "scheme no_coop" in out
        assert "objective" in out

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--scheme", "no_coop", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["solutions"][0]["scheme"] == "no_coop"
        assert payload["solutions"][0]["status"] == "optimal"

    def test_dead_network_config(self, capsys, tmp_path):
        cfg = tmp_path / "dead.cfg"
        cfg.write_text("mu = 0.0\nd1 = 100.0\nd2 = 3.0\np1 = 1e-12\n")
        code, out, _ = run_cli(
            capsys, "solve", "--config", str(cfg), "--scheme", "no_coop", "--json"
        )
        assert code == 0
        assert json.loads(out)["solutions"][0]["objective"] < 1e-6

    def test_malformed_config_exit_code(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("beta = 1.5\n")
        code, _, err = run_cli(capsys, "solve", "--config", str(cfg))
        assert code == 2
        assert "beta" in err

    def test_dump_config_round_trip(self, capsys, tmp_path):
        dump = tmp_path / "effective.cfg"
        code, _, _ = run_cli(
            capsys, "solve", "--scheme", "no_coop", "--seed", "77",
            "--dump-config", str(dump),
        )
        assert code == 0
        cfg = parse_config_text(dump.read_text())
        assert cfg.seed == 77
        assert cfg.schemes == ("no_coop",)


class TestSweepCommand:
    def test_row_count_and_determinism(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("sweep_steps = 2\nsweep_start = 6\nsweep_stop = 10\n")
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        for out in (out_a, out_b):
            code, _, _ = run_cli(
                capsys, "sweep", "--config", str(cfg), "--out", str(out)
            )
            assert code == 0
        text = out_a.read_text()
        lines = text.strip().split("\n")
        assert lines[0].startswith("sweep_param,value,scheme,objective")
        assert len(lines) == 1 + 2 * 3  # header + 2 values x 3 schemes
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_rows_sorted_by_value_then_scheme(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("sweep_steps = 3\nsweep_start = 6\nsweep_stop = 8\n")
        out = tmp_path / "s.csv"
        run_cli(capsys, "sweep", "--config", str(cfg), "--out", str(out))
        rows = [l.split(",") for l in out.read_text().strip().split("\n")[1:]]
        keys = [(float(r[1]), r[2]) for r in rows]
        assert keys == sorted(keys)

    def test_nsamp_sweep_integral(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(
            "sweep_param = nsamp\nsweep_start = 10\nsweep_stop = 1000\n"
            "sweep_steps = 2\nschemes = ab_coop\n"
        )
        out = tmp_path / "n.csv"
        code, _, _ = run_cli(capsys, "sweep", "--config", str(cfg), "--out", str(out))
        assert code == 0
        rows = out.read_text().strip().split("\n")[1:]
        assert [r.split(",")[1] for r in rows] == ["10", "1000"]


class TestCompareCommand:
    def test_ties_without_backscatter(self, capsys, tmp_path):
        cfg = tmp_path / "cmp.cfg"
        cfg.write_text("mu = 0.0\nsweep_steps = 3\nsweep_start = 6\nsweep_stop = 8\n")
        code, out, _ = run_cli(capsys, "compare", "--config", str(cfg), "--json")
        assert code == 0
        payload = json.loads(out)
        for entry in payload.values():
            assert entry["crossover"] == "none (schemes tie)"

    def test_insufficient_points(self, capsys, tmp_path):
        cfg = tmp_path / "cmp.cfg"
        cfg.write_text("sweep_steps = 2\nsweep_start = 9\nsweep_stop = 9\n")
        code, out, _ = run_cli(capsys, "compare", "--config", str(cfg), "--json")
        assert code == 0
        payload = json.loads(out)
        for entry in payload.values():
            assert entry["crossover"] == "insufficient points"

    def test_advantage_is_nonnegative(self, capsys, tmp_path):
        """Backscatter enlarges the feasible set: its scheme never loses."""
        cfg = tmp_path / "cmp.cfg"
        cfg.write_text("sweep_steps = 3\nsweep_start = 6\nsweep_stop = 10\n")
        code, out, _ = run_cli(capsys, "compare", "--config", str(cfg), "--json")
        assert code == 0
        payload = json.loads(out)
        for entry in payload.values():
            assert entry["advantage_first"] >= -1e-9
            assert entry["advantage_last"] >= -1e-9
            assert entry["crossover"] in ("none", "none (schemes tie)")


class TestBerCommand:
    def test_csv_shape_and_determinism(self, capsys, tmp_path):
        cfg = tmp_path / "ber.cfg"
        cfg.write_text("ber_n_list = 10,100\nmc_bits = 5000\n")
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        for out in (out_a, out_b):
            code, _, _ = run_cli(
                capsys, "ber", "--config", str(cfg), "--out", str(out), "--seed", "5"
            )
            assert code == 0
        lines = out_a.read_text().strip().split("\n")
        assert lines[0] == "N,analytic_ber,empirical_ber,ci95"
        assert len(lines) == 3
        assert out_a.read_bytes() == out_b.read_bytes()


class TestValidateCommand:
    def test_default_passes(self, capsys, tmp_path):
        cfg = tmp_path / "val.cfg"
        cfg.write_text("mc_bits = 40000\ndelta = 0.05\n")
        code, out, _ = run_cli(capsys, "validate", "--config", str(cfg))
        assert code == 0
        assert "overall: PASS" in out

    def test_zero_tolerance_fails(self, capsys, tmp_path):
        """Negative control: an impossible tolerance must trip validation."""
        cfg = tmp_path / "val.cfg"
        cfg.write_text("mc_bits = 40000\ndelta = 0.05\noracle_rel_tol = 0.0\n")
        code, out, _ = run_cli(capsys, "validate", "--config", str(cfg))
        assert code == 1
        assert "FAIL" in out

    def test_seed_independent_verdict(self, capsys, tmp_path):
        cfg = tmp_path / "val.cfg"
        cfg.write_text("mc_bits = 40000\ndelta = 0.05\n")
        codes = []
        for seed in ("1", "2"):
            code, _, _ = run_cli(
                capsys, "validate", "--config", str(cfg), "--seed", seed
            )
            codes.append(code)
        assert codes == [0, 0]
