"""Tests for config parsing, the evaluation cache, record serialization,
output emission and the command line."""

import json
import time

import numpy as np
import pytest

from zladder import (ConfigError, DEFAULTS, ExperimentConfig, build_ladder,
                     parse_config, run_metamorphosis, serialize_config)
from zladder.cache import EvalCache
from zladder.cli import main as cli_main
from zladder.runner import (SUMMARY_HEADER, emit_outputs, record_from_dict,
                            record_to_dict, run_one, run_suite)


class TestParseConfig:
    def test_empty_document_gives_defaults(self):
        config = parse_config("")
        assert config.t_base == 1e5 and config.theta == 1.0
        assert config.k == 2 and config.sigma == 1.5 and config.epsilon == 0.1

    def test_comments_and_blanks_ignored(self):
        config = parse_config("# heading\n\nt_base = 2e4\n")
        assert config.t_base == 2e4

    def test_theta_bound_violation(self):
        with pytest.raises(ConfigError, match="theta"):
            parse_config("theta = 1.5")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="line 1.*unknown key"):
            parse_config("tbase = 1e5")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("k = 1\nk = 2")

    def test_bad_value_carries_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("k = 2\nsigma = wide")

    def test_round_trip_idempotent(self):
        config = parse_config("t_base = 12345.5\nk = 3\ncache_path = /tmp/x")
        text = serialize_config(config)
        assert parse_config(text) == config
        assert serialize_config(parse_config(text)) == text

    def test_tolerance_coupling(self):
        with pytest.raises(ConfigError, match="root_tol"):
            ExperimentConfig(quad_tol=1e-4, root_tol=1e-6).validate()

    def test_sigma_epsilon_coupling(self):
        with pytest.raises(ConfigError, match="sigma"):
            ExperimentConfig(sigma=1.05, epsilon=0.1).validate()

    def test_defaults_table_is_complete(self):
        assert set(DEFAULTS) == {f.name for f in
                                 ExperimentConfig.__dataclass_fields__.values()}


class TestEvalCache:
    def test_zeta_round_trip(self, tmp_path):
        cache = EvalCache(tmp_path / "c")
        assert cache.zeta_get(1.5, 1e5) is None
        cache.zeta_put(1.5, 1e5, complex(1.25, -0.5))
        cache.flush()
        fresh = EvalCache(tmp_path / "c")
        assert fresh.zeta_get(1.5, 1e5) == complex(1.25, -0.5)

    def test_argument_rounding(self, tmp_path):
        cache = EvalCache(tmp_path / "c")
        cache.zeta_put(1.5, 1.0000000001, 1 + 0j)
        assert cache.zeta_get(1.5, 1.0000000003) == 1 + 0j

    def test_table_round_trip_bit_exact(self, tmp_path):
        cache = EvalCache(tmp_path / "c")
        table = build_ladder(1e4 - 2, 1e4 + 40, samples_per_osc=8)
        key = {"kind": "ladder", "a": 1}
        assert cache.table_get(key) is None
        cache.table_put(key, table)
        loaded = cache.table_get(key)
        assert np.array_equal(loaded.t_grid, table.t_grid)
        assert np.array_equal(loaded.phi_values, table.phi_values)
        assert np.array_equal(loaded.slopes, table.slopes)

    def test_cached_run_identical_and_faster(self, tmp_path):
        config = ExperimentConfig(t_base=1e5, theta=1.0, k=2, sigma=1.5,
                                  cache_path=str(tmp_path / "cache"))
        t0 = time.perf_counter()
        cold = run_one(config)
        cold_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        warm = run_one(config)
        warm_s = time.perf_counter() - t0
        assert cold.error is None and warm.error is None
        for attr in ("lhs", "rhs", "rhs_zeta", "ratio"):
            a, b = getattr(cold.report, attr), getattr(warm.report, attr)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))
        assert np.allclose(cold.report.sequences.alphas,
                           warm.report.sequences.alphas, rtol=0, atol=1e-9)
        assert warm_s < cold_s / 2.0


class TestRunnerOutputs:
    def test_summary_schema_and_plot_data(self, tmp_path, ladder_factory):
        config = ExperimentConfig(t_base=1e4, theta=1.0, k=1, sigma=1.5)
        report = run_metamorphosis(config, table=ladder_factory(1e4, 1))
        rec = record_from_dict(record_to_dict(
            run_one_record(config, report)))
        written = emit_outputs([rec], tmp_path)
        lines = written["summary"].read_text().splitlines()
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 2 and len(lines[1].split(",")) == 11
        for name in ("ratio_vs_T", "gaps_vs_T", "local_error_vs_xr"):
            rows = written[name].read_text().splitlines()[1:]
            xs = [float(r.split(",")[0]) for r in rows]
            assert xs == sorted(xs)

    def test_record_json_round_trip(self, ladder_factory):
        config = ExperimentConfig(t_base=1e4, theta=1.0, k=1, sigma=1.5)
        report = run_metamorphosis(config, table=ladder_factory(1e4, 1))
        rec = run_one_record(config, report)
        blob = json.dumps(record_to_dict(rec), sort_keys=True)
        back = record_from_dict(json.loads(blob))
        assert back.config == rec.config
        assert back.report.lhs == rec.report.lhs
        assert back.report.d_point.location == rec.report.d_point.location
        assert json.dumps(record_to_dict(back), sort_keys=True) == blob

    def test_suite_captures_failures(self):
        # t_base below floor fails validation inside the run, not the suite
        bad = ExperimentConfig(t_base=2000.0, k=25)
        records = run_suite([bad], parallelism=1)
        assert records[0].error is not None

    def test_deterministic_summary_bytes(self, tmp_path, ladder_factory):
        config = ExperimentConfig(t_base=1e4, theta=1.0, k=1, sigma=1.5)
        table = ladder_factory(1e4, 1)
        texts = []
        for sub in ("a", "b"):
            rep = run_metamorphosis(config, table=table)
            rec = run_one_record(config, rep)
            written = emit_outputs([rec], tmp_path / sub)
            texts.append(written["summary"].read_bytes())
        assert texts[0] == texts[1]


def run_one_record(config, report):
    from zladder.runner import FORMAT_VERSION, RunRecord
    import zladder

    return RunRecord(config, report,
                     dict(report.diagnostics["stage_seconds"], total=0.0),
                     {"zladder": zladder.__version__, "format": FORMAT_VERSION})


class TestCli:
    def test_run_verb(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("t_base = 1e4\nk = 1\n")
        code = cli_main(["run", "--config", str(cfg),
                         "--out", str(tmp_path / "out"),
                         "--cache", str(tmp_path / "cache")])
        assert code == 0
        assert (tmp_path / "out" / "summary.csv").exists()
        assert "ok " in capsys.readouterr().out

    def test_sweep_verb_parallel(self, tmp_path, capsys):
        code = cli_main(["sweep", "--T", "1e4,2e4", "--k", "1",
                         "--out", str(tmp_path / "out"), "--parallel", "2"])
        assert code == 0
        lines = (tmp_path / "out" / "summary.csv").read_text().splitlines()
        assert len(lines) == 3
        assert [float(l.split(",")[0]) for l in lines[1:]] == [1e4, 2e4]

    def test_audit_verb(self, tmp_path, capsys):
        code = cli_main(["audit", "--out", str(tmp_path / "audit"),
                         "--count", "8", "--t-max", "1e4"])
        assert code == 0
        out = capsys.readouterr().out
        assert "rs-vs-oracle" in out and "window-audit" in out
        assert (tmp_path / "audit" / "audit_rs.csv").exists()

    def test_ladder_verb_round_trip(self, tmp_path, capsys):
        table_path = tmp_path / "table.tsv"
        assert cli_main(["ladder", "--T", "1e4", "--k", "1", "--spo", "8",
                         "--out", str(table_path)]) == 0
        assert cli_main(["ladder", "--inspect", str(table_path)]) == 0
        assert "nodes" in capsys.readouterr().out

    def test_config_error_exit_code(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("theta = 3.0\n")
        assert cli_main(["run", "--config", str(cfg),
                         "--out", str(tmp_path / "out")]) == 2
