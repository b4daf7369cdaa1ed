import numpy as np
import pytest

from mimocs.experiments import (CSV_HEADER, ExperimentConfig, derive_trial_seed, format_methods,
                                load_config, parse_methods, parse_mn_list, preset,
                                records_table, records_to_csv, run, run_ccdf, run_mmv,
                                run_nonuniform, run_uniform)
from mimocs.geometry import ConfigurationError


def small(**kw):
    base = dict(protocol="nonuniform", trials=12, mn_list=[(3, 3), (5, 5)],
                methods="beamform;ols;mbmp:d=2,2,1")
    base.update(kw)
    return ExperimentConfig(**base)


class TestSeeds:
    def test_deterministic_and_distinct(self):
        assert derive_trial_seed(0, "a", 1, 0) == derive_trial_seed(0, "a", 1, 0)
        assert derive_trial_seed(0, "a", 1, 0) != derive_trial_seed(0, "a", 0, 1)
        assert derive_trial_seed(0, "a", 1, 0) != derive_trial_seed(1, "a", 1, 0)
        assert derive_trial_seed(0, "a", 1, 0) != derive_trial_seed(0, "b", 1, 0)

    def test_no_collisions(self):
        seeds = {derive_trial_seed(7, "pos", t, i) for t in range(100) for i in range(100)}
        assert len(seeds) == 10_000


class TestConfig:
    def test_method_tokens(self):
        m = parse_methods("lasso;mbmp:d=3,3,1;focuss:p_norm=0.7:max_iter=20")
        assert m == [("lasso", {}), ("mbmp", {"d": [3, 3, 1]}),
                     ("focuss", {"p_norm": 0.7, "max_iter": 20})]
        assert parse_methods(format_methods(m)) == m

    def test_bad_method(self):
        with pytest.raises(ConfigurationError):
            parse_methods("bogus")

    def test_mn_list(self):
        assert parse_mn_list("3x4, 5") == [(3, 4), (5, 5)]

    @pytest.mark.parametrize("kw", [dict(K=0), dict(trials=0), dict(protocol="x"),
                                    dict(G=40), dict(protocol="mmv", P=1),
                                    dict(protocol="uniform", inner_trials=0)])
    def test_validation(self, kw):
        with pytest.raises(ConfigurationError):
            small(**kw)

    def test_ini_file_and_overrides(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[DEFAULT]\nZ = 40\n\n[uniform]\nK = 2\nmn_list = 3x3,4x4\n"
                        "trials = 7\ninner_trials = 9\nmethods = ols;lasso\n")
        cfg = load_config(path)
        assert (cfg.protocol, cfg.Z, cfg.G, cfg.K, cfg.trials, cfg.inner_trials) == \
            ("uniform", 40, 41, 2, 7, 9)
        assert cfg.with_overrides(trials=3, K=None).trials == 3
        assert cfg.with_overrides(trials=3, K=None).K == 2

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[nonuniform]\nbananas = 3\n")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_presets(self):
        assert preset("fig4").inner_trials == 500
        assert preset("fig5").mn_list == [(3, 3), (4, 4), (5, 5), (6, 6), (7, 7)]
        assert preset("paper-fig2", trials=10).trials == 10
        assert (preset("fig3").Z, preset("fig3").G, preset("fig3").K) == (250, 251, 5)


class TestProtocols:
    def test_nonuniform_records(self):
        recs = run_nonuniform(small())
        assert len(recs) == 6
        for r in recs:
            assert r.error_rate == r.errors / r.trials
            assert r.error_rate * r.trials == int(r.error_rate * r.trials)

    def test_csv_header(self):
        text = records_to_csv(run(small(trials=2)))
        assert text.splitlines()[0] == ",".join(CSV_HEADER)
        assert CSV_HEADER == ("protocol", "method", "M", "N", "MN", "Z", "G", "K", "P", "snr_db",
                              "trials", "errors", "error_rate", "mean_runtime_ms", "base_seed")

    def test_deterministic_and_parallel_invariant(self):
        cfg = small(trials=6)
        a = records_to_csv(run(cfg))
        assert a == records_to_csv(run(cfg))
        assert a == records_to_csv(run(cfg, jobs=2))
        assert a != records_to_csv(run(small(trials=6, base_seed=1)))

    def test_uniform_dominates_nonuniform(self):
        nu = records_table(run(small(trials=8)))
        u = records_table(run(small(protocol="uniform", trials=8, inner_trials=5)))
        for m in nu:
            for mn in nu[m]:
                assert u[m][mn] >= nu[m][mn]

    def test_mmv(self):
        cfg = small(protocol="mmv", P=3, methods="music;raormp")
        recs = run_mmv(cfg)
        assert {r.P for r in recs} == {3}
        with pytest.raises(ConfigurationError):
            run_mmv(small())

    def test_solver_failure_counts_as_error(self):
        # cosamp cannot run with 2K > MN; the trial is scored as an error
        recs = run(small(mn_list=[(2, 2)], methods="cosamp", K=3, trials=3))
        assert recs[0].errors == 3 and recs[0].failures == 3

    def test_timing_optional(self):
        rec = run(small(trials=2, timing=True))[0]
        assert rec.mean_runtime_ms is not None and rec.mean_runtime_ms >= 0
        assert run(small(trials=2))[0].row()[13] == ""

    def test_ccdf(self):
        cfg = ExperimentConfig(protocol="ccdf", Z=50, mn_list=[(4, 4)], trials=1,
                               q_grid=[0.1, 0.5, 0.99])
        res = run_ccdf(cfg)
        emp = [r[1] for r in res.rows]
        assert set(emp) <= {0.0, 1.0}  # a single trial gives a step function
        assert res.to_csv().splitlines()[0] == "q,ccdf_empirical,ccdf_bound,MN,mode"

    def test_wrong_protocol(self):
        with pytest.raises(ConfigurationError):
            run_uniform(small())
