import io
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import edgewalk.study_cli as study_cli
from edgewalk.estimators import summarize
from edgewalk.moment_kernel import ModelDims, deriv, ls_slope_deriv
from edgewalk.simulator import ObservationSeries, SimConfig, simulate
from edgewalk.study_cli import (
    PRESETS,
    CurvePoint,
    InsufficientSamplesError,
    QQData,
    ReplicationRow,
    ReplicationTable,
    StudyConfig,
    empirical_sigmas,
    parse_config_file,
    qq_data,
    read_curves_csv,
    read_qq_csv,
    read_replication_csv,
    run_replications,
    seed_for,
    sensitivity_curves,
    write_curves_csv,
    write_qq_csv,
    write_replication_csv,
)

SMALL_STUDY = StudyConfig(
    dims=ModelDims(3, 4),
    T=30,
    burn_in=5,
    R=7,
    p_grid=(0.4, 0.8),
    base_seed=11,
)


class TestSeedFor:
    def test_golden_values(self):
        assert seed_for(42, 1) == 11400714819323198527
        assert seed_for(5, 1) == 11400714819323198480
        assert seed_for(5, 2) == 4354685564936845359

    def test_rejects_index_below_one(self):
        with pytest.raises(ValueError):
            seed_for(42, 0)

    def test_rejects_bad_base_seed(self):
        with pytest.raises(ValueError):
            seed_for(-1, 1)
        with pytest.raises(ValueError):
            seed_for(2**64, 1)

    def test_distinct_and_in_range(self):
        seeds = {seed_for(123, i) for i in range(1, 1001)}
        assert len(seeds) == 1000
        assert all(0 <= s < 2**64 for s in seeds)


class TestStudyConfig:
    def test_rejects_small_r(self):
        with pytest.raises(ValueError):
            StudyConfig(ModelDims(3, 4), T=10, burn_in=0, R=1, p_grid=(0.5,), base_seed=0)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            StudyConfig(ModelDims(3, 4), T=10, burn_in=0, R=2, p_grid=(), base_seed=0)

    def test_rejects_p_zero_in_grid(self):
        with pytest.raises(ValueError):
            StudyConfig(ModelDims(3, 4), T=10, burn_in=0, R=2, p_grid=(0.0,), base_seed=0)

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError, match="unknown method"):
            StudyConfig(
                ModelDims(3, 4),
                T=10,
                burn_in=0,
                R=2,
                p_grid=(0.5,),
                base_seed=0,
                methods=("mle",),
            )

    def test_rejects_bad_fd_step(self):
        with pytest.raises(ValueError):
            StudyConfig(
                ModelDims(3, 4),
                T=10,
                burn_in=0,
                R=2,
                p_grid=(0.5,),
                base_seed=0,
                fd_step=0.0,
            )


class TestRunReplications:
    def test_shape_and_ordering(self):
        table = run_replications(SMALL_STUDY)
        assert len(table.rows) == 2 * 7 * 2  # grid x reps x methods
        # rows come out in (grid, rep, method) order
        keys = [(r.p_true, r.rep, r.method) for r in table.rows]
        expected = [
            (p, rep, method)
            for p in SMALL_STUDY.p_grid
            for rep in range(1, 8)
            for method in SMALL_STUDY.methods
        ]
        assert keys == expected

    def test_seeds_follow_global_index(self):
        table = run_replications(SMALL_STUDY)
        for gi, p in enumerate(SMALL_STUDY.p_grid):
            for row in table.select(p, "mom"):
                assert row.seed == seed_for(11, gi * 7 + row.rep)

    def test_deterministic(self):
        a = run_replications(SMALL_STUDY)
        b = run_replications(SMALL_STUDY)
        assert a.rows == b.rows

    def test_chunk_size_does_not_change_results(self, monkeypatch):
        baseline = run_replications(SMALL_STUDY)
        monkeypatch.setattr(study_cli, "_REP_CHUNK", 3)
        assert run_replications(SMALL_STUDY).rows == baseline.rows
        monkeypatch.setattr(study_cli, "_REP_CHUNK", 1)
        assert run_replications(SMALL_STUDY).rows == baseline.rows

    def test_row_reproducible_from_recorded_seed(self):
        table = run_replications(SMALL_STUDY)
        row = table.select(0.8, "ls")[3]
        series = simulate(
            SimConfig(SMALL_STUDY.dims, p=0.8, T=30, burn_in=5, seed=row.seed)
        )
        from edgewalk.estimators import estimate_ls

        report = estimate_ls(summarize(series))
        assert report.p_hat == row.p_hat
        assert report.statistic == row.statistic
        assert report.clamped == row.clamped

    def test_select(self):
        table = run_replications(SMALL_STUDY)
        rows = table.select(0.4, "mom")
        assert len(rows) == 7
        assert all(r.p_true == 0.4 and r.method == "mom" for r in rows)


def table_with(p, mom_values, ls_values, mom_clamped=0, ls_clamped=0):
    """Hand-built replication table for the sigma/qq plumbing."""
    cfg = StudyConfig(
        dims=ModelDims(7, 14),
        T=400,
        burn_in=100,
        R=max(len(mom_values) + mom_clamped, 2),
        p_grid=(p,),
        base_seed=0,
    )
    rows = []
    rep = 0
    for v in mom_values:
        rep += 1
        rows.append(ReplicationRow(p, "mom", rep, rep, v, 0.0, "none"))
    for _ in range(mom_clamped):
        rep += 1
        rows.append(ReplicationRow(p, "mom", rep, rep, 1.0, -1.0, "high"))
    rep = 0
    for v in ls_values:
        rep += 1
        rows.append(ReplicationRow(p, "ls", rep, rep, v, 0.0, "none"))
    for _ in range(ls_clamped):
        rep += 1
        rows.append(ReplicationRow(p, "ls", rep, rep, 1.0, -0.1, "high"))
    return ReplicationTable(cfg=cfg, rows=tuple(rows))


class TestEmpiricalSigmas:
    def test_constant_estimates_give_zero_sigma(self):
        table = table_with(0.5, [0.5] * 40, [0.5] * 40)
        sig = empirical_sigmas(table, 0.5, T=400)
        assert sig.sigma_c == 0.0
        assert sig.sigma_i == 0.0
        assert sig.sd_mom == 0.0
        assert sig.sd_ls == 0.0
        assert sig.n_clamped_mom == 0
        assert sig.n_clamped_ls == 0

    def test_scales_by_root_t_and_derivative(self):
        rng = np.random.default_rng(0)
        mom = (0.5 + 0.01 * rng.standard_normal(200)).tolist()
        ls = (0.5 + 0.02 * rng.standard_normal(200)).tolist()
        table = table_with(0.5, mom, ls)
        T = 400
        sig = empirical_sigmas(table, 0.5, T=T)
        dims = table.cfg.dims
        expect_c = math.sqrt(T) * np.std(mom, ddof=1) * abs(deriv("c", dims, 0.5))
        expect_i = math.sqrt(T) * np.std(ls, ddof=1) * abs(ls_slope_deriv(dims.n, 0.5))
        assert_allclose(sig.sigma_c, expect_c, rtol=1e-12)
        assert_allclose(sig.sigma_i, expect_i, rtol=1e-12)

    def test_clamped_rows_excluded_and_counted(self):
        table = table_with(0.5, [0.5] * 35, [0.5] * 33, mom_clamped=4, ls_clamped=2)
        sig = empirical_sigmas(table, 0.5, T=400)
        assert sig.sd_mom == 0.0  # the clamped 1.0s would have inflated this
        assert sig.n_clamped_mom == 4
        assert sig.n_clamped_ls == 2

    def test_requires_thirty_unclamped(self):
        table = table_with(0.5, [0.5] * 29, [0.5] * 40, mom_clamped=5)
        with pytest.raises(InsufficientSamplesError, match="29"):
            empirical_sigmas(table, 0.5, T=400)


class TestQQData:
    def test_normal_sample_is_nearly_straight(self):
        rng = np.random.default_rng(12)
        qq = qq_data(rng.standard_normal(2000))
        assert qq.correlation >= 0.999
        assert qq.theoretical.shape == qq.empirical.shape == (2000,)

    def test_standardization_and_symmetry(self):
        rng = np.random.default_rng(4)
        qq = qq_data(5.0 + 3.0 * rng.standard_normal(200))
        assert abs(qq.empirical.mean()) < 1e-12
        assert (np.diff(qq.empirical) >= 0).all()
        # plotting positions are symmetric around the median
        assert_allclose(qq.theoretical, -qq.theoretical[::-1], atol=1e-12)
        recomputed = np.corrcoef(qq.theoretical, qq.empirical)[0, 1]
        assert_allclose(qq.correlation, recomputed, rtol=1e-12)

    def test_location_scale_invariance(self):
        rng = np.random.default_rng(8)
        base = rng.standard_normal(100)
        a = qq_data(base)
        b = qq_data(10.0 - 2.0 * base)  # NB: flips order but not straightness
        assert_allclose(abs(b.correlation), abs(a.correlation), rtol=1e-9)

    def test_requires_fifty_samples(self):
        with pytest.raises(InsufficientSamplesError):
            qq_data(list(np.linspace(0.0, 1.0, 49)))

    def test_rejects_constant_sample(self):
        with pytest.raises(ValueError, match="constant"):
            qq_data([0.5] * 60)


class TestSensitivityCurves:
    def test_small_study_internal_consistency(self):
        cfg = StudyConfig(
            dims=ModelDims(3, 6),
            T=120,
            burn_in=50,
            R=100,
            p_grid=(0.5,),
            base_seed=3,
        )
        (point,) = sensitivity_curves(cfg)
        assert point.p == 0.5
        lam = deriv("c", cfg.dims, 0.5, cfg.fd_step) / ls_slope_deriv(3, 0.5)
        assert_allclose(point.lam, lam, rtol=1e-12)
        assert_allclose(point.nu, point.lam * point.mu, rtol=1e-12)
        # the two routes to the sd comparison coincide: lam * mu collapses
        # to sd_ls / sd_mom because the derivative factors cancel
        assert_allclose(point.nu, point.sd_ls / point.sd_mom, rtol=1e-10)
        assert point.sd_mom > 0.0
        assert point.sd_ls > 0.0

    def test_requires_hundred_replications(self):
        cfg = StudyConfig(
            dims=ModelDims(3, 6), T=50, burn_in=10, R=99, p_grid=(0.5,), base_seed=0
        )
        with pytest.raises(ValueError, match="R >= 100"):
            sensitivity_curves(cfg)

    def test_requires_both_methods(self):
        cfg = StudyConfig(
            dims=ModelDims(3, 6),
            T=50,
            burn_in=10,
            R=100,
            p_grid=(0.5,),
            base_seed=0,
            methods=("mom",),
        )
        with pytest.raises(ValueError, match="'ls'"):
            sensitivity_curves(cfg)


class TestCsvRoundTrips:
    def test_replication_csv(self, tmp_path):
        table = run_replications(SMALL_STUDY)
        path = tmp_path / "reps.csv"
        write_replication_csv(table, str(path))
        text = path.read_text()
        assert text.splitlines()[0] == "p_true,method,rep,seed,p_hat,statistic,clamped"
        back = read_replication_csv(str(path))
        assert back == table.rows  # 17 significant digits round-trip floats exactly

    def test_replication_csv_to_stream(self):
        table = run_replications(SMALL_STUDY)
        buf = io.StringIO()
        write_replication_csv(table, buf)
        assert buf.getvalue().count("\n") == len(table.rows) + 1

    def test_replication_csv_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("p,method\n")
        with pytest.raises(ValueError, match="header"):
            read_replication_csv(str(path))

    def test_curves_csv(self, tmp_path):
        points = [
            CurvePoint(
                p=0.1 + 0.2,
                lam=1.0 / 3.0,
                mu=math.pi / 7,
                nu=2.0**-40,
                sd_mom=0.0123456789012345678,
                sd_ls=1e-17,
                n_clamped_mom=3,
                n_clamped_ls=0,
            )
        ]
        path = tmp_path / "curves.csv"
        write_curves_csv(points, str(path))
        text = path.read_text()
        assert text.splitlines()[0] == "p,lambda,mu,nu,sd_mom,sd_ls,n_clamped_mom,n_clamped_ls"
        assert read_curves_csv(str(path)) == points

    def test_curves_csv_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("p,lambda\n")
        with pytest.raises(ValueError, match="header"):
            read_curves_csv(str(path))

    def test_qq_csv(self, tmp_path):
        rng = np.random.default_rng(5)
        qq = qq_data(rng.standard_normal(64))
        path = tmp_path / "qq.csv"
        write_qq_csv(qq, str(path))
        text = path.read_text()
        assert text.splitlines()[0] == "theoretical_q,empirical_q"
        theo, emp = read_qq_csv(str(path))
        assert np.array_equal(theo, qq.theoretical)
        assert np.array_equal(emp, qq.empirical)

    def test_qq_csv_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            read_qq_csv(str(path))


class TestParseConfigFile:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "study.cfg"
        path.write_text(
            "# experiment setup\n"
            "n = 7\n"
            "M = 14          # case-insensitive keys\n"
            "Burn-In = 250\n"
            "\n"
            "p = 0.25,0.5\n"
        )
        cfg = parse_config_file(str(path))
        assert cfg == {"n": "7", "m": "14", "burn_in": "250", "p": "0.25,0.5"}

    def test_rejects_line_without_equals(self, tmp_path):
        path = tmp_path / "study.cfg"
        path.write_text("n = 7\njust words\n")
        with pytest.raises(ValueError, match=":2:"):
            parse_config_file(str(path))

    def test_value_may_contain_equals(self, tmp_path):
        path = tmp_path / "study.cfg"
        path.write_text("out = results/a=b.csv\n")
        assert parse_config_file(str(path)) == {"out": "results/a=b.csv"}


class TestPresets:
    def test_paper_s6_preset_contents(self):
        preset = PRESETS["paper-s6"]
        assert preset["n"] == 7
        assert preset["m"] == 14
        assert preset["t"] == 4000
        assert preset["burn_in"] == 1000
        assert preset["r"] == 2000
        assert preset["method"] == "mom,ls"
