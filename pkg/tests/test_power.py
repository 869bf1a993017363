import csv
import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from circindep import (
    BWC,
    PB,
    BenchConfig,
    ConfigError,
    CosineTestSpec,
    MultiOrderSpec,
    MultiTestSpec,
    OmnibusTestSpec,
    ReplicateError,
    SingularCovarianceError,
    by_correction,
    critical_value_two_sample,
    empirical_power,
    wilson_ci,
)
from circindep._rng import substream
from circindep.power import CSV_COLUMNS, STANDARD_BATTERY, _cross_paired, parse_test_spec


def wilson_by_roots(hits, M, level=0.95):
    """Roots in p of (phat - p)^2 = z^2 p (1 - p) / M."""
    z = stats.norm.ppf(0.5 + level / 2)
    phat = hits / M
    a = 1 + z * z / M
    b = -(2 * phat + z * z / M)
    c = phat * phat
    return tuple(sorted(np.roots([a, b, c]).real))


def by_brute_force(p):
    m = len(p)
    c = sum(1 / k for k in range(1, m + 1))
    ranks = stats.rankdata(p, method="ordinal")
    raw = {i: min(1.0, m * c * p[i] / ranks[i]) for i in range(m)}
    return np.array([min(raw[j] for j in range(m) if p[j] >= p[i]) for i in range(m)])


def small_config(**overrides):
    base = dict(
        model=PB(0.0),
        grid=(0.0, 1.0),
        n=20,
        M=60,
        tests=(CosineTestSpec(1, 1), OmnibusTestSpec(1.0)),
        B=30,
        seed=5,
    )
    base.update(overrides)
    return BenchConfig(**base)


class TestWilson:
    def test_endpoints(self):
        lo, hi = wilson_ci(0, 200)
        assert lo == 0.0 and 0 < hi < 0.03
        lo, hi = wilson_ci(200, 200)
        assert hi == 1.0 and 0.97 < lo < 1

    @pytest.mark.parametrize("hits, M", [(50, 1000), (1, 7), (13, 20), (999, 1000)])
    def test_quadratic_roots(self, hits, M):
        assert_allclose(wilson_ci(hits, M), wilson_by_roots(hits, M), atol=1e-10)

    @given(st.integers(1, 500).flatmap(lambda m: st.tuples(st.integers(0, m), st.just(m))))
    def test_contains_estimate(self, hm):
        hits, M = hm
        lo, hi = wilson_ci(hits, M)
        assert 0 <= lo <= hits / M <= hi <= 1

    @pytest.mark.parametrize("hits, M", [(-1, 10), (11, 10), (1, 0), (1.5, 10)])
    def test_invalid(self, hits, M):
        with pytest.raises(ValueError):
            wilson_ci(hits, M)


class TestBYCorrection:
    def test_worked_examples(self):
        c3 = 1 + 1 / 2 + 1 / 3
        assert_allclose(by_correction([0.01, 0.02, 0.03]), [0.03 * c3] * 3, rtol=1e-12)
        assert_allclose(by_correction([0.5]), [0.5])
        assert_allclose(by_correction([0.0, 1.0]), [0.0, 1.0])

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=12))
    def test_brute_force(self, p):
        p = np.array(p)
        assert_allclose(by_correction(p), by_brute_force(p), rtol=1e-12, atol=1e-15)

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=12))
    def test_order_preserving_and_bounded(self, p):
        adj = by_correction(p)
        assert np.all(adj >= np.asarray(p) - 1e-15) and np.all(adj <= 1)
        order = np.argsort(p, kind="stable")
        assert np.all(np.diff(adj[order]) >= -1e-15)

    @pytest.mark.parametrize("bad", [[], [0.1, 1.2], [-0.01], [np.nan]])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            by_correction(bad)


class TestTestSpecs:
    def test_labels(self):
        assert [t.label for t in STANDARD_BATTERY] == [
            "cosine(1,1)",
            "cosine(1,-1)",
            "multi(1,-1,1,1)",
            "omnibus(0.1)",
            "omnibus(0.5)",
            "omnibus(1)",
            "omnibus(2)",
        ]

    @pytest.mark.parametrize("spec", list(STANDARD_BATTERY) + [MultiTestSpec(MultiOrderSpec(rc=[(1, 1)], rs=[(1, -1)]))])
    def test_parse_round_trip(self, spec):
        assert parse_test_spec(spec.to_dict()) == spec

    @pytest.mark.parametrize(
        "d, path",
        [
            ({"cosine": [0, 0]}, "t.cosine"),
            ({"omnibus": -1}, "t.omnibus"),
            ({"multi": {"rc": [1, 1], "zz": []}}, "t.multi"),
            ({"spearman": 1}, "t"),
            ({"cosine": [1, 1], "omnibus": 1}, "t"),
        ],
    )
    def test_parse_errors(self, d, path):
        with pytest.raises(ConfigError) as info:
            parse_test_spec(d, "t")
        assert info.value.path == path

    def test_native_and_permutation_agree_for_omnibus(self, rng):
        s = PB(0.5).sample(25, rng)
        perms = np.array([rng.permutation(25) for _ in range(40)])
        t = OmnibusTestSpec(0.5)
        assert t.native_pvalue(s, perms) == t.permutation_pvalue(s, perms)


class TestBenchConfig:
    def test_round_trip(self):
        cfg = small_config(calibration="native", Mc=None, alpha=0.1)
        assert BenchConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg

    @pytest.mark.parametrize(
        "mutate, path",
        [
            (lambda d: d.pop("model"), "model"),
            (lambda d: d["model"].pop("name"), "model.name"),
            (lambda d: d["model"].update(q=1), "model"),
            (lambda d: d.update(grid=[0.0, "a"]), "grid[1]"),
            (lambda d: d.update(grid=[0.0, 2.0]), "grid[1]"),
            (lambda d: d.update(n=1), "n"),
            (lambda d: d.update(M=0), "M"),
            (lambda d: d.update(alpha=1.5), "alpha"),
            (lambda d: d.update(calibration="bootstrap"), "calibration"),
            (lambda d: d.update(extra=1), "extra"),
            (lambda d: d["tests"].append({"omnibus": 0}), "tests[2].omnibus"),
            (lambda d: d.update(Mc=10), "Mc"),
            (lambda d: d.update(seed=-4), "seed"),
        ],
    )
    def test_error_paths(self, mutate, path):
        d = small_config().to_dict()
        mutate(d)
        with pytest.raises(ConfigError) as info:
            BenchConfig.from_dict(d)
        assert info.value.path == path
        assert str(info.value).startswith(path)

    def test_two_sample_needs_enough_critical_replicates(self):
        with pytest.raises(ConfigError):
            small_config(M=10)
        assert small_config(M=10, Mc=50).n_critical == 50
        assert small_config(M=10, calibration="native").M == 10

    def test_multi_dimension_bounds_n(self):
        with pytest.raises(ConfigError):
            small_config(n=3, tests=(MultiTestSpec(MultiOrderSpec(rc=[1, -1, 1, 1])),))


class TestCrossPairing:
    def test_keeps_margins_and_breaks_dependence(self):
        model = BWC(0.1, 0.6, -0.8)
        s = _cross_paired(model, 50_000, substream(1, 0))
        assert abs(np.mean(np.cos(s.theta1)) - 0.1) < 0.01
        assert abs(np.mean(np.cos(s.theta2)) - 0.6) < 0.01
        assert abs(np.mean(np.cos(s.theta1 + s.theta2)) - 0.06) < 0.015

    def test_components_come_from_two_draws(self):
        rng_a, rng_b = substream(3, 1), substream(3, 1)
        s = _cross_paired(PB(1.0), 10, rng_a)
        first = PB(1.0).sample(10, rng_b)
        second = PB(1.0).sample(10, rng_b)
        assert_array_equal(s.theta1, first.theta1)
        assert_array_equal(s.theta2, second.theta2)


class TestCriticalValue:
    def test_validation(self):
        with pytest.raises(ValueError):
            critical_value_two_sample(PB(0.0), CosineTestSpec(1, 1), 20, Mc=10)

    def test_reproducible(self):
        a = critical_value_two_sample(PB(0.3), CosineTestSpec(1, -1), 30, Mc=60, seed=2)
        b = critical_value_two_sample(PB(0.3), CosineTestSpec(1, -1), 30, Mc=60, seed=2)
        assert a == b

    @pytest.mark.slow
    def test_near_chi_square_quantile(self):
        crit = critical_value_two_sample(PB(0.0), CosineTestSpec(1, 1), 500, Mc=5000, seed=0)
        assert abs(crit - 3.8415) <= 0.15 * 3.8415


class TestEmpiricalPower:
    def test_single_replicate_rates(self):
        table = empirical_power(small_config(M=1, calibration="native"))
        assert {c.rate for c in table.cells} <= {0.0, 1.0}
        assert all(c.M == 1 for c in table.cells)

    def test_grid_and_tests_covered(self):
        cfg = small_config(calibration="native")
        table = empirical_power(cfg)
        pairs = {(c.param, c.test) for c in table.cells}
        assert pairs == set(itertools.product(cfg.grid, [t.label for t in cfg.tests]))
        assert table.rate(1.0, "cosine(1,1)") == table.cell(1.0, cfg.tests[0]).rate
        with pytest.raises(KeyError):
            table.cell(0.5, "cosine(1,1)")

    def test_functional_dependence_detected(self):
        table = empirical_power(small_config())
        assert table.rate(1.0, "omnibus(1)") == 1.0

    @pytest.mark.parametrize("calibration", ["two-sample", "permutation", "native"])
    def test_worker_count_does_not_matter(self, calibration):
        cfg = small_config(calibration=calibration, M=50)
        assert empirical_power(cfg, workers=1).to_csv() == empirical_power(cfg, workers=2).to_csv()

    def test_seed_changes_output(self):
        a = empirical_power(small_config(calibration="native", seed=1)).cells
        b = empirical_power(small_config(calibration="native", seed=2)).cells
        assert [c.hits for c in a] != [c.hits for c in b]

    def test_csv_and_json(self):
        table = empirical_power(small_config(calibration="native"))
        rows = list(csv.DictReader(io.StringIO(table.to_csv())))
        assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 4
        doc = json.loads(table.to_json())
        assert doc["config"] == table.config.to_dict()
        assert doc["rows"] == table.rows()
        for c in table.cells:
            assert c.wilson_lo <= c.rate <= c.wilson_hi

    @pytest.mark.parametrize("calibration", ["two-sample", "native"])
    def test_replicate_error_carries_context(self, calibration):
        bad = MultiTestSpec(MultiOrderSpec(rc=[(1, 1), (1, 1)]))
        cfg = small_config(tests=(bad,), calibration=calibration, grid=(0.4,))
        with pytest.raises(ReplicateError) as info:
            empirical_power(cfg)
        err = info.value
        assert err.param == 0.4 and err.replicate == 0
        assert isinstance(err.__cause__, SingularCovarianceError)
