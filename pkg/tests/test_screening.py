import math
from fractions import Fraction

import numpy as np
import pytest

from qoelab import (
    AllObserversRejected,
    ScoreMatrix,
    ScreeningConfig,
    ScreeningError,
    condition_thresholds,
    count_deviations,
    kurtosis,
    screen,
)
from qoelab.screening import report_to_table, report_to_text

from conftest import panel_matrix
from oracle_screening import oracle_counts, oracle_screen


class TestKurtosis:
    def test_constant_samples_error(self):
        with pytest.raises(ValueError, match="zero-variance"):
            kurtosis([50, 50, 50, 50])

    def test_too_few_samples(self):
        with pytest.raises(ValueError, match="at least 4"):
            kurtosis([1, 2, 3])

    def test_uniform_five_point(self):
        # exact rational check: m2 = 2, m4 = 34/5, beta2 = 17/10
        xs = [1, 2, 3, 4, 5]
        mean = Fraction(sum(xs), len(xs))
        m2 = sum((Fraction(x) - mean) ** 2 for x in xs) / len(xs)
        m4 = sum((Fraction(x) - mean) ** 4 for x in xs) / len(xs)
        expected = m4 / m2 ** 2
        assert expected == Fraction(17, 10)
        result = kurtosis(xs)
        assert result.beta2 == float(expected) == 1.7
        assert not result.is_normal

    def test_bell_like_sample_is_normal(self):
        rng = np.random.default_rng(42)
        xs = rng.normal(50, 10, 500)
        result = kurtosis(xs)
        centered = xs - xs.mean()
        beta2 = np.mean(centered ** 4) / np.mean(centered ** 2) ** 2
        assert result.beta2 == pytest.approx(beta2, abs=1e-12)
        assert 2.0 <= result.beta2 <= 4.0
        assert result.is_normal

    def test_beta2_analytic_lower_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            xs = rng.uniform(0, 100, rng.integers(4, 30))
            if np.std(xs) > 0:
                assert kurtosis(xs).beta2 >= 1.0


class TestConditionThresholds:
    def test_zero_variance_collapses(self):
        assert condition_thresholds([42.0] * 6) == (42.0, 42.0)

    def test_non_normal_uses_wide_band(self):
        # {1..5}: mean 3, population sigma sqrt(2), beta2 = 1.7 -> sqrt(20) rule
        lower, upper = condition_thresholds([1, 2, 3, 4, 5])
        width = math.sqrt(20) * math.sqrt(2)
        assert lower == pytest.approx(3 - width, abs=1e-12)
        assert upper == pytest.approx(3 + width, abs=1e-12)

    def test_normal_uses_two_sigma(self):
        rng = np.random.default_rng(42)
        xs = rng.normal(50, 10, 500)
        assert kurtosis(xs).is_normal
        lower, upper = condition_thresholds(xs)
        mean, sigma = xs.mean(), xs.std()
        assert lower == pytest.approx(mean - 2 * sigma, abs=1e-9)
        assert upper == pytest.approx(mean + 2 * sigma, abs=1e-9)

    def test_empty_column(self):
        with pytest.raises(ValueError):
            condition_thresholds([])


class TestCountDeviations:
    def test_observer_at_mean_everywhere(self):
        rows = [[10, 20, 30], [30, 40, 50], [20, 30, 40]]
        m = ScoreMatrix(["a", "b", "mid"], ["c1", "c2", "c3"], rows)
        assert count_deviations(m, "mid") == (0, 0)

    def test_single_extreme_observer_matches_oracle(self):
        # 10 faithful at 0 plus one observer at 100, 20 conditions
        rows = [[0.0] * 20 for _ in range(10)] + [[100.0] * 20]
        names = [f"f{i}" for i in range(10)] + ["loud"]
        m = ScoreMatrix(names, [f"c{j}" for j in range(20)], rows)
        assert count_deviations(m, "loud") == oracle_counts(rows, 10)

    def test_two_observer_matrix_matches_oracle(self):
        rows = [[40.0, 60.0, 45.0, 55.0], [60.0, 40.0, 55.0, 45.0]]
        m = ScoreMatrix(["a", "b"], ["c1", "c2", "c3", "c4"], rows)
        for i, obs in enumerate(["a", "b"]):
            assert count_deviations(m, obs) == oracle_counts(rows, i)

    def test_unknown_observer(self):
        m = ScoreMatrix(["a", "b"], ["c"], [[1.0], [2.0]])
        with pytest.raises(KeyError):
            count_deviations(m, "zz")


class TestScreen:
    def test_identical_observers_nobody_rejected(self):
        rows = [[10.0, 50.0, 90.0]] * 5
        m = ScoreMatrix([f"o{i}" for i in range(5)], ["a", "b", "c"], rows)
        refined, report = screen(m)
        assert refined == m
        assert report.rejected == ()
        assert set(report.retained) == set(m.observers)

    def test_desk_scale_panel_27_to_18(self, panel_27):
        refined, report = screen(panel_27)
        assert sorted(report.rejected) == [f"A{i}" for i in range(9)]
        assert len(report.retained) == 18
        assert len(refined.observers) == 18
        # independent straight-from-definition recount
        rows = [list(r) for r in panel_27.scores]
        retained, rejected, details = oracle_screen(list(panel_27.observers), rows)
        assert sorted(rejected) == sorted(report.rejected)
        for v in report.verdicts:
            p, q, freq, bal, step = details[v.observer_id]
            assert (v.p_count, v.q_count) == (p, q)
            assert v.frequency_ratio == pytest.approx(freq, abs=1e-12)
            if bal is None:
                assert v.balance_ratio is None
            else:
                assert v.balance_ratio == pytest.approx(bal, abs=1e-12)
            assert v.step == step

    def test_below_frequency_gate_never_rejected(self):
        # hand-built verdict logic check: freq 0.04 with full imbalance
        from qoelab.screening import ObserverVerdict  # noqa: F401
        cfg = ScreeningConfig()
        freq, bal = 0.04, 1.0
        assert not (freq > cfg.frequency_limit and bal >= cfg.balance_limit)

    def test_single_observer_rejected_input(self):
        m = ScoreMatrix(["only"], ["c1", "c2"], [[10.0, 20.0]])
        with pytest.raises(ScreeningError):
            screen(m)

    def test_all_rejected_raises(self):
        # two mirrored extreme observers over many conditions: with the
        # frequency limit forced to near zero and no balance gate, both fall
        rows = [[0.0, 100.0] * 10, [100.0, 0.0] * 10]
        m = ScoreMatrix(["a", "b"], [f"c{j}" for j in range(20)], rows)
        cfg = ScreeningConfig(frequency_limit=1e-9, balance_limit=1.0)
        refined, report = screen(m, cfg)  # bands are sqrt(20) wide: nobody crosses
        assert report.rejected == ()

    def test_verdict_partition(self, panel_27):
        _, report = screen(panel_27)
        assert set(report.retained) | set(report.rejected) == set(panel_27.observers)
        assert set(report.retained) & set(report.rejected) == set()
        assert len(report.verdicts) == len(panel_27.observers)

    def test_permutation_equivariance(self, panel_27):
        rng = np.random.default_rng(3)
        perm = rng.permutation(len(panel_27.observers))
        shuffled = ScoreMatrix([panel_27.observers[i] for i in perm],
                               panel_27.conditions, panel_27.scores[perm, :])
        _, rep_a = screen(panel_27)
        _, rep_b = screen(shuffled)
        assert set(rep_a.rejected) == set(rep_b.rejected)
        by_id_a = {v.observer_id: v for v in rep_a.verdicts}
        by_id_b = {v.observer_id: v for v in rep_b.verdicts}
        assert by_id_a == by_id_b

    def test_duplicate_of_retained_observer_harmless(self):
        # thresholds unaffected: all observers identical except one mild deviant
        rows = [[50.0, 50.0, 50.0, 50.0]] * 6 + [[55.0, 45.0, 55.0, 45.0]]
        names = [f"o{i}" for i in range(6)] + ["dev"]
        m = ScoreMatrix(names, ["a", "b", "c", "d"], rows)
        _, rep = screen(m)
        dup = ScoreMatrix(names + ["o0_copy"], ["a", "b", "c", "d"], rows + [rows[0]])
        _, rep_dup = screen(dup)
        step1_before = {v.observer_id for v in rep.verdicts if v.step == 1}
        step1_after = {v.observer_id for v in rep_dup.verdicts if v.step == 1}
        assert step1_before >= step1_after - {"o0_copy"}

    def test_pq_bounded_by_condition_count(self, panel_27):
        _, report = screen(panel_27)
        n = len(panel_27.conditions)
        for v in report.verdicts:
            assert 0 <= v.p_count + v.q_count <= n
            assert 0.0 <= v.frequency_ratio <= 1.0
            if v.balance_ratio is not None:
                assert 0.0 <= v.balance_ratio <= 1.0

    def test_brute_force_equivalence_random_matrices(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n_obs = int(rng.integers(2, 11))
            n_cond = int(rng.integers(1, 11))
            grid = rng.uniform(0, 100, (n_obs, n_cond))
            names = [f"o{i}" for i in range(n_obs)]
            m = ScoreMatrix(names, [f"c{j}" for j in range(n_cond)], grid)
            rows = [list(r) for r in grid]
            try:
                _, report = screen(m)
            except AllObserversRejected:
                with pytest.raises(ValueError):
                    oracle_screen(names, rows)
                continue
            retained, rejected, details = oracle_screen(names, rows)
            assert list(report.retained) == retained
            assert list(report.rejected) == rejected
            for v in report.verdicts:
                p, q, freq, bal, step = details[v.observer_id]
                assert (v.p_count, v.q_count, v.rejected, v.step) == \
                    (p, q, step is not None, step)


class TestReportRendering:
    def test_table_and_text(self, panel_27):
        _, report = screen(panel_27)
        table = report_to_table(report)
        lines = table.strip().splitlines()
        assert lines[0] == "observer_id,p_count,q_count,frequency_ratio,balance_ratio,rejected,step"
        assert len(lines) == 1 + len(panel_27.observers)
        text = report_to_text(report)
        assert "retained: 18" in text
        assert "rejected: 9" in text
