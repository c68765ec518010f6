"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
status lines.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from qoelab import (
    DiscreteChannel,
    DistortionMatrix,
    SourceModel,
    channel_capacity,
    dump_scores,
    fisher_ci,
    kurtosis,
    load_scores,
    rd_curve,
    screen,
)
from qoelab.cli import run

from conftest import panel_matrix
from oracle_screening import oracle_screen


def h2(p):
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _report(name):
    print(f"PASS: {name}")


def test_bsc_capacity_closed_form():
    start = time.perf_counter()
    res = channel_capacity(DiscreteChannel([[0.9, 0.1], [0.1, 0.9]]), tol=1e-9)
    elapsed = time.perf_counter() - start
    expected = 1 - h2(0.1)
    assert expected == pytest.approx(0.531004, abs=1e-6)
    assert abs(res.capacity - expected) < 1e-6
    assert elapsed < 1.0
    _report(f"BSC capacity {res.capacity:.6f} vs 1-H(0.1) in {elapsed * 1e3:.1f} ms")


def test_erasure_capacity_closed_form():
    for eps in (0.1, 0.3, 0.5):
        channel = DiscreteChannel([[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]])
        res = channel_capacity(channel, tol=1e-9)
        assert abs(res.capacity - (1 - eps)) < 1e-6
    _report("erasure capacity = 1 - eps within 1e-6 for eps in {0.1, 0.3, 0.5}")


def test_rd_oracle_equivalence():
    source = SourceModel([0.5, 0.5])
    hamming = DistortionMatrix([[0.0, 1.0], [1.0, 0.0]])
    curve = rd_curve(source, hamming, np.linspace(-10, -0.2, 20), tol=1e-12)
    for pt in curve:
        assert abs(pt.rate - (1 - h2(pt.distortion))) < 1e-5
    ds = [pt.distortion for pt in curve]
    rs = [pt.rate for pt in curve]
    for a, b in zip(rs, rs[1:]):
        assert b <= a + 1e-9  # non-increasing
    for i in range(1, len(curve) - 1):
        t = (ds[i] - ds[i - 1]) / (ds[i + 1] - ds[i - 1])
        assert rs[i] <= rs[i - 1] + t * (rs[i + 1] - rs[i - 1]) + 1e-9  # convex
    _report("binary-Hamming R(D) sweep matches H(p) - H(D) within 1e-5 bits")


def test_fisher_ci_precision():
    mpmath.mp.dps = 50
    def mp_bound(r, n, sign):
        return float(mpmath.tanh(mpmath.atanh(r) + sign * mpmath.mpf("1.96")
                                 / mpmath.sqrt(n - 3)))

    ci = fisher_ci(0.9, 30, 0.05)
    assert abs(ci.low - 0.7987) < 1e-4
    assert abs(ci.high - 0.9517) < 1e-4
    assert abs(ci.low - mp_bound(mpmath.mpf("0.9"), 30, -1)) < 1e-12
    assert abs(ci.high - mp_bound(mpmath.mpf("0.9"), 30, +1)) < 1e-12

    sym = fisher_ci(0.0, 103, 0.05)
    assert abs(sym.low + sym.high) < 1e-12
    _report("fisher_ci matches the high-precision arctanh evaluation")


def test_screening_reproduces_panel_reduction():
    matrix = panel_matrix()  # 18 faithful + 9 adversarial over 40 conditions
    refined, report = screen(matrix)
    assert sorted(report.rejected) == [f"A{i}" for i in range(9)]
    assert len(refined.observers) == 18
    rows = [list(r) for r in matrix.scores]
    retained, rejected, details = oracle_screen(list(matrix.observers), rows)
    assert sorted(rejected) == sorted(report.rejected)
    for v in report.verdicts:
        p, q, freq, bal, step = details[v.observer_id]
        assert (v.p_count, v.q_count, v.step) == (p, q, step)
        assert v.frequency_ratio == pytest.approx(freq, abs=1e-12)
        if bal is not None:
            assert v.balance_ratio == pytest.approx(bal, abs=1e-12)
    _report("27-observer panel refines to exactly the 18 faithful observers")


def test_screening_brute_force_equivalence():
    rng = np.random.default_rng(777)
    checked = 0
    from qoelab import AllObserversRejected, ScoreMatrix
    while checked < 100:
        n_obs = int(rng.integers(2, 11))
        n_cond = int(rng.integers(1, 11))
        grid = rng.uniform(0, 100, (n_obs, n_cond))
        names = [f"o{i}" for i in range(n_obs)]
        matrix = ScoreMatrix(names, [f"c{j}" for j in range(n_cond)], grid)
        rows = [list(r) for r in grid]
        try:
            _, report = screen(matrix)
        except AllObserversRejected:
            with pytest.raises(ValueError):
                oracle_screen(names, rows)
            checked += 1
            continue
        retained, rejected, details = oracle_screen(names, rows)
        assert list(report.retained) == retained
        assert list(report.rejected) == rejected
        for v in report.verdicts:
            p, q, freq, bal, step = details[v.observer_id]
            assert (v.p_count, v.q_count, v.rejected, v.step) == (p, q, step is not None, step)
        checked += 1
    _report("100 random matrices: verdicts identical to the brute-force oracle")


def test_kurtosis_ground_truth():
    xs = [1, 2, 3, 4, 5]
    mean = Fraction(sum(xs), 5)
    m2 = sum((x - mean) ** 2 for x in xs) / 5
    m4 = sum((x - mean) ** 4 for x in xs) / 5
    assert m4 / m2 ** 2 == Fraction(17, 10)
    assert kurtosis(xs).beta2 == 1.7
    with pytest.raises(ValueError):
        kurtosis([50, 50, 50, 50])
    _report("kurtosis of {1..5} is exactly 1.7; constant input raises")


def test_cli_determinism(tmp_path, capsys):
    scores = tmp_path / "scores.csv"
    scores.write_text(dump_scores(panel_matrix()), encoding="utf-8")
    (tmp_path / "pmf.txt").write_text("0.5\n0.5\n")
    (tmp_path / "d.csv").write_text("0,1\n1,0\n")
    (tmp_path / "bsc.csv").write_text("0.9,0.1\n0.1,0.9\n")

    def invoke(root):
        root.mkdir()
        run(["screen", "--scores", str(scores), "--out", str(root / "scr")])
        run(["mos", "--scores", str(scores), "--out", str(root / "mos.csv")])
        run(["compare", "--scores", str(scores),
             "--refined", str(root / "scr" / "refined_scores.csv"),
             "--out", str(root / "cmp.csv"), "--plot", str(root / "plot.csv")])
        run(["ci", "--r", "0.25", "--n", "50", "--out", str(root / "ci.txt")])
        run(["capacity", "--channel", str(tmp_path / "bsc.csv"),
             "--out", str(root / "cap.txt")])
        run(["rd", "--source", str(tmp_path / "pmf.txt"),
             "--distortion", str(tmp_path / "d.csv"),
             "--slopes=-6,-3,-1.5,-0.75", "--out", str(root / "curve.csv")])
        run(["check", "--curve", str(root / "curve.csv"), "--rate", "0.4", "--dist", "0.1"])
        run(["report", "--scores", str(scores), "--out", str(root / "rep")])
        return capsys.readouterr().out.replace(str(root), "<out>")

    first = invoke(tmp_path / "run1")
    second = invoke(tmp_path / "run2")
    assert first == second
    files_a = {p.relative_to(tmp_path / "run1"): p.read_bytes()
               for p in sorted((tmp_path / "run1").rglob("*")) if p.is_file()}
    files_b = {p.relative_to(tmp_path / "run2"): p.read_bytes()
               for p in sorted((tmp_path / "run2").rglob("*")) if p.is_file()}
    assert files_a == files_b
    _report("every CLI subcommand is byte-deterministic across repeat runs")


def test_120_condition_pipeline_under_10s(tmp_path):
    matrix = panel_matrix(n_conditions=120, seed=5)
    scores = tmp_path / "scores.csv"
    scores.write_text(dump_scores(matrix), encoding="utf-8")
    start = time.perf_counter()
    assert run(["screen", "--scores", str(scores), "--out", str(tmp_path / "scr")]) == 0
    assert run(["mos", "--scores", str(scores), "--out", str(tmp_path / "mos.csv")]) == 0
    assert run(["compare", "--scores", str(scores),
                "--refined", str(tmp_path / "scr" / "refined_scores.csv"),
                "--out", str(tmp_path / "cmp.csv")]) == 0
    assert run(["report", "--scores", str(scores), "--out", str(tmp_path / "rep")]) == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    refined = load_scores((tmp_path / "scr" / "refined_scores.csv").read_text())
    assert len(refined.conditions) == 120
    _report(f"120-condition screen/mos/compare/report pipeline in {elapsed:.2f} s")
