import numpy as np
import pytest

from curvelab import experiments as ex


def test_cofactor_det_matches_lapack():
    M = np.random.default_rng(0).normal(size=(50, 4, 4))
    assert np.allclose(ex.cofactor_det(M), np.linalg.det(M), rtol=1e-12, atol=1e-13)


def test_permanent_of_ones():
    assert ex._permanent(np.ones((4, 4))) == 24.0


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("LAB_THREADS", "4")
    assert ex.parallel_map(lambda v: v * v, range(20)) == [v * v for v in range(20)]


@pytest.mark.parametrize("raw", ["0", "-2", "x"])
def test_lab_threads_rejects_malformed(monkeypatch, raw):
    monkeypatch.setenv("LAB_THREADS", raw)
    with pytest.raises(ValueError):
        ex.lab_threads()


def test_check_result_line():
    res = ex.CheckResult("demo", True, 1.5e-16, 1e-9, elapsed=0.25)
    assert res.line() == "PASS demo: value=1.5e-16 threshold=1e-09 (0.2 s)"


def test_small_checks_are_seed_deterministic():
    a = ex.check_det_identity(3, n=200)
    b = ex.check_det_identity(3, n=200)
    assert a.passed and a.value == b.value
    assert a.report.to_csv_text() == b.report.to_csv_text()
    assert ex.check_det_identity(4, n=200).value != a.value


def test_sell_pattern_is_active_everywhere():
    p = ex.sell_pattern(1, 3, 256)
    assert p.active.all() and len(set(p.values.tolist())) <= 4
