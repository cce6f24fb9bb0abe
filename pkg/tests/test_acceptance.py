"""Primary acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion logs one PASS/FAIL line, collected in the
"acceptance criteria" section of the pytest terminal summary.
"""

import os
import shutil
import subprocess
import sys

import pytest

from curvelab import experiments as ex

SEED = 0


def _judge(log, num, res, budget):
    line = res.line()
    if budget is not None and res.elapsed >= budget:
        line += f" [over the {budget:g} s budget]"
    log(num, line)
    assert res.passed, line
    if budget is not None:
        assert res.elapsed < budget, line


def test_01_determinant_identity(acceptance_log):
    _judge(acceptance_log, 1, ex.check_det_identity(SEED, n=10_000, tol=1e-9), 2)


def test_02_matrix_lower_bound(acceptance_log):
    _judge(acceptance_log, 2, ex.check_matrix_lower_bound(SEED, n=1000, tol=1e-12), 2)


def test_03_gradient_identity(acceptance_log):
    _judge(acceptance_log, 3, ex.check_gradient_identity(SEED, n=1000, tol=1e-9), 2)


def test_04_partition_of_unity_and_plancherel(acceptance_log):
    _judge(acceptance_log, 4, ex.check_partition_plancherel(SEED), 5)


def test_05_augmented_van_der_corput(acceptance_log):
    _judge(acceptance_log, 5, ex.check_vdc(SEED, n=200), 10)


def test_06_product_kernel_support(acceptance_log):
    _judge(acceptance_log, 6, ex.check_kernel_support(SEED, tol=1e-12), 10)


@pytest.mark.xfail(strict=True, reason="pre-asymptotic on r = 2^4..2^10: the maximum still grows; see README")
def test_07_product_kernel_decay(acceptance_log):
    _judge(acceptance_log, 7, ex.check_product_decay(range(4, 11), slope_max=-0.05, resid_max=0.15), 60)


@pytest.mark.xfail(strict=True, reason="pre-asymptotic on l = 2..10 for m = 2, 3; see README")
def test_08_ttstar_kernel_decay(acceptance_log):
    _judge(acceptance_log, 8, ex.check_ttstar_decay((2, 3), range(2, 11), slope_max=-0.15, resid_max=0.2), 60)


def test_09_s_ell_operator_norm_decay(acceptance_log):
    _judge(acceptance_log, 9, ex.check_sell_decay(SEED), 120)


def test_10_symmetries(acceptance_log):
    _judge(acceptance_log, 10, ex.check_symmetries(SEED, n=20, tol=1e-10), 30)


def test_11_even_m_term_two_vanishes(acceptance_log):
    res = ex.check_even_vanishing(SEED, n=20)
    _judge(acceptance_log, 11, res, 10)
    assert res.value == 0.0


def test_12_odd_m_domination(acceptance_log):
    _judge(acceptance_log, 12, ex.check_odd_domination(SEED, slack=1e-8), 30)


def test_13_square_function_suite(acceptance_log):
    _judge(acceptance_log, 13, ex.check_appendix(SEED), 60)


def _lab_command():
    exe = shutil.which("lab")
    return [exe] if exe else [sys.executable, "-m", "curvelab.cli"]


def test_14_lab_all_is_reproducible(acceptance_log, tmp_path):
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        proc = subprocess.run([*_lab_command(), "all", "--seed", "7", "--out", str(out)],
                              capture_output=True, text=True, env=dict(os.environ))
        # exit status 1 only reports failing criteria; 2 would be a usage error
        assert proc.returncode in (0, 1), proc.stderr
        outs.append((out / "report.csv").read_bytes())
    same = outs[0] == outs[1]
    acceptance_log(14, f"{'PASS' if same else 'FAIL'} lab all --seed 7 twice: "
                       f"report.csv byte-identical={same} ({len(outs[0])} bytes)")
    assert same
