import subprocess
import sys

import numpy as np
import pytest

from fracsplit.cli import build_parser, main, spec_from_args
from fracsplit.rational import read_coeffs_csv, simpson_coeffs


def test_parser_defaults():
    spec = spec_from_args(build_parser().parse_args([]))
    assert spec.experiment == "stationary_table"
    assert (spec.n1, spec.n2) == (256, 256)
    assert spec.alphas == (0.25, 0.5, 0.75) and spec.ms == (50, 100, 200)
    assert spec.method == "simpson" and spec.taus == pytest.approx((0.01,))


def test_parser_grid_and_taus():
    args = build_parser().parse_args(["--grid", "16x8", "--experiment", "convergence_order",
                                      "--T", "0.2"])
    spec = spec_from_args(args)
    assert (spec.n1, spec.n2) == (16, 8)
    assert spec.taus == pytest.approx((0.02, 0.01, 0.005))
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--grid", "16x8x2"])


def test_stationary_csv(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["--grid", "8", "--alpha", "0.5", "--m", "4", "6", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,m,eps2,epsinf"
    assert len(lines) == 3
    assert lines[1].startswith("5.000000000e-01,4,")


def test_failed_cell_sets_exit_code(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = main(["--grid", "8", "--alpha", "0.5", "--m", "5", "6", "--out", str(out)])
    assert code == 1
    assert "failed" in capsys.readouterr().err
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("5.000000000e-01,6,")


def test_emit_coeffs(tmp_path):
    out = tmp_path / "p.csv"
    code = main(["--experiment", "scalar_profile", "--grid", "8", "--alpha", "0.5",
                 "--m", "10", "--samples", "5", "--out", str(out),
                 "--emit-coeffs", str(tmp_path / "coeffs")])
    assert code == 0
    files = list((tmp_path / "coeffs").glob("*.csv"))
    assert len(files) == 1
    back = read_coeffs_csv(files[0], 0.5)
    ref = simpson_coeffs(0.5, 10)
    assert np.array_equal(back.a, ref.a) and np.array_equal(back.b, ref.b)
    assert len(out.read_text().splitlines()) == 6


def test_module_entry_point_stdout():
    res = subprocess.run([sys.executable, "-m", "fracsplit", "--experiment", "evolution",
                          "--grid", "4", "--alpha", "0.5", "--m", "4", "--tau", "0.05",
                          "--levels", "2"],
                         capture_output=True, text=True, check=True)
    lines = res.stdout.splitlines()
    assert lines[0] == "alpha,m,sigma,tau,t,eps2,epsinf"
    assert len(lines) == 4


def test_bad_spec_exits_with_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["--alpha", "1.5"])
    assert info.value.code == 2
