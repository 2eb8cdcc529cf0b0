"""Smoke tests for the python bindings; the heavy lifting lives in the C++
suites, these only check that the module is usable end to end."""

import json

import pytest

import simonlab


def test_version():
    assert simonlab.__version__


def test_s_set_size_values():
    assert simonlab.s_set_size(64, 3) == 43745
    assert simonlab.s_set_size(8, 2) == 37
    assert simonlab.s_set_size(6, 6) == 64


def test_binomial_parity_lucas():
    assert simonlab.binomial_parity(3, 1) == 1
    assert simonlab.binomial_parity(4, 2) == 0


def test_field_arithmetic():
    f16 = simonlab.FieldSpec.standard(4)
    assert f16.modulus == 0x13
    x = 0b0010
    assert f16.mul(x, f16.inv(x)) == 1
    coeffs = simonlab.lagrange_interpolate(f16, [(1, 1), (2, 2), (7, 7)])
    assert coeffs == [0, 1]  # the identity polynomial


def test_simon_recovers_a_planted_period():
    g = simonlab.VectorialFunction.random_permutation(6, seed=7)
    s = 0b101101
    shifted = simonlab.VectorialFunction(6, 6, [g(x ^ s) for x in range(64)])
    f = simonlab.concat_functions(g, shifted)
    report = simonlab.recover_period_space(f, seed=8)
    assert report["verified"]
    assert report["basis"] == [(1 << 6) | s]


def test_preimage_spectrum_mass():
    f = simonlab.VectorialFunction.random(5, 3, seed=11)
    denominator, numerators = simonlab.preimage_spectrum(f, f(0))
    assert sum(numerators) == denominator


def test_even_mansour_demo():
    oracle, planted = simonlab.even_mansour_oracle(8, seed=13)
    assert oracle.has_period(planted[0])


def test_farfalle_golden_vector():
    # b=8, seed 42, K = 0x2A over 6 bits, M = one byte 0x11, 8 output bits.
    key = "".join("1" if (0x2A >> i) & 1 else "0" for i in range(6))
    message = "".join("1" if (0x11 >> i) & 1 else "0" for i in range(8))
    z = simonlab.farfalle(8, 42, "linear", False, key, [message], 8)
    word = sum(1 << i for i, bit in enumerate(z) if bit == "1")
    assert word == 0xFD


def test_forgeries():
    sae = simonlab.forge_sae(8, 16, seed=17)
    assert sae["accepted"] and sae["fresh"]
    siv = simonlab.forge_siv(2, 8, 16, seed=19)
    assert siv["accepted"] and siv["fresh"]


def test_run_experiment_reports():
    code, report, summary = simonlab.run_experiment(
        "simon-demo",
        {"kind": "lrw", "n": "7", "trials": "2", "seed": "23", "timing": "off"},
    )
    assert code == 0
    lines = [json.loads(line) for line in report.splitlines() if line]
    assert lines[-1]["record"] == "summary"
    assert lines[-1]["succeeded"] == 2
    assert "2/2" in summary

    rerun = simonlab.run_experiment(
        "simon-demo",
        {"kind": "lrw", "n": "7", "trials": "2", "seed": "23", "timing": "off"},
    )
    assert rerun[1] == report  # byte-identical reruns


def test_config_errors_are_exit_code_2():
    code, _, _ = simonlab.run_experiment("simon-demo", {"bogus": "1"})
    assert code == 2


def test_count_only():
    code, report, summary = simonlab.run_experiment(
        "gfn-extract",
        {"method": "anf", "n": "64", "degree": "4", "count_only": "on"},
    )
    assert code == 0
    assert summary == "43745"


@pytest.mark.parametrize("bad", [(5, 65), (5, 6)])
def test_s_set_size_rejects_bad_input(bad):
    n, t = bad
    with pytest.raises(Exception):
        simonlab.s_set_size(n, t)
