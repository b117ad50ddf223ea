"""Calibration solvers, brute-force oracles and the report structure."""

from __future__ import annotations

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinsoliton import clifford as cl
from spinsoliton import fields
from spinsoliton import observables as obs
from spinsoliton import verify
from spinsoliton.errors import ToleranceError

TOY_K = fields.PhysicalConstants(e=1.0, m=1.0, hbar=2.0, c=1.0)

positive = st.floats(0.1, 10.0)


def test_brute_force_oracle_matches_table():
    for a, b in itertools.product(range(16), repeat=2):
        assert verify.brute_force_blade_product(a, b) == cl.blade_product(a, b)


def test_toy_calibration():
    p = verify.calibrate(TOY_K)
    assert (p.r0, p.c2, p.c1) == (1.25, 1.875, -1.0)


@settings(max_examples=30, deadline=None)
@given(positive, positive, positive, positive)
def test_calibrated_params_hit_both_targets(e, m, hbar, c):
    k = fields.PhysicalConstants(e, m, hbar, c)
    p = verify.calibrate_newton(k)
    assert obs.closed_energy(p) == pytest.approx(k.rest_energy, rel=1e-10)
    assert abs(obs.closed_Lz(p, k)) == pytest.approx(k.hbar / 2, rel=1e-10)
    assert verify.bracket(p, k) == pytest.approx(1 + 0.375 * k.beta, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(positive, positive, positive, positive)
def test_published_params_give_half_hbar_and_bracket_ratio(e, m, hbar, c):
    k = fields.PhysicalConstants(e, m, hbar, c)
    p = fields.paper_params(k)
    assert abs(obs.closed_Lz(p, k)) == pytest.approx(k.hbar / 2, rel=1e-12)
    ratio = obs.closed_energy(p) / k.rest_energy
    assert ratio == pytest.approx((1 + 0.375 * k.beta) / (1 + 0.75 * k.beta), rel=1e-12)


def test_physical_energy_ratio_near_one_half():
    cal = verify.calibration_result(fields.PhysicalConstants.physical())
    assert cal.energy_ratio_paper == pytest.approx(0.50004, abs=1e-5)
    assert cal.energy_ratio_calibrated == pytest.approx(1.0, rel=1e-10)


def test_damped_newton_simple_root():
    root = verify.damped_newton(lambda y: np.array([y[0] ** 2 - 4.0]), lambda y: np.array([[2 * y[0]]]), [10.0])
    assert root[0] == pytest.approx(2.0, rel=1e-12)


def test_damped_newton_stalls_without_root():
    with pytest.raises(ToleranceError):
        verify.damped_newton(lambda y: np.array([y[0] ** 2 + 1.0]), lambda y: np.array([[2 * y[0]]]), [1.0])


def test_check_helpers():
    assert verify._close("a", 1.0, 1.0 + 1e-11, 1e-10).passed
    assert not verify._close("a", 1.0, -1.0, 1e-8).passed
    assert verify._at_most("b", -1e-13, 1e-12).passed
    assert verify.Check("c", 1, 1, 0.0, True).as_dict()["pass"] is True


def test_random_offshell_points_avoid_shell():
    p = fields.SolitonParams(-1.0, 3.0, 2.0)
    x = verify.random_offshell_points(np.random.default_rng(1), p, 5000)
    r = np.linalg.norm(x, axis=-1)
    assert np.all(np.abs(r - p.r0) >= 1e-6 * p.r0)


@pytest.fixture(scope="module")
def toy_report():
    return verify.run_report(TOY_K, seed=0)


def test_report_structure(toy_report):
    assert set(toy_report) == {
        "calibration", "checks", "constants", "jumps", "observables", "params",
        "params_calibrated", "params_paper", "pass", "quadrature", "seed", "stencil",
    }
    assert toy_report["calibration"]["lz_ratio_paper"] == pytest.approx(1.0, rel=1e-12)
    assert toy_report["calibration"]["energy_ratio_paper"] == pytest.approx(0.625, rel=1e-12)
    json.loads(verify.dumps_report(toy_report))


def test_report_only_signed_lz_checks_fail(toy_report):
    failed = sorted(c["name"] for c in toy_report["checks"] if not c["pass"])
    assert failed == [
        "angular_momentum.numeric_vs_minus_2c1c2_over_3cr0",
        "angular_momentum.toy_Lz_equals_half_hbar",
    ]
    assert toy_report["pass"] is False


def test_report_deterministic(toy_report):
    again = verify.run_report(TOY_K, seed=0)
    assert verify.dumps_report(again) == verify.dumps_report(toy_report)
