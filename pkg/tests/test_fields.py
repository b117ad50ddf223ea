"""Soliton potentials, fields, constraints, shell current and config round trip."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinsoliton import clifford as cl
from spinsoliton import fields
from spinsoliton.errors import DomainError, ShellError, SingularPointError

TOY_K = fields.PhysicalConstants(e=1.0, m=1.0, hbar=2.0, c=1.0)
TOY = fields.SolitonParams(c1=-1.0, c2=3.0, r0=2.0)


def test_toy_published_parameters():
    p = fields.paper_params(TOY_K)
    assert TOY_K.beta == 4.0
    assert (p.c1, p.c2, p.r0) == (-1.0, 3.0, 2.0)


def test_physical_beta_is_inverse_fine_structure_squared():
    k = fields.PhysicalConstants.physical()
    assert math.sqrt(k.beta) == pytest.approx(137.035999, rel=1e-8)


@pytest.mark.parametrize("kw", [dict(r0=0.0), dict(r0=-1.0), dict(axis=(1.0, 1.0, 0.0)), dict(theta0=1.5)])
def test_invalid_params_rejected(kw):
    base = dict(c1=-1.0, c2=3.0, r0=2.0)
    with pytest.raises(DomainError):
        fields.SolitonParams(**{**base, **kw})


def test_invalid_constants_rejected():
    with pytest.raises(DomainError):
        fields.PhysicalConstants(1.0, 0.0, 1.0, 1.0)


def test_fields_vanish_inside_shell():
    x = np.array([[0.3, 0.1, -0.2], [1.0, 0.5, 0.5]])
    assert np.all(fields.field_E(x, TOY) == 0.0)
    assert np.all(fields.field_H(x, TOY) == 0.0)


def test_origin_is_rejected():
    with pytest.raises(SingularPointError):
        fields.field_E(np.zeros(3), TOY)


def test_coulomb_and_dipole_on_axis():
    x = np.array([0.0, 0.0, 4.0])
    np.testing.assert_allclose(fields.field_E(x, TOY), [0.0, 0.0, -1.0 / 16.0])
    # on the axis the dipole field is 2 c2 / r^3 along d
    np.testing.assert_allclose(fields.field_H(x, TOY), [0.0, 0.0, 2 * 3.0 / 64.0])
    x = np.array([4.0, 0.0, 0.0])
    np.testing.assert_allclose(fields.field_H(x, TOY), [0.0, 0.0, -3.0 / 64.0])


def test_potential_components_outside():
    x = np.array([3.0, 0.0, 0.0])
    A = fields.potential_A(x, TOY).vector_part()
    # A0 = c1/r, spatial = c2 (d x r)/r^3
    np.testing.assert_allclose(A, [-1.0 / 3.0, 0.0, 3.0 * 3.0 / 27.0, 0.0])


def test_step_values_on_shell():
    assert fields.a0_profile(2.0, TOY) == -0.5
    assert fields.a0_profile(2.0, fields.SolitonParams(-1.0, 3.0, 2.0, theta0=0.5)) == -0.25
    assert fields.phi_profile(2.0, TOY) == 0.0


def test_faraday_is_bivector_holding_E_and_H():
    x = np.array([1.0, 2.0, 3.0])
    F = fields.faraday(x, TOY)
    assert F.is_grade(2)
    s = fields.sample_field(x, TOY)
    np.testing.assert_array_equal(s.E, fields.field_E(x, TOY))
    np.testing.assert_array_equal(cl.relative_split(F).H, fields.field_H(x, TOY))


def test_constraint_on_trivial_gauge():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((200, 3)) * 3.0
    w = fields.omega(x, TOY, fields.GaugeData.trivial())
    cs = fields.constraint_check(w)
    assert np.all(cs.p4 == 0.0)


def test_constraint_scalar_for_simple_vectors():
    cs = fields.constraint_check(cl.GAMMA[0] * math.sqrt(2.0))
    assert cs.s == pytest.approx(2.0)
    assert cs.p4 == 0.0
    cs = fields.constraint_check(cl.GAMMA5 * cl.GAMMA[0] * math.sqrt(2.0))
    assert cs.s == pytest.approx(-2.0)
    assert cs.p4 == pytest.approx(0.0)


def test_constraint_rejects_bivectors():
    with pytest.raises(DomainError):
        fields.constraint_check(cl.GAMMA[0] * cl.GAMMA[1])


def test_effective_current_charge_density():
    k = fields.PhysicalConstants(1.0, 1.0, 1.0, 3.0)
    cur = fields.effective_current(np.array([0.0, 0.0, 5.0]), TOY, k)
    np.testing.assert_allclose(cur.point, [0.0, 0.0, 2.0])
    # -(c / 4 pi r0) * c1 / r0
    expected = -3.0 / (4 * math.pi * 2.0) * (-1.0 / 2.0)
    np.testing.assert_allclose(cur.surface_density.vector_part(), [expected, 0.0, 0.0, 0.0])


def test_gauge_constraint_residual():
    shell = fields.MultiplierShell.for_params(TOY, TOY_K)
    assert fields.gauge_constraint_residual(fields.GaugeData.trivial(), shell, np.ones(3)) == (0.0, 0.0)
    bad = fields.GaugeData(phi=lambda r: r - 1.0)
    _, res = fields.gauge_constraint_residual(bad, shell, np.ones(3))
    assert res == pytest.approx(abs(shell.shell_weight) * 1.0)
    assert not bad.is_admissible(TOY.r0)


def test_lagrangian_density_is_e2_minus_h2():
    shell = fields.MultiplierShell.for_params(TOY, TOY_K)
    x = np.array([1.0, 3.0, -2.0])
    E, H = fields.field_E(x, TOY), fields.field_H(x, TOY)
    got = fields.lagrangian_density(x, TOY, fields.GaugeData.trivial(), shell, TOY_K)
    assert got == pytest.approx((E @ E - H @ H) / (8 * math.pi), rel=1e-12)
    with pytest.raises(ShellError):
        fields.lagrangian_density(np.array([2.0, 0.0, 0.0]), TOY, fields.GaugeData.trivial(), shell, TOY_K)


def test_config_roundtrip():
    p = fields.SolitonParams(-1.0, 0.1 + 0.2, 1.0 / 3.0, axis=(0.6, 0.0, 0.8), theta0=0.5)
    k, q = fields.load_config(fields.dump_config(TOY_K, p))
    assert k == TOY_K and q == p


def test_config_missing_key():
    with pytest.raises(DomainError):
        fields.load_config("e=1\nm=1\n")


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.8, 5.0),
    st.floats(0.0, math.pi),
    st.floats(0.0, 2 * math.pi),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
)
def test_rotating_axis_rotates_fields(r, theta, az, ax, ay):
    axis = np.array([ax, ay, 1.0])
    axis /= np.linalg.norm(axis)
    p = TOY.with_axis(axis)
    x = fields.point_from_polar(r * p.r0 * 1.3, theta, p, az)
    ref = fields.point_from_polar(r * TOY.r0 * 1.3, theta, TOY, 0.0)
    # field magnitudes depend only on r and the angle to the axis
    assert np.linalg.norm(fields.field_H(x, p)) == pytest.approx(np.linalg.norm(fields.field_H(ref, TOY)), rel=1e-9)
    assert float(fields.field_H(x, p) @ axis) == pytest.approx(float(fields.field_H(ref, TOY)[2]), rel=1e-9, abs=1e-15)
