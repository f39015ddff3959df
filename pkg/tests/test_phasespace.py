import numpy as np
import pytest

from wlcheck.errors import DomainError, ExhaustedSamplerError
from wlcheck.phasespace import (AccelerationLaw, PhasePoint, PointSampler,
                                SamplingDomain, accel_jacobians,
                                sample_points)


def test_phase_point_validation():
    p = PhasePoint([[1.0, 2.0, 3.0]], [[0.1, 0.2, 0.3]])
    assert p.n_particles == 1
    assert p.flat().shape == (6,)
    with pytest.raises(ValueError):
        PhasePoint([[1.0, 2.0]], [[0.1, 0.2]])
    with pytest.raises(ValueError):
        PhasePoint([[np.nan, 0, 0]], [[0, 0, 0]])


def test_phase_point_immutable():
    p = PhasePoint([[1.0, 2.0, 3.0]], [[0.1, 0.2, 0.3]])
    with pytest.raises(ValueError):
        p.x[0, 0] = 9.0


def test_sampler_is_deterministic_and_incremental():
    dom = SamplingDomain(seed=11)
    a = PointSampler(dom, 1).take(10)
    s = PointSampler(dom, 1)
    b = s.take(4) + s.take(6)
    for p, q in zip(a, b):
        assert np.array_equal(p.x, q.x)
        assert np.array_equal(p.v, q.v)


def test_sampler_respects_constraints():
    dom = SamplingDomain(box=(-0.5, 0.5), s_max=0.8, speed_margin=0.2,
                         v3_exclusions=((0.1, 0.05),), seed=3)
    for p in sample_points(dom, 50, 2):
        assert dom.contains(p)
        assert np.all(np.abs(p.x) <= 0.5)
        speeds2 = (p.v ** 2).sum(axis=1)
        assert np.all(np.sqrt(speeds2) <= 0.8)
        assert np.all(1.0 - speeds2 >= 0.2)
        assert np.all(np.abs(p.v[:, 2] - 0.1) >= 0.05)


def test_sampler_zero_speed_domain():
    dom = SamplingDomain(s_max=0.0, seed=5)
    for p in sample_points(dom, 5, 1):
        assert np.all(p.v == 0.0)


def test_sampler_exhaustion():
    # an impossible exclusion band swallowing every velocity
    dom = SamplingDomain(s_max=0.2, v3_exclusions=((0.0, 5.0),), seed=1)
    with pytest.raises(ExhaustedSamplerError):
        sample_points(dom, 3, 1)


def test_law_basic_evaluation_and_descriptor():
    law = AccelerationLaw.from_expressions([["x1", "0", "0"]])
    p = PhasePoint([[2.0, 0.0, 0.0]], [[0.0, 0.0, 0.0]])
    assert np.allclose(law.accel_at(p), [[2.0, 0.0, 0.0]])
    assert law.descriptor.startswith("dsl:")


def test_law_kinematics_validation():
    with pytest.raises(ValueError):
        AccelerationLaw(1, lambda x, v: [[0, 0, 0]], kinematics="newton")


def test_law_valid_at():
    law = AccelerationLaw(1, lambda x, v: [[0, 0, 0]], kinematics="poincare",
                          poles_v3=(1.0,))
    fast = PhasePoint([[0, 0, 0]], [[0.8, 0.8, 0.0]])
    assert not law.valid_at(fast)           # |v| >= 1
    near = PhasePoint([[0, 0, 0]], [[0.0, 0.0, 1.0]])
    assert not law.valid_at(near)           # at the pole
    ok = PhasePoint([[0, 0, 0]], [[0.1, 0.0, 0.2]])
    assert law.valid_at(ok)


def test_law_default_domain_gets_pole_guards():
    law = AccelerationLaw(1, lambda x, v: [[0, 0, 0]], poles_v3=(1.0,))
    assert law.domain.v3_exclusions == ((1.0, 0.1),)


def test_two_particle_expressions():
    law = AccelerationLaw.from_expressions(
        [["v1@2 - v1@1", "0", "0"], ["0", "x2@1", "0"]], n_particles=2)
    p = PhasePoint([[0.0, 3.0, 0.0], [0.0, 0.0, 0.0]],
                   [[1.0, 0.0, 0.0], [4.0, 0.0, 0.0]])
    out = law.accel_at(p)
    assert out[0, 0] == 3.0
    assert out[1, 1] == 3.0


def test_accel_jacobians_linear_law():
    # A = (x1, 0, 0): dA1/dx1 = 1, all else zero
    law = AccelerationLaw.from_expressions([["x1", "0", "0"]])
    p = PhasePoint([[0.5, 0.0, 0.0]], [[0.1, 0.2, 0.3]])
    a, dx, dv = accel_jacobians(law, p)
    assert np.allclose(a, [[0.5, 0.0, 0.0]])
    want_dx = np.zeros((1, 3, 1, 3))
    want_dx[0, 0, 0, 0] = 1.0
    assert np.allclose(dx, want_dx)
    assert np.allclose(dv, 0.0)


def test_accel_jacobians_velocity_law():
    # A = v: dA_l/dv_i = delta_li
    law = AccelerationLaw.from_expressions([["v1", "v2", "v3"]])
    p = PhasePoint([[0.0, 0.0, 0.0]], [[0.3, -0.1, 0.2]])
    a, dx, dv = accel_jacobians(law, p)
    assert np.allclose(a, p.v)
    assert np.allclose(dx, 0.0)
    assert np.allclose(dv[0, :, 0, :], np.eye(3))


def test_accel_jacobians_match_finite_difference():
    law = AccelerationLaw.from_expressions(
        [["sin(x2)*v3", "exp(v1)-1", "x1*x3+v2^2"]])
    p = PhasePoint([[0.3, -0.5, 0.8]], [[0.2, 0.4, -0.3]])
    a, dx, dv = accel_jacobians(law, p)
    h = 1e-5
    for l in range(3):
        for i in range(3):
            xp = p.x.copy()
            xp[0, i] += h
            xm = p.x.copy()
            xm[0, i] -= h
            num = (law.accel_at(PhasePoint(xp, p.v))[0, l]
                   - law.accel_at(PhasePoint(xm, p.v))[0, l]) / (2 * h)
            assert dx[0, l, 0, i] == pytest.approx(num, abs=1e-8)
            vp = p.v.copy()
            vp[0, i] += h
            vm = p.v.copy()
            vm[0, i] -= h
            num = (law.accel_at(PhasePoint(p.x, vp))[0, l]
                   - law.accel_at(PhasePoint(p.x, vm))[0, l]) / (2 * h)
            assert dv[0, l, 0, i] == pytest.approx(num, abs=1e-8)


def test_law_domain_error_propagates():
    law = AccelerationLaw.from_expressions([["1/v1", "0", "0"]])
    p = PhasePoint([[0.0, 0.0, 0.0]], [[0.0, 0.1, 0.0]])
    with pytest.raises(DomainError):
        law.accel_at(p)
