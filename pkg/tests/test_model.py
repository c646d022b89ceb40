import numpy as np
import pytest

from dgflow import (EntropyParts, InteractionKernel, Linear, MirrorF, ModelSpec,
                    validate_model)


def make_model(f, g_choice, **kw):
    return ModelSpec(f=f, g_choice=g_choice, H=lambda r: r * r,
                     Hprime=lambda r: 2 * r, **kw)


def test_linear_mobility_passes():
    report = validate_model(make_model(lambda r: r, Linear(1.0)))
    assert report.passed, report.failures


def test_sqrt_mobility_mirror_passes():
    report = validate_model(make_model(np.sqrt, MirrorF()))
    assert report.passed, report.failures


def test_linear_bound_violation_fails():
    report = validate_model(make_model(lambda r: r, Linear(0.5)))
    assert not report.passed
    assert any("exceeds C" in msg for msg in report.failures)


def test_decreasing_f_with_mirror_fails():
    # fermion-style mobility decreases past rho = 1/2; g = f is then invalid
    report = validate_model(make_model(lambda r: r * (1 - r), MirrorF()))
    assert not report.passed


def test_f_nonzero_at_vacuum_fails():
    report = validate_model(make_model(lambda r: r + 0.1, Linear(2.0)))
    assert not report.passed


def test_asymmetric_kernel_fails():
    kern = InteractionKernel(evaluate=lambda z: np.exp(-z) * z, smooth=True)
    report = validate_model(make_model(lambda r: r, MirrorF(), W=kern))
    assert not report.passed
    assert any("symmetric" in msg for msg in report.failures)


def test_g_evaluation():
    m = make_model(lambda r: r * r, Linear(3.0))
    np.testing.assert_allclose(m.g(np.array([0.5, 2.0])), [1.5, 6.0])
    m2 = make_model(lambda r: r * r, MirrorF())
    np.testing.assert_allclose(m2.g(np.array([0.5, 2.0])), [0.25, 4.0])


def test_hprime_safe_clamps_vacuum():
    m = ModelSpec(f=lambda r: r, g_choice=MirrorF(), H=lambda r: r,
                  Hprime=np.log)
    out = m.hprime_safe(np.array([0.0, 1.0]))
    assert np.isfinite(out).all()
    assert out[1] == 0.0


def test_entropy_parts_total():
    parts = EntropyParts(internal=1.0, confinement=-0.25, interaction=0.5)
    assert abs(parts.total - 1.25) < 1e-12 * (1 + abs(parts.total))
