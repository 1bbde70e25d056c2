import math

import numpy as np
import pytest

from hexnet.errors import DomainError
from hexnet.propagation import (
    LinkClass,
    fading_ccdf,
    kappa_los,
    kappa_nlos,
    path_gain,
    sample_fading,
)

BETA = 0.012774193548387098
DH = 3.1


def test_kappa_overhead_and_no_blockers(table3):
    assert kappa_los(DH, BETA, DH) == 1.0
    assert kappa_los(57.3, 0.0, DH) == 1.0


def test_kappa_value_at_ten_meters():
    r = math.sqrt(100.0 + DH * DH)
    assert kappa_los(r, BETA, DH) == pytest.approx(math.exp(-BETA * 10.0), rel=1e-12)
    assert kappa_los(r, BETA, DH) == pytest.approx(0.8800, abs=2e-4)


def test_kappa_partition():
    r = np.linspace(DH, 120.0, 64)
    total = kappa_los(r, BETA, DH) + kappa_nlos(r, BETA, DH)
    assert np.all(total == 1.0)


def test_kappa_domain_error():
    with pytest.raises(DomainError):
        kappa_los(DH - 1e-6, BETA, DH)


def test_path_gain_values(table3):
    r = table3.radio
    assert path_gain(LinkClass.THZ_LOS, 1.0, r) == pytest.approx(
        r.gamma_T * math.exp(-r.k_a), rel=1e-12)
    expected = r.gamma_T * math.exp(-0.7512) * 10.0**-2
    assert path_gain(LinkClass.THZ_LOS, 10.0, r) == pytest.approx(expected, rel=1e-12)
    assert path_gain(LinkClass.RF, 10.0, r) == pytest.approx(
        r.gamma_R * 10.0**-2.7, rel=1e-12)


def test_path_gain_monotone(table3):
    for link in LinkClass:
        assert path_gain(link, 5.0, table3.radio) > path_gain(link, 6.0, table3.radio)


def test_fading_ccdf_values(table3):
    r = table3.radio
    for link in LinkClass:
        assert fading_ccdf(link, 0.0, r) == 1.0
    assert fading_ccdf(LinkClass.RF, 0.5, r) == pytest.approx(math.exp(-0.5), rel=1e-12)
    # m = 3 gamma tail at x = 1: e^-3 (1 + 3 + 4.5)
    assert fading_ccdf(LinkClass.THZ_LOS, 1.0, r) == pytest.approx(
        0.4231900811268436, rel=1e-12)


def test_fading_ccdf_shape(table3):
    x = np.linspace(0.0, 12.0, 200)
    for link in LinkClass:
        vals = fading_ccdf(link, x, table3.radio)
        assert np.all(np.diff(vals) <= 1e-15)
        assert vals[0] == 1.0
        assert vals[-1] < 1e-3


def test_sample_fading_moments(table3):
    rng = np.random.default_rng(11)
    draws = sample_fading(LinkClass.THZ_LOS, rng, table3.radio, 1_000_000)
    assert abs(draws.mean() - 1.0) < 0.003
    assert abs(draws.var() - 1.0 / 3.0) < 0.005
    emp_tail = (draws >= 1.0).mean()
    assert emp_tail == pytest.approx(0.4231900811268436, abs=0.002)


def test_sample_fading_rayleigh_case(table3):
    rng = np.random.default_rng(12)
    draws = sample_fading(LinkClass.RF, rng, table3.radio, 500_000)
    assert abs(draws.mean() - 1.0) < 0.005
    assert (draws >= 0.5).mean() == pytest.approx(math.exp(-0.5), abs=0.003)


def test_unit_mean_every_class(table3):
    rng = np.random.default_rng(13)
    for link in LinkClass:
        draws = sample_fading(link, rng, table3.radio, 1_000_000)
        assert abs(draws.mean() - 1.0) < 0.003
