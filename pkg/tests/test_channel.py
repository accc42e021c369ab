import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsfso.channel import (FadingModel, attenuation_gain, compose_channel, rytov_variance,
                            sample_pointing_offset, sample_turbulence, turbulence_variance,
                            worker_streams)

from conftest import WAVELENGTH


def test_diversity_ratio_exact():
    z = 860.555
    ratio = rytov_variance(1.4e-14, WAVELENGTH, z) / rytov_variance(1.4e-14, WAVELENGTH, z / 2)
    assert abs(ratio - 2 ** (11 / 6)) <= 4 * np.finfo(float).eps * 2 ** (11 / 6)
    assert ratio == pytest.approx(3.5636, abs=1e-4)


@settings(max_examples=50)
@given(cn2=st.floats(1e-17, 1e-12), z=st.floats(1.0, 1e4), factor=st.floats(0.1, 10))
def test_rytov_scaling(cn2, z, factor):
    base = rytov_variance(cn2, WAVELENGTH, z)
    assert rytov_variance(cn2 * factor, WAVELENGTH, z) == pytest.approx(factor * base, rel=1e-12)
    assert rytov_variance(cn2, WAVELENGTH, z * factor) == pytest.approx(factor ** (11 / 6) * base, rel=1e-12)
    assert rytov_variance(cn2, WAVELENGTH / factor, z) == pytest.approx(factor ** (7 / 6) * base, rel=1e-12)


def test_rytov_link_values():
    # 1.23 * Cn2 * k^(7/6) * z^(11/6) evaluated by hand for the 500 m hop
    k = 2 * math.pi / 1550e-9
    expected = 1.23 * 1.4e-14 * k ** (7 / 6) * 500 ** (11 / 6)
    assert rytov_variance(1.4e-14, 1550e-9, 500.0) == pytest.approx(expected, rel=1e-14)
    assert 0.07 < expected < 0.09


def test_rytov_rejects_nonpositive():
    with pytest.raises(ValueError):
        rytov_variance(0.0, WAVELENGTH, 1.0)
    assert turbulence_variance(0.0, WAVELENGTH, 100.0) == 0.0


def test_lognormal_moments():
    rng = np.random.default_rng(2024)
    s2 = 0.211
    h = sample_turbulence(s2, rng, 1_000_000)
    assert 0.997 <= h.mean() <= 1.003
    assert 0.99 <= np.log(h).var() / s2 <= 1.01


def test_zero_turbulence_is_unity():
    rng = np.random.default_rng(0)
    assert np.all(sample_turbulence(0.0, rng, 5) == 1.0)
    assert sample_turbulence(0.0, rng) == 1.0
    assert np.all(sample_pointing_offset(0.0, rng, 3) == 0.0)


def test_pointing_offset_spread():
    h = sample_pointing_offset(0.01, np.random.default_rng(1), 200_000)
    assert h.std() == pytest.approx(0.01, rel=0.01)


def test_attenuation():
    assert attenuation_gain(0.43e-3, 1000.0) == pytest.approx(math.exp(-0.43))
    with pytest.raises(ValueError):
        attenuation_gain(0.1, -1.0)


def test_compose_channel():
    draw = compose_channel(0.5, 1.2, 0.8, 0.5)
    assert draw.h == pytest.approx(0.5 * 0.8 * 1.2 * 0.5)
    for bad in ((1.5, 1, 1), (0.5, 0.0, 1), (0.5, 1, 0.0)):
        with pytest.raises(ValueError):
            compose_channel(*bad)


def test_fading_model_validation():
    with pytest.raises(ValueError):
        FadingModel(kappa=-1.0)
    with pytest.raises(ValueError):
        FadingModel(responsivity=0.0)


def test_worker_streams_reproducible_and_distinct():
    a = [g.random(4) for g in worker_streams(5, 3)]
    b = [g.random(4) for g in worker_streams(5, 3)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], a[1])
    with pytest.raises(ValueError):
        worker_streams(1, 0)
