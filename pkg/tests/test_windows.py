import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_signal, shift_oracle
from gabornct.algebra import WeightSpec, janssen_coefficients
from gabornct.errors import DimensionError, ParameterError
from gabornct.gabor import figa_constant
from gabornct.tf_core import LatticeSpec, tf_shift
from gabornct.windows import (
    WindowFamily,
    ambiguity_quadrature,
    condition_a_sum,
    condition_a_terms,
    continuous_condition_a,
    gaussian_ambiguity,
    make_window,
    modulation_norm,
    parse_window,
    stft,
)


def gaussian(L, sigma=1.0):
    return make_window(WindowFamily("gaussian", L, sigma))


def test_point_mass():
    np.testing.assert_array_equal(make_window(WindowFamily("point_mass", 4)), [1, 0, 0, 0])


@pytest.mark.parametrize("kind", ["gaussian", "boxcar", "hann", "point_mass"])
@pytest.mark.parametrize("L", [16, 64, 81])
def test_windows_have_unit_norm(kind, L):
    g = make_window(WindowFamily(kind, L))
    assert np.linalg.norm(g) == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize("kind", ["gaussian", "hann"])
def test_even_windows(kind):
    g = make_window(WindowFamily(kind, 64))
    np.testing.assert_allclose(g[1:], g[1:][::-1], atol=1e-16)


def test_gaussian_matches_sampled_continuous_gaussian():
    """At L=64 the periodization adds < 1e-20 to the samples near the origin."""
    L = 64
    g = gaussian(L)
    t = np.minimum(np.arange(L), L - np.arange(L))
    raw = np.exp(-np.pi * t**2 / L)
    np.testing.assert_allclose(g / g[0], raw, rtol=1e-12, atol=1e-20)


def test_window_names():
    np.testing.assert_allclose(parse_window("boxcar2", 4), np.array([1, 1, 0, 0]) / np.sqrt(2))
    assert np.count_nonzero(parse_window("boxcar", 16)) == 4
    assert np.count_nonzero(parse_window("hann8", 32)) == 7
    with pytest.raises(ParameterError):
        parse_window("triangle", 8)


@pytest.mark.parametrize(
    "fam",
    [
        dict(kind="gaussian", L=8, sigma=0.0),
        dict(kind="gaussian", L=8, sigma=-1.0),
        dict(kind="sinc", L=8),
        dict(kind="boxcar", L=8, width=9),
        dict(kind="boxcar", L=1),
    ],
)
def test_window_validation(fam):
    with pytest.raises(ParameterError):
        WindowFamily(**fam)


def test_stft_fast_equals_direct(rng):
    f, g = random_signal(rng, 16), random_signal(rng, 16)
    fast = stft(f, g)
    direct = stft(f, g, method="direct")
    assert np.abs(fast - direct).max() < 1e-12
    assert np.array_equal(fast, stft(f, g, workers=3))
    for x in range(16):
        for w in range(16):
            assert fast[x, w] == pytest.approx(np.vdot(shift_oracle(g, x, w), f), abs=1e-12)


def test_stft_examples():
    g = gaussian(32)
    assert stft(g, g)[0, 0] == pytest.approx(1)
    d0 = np.array([1.0, 0, 0, 0])
    d1 = np.array([0, 1.0, 0, 0])
    V = np.abs(stft(d1, d0))
    np.testing.assert_allclose(V[1], 1)
    np.testing.assert_allclose(np.delete(V, 1, axis=0), 0)
    with pytest.raises(DimensionError):
        stft(np.ones(4), np.ones(5))
    with pytest.raises(ParameterError):
        stft(d0, d0, method="slow")


def test_gaussian_stft_peaks_at_origin():
    V = np.abs(stft(gaussian(64), gaussian(64)))
    assert np.unravel_index(np.argmax(V), V.shape) == (0, 0)
    assert np.sum(V == V.max()) == 1


def test_energy_identity(rng):
    """sum |V_g f|^2 = L |f|^2 |g|^2, checked against a brute-force double sum."""
    L = 8
    f, g = random_signal(rng, L), random_signal(rng, L)
    brute = sum(abs(np.vdot(shift_oracle(g, x, w), f)) ** 2 for x in range(L) for w in range(L))
    expected = L * np.linalg.norm(f) ** 2 * np.linalg.norm(g) ** 2
    assert brute == pytest.approx(expected, rel=1e-12)
    assert np.sum(np.abs(stft(f, g)) ** 2) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 11), st.integers(0, 11))
def test_stft_covariance(seed, u, eta):
    rng = np.random.default_rng(seed)
    L = 12
    f, g = random_signal(rng, L), random_signal(rng, L)
    V = np.abs(stft(f, g))
    W = np.abs(stft(tf_shift(f, (u, eta)), g))
    np.testing.assert_allclose(W, np.roll(V, (u, eta), axis=(0, 1)), atol=1e-12)


def test_modulation_norm_point_mass():
    d0 = make_window(WindowFamily("point_mass", 16))
    assert modulation_norm(d0, d0, 0) == pytest.approx(1)


def test_modulation_norm_shift_bound(rng):
    L = 16
    g = gaussian(L)
    w = WeightSpec(2)
    for _ in range(10):
        f = random_signal(rng, L)
        u, eta = (int(v) for v in rng.integers(-L // 2, L // 2, size=2))
        lhs = modulation_norm(tf_shift(f, (u, eta)), g, w)
        assert lhs <= float(w(u, eta)) * modulation_norm(f, g, w) * (1 + 1e-12)


def test_gaussian_is_better_localized_than_boxcar():
    L = 64
    g = gaussian(L)
    box = make_window(WindowFamily("boxcar", L))
    gauss_norm = modulation_norm(g, g, 2)
    assert math.isfinite(gauss_norm)
    assert gauss_norm < modulation_norm(box, box, 2)


def test_condition_a_point_mass():
    d0 = make_window(WindowFamily("point_mass", 4))
    assert condition_a_sum(d0, d0, LatticeSpec(4, 2, 2)) == pytest.approx(2)


def test_condition_a_gaussian_tail():
    spec = LatticeSpec(144, 12, 12)
    g = gaussian(144)
    index, terms = condition_a_terms(g, g, spec, 2)
    r = np.max(np.abs(index), axis=1)
    assert np.sum(terms[r > 3]) < 1e-6 * np.sum(terms)


def test_condition_a_ladder_increases():
    spec = LatticeSpec(64, 4, 4)
    g = gaussian(64)
    sums = [condition_a_sum(g, g, spec, s) for s in (0, 2, 4)]
    assert all(map(math.isfinite, sums))
    assert sums[0] < sums[1] < sums[2]


def test_condition_a_matches_janssen_norm():
    for spec in (LatticeSpec(64, 4, 4), LatticeSpec(36, 3, 6)):
        g = gaussian(spec.L)
        seq, _ = janssen_coefficients(g, g, spec)
        assert condition_a_sum(g, g, spec) == pytest.approx(seq.norm() / figa_constant(spec), rel=1e-13)


def test_ambiguity_closed_form_examples():
    assert gaussian_ambiguity(0, 0) == pytest.approx(1)
    assert abs(gaussian_ambiguity(1, 0)) == pytest.approx(math.exp(-math.pi / 2))
    assert abs(ambiguity_quadrature(1, 0)) == pytest.approx(math.exp(-math.pi / 2), abs=1e-13)


def test_ambiguity_symmetry():
    for x, w in [(0.7, 0.3), (1.5, -2.0)]:
        plus = ambiguity_quadrature(x, w)
        minus = ambiguity_quadrature(-x, -w)
        phase = complex(np.exp(-2j * np.pi * x * w))
        assert minus == pytest.approx(plus.conjugate() * phase, abs=1e-12)
        assert gaussian_ambiguity(-x, -w) == pytest.approx(gaussian_ambiguity(x, w).conjugate() * phase, abs=1e-15)


def test_ambiguity_closed_form_against_quadrature(rng):
    pts = rng.uniform(-3, 3, size=(20, 2))
    for x, w in pts:
        assert abs(gaussian_ambiguity(x, w) - ambiguity_quadrature(x, w)) < 1e-10


def test_continuous_condition_a():
    total = continuous_condition_a(8)
    assert total == pytest.approx(2.015, abs=5e-4)
    assert abs(continuous_condition_a(12) - total) < 1e-10
    assert total == pytest.approx(continuous_condition_a(8, method="closed"), abs=1e-12)
