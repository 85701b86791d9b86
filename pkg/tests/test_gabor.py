import numpy as np
import pytest

from conftest import frame_operator_oracle, random_signal, shift_oracle
from gabornct.errors import DimensionError, NotAFrameError, ParameterError
from gabornct.gabor import (
    GaborSystem,
    analysis,
    dual_window,
    figa_constant,
    figa_residual,
    figa_sides,
    frame_bounds,
    frame_operator_matrix,
    operator_power,
    power_window,
    reconstruct,
    synthesis,
    tight_window,
    wexler_raz_check,
)
from gabornct.tf_core import LatticeSpec, tf_shift_matrix
from gabornct.windows import WindowFamily, make_window

TIGHT_G = np.array([1, 1, 0, 0]) / np.sqrt(2)
TIGHT_SPEC = LatticeSpec(4, 2, 1)


def gaussian(L):
    return make_window(WindowFamily("gaussian", L))


def test_analysis_matches_inner_products(rng):
    spec = LatticeSpec(12, 3, 2)
    g, f = random_signal(rng, 12), random_signal(rng, 12)
    c = analysis(GaborSystem(g, spec), f)
    assert c.shape == (4, 6)
    for k in range(4):
        for l in range(6):
            assert c[k, l] == pytest.approx(np.vdot(shift_oracle(g, 3 * k, 2 * l), f), abs=1e-12)


def test_analysis_point_masses():
    g = np.array([1, 0, 0, 0])
    f = np.array([0, 0, 1, 0])
    c = analysis(GaborSystem(g, LatticeSpec(4, 2, 2)), f)
    np.testing.assert_allclose(c[0], 0, atol=1e-15)
    np.testing.assert_allclose(c[1], [1, 1], atol=1e-15)


def test_analysis_origin_is_energy(rng):
    g = random_signal(rng, 8)
    assert analysis(GaborSystem(g, LatticeSpec(8, 2, 2)), g)[0, 0] == pytest.approx(np.linalg.norm(g) ** 2)


def test_synthesis_of_unit_coefficient_is_window(rng):
    spec = LatticeSpec(8, 2, 4)
    g = random_signal(rng, 8)
    c = np.zeros((4, 2))
    c[0, 0] = 1
    np.testing.assert_allclose(synthesis(GaborSystem(g, spec), c), g, atol=1e-14)


@pytest.mark.parametrize("L,a,b", [(8, 2, 2), (12, 4, 3), (16, 2, 8)])
def test_synthesis_is_adjoint_of_analysis(rng, L, a, b):
    spec = LatticeSpec(L, a, b)
    sys = GaborSystem(random_signal(rng, L), spec)
    f = random_signal(rng, L)
    c = random_signal(rng, spec.size).reshape(spec.n_time, spec.n_freq)
    assert np.vdot(c, analysis(sys, f)) == pytest.approx(np.vdot(synthesis(sys, c), f), abs=1e-12)


def test_synthesis_shape_check():
    with pytest.raises(DimensionError):
        synthesis(GaborSystem(TIGHT_G, TIGHT_SPEC), np.zeros((3, 3)))


def test_zero_window_rejected():
    with pytest.raises(ParameterError):
        GaborSystem(np.zeros(4), TIGHT_SPEC)


@pytest.mark.parametrize("L,a,b", [(8, 2, 2), (12, 3, 4), (12, 6, 1), (16, 4, 2)])
def test_frame_operator_matches_dense_sum(rng, L, a, b):
    spec = LatticeSpec(L, a, b)
    g, gamma = random_signal(rng, L), random_signal(rng, L)
    np.testing.assert_allclose(frame_operator_matrix(g, gamma, spec), frame_operator_oracle(g, gamma, spec), atol=1e-12)


def test_frame_operator_examples():
    g = random_signal(np.random.default_rng(1), 4)
    g /= np.linalg.norm(g)
    np.testing.assert_allclose(frame_operator_matrix(g, g, LatticeSpec(4, 1, 1)), 4 * np.eye(4), atol=1e-14)
    np.testing.assert_allclose(frame_operator_matrix(TIGHT_G, TIGHT_G, TIGHT_SPEC), 2 * np.eye(4), atol=1e-15)
    d0 = np.array([1.0, 0, 0, 0])
    np.testing.assert_allclose(frame_operator_matrix(d0, d0, TIGHT_SPEC), np.diag([4, 0, 4, 0]), atol=1e-15)


def test_frame_operator_commutes_with_lattice(rng):
    spec = LatticeSpec(16, 4, 2)
    S = frame_operator_matrix(random_signal(rng, 16), random_signal(rng, 16), spec)
    for p in spec.points():
        P = tf_shift_matrix(16, p)
        assert np.abs(S @ P - P @ S).max() < 1e-10


def test_workers_do_not_change_bits(rng):
    spec = LatticeSpec(36, 3, 4)
    g = random_signal(rng, 36)
    S1 = frame_operator_matrix(g, g, spec, workers=1)
    S4 = frame_operator_matrix(g, g, spec, workers=4)
    assert np.array_equal(S1, S4)
    c = random_signal(rng, spec.size).reshape(spec.n_time, spec.n_freq)
    assert np.array_equal(synthesis(GaborSystem(g, spec), c, 1), synthesis(GaborSystem(g, spec), c, 3))


def test_frame_bounds_examples():
    fb = frame_bounds(TIGHT_G, TIGHT_SPEC)
    assert fb.A == pytest.approx(2) and fb.B == pytest.approx(2)
    assert fb.is_frame and fb.cond == pytest.approx(1)
    fb = frame_bounds(np.array([1.0, 0, 0, 0]), TIGHT_SPEC)
    assert fb.A == pytest.approx(0, abs=1e-14) and fb.B == pytest.approx(4)
    assert not fb.is_frame and fb.cond == float("inf")


def test_frame_predicate_matches_invertibility():
    for g, spec in [(gaussian(16), LatticeSpec(16, 2, 4)), (np.array([1.0, 0, 0, 0]), TIGHT_SPEC)]:
        S = frame_operator_matrix(g, g, spec)
        fb = frame_bounds(g, spec)
        if fb.is_frame:
            assert np.abs(S @ np.linalg.inv(S) - np.eye(spec.L)).max() < 1e-8
        else:
            assert np.linalg.matrix_rank(S) < spec.L


def test_power_window_on_tight_system():
    np.testing.assert_allclose(power_window(TIGHT_G, TIGHT_SPEC, -1), TIGHT_G / 2, atol=1e-15)
    h = power_window(TIGHT_G, TIGHT_SPEC, -0.5)
    np.testing.assert_allclose(h, TIGHT_G / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(frame_operator_matrix(h, h, TIGHT_SPEC), np.eye(4), atol=1e-14)


def test_power_window_needs_a_frame():
    with pytest.raises(NotAFrameError):
        dual_window(np.array([1.0, 0, 0, 0]), TIGHT_SPEC)
    with pytest.raises(NotAFrameError):
        operator_power(np.zeros((3, 3)), -1)


def test_operator_power_against_inverse(rng):
    A = random_signal(rng, 36).reshape(6, 6)
    S = A @ A.conj().T + np.eye(6)
    np.testing.assert_allclose(operator_power(S, -1), np.linalg.inv(S), atol=1e-12)
    half = operator_power(S, 0.5)
    np.testing.assert_allclose(half @ half, S, atol=1e-12)


def test_reconstruction_both_orderings(rng):
    spec = LatticeSpec(32, 4, 4)
    g = gaussian(32)
    gamma = dual_window(g, spec)
    f = random_signal(rng, 32)
    np.testing.assert_allclose(reconstruct(f, g, gamma, spec), f, atol=1e-10)
    np.testing.assert_allclose(reconstruct(f, gamma, g, spec), f, atol=1e-10)


def test_tight_window_is_parseval():
    spec = LatticeSpec(36, 3, 4)
    h = tight_window(gaussian(36), spec)
    fb = frame_bounds(h, spec)
    assert abs(fb.A - 1) < 1e-10 and abs(fb.B - 1) < 1e-10


def test_wexler_raz_tight_example():
    rep = wexler_raz_check(TIGHT_G, TIGHT_G / 2, TIGHT_SPEC)
    assert rep["constant"] == 2
    assert rep["diagonal_value"] == pytest.approx(1)
    assert rep["biorthogonal"] and rep["dual_pair"] and rep["consistent"]


def test_wexler_raz_gaussian_dual_and_control():
    spec = LatticeSpec(64, 4, 4)
    g = gaussian(64)
    good = wexler_raz_check(g, dual_window(g, spec), spec)
    assert good["max_offdiagonal"] < 1e-8 and good["biorthogonal"] and good["consistent"]
    bad = wexler_raz_check(g, g, spec)
    assert bad["max_deviation"] > 0.1 and not bad["biorthogonal"] and bad["consistent"]


def test_wexler_raz_detects_non_duals(rng):
    spec = LatticeSpec(16, 2, 4)
    g = gaussian(16)
    gamma = dual_window(g, spec) + 1e-3 * random_signal(rng, 16)
    rep = wexler_raz_check(g, gamma, spec)
    assert not rep["biorthogonal"] and not rep["dual_pair"] and rep["consistent"]


@pytest.mark.parametrize("a,b", [(2, 4), (4, 2), (2, 2), (1, 4)])
def test_figa_constant_calibration(rng, a, b):
    """The ratio of the two sums is the same for every input, and equals L/(ab)."""
    spec = LatticeSpec(8, a, b)
    ratios = []
    for _ in range(10):
        lhs, rhs = figa_sides(*(random_signal(rng, 8) for _ in range(4)), spec)
        ratios.append(lhs / rhs)
    np.testing.assert_allclose(ratios, figa_constant(spec), rtol=1e-12)


def test_figa_examples(rng):
    d0 = np.array([1.0, 0, 0, 0])
    assert figa_residual(d0, d0, d0, d0, LatticeSpec(4, 2, 2)) < 1e-14
    f = [random_signal(rng, 8) for _ in range(4)]
    assert figa_residual(*f, LatticeSpec(8, 2, 4)) < 1e-12
    lhs, rhs = figa_sides(f[0], f[1], np.zeros(8), f[3], LatticeSpec(8, 2, 4))
    assert lhs == 0 and rhs == 0
