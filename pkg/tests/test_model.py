import math
import warnings

import numpy as np
import pytest

from narrownet.init import lecun_init, mirrored_lecun_init
from narrownet.linalg import ShapeError, min_singular_value
from narrownet.model import (
    ACTIVATIONS,
    AssumptionWarning,
    Head,
    Params,
    WidthError,
    check_activation,
    feature_matrix,
    forward,
    jacobian_w,
    square_sub_jacobian,
)

import oracles

ACT_NAMES = sorted(ACTIVATIONS)


@pytest.mark.parametrize("name", ACT_NAMES)
def test_activation_derivative_matches_central_difference(name):
    act = ACTIVATIONS[name]
    z = np.random.default_rng(0).uniform(-5, 5, 100)
    h = 1e-5
    numeric = (act.value(z + h) - act.value(z - h)) / (2 * h)
    np.testing.assert_allclose(act.derivative(z), numeric, rtol=1e-7, atol=1e-10)
    if act.derivative_from_value is not None:
        np.testing.assert_allclose(act.derivative_from_value(act.value(z)), act.derivative(z), rtol=1e-12, atol=1e-15)


def test_zero_set_warning_only_for_non_tanh():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_activation("tanh")
    for name in ("sigmoid", "softplus"):
        with pytest.warns(AssumptionWarning):
            check_activation(name)


def test_unknown_activation():
    with pytest.raises(ValueError, match="unknown activation"):
        check_activation("relu")


def test_params_validation():
    with pytest.raises(WidthError, match="width m is an even number"):
        Params(np.zeros((2, 3)), np.zeros(1), Head.PAIRED)
    with pytest.raises(ShapeError):
        Params(np.zeros((2, 4)), np.zeros(4), Head.PAIRED)
    with pytest.raises(ShapeError):
        Params(np.zeros((2, 4)), np.zeros(2), Head.PLAIN)
    p = Params(np.zeros((2, 4)), np.zeros(2), Head.PAIRED)
    assert (p.d, p.m) == (2, 4)
    assert not p.w.flags.writeable


def test_paired_equal_units_cancel():
    w = np.array([[0.7, 0.7], [-0.2, -0.2]])
    p = Params(w, [3.1], Head.PAIRED)
    x = np.random.default_rng(0).standard_normal((5, 2))
    assert np.all(forward(p, x) == 0.0)
    assert np.all(feature_matrix(p, x) == 0.0)


def test_paired_closed_form():
    p = Params([[1.0, -1.0]], [1.0], Head.PAIRED)
    assert forward(p, [[1.0]])[0] == pytest.approx(2 * math.tanh(1.0), rel=1e-15)


@pytest.mark.parametrize("head", ["plain", "paired"])
@pytest.mark.parametrize("name", ACT_NAMES)
def test_forward_matches_per_sample_loop(head, name):
    rng = np.random.default_rng(3)
    p = lecun_init(4, 6, head, seed=11, activation=name)
    x = rng.standard_normal((5, 4))
    act = np.vectorize(ACTIVATIONS[name].value)
    f = lambda z: float(act(z))
    expected = [oracles.network_output(p.w.tolist(), p.v.tolist(), row, head, f) for row in x.tolist()]
    np.testing.assert_allclose(forward(p, x), expected, rtol=1e-13, atol=1e-14)


def test_feature_matrix_zero_weights():
    p = Params(np.zeros((3, 4)), np.ones(4))
    assert np.all(feature_matrix(p, np.ones((2, 3))) == 0.0)


@pytest.mark.parametrize("head", ["plain", "paired"])
def test_feature_matrix_times_v_is_forward(head):
    p = lecun_init(5, 8, head, seed=2)
    x = np.random.default_rng(0).standard_normal((7, 5))
    np.testing.assert_allclose(feature_matrix(p, x) @ p.v, forward(p, x), atol=1e-12, rtol=0)


def test_forward_dimension_mismatch():
    p = lecun_init(3, 4)
    with pytest.raises(ShapeError):
        forward(p, np.ones((2, 4)))


def test_jacobian_paired_single_sample():
    w = np.array([[0.3, -0.8]])
    p = Params(w, [1.7], Head.PAIRED)
    x = 0.9
    d = ACTIVATIONS["tanh"].derivative
    expected = [1.7 * d(0.3 * x) * x, -1.7 * d(-0.8 * x) * x]
    np.testing.assert_allclose(jacobian_w(p, [[x]])[0], expected, rtol=1e-15)


def test_jacobian_blocks_negate_at_mirrored_init():
    p = mirrored_lecun_init(4, 6, Head.PAIRED, seed=5)
    x = np.random.default_rng(1).standard_normal((9, 4))
    jac = jacobian_w(p, x)
    half = 3 * 4
    assert np.array_equal(jac[:, half:], -jac[:, :half])


@pytest.mark.parametrize("head", ["plain", "paired"])
@pytest.mark.parametrize("name", ACT_NAMES)
def test_jacobian_matches_finite_differences(head, name):
    p = lecun_init(3, 4, head, seed=8, activation=name)
    x = np.random.default_rng(2).standard_normal((6, 3))
    jac = jacobian_w(p, x)
    w = p.w.copy()
    h = 1e-6
    numeric = np.zeros_like(jac)
    for j in range(p.m):
        for k in range(p.d):
            wp, wm = w.copy(), w.copy()
            wp[k, j] += h
            wm[k, j] -= h
            numeric[:, j * p.d + k] = (forward(p.replace(w=wp), x) - forward(p.replace(w=wm), x)) / (2 * h)
    err = np.max(np.abs(jac - numeric)) / np.max(np.abs(numeric))
    assert err <= 1e-5


def test_square_sub_jacobian_n_equals_d():
    p = lecun_init(4, 3, seed=1)
    x = np.random.default_rng(0).standard_normal((4, 4))
    assert np.array_equal(square_sub_jacobian(p, x), jacobian_w(p, x)[:, :4])


def test_square_sub_jacobian_index_arithmetic():
    # n = 6, d = 4: all of unit 1 and the first two coordinates of unit 2
    p = lecun_init(4, 4, seed=3)
    x = np.random.default_rng(4).standard_normal((6, 4))
    sub = square_sub_jacobian(p, x)
    jac = jacobian_w(p, x)
    pairs = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1)]
    for col, (unit, coord) in enumerate(pairs):
        assert np.array_equal(sub[:, col], jac[:, unit * 4 + coord])


def test_square_sub_jacobian_width_error():
    p = lecun_init(2, 2, seed=0)
    with pytest.raises(WidthError, match="m >= 2n/d"):
        square_sub_jacobian(p, np.ones((3, 2)))


def test_forward_linear_in_v():
    p = lecun_init(5, 6, seed=9)
    x = np.random.default_rng(1).standard_normal((8, 5))
    base = forward(p, x)
    for alpha in np.random.default_rng(2).uniform(-10, 10, 20):
        np.testing.assert_allclose(forward(p.replace(v=alpha * p.v), x), alpha * base, rtol=1e-12, atol=1e-14)


def test_paired_half_swap_negates_output():
    p = lecun_init(3, 6, Head.PAIRED, seed=4)
    x = np.random.default_rng(3).standard_normal((7, 3))
    swapped = p.replace(w=np.concatenate([p.w[:, 3:], p.w[:, :3]], axis=1))
    assert np.array_equal(forward(swapped, x), -forward(p, x))


@pytest.mark.parametrize("seed", range(5))
def test_duplication_identity_at_mirrored_init(seed):
    p = mirrored_lecun_init(10, 8, Head.PAIRED, seed=seed)
    x = np.random.default_rng(seed).standard_normal((30, 10))
    jac = jacobian_w(p, x)
    full = min_singular_value(jac)
    half = min_singular_value(jac[:, : 4 * 10])
    assert full == pytest.approx(math.sqrt(2) * half, rel=1e-9)
