import numpy as np
import pytest

from narrownet.data import Dataset, make_synthetic
from narrownet.init import lecun_init, mirrored_lecun_init
from narrownet.linalg import ShapeError
from narrownet.model import ACTIVATIONS, Head, Params, feature_matrix, forward, jacobian_w
from narrownet.objective import grad, loss, residual

import oracles


def _instance(head="plain", act="tanh", seed=0, n=7, d=3, m=4):
    p = lecun_init(d, m, head, seed=seed, activation=act)
    rng = np.random.default_rng(seed)
    return p, Dataset(rng.standard_normal((n, d)), rng.standard_normal(n))


def test_loss_zero_at_perfect_fit():
    p, ds = _instance()
    fit = Dataset(ds.x, forward(p, ds.x))
    assert loss(p, fit) == 0.0
    g = grad(p, fit)
    assert np.all(g.grad_w == 0) and np.all(g.grad_v == 0)


def test_loss_hand_example():
    p = Params(np.zeros((1, 2)), np.zeros(2))
    assert loss(p, Dataset([[1.0], [2.0]], [1.0, 0.0])) == 0.5


@pytest.mark.parametrize("head", ["plain", "paired"])
def test_loss_matches_per_sample_sum(head):
    p, ds = _instance(head, seed=4)
    act = lambda z: float(np.tanh(z))
    total = 0.0
    for row, yi in zip(ds.x.tolist(), ds.y.tolist()):
        r = yi - oracles.network_output(p.w.tolist(), p.v.tolist(), row, head, act)
        total += 0.5 * r * r
    assert loss(p, ds) == pytest.approx(total, rel=1e-13)


def test_dimension_mismatch():
    p, _ = _instance(d=3)
    with pytest.raises(ShapeError):
        loss(p, Dataset(np.ones((2, 4)), np.ones(2)))
    with pytest.raises(ShapeError):
        grad(p, Dataset(np.ones((2, 4)), np.ones(2)))


def test_mirrored_grad_w_blocks_negate():
    p = mirrored_lecun_init(5, 6, Head.PAIRED, seed=2)
    ds = make_synthetic(9, 5, 1)
    g = grad(p, ds)
    assert np.array_equal(g.grad_w[:, 3:], -g.grad_w[:, :3])


def _fd(fn, theta):
    out = np.zeros_like(theta)
    for idx in np.ndindex(theta.shape):
        h = 1e-6 * (1 + abs(theta[idx]))
        plus, minus = theta.copy(), theta.copy()
        plus[idx] += h
        minus[idx] -= h
        out[idx] = (fn(plus) - fn(minus)) / (2 * h)
    return out


@pytest.mark.parametrize("head", ["plain", "paired"])
@pytest.mark.parametrize("act", sorted(ACTIVATIONS))
@pytest.mark.parametrize("seed", range(3))
def test_gradients_match_finite_differences(head, act, seed):
    p, ds = _instance(head, act, seed=seed, n=9, d=4, m=6)
    g = grad(p, ds)
    fd_w = _fd(lambda w: loss(p.replace(w=w), ds), p.w.copy())
    fd_v = _fd(lambda v: loss(p.replace(v=v), ds), p.v.copy())
    assert np.max(np.abs(g.grad_w - fd_w)) <= 1e-5 * np.max(np.abs(fd_w))
    assert np.max(np.abs(g.grad_v - fd_v)) <= 1e-5 * np.max(np.abs(fd_v))


@pytest.mark.parametrize("head", ["plain", "paired"])
def test_grad_w_is_jacobian_transpose_residual(head):
    p, ds = _instance(head, seed=5, m=6)
    r = residual(p, ds)
    jt_r = jacobian_w(p, ds.x).T @ r
    np.testing.assert_allclose(grad(p, ds).grad_w.T.ravel(), jt_r, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("head", ["plain", "paired"])
def test_grad_v_is_features_transpose_residual(head):
    p, ds = _instance(head, seed=6, m=6)
    expected = feature_matrix(p, ds.x).T @ residual(p, ds)
    np.testing.assert_allclose(grad(p, ds).grad_v, expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 3.0, -2.0])
def test_grad_v_under_v_scaling_matches_fd(alpha):
    p, ds = _instance("paired", seed=7, m=6)
    q = p.replace(v=alpha * p.v)
    fd_v = _fd(lambda v: loss(q.replace(v=v), ds), q.v.copy())
    np.testing.assert_allclose(grad(q, ds).grad_v, fd_v, rtol=1e-5, atol=1e-8)


def test_grad_norm_zero_when_loss_zero():
    p = mirrored_lecun_init(4, 6, Head.PAIRED, seed=0)
    ds = Dataset(np.random.default_rng(0).standard_normal((5, 4)), np.zeros(5))
    assert loss(p, ds) == 0.0
    assert grad(p, ds).norm() == 0.0
