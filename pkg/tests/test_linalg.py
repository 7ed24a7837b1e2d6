import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from narrownet.linalg import (
    ConvergenceError,
    NonFiniteError,
    ShapeError,
    fro_norm,
    matmul,
    min_singular_value,
)

import oracles


def test_matmul_identity():
    a = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(matmul(np.eye(3), a), a)


def test_matmul_hand_example():
    assert matmul([[1, 2], [3, 4]], [[1], [1]]).tolist() == [[3.0], [7.0]]


def test_matmul_matches_triple_loop():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((4, 5)), rng.standard_normal((5, 3))
    np.testing.assert_allclose(matmul(a, b), oracles.matmul_loops(a.tolist(), b.tolist()), rtol=1e-14, atol=1e-15)


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError) as info:
        matmul(np.ones((2, 3)), np.ones((4, 2)))
    assert "2x3" in str(info.value) or "(2, 3)" in str(info.value)
    assert info.value.shapes == ((2, 3), (4, 2))


def test_matmul_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        matmul([[np.nan]], [[1.0]])


def test_fro_norm_examples():
    assert fro_norm(np.zeros((3, 2))) == 0.0
    assert fro_norm([[3.0, 4.0]]) == 5.0


def test_fro_norm_matches_sum_of_squares():
    a = np.random.default_rng(1).standard_normal((6, 6))
    assert fro_norm(a) == pytest.approx(oracles.sum_of_squares(a.tolist()), rel=1e-14)


def test_min_singular_value_examples():
    assert min_singular_value(np.eye(4)) == pytest.approx(1.0, rel=1e-14)
    assert min_singular_value([[3.0, 0, 0], [0, 2.0, 0]]) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_min_singular_value_matches_bisection_oracle(seed):
    a = np.random.default_rng(seed).standard_normal((5, 8))
    assert min_singular_value(a) == pytest.approx(oracles.min_singular_value_oracle(a.tolist()), rel=1e-8)


def test_min_singular_value_tall_matrix():
    a = np.random.default_rng(7).standard_normal((9, 4))
    assert min_singular_value(a) == pytest.approx(oracles.min_singular_value_oracle(a.tolist()), rel=1e-8)


def test_min_singular_value_rank_deficient_is_zero():
    a = np.ones((3, 5))
    assert min_singular_value(a) < 1e-7


def test_min_singular_value_residual_failure_is_structured(monkeypatch):
    import scipy.linalg

    def bad_eigh(g, **kw):
        return np.array([0.0]), np.ones((g.shape[0], 1))

    monkeypatch.setattr(scipy.linalg, "eigh", bad_eigh)
    with pytest.raises(ConvergenceError) as info:
        min_singular_value(np.diag([1.0, 2.0, 3.0]))
    assert info.value.residual > 1e-10


matrices = st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1)).map(
    lambda t: np.random.default_rng(t[2]).standard_normal((t[0], t[1]))
)


@settings(max_examples=50, deadline=None)
@given(matrices, st.integers(0, 2**32 - 1))
def test_min_singular_value_permutation_invariant(a, seed):
    rng = np.random.default_rng(seed)
    b = a[rng.permutation(a.shape[0])][:, rng.permutation(a.shape[1])]
    s = min_singular_value(a)
    assert min_singular_value(b) == pytest.approx(s, rel=1e-10, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(matrices, st.floats(-100, 100).filter(lambda c: abs(c) > 1e-3))
def test_min_singular_value_scales_with_abs_c(a, c):
    assert min_singular_value(c * a) == pytest.approx(abs(c) * min_singular_value(a), rel=1e-10, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(matrices)
def test_fro_norm_squared_is_trace_of_gram(a):
    # sum of squared singular values equals the Gram trace
    g = oracles.gram_loops(a.tolist())
    assert fro_norm(a) ** 2 == pytest.approx(sum(g[i][i] for i in range(len(g))), rel=1e-12)
