"""Squared loss ``0.5 * sum_i (y_i - f(x_i))^2`` and its gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .linalg import ShapeError
from .model import Head, Params, feature_matrix, forward, outer_coefficients


@dataclass(frozen=True)
class Gradients:
    grad_w: np.ndarray
    grad_v: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.grad_w**2) + np.sum(self.grad_v**2)))


def _check(params: Params, dataset: Dataset) -> None:
    if dataset.d != params.d:
        raise ShapeError(
            f"dataset has d={dataset.d} but params expect d={params.d}", dataset.x.shape, params.w.shape
        )


def loss(params: Params, dataset: Dataset) -> float:
    _check(params, dataset)
    r = forward(params, dataset.x) - dataset.y
    return 0.5 * float(r @ r)


def grad(params: Params, dataset: Dataset) -> Gradients:
    """Analytic gradients without materialising the Jacobian.

    ``grad_w[:, j] = sum_i r_i c_j act'(w_j . x_i) x_i`` with residual
    ``r = f - y`` and ``c`` the signed outer coefficients; ``grad_v = Phi^T r``.
    """
    _check(params, dataset)
    x = dataset.x
    z = x @ params.w
    a = params.activation.value(z)
    if params.head is Head.PLAIN:
        phi = a
    else:
        h = params.m // 2
        phi = a[:, :h] - a[:, h:]
    r = phi @ params.v - dataset.y
    s = r[:, None] * params.activation.derivative(z) * outer_coefficients(params)
    return Gradients(x.T @ s, phi.T @ r)


def residual(params: Params, dataset: Dataset) -> np.ndarray:
    return forward(params, dataset.x) - dataset.y


__all__ = ["Gradients", "loss", "grad", "residual", "feature_matrix"]
