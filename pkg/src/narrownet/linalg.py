"""Dense linear algebra helpers shared by the rest of the package.

Matrices and vectors are plain float64 numpy arrays. The helpers here add the
shape/finiteness checks and the minimum-singular-value routine used for the
Jacobian diagnostics.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

EIG_MAX_ITERS = 10_000
EIG_RESIDUAL_TOL = 1e-10


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""

    def __init__(self, message: str, *shapes: tuple[int, ...]):
        super().__init__(message)
        self.shapes = shapes


class ConvergenceError(RuntimeError):
    """Raised when the symmetric eigensolver fails to converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class NonFiniteError(ValueError):
    pass


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-d, got shape {arr.shape}", arr.shape)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return arr


def as_vector(a, name: str = "vector") -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-d, got shape {arr.shape}", arr.shape)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}",
            a.shape,
            b.shape,
        )
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("product overflowed")
    return out


def fro_norm(a) -> float:
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(np.sum(a * a)))


def min_singular_value(a) -> float:
    """Smallest singular value of ``a`` via the smaller Gram matrix.

    The smallest eigenpair of ``a a^T`` (or ``a^T a`` when ``a`` is tall) is
    computed with LAPACK's symmetric solver and its residual
    ``||G u - lam u|| / ||G||`` is checked against ``EIG_RESIDUAL_TOL``.
    The singular value is then taken as ``||a^T u||`` (``||a u||`` when tall)
    rather than ``sqrt(lam)``: the Rayleigh quotient is second order in the
    eigenvector error, so this recovers most of the accuracy lost by forming
    the Gram matrix.
    """
    a = as_matrix(a)
    rows, cols = a.shape
    if rows < 1 or cols < 1:
        raise ShapeError(f"empty matrix {a.shape}", a.shape)
    gram = a @ a.T if rows <= cols else a.T @ a
    try:
        vals, vecs = scipy.linalg.eigh(gram, subset_by_index=[0, 0], driver="evr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}", float("inf")) from exc
    lam = float(vals[0])
    u = vecs[:, 0]
    scale = max(float(np.linalg.norm(gram)), np.finfo(float).tiny)
    residual = float(np.linalg.norm(gram @ u - lam * u)) / scale
    if not residual <= EIG_RESIDUAL_TOL:
        raise ConvergenceError("eigenpair residual above tolerance", residual)
    refined = a.T @ u if rows <= cols else a @ u
    return float(np.sqrt(np.sum(refined * refined)))
