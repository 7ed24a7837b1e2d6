"""Feasible sets for constrained training and their projections.

* hidden weights: Frobenius ball ``||w - w0||_F <= epsilon``
* outer weights: ``v >= zeta`` entrywise and ``max(v) / min(v) <= kappa``

``project_v`` is a feasibility-restoring clamp, not the Euclidean projection
onto the outer-weight set: entries below ``zeta`` are raised to ``zeta``, then
entries above ``kappa * min(v)`` are lowered to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .linalg import ShapeError, as_matrix
from .model import Params
from .objective import Gradients, grad

REL_SLACK = 1e-12


@dataclass(frozen=True)
class ConstraintSpec:
    """``zeta=None`` leaves the outer weights unconstrained (hidden ball only)."""

    epsilon: float
    anchor_w0: np.ndarray
    zeta: float | None = 0.001
    kappa: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.zeta is not None and not self.zeta > 0:
            raise ValueError(f"zeta must be > 0, got {self.zeta}")
        if not self.kappa >= 1:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")
        anchor = np.array(as_matrix(self.anchor_w0, "anchor_w0"))
        anchor.flags.writeable = False
        object.__setattr__(self, "anchor_w0", anchor)

    @property
    def constrains_v(self) -> bool:
        return self.zeta is not None


def project_w(w, spec: ConstraintSpec) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != spec.anchor_w0.shape:
        raise ShapeError(f"w has shape {w.shape}, anchor has {spec.anchor_w0.shape}", w.shape)
    delta = w - spec.anchor_w0
    dist = float(np.sqrt(np.sum(delta * delta)))
    # points within round-off of the sphere count as inside, so a second
    # projection returns its input bit for bit
    if dist <= spec.epsilon * (1 + REL_SLACK):
        return w.copy()
    return spec.anchor_w0 + (spec.epsilon / dist) * delta


def project_v(v, spec: ConstraintSpec) -> np.ndarray:
    v = np.array(v, dtype=np.float64)
    if not spec.constrains_v:
        return v
    v = np.maximum(v, spec.zeta)
    vmin = v.min()
    if v.max() > spec.kappa * vmin:
        v = np.minimum(v, spec.kappa * vmin)
    return v


def project(params: Params, spec: ConstraintSpec) -> Params:
    return params.replace(w=project_w(params.w, spec), v=project_v(params.v, spec))


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    w_distance: float
    w_margin: float  # epsilon - ||w - w0||; negative when outside the ball
    v_floor_margin: float  # min(v) - zeta
    v_ratio: float
    v_ratio_margin: float  # kappa - max(v)/min(v)

    def __bool__(self):
        return self.feasible


def is_feasible(params: Params, spec: ConstraintSpec) -> FeasibilityReport:
    delta = params.w - spec.anchor_w0
    dist = float(np.sqrt(np.sum(delta * delta)))
    ok_w = dist <= spec.epsilon * (1 + REL_SLACK)
    v = params.v
    if spec.constrains_v:
        vmin, vmax = float(v.min()), float(v.max())
        ratio = vmax / vmin if vmin > 0 else math.inf
        ok_floor = vmin >= spec.zeta * (1 - REL_SLACK)
        ok_ratio = ratio <= spec.kappa * (1 + REL_SLACK)
        floor_margin = vmin - spec.zeta
    else:
        ratio, ok_floor, ok_ratio, floor_margin = math.nan, True, True, math.inf
    return FeasibilityReport(
        feasible=bool(ok_w and ok_floor and ok_ratio),
        w_distance=dist,
        w_margin=spec.epsilon - dist,
        v_floor_margin=floor_margin,
        v_ratio=ratio,
        v_ratio_margin=spec.kappa - ratio if spec.constrains_v else math.inf,
    )


def gradient_mapping_norm(params: Params, grads: Gradients, spec: ConstraintSpec | None, step: float) -> float:
    """``||theta - P(theta - step * grad)|| / step``; zero exactly at fixed points."""
    if not step > 0:
        raise ValueError(f"probe step must be > 0, got {step}")
    if spec is None:
        return grads.norm()
    dw = params.w - project_w(params.w - step * grads.grad_w, spec)
    dv = params.v - project_v(params.v - step * grads.grad_v, spec)
    return float(np.sqrt(np.sum(dw * dw) + np.sum(dv * dv))) / step


def kkt_residual(params: Params, dataset: Dataset, spec: ConstraintSpec | None, probe_step: float) -> float:
    return gradient_mapping_norm(params, grad(params, dataset), spec, probe_step)
