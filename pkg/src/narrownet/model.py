"""One-hidden-layer networks with a plain or a paired output head.

Plain head::

    f(x) = sum_j v_j * act(w_j . x),            j = 1..m

Paired head (m/2 free outer weights, each applied to a hidden pair)::

    f(x) = sum_j v_j * (act(w_j . x) - act(w_{j+m/2} . x)),   j = 1..m/2

Hidden weights are stored as a ``d x m`` matrix whose column ``j`` is ``w_j``.
Wherever a flattened ``vec(w)`` is needed (Jacobian columns, gradients) the
layout is the columns concatenated: ``(w_1, w_2, ..., w_m)``, i.e.
``w.T.ravel()``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import ShapeError, as_matrix, as_vector


class Head(str, enum.Enum):
    PLAIN = "plain"
    PAIRED = "paired"


class AssumptionWarning(UserWarning):
    """A modelling precondition is not met; the computation still runs."""


class WidthError(ValueError):
    """Width incompatible with the requested head or operation."""


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softplus(z):
    return np.logaddexp(0.0, z)


@dataclass(frozen=True)
class Activation:
    name: str
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    zero_only_at_origin: bool
    # derivative expressed through act(z), when that is cheaper; None otherwise
    derivative_from_value: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z):
        return self.value(z)


TANH = Activation(
    "tanh",
    np.tanh,
    lambda z: 1.0 - np.tanh(z) * np.tanh(z),
    lipschitz=1.0,
    zero_only_at_origin=True,
    derivative_from_value=lambda a: 1.0 - a * a,
)
SIGMOID = Activation(
    "sigmoid",
    _sigmoid,
    lambda z: _sigmoid(z) * (1.0 - _sigmoid(z)),
    lipschitz=0.25,
    zero_only_at_origin=False,
    derivative_from_value=lambda a: a * (1.0 - a),
)
SOFTPLUS = Activation(
    "softplus",
    _softplus,
    _sigmoid,
    lipschitz=1.0,
    zero_only_at_origin=False,
)

ACTIVATIONS: dict[str, Activation] = {a.name: a for a in (TANH, SIGMOID, SOFTPLUS)}


def get_activation(act: str | Activation) -> Activation:
    if isinstance(act, Activation):
        return act
    try:
        return ACTIVATIONS[act]
    except KeyError:
        raise ValueError(f"unknown activation {act!r}; choose from {sorted(ACTIVATIONS)}") from None


def check_activation(act: str | Activation) -> Activation:
    """Return the activation, warning if its zero set is not exactly {0}."""
    act = get_activation(act)
    if not act.zero_only_at_origin:
        warnings.warn(
            f"{act.name}: act(z) = 0 does not hold only at z = 0 "
            f"(act(0) = {float(act.value(np.float64(0.0))):.4g}); "
            "the zero-output/full-rank guarantees are not covered",
            AssumptionWarning,
            stacklevel=2,
        )
    return act


def check_width(m: int, head: Head | str) -> None:
    if m < 1:
        raise WidthError(f"width m must be positive, got {m}")
    if Head(head) is Head.PAIRED and m % 2:
        raise WidthError(f"paired head requires that the width m is an even number (got m={m})")


@dataclass(frozen=True)
class Params:
    """Network parameters. Arrays are copied and made read-only."""

    w: np.ndarray
    v: np.ndarray
    head: Head = Head.PLAIN
    activation: Activation = field(default=TANH)

    def __post_init__(self):
        head = Head(self.head)
        w = np.array(as_matrix(self.w, "w"), dtype=np.float64)
        v = np.array(as_vector(self.v, "v"), dtype=np.float64)
        d, m = w.shape
        check_width(m, head)
        expected = m if head is Head.PLAIN else m // 2
        if v.shape[0] != expected:
            raise ShapeError(
                f"{head.value} head with m={m} needs len(v)={expected}, got {v.shape[0]}", v.shape
            )
        w.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "activation", get_activation(self.activation))

    @property
    def d(self) -> int:
        return self.w.shape[0]

    @property
    def m(self) -> int:
        return self.w.shape[1]

    def replace(self, w=None, v=None) -> "Params":
        return Params(
            self.w if w is None else w,
            self.v if v is None else v,
            self.head,
            self.activation,
        )


def outer_coefficients(params: Params) -> np.ndarray:
    """Length-m coefficient c_j multiplying act(w_j . x) in the output."""
    if params.head is Head.PLAIN:
        return params.v
    return np.concatenate([params.v, -params.v])


def _check_x(params: Params, x) -> np.ndarray:
    x = as_matrix(x, "x")
    if x.shape[1] != params.d:
        raise ShapeError(
            f"x is {x.shape[0]}x{x.shape[1]} but w expects d={params.d}", x.shape, params.w.shape
        )
    return x


def feature_matrix(params: Params, x) -> np.ndarray:
    """Hidden activations, n x m (plain) or pair differences, n x m/2 (paired)."""
    x = _check_x(params, x)
    a = params.activation.value(x @ params.w)
    if params.head is Head.PLAIN:
        return a
    h = params.m // 2
    return a[:, :h] - a[:, h:]


def forward(params: Params, x) -> np.ndarray:
    return feature_matrix(params, x) @ params.v


def jacobian_w(params: Params, x) -> np.ndarray:
    """n x (m*d) Jacobian of the output vector w.r.t. vec(w)."""
    x = _check_x(params, x)
    n = x.shape[0]
    s = params.activation.derivative(x @ params.w) * outer_coefficients(params)
    return (s[:, :, None] * x[:, None, :]).reshape(n, params.m * params.d)


def square_sub_jacobian(params: Params, x) -> np.ndarray:
    """First n columns of :func:`jacobian_w` (first n coordinates of vec(w)).

    Requires m*d >= 2n so the selected coordinates lie in the first half of
    the hidden units, which are untouched by mirroring.
    """
    x = _check_x(params, x)
    n = x.shape[0]
    if params.m * params.d < 2 * n:
        raise WidthError(
            f"square sub-Jacobian needs m*d >= 2n (m >= 2n/d); got m={params.m}, d={params.d}, n={n}"
        )
    return jacobian_w(params, x)[:, :n]
