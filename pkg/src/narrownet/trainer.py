"""Full-batch (projected) gradient descent with heavy-ball momentum.

Three regimes:

``mirrored_pgd``
    paired head from a mirrored init; after every step ``v`` is clamped into
    ``{v >= zeta, max/min <= kappa}`` and then ``w`` is projected onto the
    Frobenius ball around its initial value. ``v`` is also clamped once
    before the first iteration so iterate 0 is feasible.
``regular_gd``
    plain head from a regular LeCun init, no projection.
``regular_pgd_ablation``
    plain head from a regular LeCun init, hidden weights projected onto the
    ball, outer weights left free.

Update rule (PyTorch SGD convention): ``b <- momentum * b + grad``,
``theta <- theta - lr * b``; the momentum buffers are never projected.

Several runs that share ``params0`` and differ only in step sizes are
advanced in lockstep by compiled per-run kernels, so a run's result does not
depend on which other runs share its batch. :func:`train` is the one-run case of the same engine.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constraints import ConstraintSpec, is_feasible
from .data import Dataset
from .linalg import ConvergenceError, min_singular_value
from . import _kernels
from .model import ACTIVATIONS, Head, Params, jacobian_w

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 20_000
DEFAULT_KKT_TOL = 1e-10
PAPER_LR_GRID = (1e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1)


class Regime(str, enum.Enum):
    MIRRORED_PGD = "mirrored_pgd"
    REGULAR_GD = "regular_gd"
    REGULAR_PGD_ABLATION = "regular_pgd_ablation"

    @property
    def projects(self) -> bool:
        return self is not Regime.REGULAR_GD


class StopReason(str, enum.Enum):
    MAX_ITERS = "max_iters"
    KKT_TOL = "kkt_tol"
    NON_FINITE = "non_finite"


class ConfigError(ValueError):
    pass


class GridSearchError(RuntimeError):
    def __init__(self, grid):
        super().__init__(f"every run in the step-size grid diverged: {grid}")
        self.grid = grid


@dataclass(frozen=True)
class TrainConfig:
    regime: Regime
    lr_w: float
    lr_v: float
    momentum: float = 0.9
    max_iters: int = DEFAULT_MAX_ITERS
    kkt_tol: float = DEFAULT_KKT_TOL
    checkpoint_every: int | None = None
    seed: int = 0
    constraint: ConstraintSpec | None = None
    track_lambda: bool = True

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not (self.lr_w > 0 and self.lr_v > 0):
            raise ConfigError(f"step sizes must be positive, got lr_w={self.lr_w}, lr_v={self.lr_v}")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if self.kkt_tol < 0:
            raise ConfigError("kkt_tol must be >= 0")
        if self.regime.projects != (self.constraint is not None):
            raise ConfigError(f"regime {self.regime.value} {'needs' if self.regime.projects else 'takes no'} constraint")
        if self.regime is Regime.MIRRORED_PGD and not self.constraint.constrains_v:
            raise ConfigError("mirrored_pgd needs zeta/kappa for the outer weights")

    @property
    def every(self) -> int:
        if self.checkpoint_every:
            return max(1, int(self.checkpoint_every))
        return max(1, self.max_iters // 20)


@dataclass(frozen=True)
class Checkpoint:
    iter: int
    loss: float
    grad_mapping_norm: float
    lambda_min_J: float | None
    feasible: bool


@dataclass
class TrainTrace:
    checkpoints: list[Checkpoint] = field(default_factory=list)
    stop_reason: StopReason = StopReason.MAX_ITERS
    iterations: int = 0
    loss_init: float = math.nan
    loss_final: float = math.nan
    kkt_residual_final: float = math.nan
    proj_w_activations: int = 0
    v_floor_hits: int = 0
    v_ratio_hits: int = 0
    lr_w: float = math.nan
    lr_v: float = math.nan

    @property
    def relative_loss(self) -> float:
        if self.loss_init == 0:
            return 0.0 if self.loss_final == 0 else math.inf
        return self.loss_final / self.loss_init

    @property
    def lambda_min_final(self) -> float | None:
        return self.checkpoints[-1].lambda_min_J if self.checkpoints else None


def validate_start(params0: Params, config: TrainConfig) -> None:
    regime = config.regime
    if regime is Regime.MIRRORED_PGD:
        if params0.head is not Head.PAIRED:
            raise ConfigError("mirrored_pgd needs the paired head")
        h = params0.m // 2
        if not np.array_equal(params0.w[:, :h], params0.w[:, h:]):
            raise ConfigError("mirrored_pgd needs a mirrored initialisation (w_{j+m/2} == w_j)")
    elif params0.head is not Head.PLAIN:
        raise ConfigError(f"{regime.value} needs the plain head")
    if config.constraint is not None and config.constraint.anchor_w0.shape != params0.w.shape:
        raise ConfigError("constraint anchor shape does not match w")


def _lambda_min(params: Params, x: np.ndarray) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        jac = jacobian_w(params, x)
    if not np.isfinite(jac).all():
        return math.nan
    try:
        return min_singular_value(jac)
    except ConvergenceError as exc:
        log.debug("lambda_min not available: %s", exc)
        return math.nan


class _Batch:
    """Stacked state for runs sharing params0 and data.

    Row ``r`` of every state array belongs to run ``self.active[r]``; rows
    are dropped as runs stop.
    """

    def __init__(self, params0: Params, dataset: Dataset, config: TrainConfig, lrs):
        act = params0.activation
        if ACTIVATIONS.get(act.name) is not act:
            raise ConfigError(f"training supports the built-in activations only, got {act.name!r}")
        self.p0 = params0
        self.act = act
        self.x = np.ascontiguousarray(dataset.x)
        self.xt = np.ascontiguousarray(dataset.x.T)
        self.y = np.ascontiguousarray(dataset.y)
        self.cfg = config
        self.spec = spec = config.constraint
        self.code = _kernels.ACT_CODES[act.name]
        self.paired = params0.head is Head.PAIRED
        if spec is None:
            self.mode = 0
        else:
            self.mode = 2 if spec.constrains_v else 1
        self.w0 = np.ascontiguousarray(spec.anchor_w0 if spec is not None else params0.w)
        self.eps = float(spec.epsilon) if spec is not None else math.inf
        self.zeta = float(spec.zeta) if spec is not None and spec.constrains_v else 0.0
        self.kappa = float(spec.kappa) if spec is not None else math.inf

        k = len(lrs)
        self.active = np.arange(k)
        self.lr_w = np.array([a for a, _ in lrs], dtype=np.float64)
        self.lr_v = np.array([b for _, b in lrs], dtype=np.float64)
        self.w = np.repeat(params0.w[None], k, axis=0)
        self.v = np.repeat(params0.v[None], k, axis=0)
        self.bw = np.zeros_like(self.w)
        self.bv = np.zeros_like(self.v)
        self.gv = np.zeros_like(self.v)
        self.loss = np.zeros(k)
        self.res = np.zeros(k)
        self.w_hits = np.zeros(k, dtype=np.int64)
        self.floor_hits = np.zeros(k, dtype=np.int64)
        self.ratio_hits = np.zeros(k, dtype=np.int64)
        self.traces = [TrainTrace(lr_w=float(a), lr_v=float(b)) for a, b in lrs]
        self.finals: list[Params | None] = [None] * k

    def params_of(self, row) -> Params:
        return self.p0.replace(w=self.w[row].copy(), v=self.v[row].copy())

    def _compact(self, keep):
        self.active = self.active[keep]
        for name in ("lr_w", "lr_v", "w", "v", "bw", "bv", "gv", "loss", "res", "w_hits", "floor_hits", "ratio_hits"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name)[keep]))

    def _gradients(self):
        # divergent step sizes overflow here; the stop check catches them
        with np.errstate(over="ignore", invalid="ignore"):
            z = np.matmul(self.x, self.w)
            a = self.act.value(z)
            _kernels.backprop(z, a, self.v, self.y, self.code, self.paired, self.loss, self.gv)
            return np.matmul(self.xt, z)

    def run(self):
        cfg = self.cfg
        every = cfg.every
        if cfg.regime is Regime.MIRRORED_PGD:
            _kernels.clamp_all(self.v, self.zeta, self.kappa)
        t = 0
        while self.active.size:
            gw = self._gradients()
            _kernels.mapping_norm(
                self.w, self.v, gw, self.gv, self.lr_w, self.mode,
                self.w0, self.eps, self.zeta, self.kappa, self.res,
            )
            keep = np.ones(self.active.size, dtype=bool)
            for row, idx in enumerate(self.active):
                tr = self.traces[idx]
                loss, res = float(self.loss[row]), float(self.res[row])
                if t == 0:
                    tr.loss_init = loss
                finite = math.isfinite(loss) and math.isfinite(res)
                if not finite:
                    tr.stop_reason = StopReason.NON_FINITE
                    tr.loss_final = math.inf
                    tr.kkt_residual_final = math.inf
                elif res <= cfg.kkt_tol:
                    tr.stop_reason = StopReason.KKT_TOL
                elif t >= cfg.max_iters:
                    tr.stop_reason = StopReason.MAX_ITERS
                else:
                    if t % every == 0:
                        self._checkpoint(row, idx, t, loss, res)
                    continue
                keep[row] = False
                tr.iterations = t
                tr.proj_w_activations = int(self.w_hits[row])
                tr.v_floor_hits = int(self.floor_hits[row])
                tr.v_ratio_hits = int(self.ratio_hits[row])
                if finite:
                    tr.loss_final = loss
                    tr.kkt_residual_final = res
                    self._checkpoint(row, idx, t, loss, res)
                # a diverged run has no valid parameters to return
                self.finals[idx] = self.params_of(row) if finite else None
            if not keep.all():
                gw = gw[keep]
                self._compact(keep)
                if not self.active.size:
                    break
            _kernels.update(
                self.w, self.v, self.bw, self.bv, gw, self.gv, self.lr_w, self.lr_v,
                cfg.momentum, self.mode, self.w0, self.eps, self.zeta, self.kappa,
                self.w_hits, self.floor_hits, self.ratio_hits,
            )
            t += 1
        return list(zip(self.finals, self.traces))

    def _checkpoint(self, row, idx, t, loss, res):
        tr = self.traces[idx]
        if tr.checkpoints and tr.checkpoints[-1].iter == t:
            return
        params = self.params_of(row)
        lam = _lambda_min(params, self.x) if self.cfg.track_lambda else None
        feasible = True if self.spec is None else is_feasible(params, self.spec).feasible
        tr.checkpoints.append(Checkpoint(t, loss, res, lam, feasible))


def train_many(params0: Params, dataset: Dataset, config: TrainConfig, lrs) -> list[tuple[Params | None, TrainTrace]]:
    """Train one run per ``(lr_w, lr_v)`` pair from the same ``params0``.

    Runs that stop on a non-finite value return ``None`` in place of params.
    """
    lrs = [(float(a), float(b)) for a, b in lrs]
    if not lrs:
        raise ValueError("empty step-size list")
    for a, b in lrs:
        replace(config, lr_w=a, lr_v=b)  # validates
    validate_start(params0, config)
    if dataset.d != params0.d:
        raise ConfigError(f"dataset has d={dataset.d}, params have d={params0.d}")
    return _Batch(params0, dataset, config, lrs).run()


def train(params0: Params, dataset: Dataset, config: TrainConfig) -> tuple[Params | None, TrainTrace]:
    """Train a single run. Params are ``None`` when the run stopped on a non-finite value."""
    return train_many(params0, dataset, config, [(config.lr_w, config.lr_v)])[0]


def _rank_key(item):
    (a, b), (_, tr) = item
    diverged = tr.stop_reason is StopReason.NON_FINITE
    return (diverged, tr.loss_final, tr.kkt_residual_final, a, b)


def best_of_grid(params_factory, dataset: Dataset, base_config: TrainConfig, lr_grid_w, lr_grid_v):
    """Run every (lr_w, lr_v) pair and keep the smallest final loss.

    Ties go to the smaller final KKT residual, then the smaller ``lr_w``.
    Returns ``(params, trace, (lr_w, lr_v))``.
    """
    lr_grid_w, lr_grid_v = list(lr_grid_w), list(lr_grid_v)
    if not lr_grid_w or not lr_grid_v:
        raise ValueError("step-size grids must be nonempty")
    params0 = params_factory() if callable(params_factory) else params_factory
    pairs = [(a, b) for a in lr_grid_w for b in lr_grid_v]
    results = train_many(params0, dataset, base_config, pairs)
    ranked = sorted(zip(pairs, results), key=_rank_key)
    (lrs, (params, trace)) = ranked[0]
    if trace.stop_reason is StopReason.NON_FINITE:
        raise GridSearchError(pairs)
    return params, trace, lrs
