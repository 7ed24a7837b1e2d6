"""Width x epsilon x regime sweeps on the synthetic task, and the numeric
certificates for the zero-output/full-rank and KKT small-loss properties.

Seeds: every random stream is derived from one top-level seed with
:func:`derive_seed`, which hashes the seed together with a tuple of keys
(BLAKE2b, 8-byte digest, little endian). The dataset uses key ``("data",)``;
the initialisation of a grid cell uses ``("init", m, seed_index)``, so all
regimes and radii at a given width and seed index start from the same draw.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .constraints import ConstraintSpec, is_feasible
from .data import Dataset, make_synthetic
from .init import lecun_init, mirrored_lecun_init
from .linalg import min_singular_value
from .model import Head, check_activation, forward, jacobian_w, square_sub_jacobian
from .trainer import (
    DEFAULT_KKT_TOL,
    PAPER_LR_GRID,
    GridSearchError,
    Regime,
    StopReason,
    TrainConfig,
    best_of_grid,
)

log = logging.getLogger(__name__)

CSV_HEADER = (
    "run_id,regime,n,d,m,epsilon,zeta,kappa,seed,lr_w,lr_v,momentum,iters,stop_reason,"
    "loss_init,loss_final,loss_rel,lambda_min_final,kkt_residual_final,v_boundary_hits,proj_w_activations"
).split(",")

DEFAULT_ZETA = 0.001
DEFAULT_KAPPA = 1.0


def derive_seed(top_seed: int, *keys) -> int:
    text = "/".join([str(int(top_seed))] + [str(k) for k in keys])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class GridPreset:
    name: str
    n: int
    d: int
    widths: tuple[int, ...]
    epsilons: tuple[float, ...]
    regimes: tuple[str, ...] = tuple(r.value for r in Regime)
    seeds: int = 3
    max_iters: int = 20_000
    lr_grid_w: tuple[float, ...] = PAPER_LR_GRID
    lr_grid_v: tuple[float, ...] = PAPER_LR_GRID
    momentum: float = 0.9
    kkt_tol: float = DEFAULT_KKT_TOL
    zeta: float = DEFAULT_ZETA
    kappa: float = DEFAULT_KAPPA
    activation: str = "tanh"
    top_seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


PRESETS = {
    "desk": GridPreset("desk", n=200, d=50, widths=(8, 16, 32, 64), epsilons=(0.5, 1.0, 2.0, 1000.0)),
    "paper": GridPreset(
        "paper",
        n=1000,
        d=200,
        widths=(20, 40, 80, 100, 200, 400, 800, 1000, 1200),
        epsilons=(0.1, 0.2, 0.4, 0.8, 1.0, 2.0, 4.0, 8.0, 10.0, 1000.0),
        max_iters=200_000,
    ),
}


@dataclass(frozen=True)
class Cell:
    regime: Regime
    m: int
    epsilon: float
    seed_index: int

    @property
    def run_id(self) -> str:
        return f"{self.regime.value}-m{self.m}-eps{self.epsilon:g}-s{self.seed_index}"


def preset_dataset(preset: GridPreset) -> Dataset:
    return make_synthetic(preset.n, preset.d, derive_seed(preset.top_seed, "data"))


def cell_params(preset: GridPreset, cell: Cell):
    seed = derive_seed(preset.top_seed, "init", cell.m, cell.seed_index)
    if cell.regime is Regime.MIRRORED_PGD:
        return mirrored_lecun_init(preset.d, cell.m, Head.PAIRED, seed, preset.activation), seed
    return lecun_init(preset.d, cell.m, Head.PLAIN, seed, preset.activation), seed


def cell_constraint(preset: GridPreset, cell: Cell, w0) -> ConstraintSpec | None:
    if cell.regime is Regime.MIRRORED_PGD:
        return ConstraintSpec(cell.epsilon, w0, preset.zeta, preset.kappa)
    if cell.regime is Regime.REGULAR_PGD_ABLATION:
        return ConstraintSpec(cell.epsilon, w0, zeta=None, kappa=math.inf)
    return None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_cell(preset: GridPreset, cell: Cell, dataset: Dataset | None = None) -> dict:
    """Best-of-grid training for one cell; returns a CSV row (strings)."""
    dataset = dataset if dataset is not None else preset_dataset(preset)
    params0, seed = cell_params(preset, cell)
    spec = cell_constraint(preset, cell, params0.w)
    if cell.regime is Regime.MIRRORED_PGD and cell.m * preset.d < 2 * preset.n:
        log.warning("%s: width below 2n/d, outside the full-rank guarantee", cell.run_id)
    config = TrainConfig(
        cell.regime,
        lr_w=preset.lr_grid_w[0],
        lr_v=preset.lr_grid_v[0],
        momentum=preset.momentum,
        max_iters=preset.max_iters,
        kkt_tol=preset.kkt_tol,
        seed=seed,
        constraint=spec,
    )
    row = {
        "run_id": cell.run_id,
        "regime": cell.regime.value,
        "n": preset.n,
        "d": preset.d,
        "m": cell.m,
        "epsilon": float(cell.epsilon),
        "zeta": float(spec.zeta) if spec is not None and spec.constrains_v else None,
        "kappa": float(spec.kappa) if spec is not None and spec.constrains_v else None,
        "seed": seed,
        "momentum": float(preset.momentum),
    }
    try:
        params, trace, (lr_w, lr_v) = best_of_grid(params0, dataset, config, preset.lr_grid_w, preset.lr_grid_v)
    except GridSearchError:
        log.warning("%s: every step size diverged", cell.run_id)
        row.update(
            lr_w=None, lr_v=None, iters=0, stop_reason=StopReason.NON_FINITE.value,
            loss_init=None, loss_final=math.inf, loss_rel=math.inf, lambda_min_final=None,
            kkt_residual_final=math.inf, v_boundary_hits=0, proj_w_activations=0,
        )
        return {k: _fmt(row[k]) for k in CSV_HEADER}
    if spec is not None and not is_feasible(params, spec):
        log.error("%s: final parameters infeasible", cell.run_id)
    row.update(
        lr_w=float(lr_w),
        lr_v=float(lr_v),
        iters=trace.iterations,
        stop_reason=trace.stop_reason.value,
        loss_init=trace.loss_init,
        loss_final=trace.loss_final,
        loss_rel=trace.relative_loss,
        lambda_min_final=trace.lambda_min_final,
        kkt_residual_final=trace.kkt_residual_final,
        v_boundary_hits=trace.v_floor_hits,
        proj_w_activations=trace.proj_w_activations,
    )
    return {k: _fmt(row[k]) for k in CSV_HEADER}


def grid_cells(widths, epsilons, regimes, seeds: int) -> list[Cell]:
    return [
        Cell(Regime(r), int(m), float(e), s)
        for r in regimes
        for m in widths
        for e in epsilons
        for s in range(seeds)
    ]


def _compute_key(cell: Cell):
    # the unconstrained regime ignores epsilon, so one run serves every radius
    if cell.regime is Regime.REGULAR_GD:
        return (cell.regime, cell.m, None, cell.seed_index)
    return (cell.regime, cell.m, cell.epsilon, cell.seed_index)


def _worker(args):
    preset, cell = args
    return run_cell(preset, cell)


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_figure2_grid(preset: GridPreset, out_path, jobs: int = 1, resume: bool = True, widths=None,
                     epsilons=None, regimes=None, seeds=None) -> list[dict]:
    """Run the sweep and append one CSV row per cell, in canonical cell order.

    Rows already present in ``out_path`` (matched by ``run_id``) are kept and
    not recomputed when ``resume`` is set, so an interrupted sweep can be
    continued. Rows are written in a fixed order whatever ``jobs`` is.
    """
    widths = preset.widths if widths is None else widths
    epsilons = preset.epsilons if epsilons is None else epsilons
    regimes = preset.regimes if regimes is None else regimes
    seeds = preset.seeds if seeds is None else seeds
    cells = grid_cells(widths, epsilons, regimes, seeds)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)

    done: dict[str, dict] = {}
    if resume and out_path.exists() and out_path.stat().st_size:
        existing = read_rows(out_path)
        ids = [c.run_id for c in cells]
        # keep only a clean prefix of the canonical order
        for row, rid in zip(existing, ids):
            if row.get("run_id") != rid:
                break
            done[rid] = row
    todo = [c for c in cells if c.run_id not in done]

    keys: dict = {}
    for c in todo:
        keys.setdefault(_compute_key(c), c)
    dataset = preset_dataset(preset)

    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        rows = []
        for c in cells:
            if c.run_id in done:
                writer.writerow(done[c.run_id])
                rows.append(done[c.run_id])
        fh.flush()

        results: dict = {}
        unique = list(keys.items())
        if jobs > 1 and len(unique) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {k: pool.submit(_worker, (preset, c)) for k, c in unique}
                for c in todo:
                    k = _compute_key(c)
                    if k not in results:
                        results[k] = futures[k].result()
                    rows.append(_emit(writer, fh, results[k], c))
        else:
            for c in todo:
                k = _compute_key(c)
                if k not in results:
                    results[k] = run_cell(preset, keys[k], dataset)
                rows.append(_emit(writer, fh, results[k], c))
    return rows


def _emit(writer, fh, row: dict, cell: Cell) -> dict:
    row = dict(row, run_id=cell.run_id, epsilon=repr(float(cell.epsilon)))
    writer.writerow(row)
    fh.flush()
    os.fsync(fh.fileno())
    log.info("%s rel=%s", cell.run_id, row["loss_rel"])
    return row


# -- certificates ---------------------------------------------------------------


@dataclass
class Theorem1Seed:
    seed: int
    max_abs_output_plain: float
    max_abs_output_paired: float
    lambda_min_sub: float
    lambda_min_full: float
    lambda_min_half: float
    duplication_rel_err: float


@dataclass
class Theorem1Report:
    n: int
    d: int
    m: int
    activation: str
    in_scope: bool
    rows: list[Theorem1Seed] = field(default_factory=list)
    output_tol: float = 1e-12
    rank_tol: float = 1e-10
    duplication_tol: float = 1e-9

    @property
    def failing_seeds(self) -> list[int]:
        bad = []
        for r in self.rows:
            ok = max(r.max_abs_output_plain, r.max_abs_output_paired) <= self.output_tol
            if self.in_scope:
                ok = ok and r.lambda_min_sub > self.rank_tol and r.duplication_rel_err <= self.duplication_tol
            if not ok:
                bad.append(r.seed)
        return bad

    @property
    def passed(self) -> bool:
        return not self.failing_seeds

    def summary(self) -> dict:
        subs = [r.lambda_min_sub for r in self.rows if not math.isnan(r.lambda_min_sub)]
        out = {
            "max_abs_output": max(max(r.max_abs_output_plain, r.max_abs_output_paired) for r in self.rows),
            "lambda_min_full_min": min(r.lambda_min_full for r in self.rows),
            "lambda_min_full_median": statistics.median(r.lambda_min_full for r in self.rows),
            "max_duplication_rel_err": max(r.duplication_rel_err for r in self.rows),
        }
        if subs:
            out["lambda_min_sub_min"] = min(subs)
            out["lambda_min_sub_median"] = statistics.median(subs)
        return out


def certify_theorem1(n: int, d: int, m: int, n_seeds: int = 20, activation="tanh", top_seed: int = 0) -> Theorem1Report:
    """Zero output and Jacobian rank at the mirrored initialisation.

    Each seed draws fresh continuous data and a fresh mirrored init. Reports
    the largest |f(x_i)| for both heads, sigma_min of the square sub-Jacobian,
    and checks sigma_min(J) = sqrt(2) sigma_min(first-half blocks of J).
    """
    act = check_activation(activation)
    in_scope = m * d >= 2 * n
    if not in_scope:
        log.warning("m*d = %d < 2n = %d: outside Theorem 1 scope", m * d, 2 * n)
    report = Theorem1Report(n, d, m, act.name, in_scope)
    for s in range(n_seeds):
        data = make_synthetic(n, d, derive_seed(top_seed, "cert1-data", s))
        init_seed = derive_seed(top_seed, "cert1-init", s)
        paired = mirrored_lecun_init(d, m, Head.PAIRED, init_seed, act)
        plain = mirrored_lecun_init(d, m, Head.PLAIN, init_seed, act)
        out_paired = float(np.max(np.abs(forward(paired, data.x))))
        out_plain = float(np.max(np.abs(forward(plain, data.x))))
        jac = jacobian_w(paired, data.x)
        full = min_singular_value(jac)
        half = min_singular_value(jac[:, : (m // 2) * d])
        dup_err = abs(full - math.sqrt(2) * half) / max(math.sqrt(2) * half, np.finfo(float).tiny)
        sub = min_singular_value(square_sub_jacobian(paired, data.x)) if in_scope else math.nan
        report.rows.append(Theorem1Seed(s, out_plain, out_paired, sub, full, half, dup_err))
    return report


@dataclass
class Theorem3Run:
    epsilon: float
    seed: int
    lr_w: float
    lr_v: float
    stop_reason: str
    iterations: int
    loss_init: float
    loss_final: float
    loss_rel: float
    loss_over_eps2: float
    kkt_residual: float
    lambda_min: float
    v_boundary_hits: int
    feasible: bool


@dataclass
class Theorem3Report:
    m: int
    kkt_tol: float
    runs: list[Theorem3Run] = field(default_factory=list)
    rel_loss_tol: float = 1e-3
    lambda_tol: float = 1e-8

    def checks(self) -> dict[str, bool]:
        by_seed: dict[int, list[Theorem3Run]] = {}
        for r in self.runs:
            by_seed.setdefault(r.seed, []).append(r)
        monotone = all(
            all(b.loss_final <= a.loss_final for a, b in zip(rs, rs[1:]))
            for rs in (sorted(v, key=lambda r: r.epsilon) for v in by_seed.values())
        )
        return {
            "stop_contract": all(
                r.stop_reason == StopReason.MAX_ITERS.value
                or (r.stop_reason == StopReason.KKT_TOL.value and r.kkt_residual <= self.kkt_tol)
                for r in self.runs
            ),
            "relative_loss": all(r.loss_rel <= self.rel_loss_tol for r in self.runs),
            "loss_nonincreasing_in_eps": monotone,
            "lambda_min_positive": all(r.lambda_min > self.lambda_tol for r in self.runs),
            "v_off_boundary": all(r.v_boundary_hits == 0 for r in self.runs),
            "feasible": all(r.feasible for r in self.runs),
        }

    @property
    def failing_runs(self) -> list[Theorem3Run]:
        return [
            r for r in self.runs
            if not (r.loss_rel <= self.rel_loss_tol and r.lambda_min > self.lambda_tol and r.v_boundary_hits == 0)
        ]

    @property
    def passed(self) -> bool:
        return all(self.checks().values())


def certify_theorem3(dataset: Dataset, m: int, epsilons, seeds=(0,), zeta: float = DEFAULT_ZETA,
                     kappa: float = DEFAULT_KAPPA, max_iters: int = 20_000, kkt_tol: float = DEFAULT_KKT_TOL,
                     lr_grid_w=PAPER_LR_GRID, lr_grid_v=PAPER_LR_GRID, momentum: float = 0.9,
                     top_seed: int = 0, activation="tanh") -> Theorem3Report:
    """Train the mirrored regime per (epsilon, seed) and report loss vs epsilon^2,
    KKT residual, sigma_min(J) at the end point and outer-weight floor hits."""
    report = Theorem3Report(m, kkt_tol)
    for s in seeds:
        init_seed = derive_seed(top_seed, "init", m, s)
        params0 = mirrored_lecun_init(dataset.d, m, Head.PAIRED, init_seed, activation)
        for eps in sorted(float(e) for e in epsilons):
            spec = ConstraintSpec(eps, params0.w, zeta, kappa)
            config = TrainConfig(
                Regime.MIRRORED_PGD, lr_grid_w[0], lr_grid_v[0], momentum=momentum,
                max_iters=max_iters, kkt_tol=kkt_tol, seed=init_seed, constraint=spec,
            )
            params, trace, (lr_w, lr_v) = best_of_grid(params0, dataset, config, lr_grid_w, lr_grid_v)
            lam = min_singular_value(jacobian_w(params, dataset.x))
            report.runs.append(
                Theorem3Run(
                    eps, s, lr_w, lr_v, trace.stop_reason.value, trace.iterations, trace.loss_init,
                    trace.loss_final, trace.relative_loss, trace.loss_final / eps**2,
                    trace.kkt_residual_final, lam, trace.v_floor_hits, is_feasible(params, spec).feasible,
                )
            )
    return report
