"""Command-line front end: ``narrownet {train,figure2,certify,gradcheck}``.

Exit codes: 0 success, 2 invalid configuration, 3 training stopped on a
non-finite value, 4 some grid cells failed, 5 a certificate failed,
6 gradient check failed.

Every command writes ``resolved_config.yaml`` into ``--out``; feeding that
file back through ``--config`` reproduces the run.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import math
import os
import sys
import warnings
from dataclasses import fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import experiment as ex
from .constraints import ConstraintSpec
from .data import Dataset, load_dataset, make_synthetic
from .init import lecun_init, make_generator, mirrored_lecun_init, normal
from .linalg import ShapeError
from .model import ACTIVATIONS, Activation, AssumptionWarning, Head, Params, WidthError, forward, jacobian_w
from .objective import grad, loss
from .trainer import (
    DEFAULT_KKT_TOL,
    DEFAULT_MAX_ITERS,
    ConfigError,
    Regime,
    StopReason,
    TrainConfig,
    train,
)

log = logging.getLogger("narrownet")

EXIT_OK, EXIT_INVALID, EXIT_NONFINITE, EXIT_GRID_FAILED, EXIT_CERT_FAILED, EXIT_GRADCHECK = 0, 2, 3, 4, 5, 6
SCHEMA_VERSION = 1
GRADCHECK_TOL = 1e-5
GRADCHECK_INSTANCES = 10


class UsageError(ValueError):
    """Bad configuration or flags; maps to exit code 2."""


# -- configuration --------------------------------------------------------------

TRAIN_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "data": {"n": 200, "d": 50, "path": None},
    "model": {"m": 8, "activation": "tanh"},
    "optim": {
        "regime": Regime.MIRRORED_PGD.value,
        "lr_w": 5e-3,
        "lr_v": 1e-2,
        "momentum": 0.9,
        "max_iters": DEFAULT_MAX_ITERS,
        "kkt_tol": DEFAULT_KKT_TOL,
        "checkpoint_every": None,
    },
    "constraint": {"epsilon": 1.0, "zeta": ex.DEFAULT_ZETA, "kappa": ex.DEFAULT_KAPPA},
}

_GRID_KEYS = [f.name for f in fields(ex.GridPreset) if f.name not in ("name", "top_seed")]
FIGURE2_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "preset": "desk",
    "grid": {k: None for k in _GRID_KEYS},
}

CERTIFY_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "theorem": 1,
    "theorem1": {"n": 40, "d": 10, "m": 8, "seeds": 20, "activation": "tanh"},
    "theorem3": {
        "n": 200,
        "d": 50,
        "m": 8,
        "epsilons": [0.25, 0.5, 1.0],
        "seeds": 1,
        "zeta": ex.DEFAULT_ZETA,
        "kappa": ex.DEFAULT_KAPPA,
        "max_iters": DEFAULT_MAX_ITERS,
        "kkt_tol": DEFAULT_KKT_TOL,
    },
}

GRADCHECK_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "heads": [h.value for h in Head],
    "activations": list(ACTIVATIONS),
    "instances": GRADCHECK_INSTANCES,
    "tolerance": GRADCHECK_TOL,
}


def _merge(defaults: dict, given: dict, where: str = "") -> dict:
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        path = f"{where}{key}"
        if key not in defaults:
            raise UsageError(f"unknown config key {path!r}; allowed: {sorted(defaults)}")
        if isinstance(defaults[key], dict):
            if not isinstance(val, dict):
                raise UsageError(f"config key {path!r} must be a mapping")
            out[key] = _merge(defaults[key], val, path + ".")
        else:
            out[key] = val
    return out


def load_config(path, defaults: dict) -> dict:
    """Read a YAML config, reject unknown keys and fill in defaults."""
    if path is None:
        return copy.deepcopy(defaults)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise UsageError(f"{path}: parse error at {where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"{path}: parse error: {exc}") from exc
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise UsageError(f"{path}: top level must be a mapping")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise UsageError(f"{path}: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return _merge(defaults, raw)


def write_resolved(cfg: dict, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "resolved_config.yaml", "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False, default_flow_style=None)


# -- train ------------------------------------------------------------------------


def _as_float(x, name):
    try:
        return float(x)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be a number, got {x!r}") from None


def _as_int(x, name):
    if isinstance(x, bool) or not isinstance(x, int):
        raise UsageError(f"{name} must be an integer, got {x!r}")
    return x


def build_train(cfg: dict):
    seed = _as_int(cfg["seed"], "seed")
    data_cfg, model_cfg, opt, con = cfg["data"], cfg["model"], cfg["optim"], cfg["constraint"]
    if data_cfg["path"]:
        dataset = load_dataset(data_cfg["path"])
    else:
        dataset = make_synthetic(_as_int(data_cfg["n"], "data.n"), _as_int(data_cfg["d"], "data.d"), ex.derive_seed(seed, "data"))
    m = _as_int(model_cfg["m"], "model.m")
    try:
        regime = Regime(opt["regime"])
    except ValueError:
        raise UsageError(f"unknown regime {opt['regime']!r}; choose from {[r.value for r in Regime]}") from None
    if model_cfg["activation"] not in ACTIVATIONS:
        raise UsageError(f"unknown activation {model_cfg['activation']!r}; choose from {sorted(ACTIVATIONS)}")
    init_seed = ex.derive_seed(seed, "init", m, 0)
    if regime is Regime.MIRRORED_PGD:
        params0 = mirrored_lecun_init(dataset.d, m, Head.PAIRED, init_seed, model_cfg["activation"])
        if m * dataset.d < 2 * dataset.n:
            warnings.warn(f"m*d = {m * dataset.d} < 2n = {2 * dataset.n}: width below the full-rank threshold", AssumptionWarning)
        spec = ConstraintSpec(_as_float(con["epsilon"], "constraint.epsilon"), params0.w,
                              _as_float(con["zeta"], "constraint.zeta"), _as_float(con["kappa"], "constraint.kappa"))
    else:
        params0 = lecun_init(dataset.d, m, Head.PLAIN, init_seed, model_cfg["activation"])
        spec = None
        if regime is Regime.REGULAR_PGD_ABLATION:
            spec = ConstraintSpec(_as_float(con["epsilon"], "constraint.epsilon"), params0.w, zeta=None, kappa=math.inf)
    config = TrainConfig(
        regime,
        lr_w=_as_float(opt["lr_w"], "optim.lr_w"),
        lr_v=_as_float(opt["lr_v"], "optim.lr_v"),
        momentum=_as_float(opt["momentum"], "optim.momentum"),
        max_iters=_as_int(opt["max_iters"], "optim.max_iters"),
        kkt_tol=_as_float(opt["kkt_tol"], "optim.kkt_tol"),
        checkpoint_every=opt["checkpoint_every"],
        seed=init_seed,
        constraint=spec,
    )
    return params0, dataset, config


def _write_params(params: Params, path: Path) -> None:
    doc = {
        "head": params.head.value,
        "activation": params.activation.name,
        "w": params.w.tolist(),
        "v": params.v.tolist(),
    }
    path.write_text(json.dumps(doc) + "\n")


def read_params(path) -> Params:
    doc = json.loads(Path(path).read_text())
    return Params(np.array(doc["w"]), np.array(doc["v"]), Head(doc["head"]), doc["activation"])


def cmd_train(args) -> int:
    cfg = load_config(args.config, TRAIN_DEFAULTS)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = Path(args.out)
    params0, dataset, config = build_train(cfg)
    write_resolved(cfg, out)
    params, trace = train(params0, dataset, config)

    with open(out / "trace.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "loss", "grad_mapping_norm", "lambda_min_J", "feasible"])
        for c in trace.checkpoints:
            w.writerow([c.iter, repr(c.loss), repr(c.grad_mapping_norm),
                        "" if c.lambda_min_J is None else repr(c.lambda_min_J), int(c.feasible)])
    if params is not None:
        _write_params(params, out / "params.json")

    print(f"regime {config.regime.value}  m={params0.m}  n={dataset.n}  d={dataset.d}")
    print(f"stop: {trace.stop_reason.value} after {trace.iterations} iterations")
    print(f"loss {trace.loss_init:.6g} -> {trace.loss_final:.6g}  (relative {trace.relative_loss:.3g})")
    print(f"kkt residual {trace.kkt_residual_final:.3g}  lambda_min(J) {trace.lambda_min_final}")
    if trace.stop_reason is StopReason.NON_FINITE:
        print("error: training produced a non-finite value", file=sys.stderr)
        return EXIT_NONFINITE
    return EXIT_OK


# -- figure2 ----------------------------------------------------------------------


def resolve_preset(cfg: dict) -> ex.GridPreset:
    name = cfg["preset"]
    if name not in ex.PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {sorted(ex.PRESETS)}")
    overrides = {}
    for k, val in cfg["grid"].items():
        if val is None:
            continue
        overrides[k] = tuple(val) if isinstance(val, list) else val
    preset = replace(ex.PRESETS[name], top_seed=_as_int(cfg["seed"], "seed"), **overrides)
    for r in preset.regimes:
        if r not in {x.value for x in Regime}:
            raise UsageError(f"unknown regime {r!r}")
    if Regime.MIRRORED_PGD.value in preset.regimes:
        for m in preset.widths:
            if m % 2:
                raise WidthError(f"paired head requires that the width m is an even number (got m={m})")
    return preset


def cmd_figure2(args) -> int:
    cfg = load_config(args.config, FIGURE2_DEFAULTS)
    if args.preset is not None:
        cfg["preset"] = args.preset
    if args.seed is not None:
        cfg["seed"] = args.seed
    preset = resolve_preset(cfg)
    resolved = {"schema_version": SCHEMA_VERSION, "seed": preset.top_seed, "preset": preset.name,
                "grid": {k: (list(v) if isinstance(v, tuple) else v) for k, v in preset.to_dict().items() if k in _GRID_KEYS}}
    out = Path(args.out)
    write_resolved(resolved, out)
    print(f"preset {preset.name}: n={preset.n} d={preset.d} widths={list(preset.widths)} "
          f"epsilons={list(preset.epsilons)} regimes={list(preset.regimes)} seeds={preset.seeds}")
    narrow = [m for m in preset.widths if m * preset.d < 2 * preset.n]
    if narrow and Regime.MIRRORED_PGD.value in preset.regimes:
        print(f"warning: widths {narrow} are below 2n/d = {2 * preset.n / preset.d:g} (run anyway, flagged)")
    rows = ex.run_figure2_grid(preset, out / "results.csv", jobs=args.jobs, resume=not args.fresh)
    failed = [r for r in rows if r["stop_reason"] == StopReason.NON_FINITE.value]
    print(f"{len(rows)} rows written to {out / 'results.csv'}")
    if failed:
        print(f"error: {len(failed)} cells failed (non-finite for every step size)", file=sys.stderr)
        for r in failed:
            print(f"  {r['run_id']}", file=sys.stderr)
        return EXIT_GRID_FAILED
    return EXIT_OK


# -- certify ----------------------------------------------------------------------


def _theorem1(cfg: dict, out: Path) -> int:
    c = cfg["theorem1"]
    rep = ex.certify_theorem1(_as_int(c["n"], "n"), _as_int(c["d"], "d"), _as_int(c["m"], "m"),
                              _as_int(c["seeds"], "seeds"), c["activation"], top_seed=cfg["seed"])
    with open(out / "certificate.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "max_abs_output_plain", "max_abs_output_paired", "lambda_min_sub",
                    "lambda_min_full", "lambda_min_half", "duplication_rel_err"])
        for r in rep.rows:
            w.writerow([r.seed, repr(r.max_abs_output_plain), repr(r.max_abs_output_paired), repr(r.lambda_min_sub),
                        repr(r.lambda_min_full), repr(r.lambda_min_half), repr(r.duplication_rel_err)])
    print(f"zero output and Jacobian rank at mirrored init: n={rep.n} d={rep.d} m={rep.m} {rep.activation}")
    if not rep.in_scope:
        print(f"warning: outside Theorem 1 scope (m*d = {rep.m * rep.d} < 2n = {2 * rep.n}); rank not certified")
    for k, val in rep.summary().items():
        print(f"  {k:26s} {val:.6g}")
    if not rep.passed:
        print(f"FAILED seeds: {rep.failing_seeds}")
        return EXIT_CERT_FAILED
    print("PASSED")
    return EXIT_OK


def _theorem3(cfg: dict, out: Path) -> int:
    c = cfg["theorem3"]
    ds = make_synthetic(_as_int(c["n"], "n"), _as_int(c["d"], "d"), ex.derive_seed(cfg["seed"], "data"))
    rep = ex.certify_theorem3(ds, _as_int(c["m"], "m"), [float(e) for e in c["epsilons"]],
                              seeds=range(_as_int(c["seeds"], "seeds")), zeta=float(c["zeta"]), kappa=float(c["kappa"]),
                              max_iters=_as_int(c["max_iters"], "max_iters"), kkt_tol=float(c["kkt_tol"]),
                              top_seed=cfg["seed"])
    cols = ["epsilon", "seed", "lr_w", "lr_v", "stop_reason", "iterations", "loss_init", "loss_final", "loss_rel",
            "loss_over_eps2", "kkt_residual", "lambda_min", "v_boundary_hits", "feasible"]
    with open(out / "certificate.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rep.runs:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, k) for k in cols)])
    print(f"small loss at KKT points: n={ds.n} d={ds.d} m={rep.m} zeta={c['zeta']} kappa={c['kappa']}")
    print(f"  {'eps':>6s} {'seed':>4s} {'stop':>9s} {'iters':>6s} {'rel loss':>10s} {'loss/eps^2':>10s} "
          f"{'kkt':>9s} {'lam_min':>9s} {'v hits':>6s}")
    for r in rep.runs:
        print(f"  {r.epsilon:6g} {r.seed:4d} {r.stop_reason:>9s} {r.iterations:6d} {r.loss_rel:10.3e} "
              f"{r.loss_over_eps2:10.3e} {r.kkt_residual:9.2e} {r.lambda_min:9.2e} {r.v_boundary_hits:6d}")
    checks = rep.checks()
    for k, ok in checks.items():
        print(f"  {k:26s} {'ok' if ok else 'FAIL'}")
    if not rep.passed:
        bad = sorted({(r.epsilon, r.seed) for r in rep.failing_runs})
        print(f"FAILED (epsilon, seed): {bad}")
        return EXIT_CERT_FAILED
    print("PASSED")
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = load_config(args.config, CERTIFY_DEFAULTS)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.theorem is not None:
        cfg["theorem"] = args.theorem
    theorem = cfg["theorem"]
    if theorem not in (1, 3):
        raise UsageError(f"theorem must be 1 or 3, got {theorem!r}")
    section = cfg[f"theorem{theorem}"]
    for key in ("n", "d", "m", "seeds", "activation", "max_iters"):
        val = getattr(args, key, None)
        if val is not None and key in section:
            section[key] = val
    if args.epsilons is not None and theorem == 3:
        section["epsilons"] = [float(e) for e in args.epsilons.split(",")]
    out = Path(args.out)
    write_resolved(cfg, out)
    return _theorem1(cfg, out) if theorem == 1 else _theorem3(cfg, out)


# -- gradcheck --------------------------------------------------------------------


def _corrupted(act: Activation) -> Activation:
    return replace(act, derivative=lambda z: 1.001 * act.derivative(z), derivative_from_value=None)


def _fd_step(theta: float) -> float:
    return 1e-6 * (1.0 + abs(theta))


def _rel_err(analytic: np.ndarray, numeric: np.ndarray):
    diff = np.abs(analytic - numeric)
    scale = max(float(np.max(np.abs(numeric))), float(np.max(np.abs(analytic))), np.finfo(float).tiny)
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]) / scale, tuple(int(i) for i in idx)


def gradient_check(params: Params, dataset: Dataset) -> list[tuple[str, float, tuple]]:
    """Central differences against the Jacobian and both loss gradients.

    Returns ``(quantity, normwise relative error, worst index)`` triples.
    """
    g = grad(params, dataset)
    jac = jacobian_w(params, dataset.x)
    w = params.w.copy()
    d, m = w.shape
    fd_gw = np.zeros_like(w)
    fd_jac = np.zeros_like(jac)
    for j in range(m):
        for k in range(d):
            h = _fd_step(w[k, j])
            wp, wm = w.copy(), w.copy()
            wp[k, j] += h
            wm[k, j] -= h
            pp, pm = params.replace(w=wp), params.replace(w=wm)
            fd_gw[k, j] = (loss(pp, dataset) - loss(pm, dataset)) / (2 * h)
            fd_jac[:, j * d + k] = (forward(pp, dataset.x) - forward(pm, dataset.x)) / (2 * h)
    v = params.v.copy()
    fd_gv = np.zeros_like(v)
    for j in range(v.size):
        h = _fd_step(v[j])
        vp, vm = v.copy(), v.copy()
        vp[j] += h
        vm[j] -= h
        fd_gv[j] = (loss(params.replace(v=vp), dataset) - loss(params.replace(v=vm), dataset)) / (2 * h)
    return [
        ("jacobian_w", *_rel_err(jac, fd_jac)),
        ("grad_w", *_rel_err(g.grad_w, fd_gw)),
        ("grad_v", *_rel_err(g.grad_v, fd_gv)),
    ]


def gradcheck_instance(head: Head, act: Activation, rng: np.random.Generator):
    n = int(rng.integers(1, 21))
    d = int(rng.integers(1, 9))
    m = 2 * int(rng.integers(1, 6))
    seed = int(rng.integers(0, 2**63))
    params = lecun_init(d, m, head, seed, act)
    x = normal(rng, (n, d), 1.0)
    y = normal(rng, n, 1.0)
    return params, Dataset(x, y, {"generator": "gradcheck"})


def cmd_gradcheck(args) -> int:
    cfg = load_config(args.config, GRADCHECK_DEFAULTS)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.head is not None:
        cfg["heads"] = [args.head]
    if args.activation is not None:
        cfg["activations"] = [args.activation]
    if args.instances is not None:
        cfg["instances"] = args.instances
    for h in cfg["heads"]:
        if h not in {x.value for x in Head}:
            raise UsageError(f"unknown head {h!r}")
    for a in cfg["activations"]:
        if a not in ACTIVATIONS:
            raise UsageError(f"unknown activation {a!r}")
    tol = float(cfg["tolerance"])
    out = Path(args.out)
    write_resolved(cfg, out)

    results = []
    for head in cfg["heads"]:
        for name in cfg["activations"]:
            act = ACTIVATIONS[name]
            if args.corrupt_derivative:
                act = _corrupted(act)
            rng = make_generator(ex.derive_seed(cfg["seed"], "gradcheck", head, name))
            for i in range(int(cfg["instances"])):
                params, ds = gradcheck_instance(Head(head), act, rng)
                for qty, err, idx in gradient_check(params, ds):
                    results.append((head, name, i, qty, err, idx))
    with open(out / "gradcheck.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["head", "activation", "instance", "quantity", "rel_err", "worst_index"])
        for head, name, i, qty, err, idx in results:
            w.writerow([head, name, i, qty, repr(err), " ".join(map(str, idx))])
    worst = max(results, key=lambda r: r[4])
    print(f"{len(results)} checks, worst relative error {worst[4]:.3e} (tolerance {tol:g})")
    if worst[4] > tol:
        head, name, i, qty, err, idx = worst
        print(f"FAILED: {qty} head={head} activation={name} instance={i} index={idx} rel_err={err:.3e}")
        return EXIT_GRADCHECK
    print("PASSED")
    return EXIT_OK


# -- entry point --------------------------------------------------------------------


def _default_jobs() -> int:
    raw = os.environ.get("NARROWNET_JOBS")
    if raw is None:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise UsageError(f"NARROWNET_JOBS must be an integer, got {raw!r}") from None
    if jobs < 1:
        raise UsageError("NARROWNET_JOBS must be >= 1")
    return jobs


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="top-level seed (overrides the config)")
    common.add_argument("--jobs", type=int, help="worker processes (default: $NARROWNET_JOBS or 1)")
    common.add_argument("--preset", choices=sorted(ex.PRESETS), help="named grid preset")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="narrownet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("train", parents=[common], help="train one network")

    p = sub.add_parser("figure2", parents=[common], help="width x radius x regime sweep")
    p.add_argument("--fresh", action="store_true", help="ignore rows already in results.csv")

    p = sub.add_parser("certify", parents=[common], help="numeric certificates")
    p.add_argument("--theorem", type=int, choices=(1, 3))
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seeds", type=int)
    p.add_argument("--activation", choices=sorted(ACTIVATIONS))
    p.add_argument("--epsilons", help="comma-separated radii (theorem 3)")
    p.add_argument("--max-iters", dest="max_iters", type=int)

    p = sub.add_parser("gradcheck", parents=[common], help="finite-difference gradient check")
    p.add_argument("--head", choices=[h.value for h in Head])
    p.add_argument("--activation", choices=sorted(ACTIVATIONS))
    p.add_argument("--instances", type=int)
    p.add_argument("--corrupt-derivative", action="store_true", help=argparse.SUPPRESS)
    return parser


COMMANDS = {"train": cmd_train, "figure2": cmd_figure2, "certify": cmd_certify, "gradcheck": cmd_gradcheck}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.jobs is None:
            args.jobs = _default_jobs()
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        with warnings.catch_warnings():
            warnings.simplefilter("always", AssumptionWarning)
            return COMMANDS[args.command](args)
    except (UsageError, ConfigError, WidthError, ShapeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
