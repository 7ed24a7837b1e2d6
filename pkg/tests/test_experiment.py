import csv
import math
from dataclasses import replace

import numpy as np
import pytest

from narrownet import experiment as ex
from narrownet.constraints import is_feasible
from narrownet.model import WidthError
from narrownet.trainer import Regime, TrainConfig, best_of_grid


@pytest.fixture(scope="module")
def tiny():
    return replace(ex.PRESETS["desk"], name="tiny", n=24, d=6, widths=(8, 4), epsilons=(0.3, 1000.0), seeds=2,
                   max_iters=150, lr_grid_w=(1e-3, 5e-2), lr_grid_v=(1e-2, 1e-1))


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_derive_seed():
    a = ex.derive_seed(0, "init", 8, 1)
    assert a == ex.derive_seed(0, "init", 8, 1)
    assert 0 <= a < 2**64
    assert len({ex.derive_seed(s, "init", m, i) for s in range(3) for m in (8, 16) for i in range(3)}) == 18


def test_presets():
    desk = ex.PRESETS["desk"]
    assert (desk.n, desk.d, desk.widths, desk.epsilons, desk.seeds) == (200, 50, (8, 16, 32, 64), (0.5, 1.0, 2.0, 1000.0), 3)
    assert set(desk.regimes) == {r.value for r in Regime}
    assert len(ex.grid_cells(desk.widths, desk.epsilons, desk.regimes, desk.seeds)) == 144
    paper = ex.PRESETS["paper"]
    assert (paper.n, paper.d) == (1000, 200)
    assert paper.widths[0] == 20 and paper.widths[-1] == 1200
    assert paper.epsilons == (0.1, 0.2, 0.4, 0.8, 1.0, 2.0, 4.0, 8.0, 10.0, 1000.0)


@pytest.fixture(scope="module")
def grid_csv(tiny, tmp_path_factory):
    path = tmp_path_factory.mktemp("grid") / "results.csv"
    rows = ex.run_figure2_grid(tiny, path, jobs=1)
    return path, rows


def test_grid_rows_and_header(tiny, grid_csv):
    path, rows = grid_csv
    header = path.read_text().splitlines()[0]
    assert header.split(",") == ex.CSV_HEADER
    assert len(rows) == len(_read(path)) == 2 * 2 * 3 * 2
    for r in _read(path):
        assert float(r["loss_rel"]) == pytest.approx(float(r["loss_final"]) / float(r["loss_init"]), rel=1e-15)
        assert float(r["lambda_min_final"]) >= 0


def test_grid_jobs_do_not_change_output(tiny, grid_csv, tmp_path):
    path, _ = grid_csv
    ex.run_figure2_grid(tiny, tmp_path / "par.csv", jobs=2)
    assert (tmp_path / "par.csv").read_bytes() == path.read_bytes()


def test_grid_resume(tiny, grid_csv, tmp_path):
    path, _ = grid_csv
    lines = path.read_text().splitlines(keepends=True)
    partial = tmp_path / "partial.csv"
    partial.write_text("".join(lines[:5]))
    ex.run_figure2_grid(tiny, partial, jobs=1)
    assert partial.read_bytes() == path.read_bytes()


def test_unconstrained_rows(grid_csv):
    _, rows = grid_csv
    reg = [r for r in rows if r["regime"] == "regular_gd"]
    assert all(r["proj_w_activations"] == "0" for r in reg)
    by_cell = {}
    for r in reg:
        by_cell.setdefault((r["m"], r["seed"]), set()).add(r["loss_final"])
    assert all(len(v) == 1 for v in by_cell.values())
    for r in rows:
        if r["regime"] != "regular_gd" and r["epsilon"] == "1000.0":
            assert r["proj_w_activations"] == "0"


def test_mirrored_rows_feasible(tiny):
    ds = ex.preset_dataset(tiny)
    for m in tiny.widths:
        cell = ex.Cell(Regime.MIRRORED_PGD, m, 0.3, 0)
        p0, seed = ex.cell_params(tiny, cell)
        spec = ex.cell_constraint(tiny, cell, p0.w)
        cfg = TrainConfig(Regime.MIRRORED_PGD, 1e-3, 1e-2, max_iters=tiny.max_iters, constraint=spec)
        params, _, _ = best_of_grid(p0, ds, cfg, tiny.lr_grid_w, tiny.lr_grid_v)
        assert is_feasible(params, spec)


def test_single_cell_rerun_reproduces_row(tiny, grid_csv):
    _, rows = grid_csv
    cell = ex.Cell(Regime.REGULAR_PGD_ABLATION, 8, 0.3, 1)
    row = next(r for r in rows if r["run_id"] == cell.run_id)
    assert ex.run_cell(tiny, cell) == row


def test_narrow_width_flagged(tiny, caplog):
    with caplog.at_level("WARNING"):
        ex.run_cell(replace(tiny, max_iters=5), ex.Cell(Regime.MIRRORED_PGD, 2, 1.0, 0))
    assert "2n/d" in caplog.text


def test_divergent_cell_recorded(tiny, tmp_path):
    bad = replace(tiny, widths=(4,), epsilons=(1000.0,), regimes=("regular_gd",), seeds=1, lr_grid_w=(1e7,), lr_grid_v=(1e7,))
    rows = ex.run_figure2_grid(bad, tmp_path / "bad.csv")
    assert len(rows) == 1 and rows[0]["stop_reason"] == "non_finite"
    assert _read(tmp_path / "bad.csv")[0]["loss_final"] == "inf"


def test_certify_theorem1_boundary_case():
    rep = ex.certify_theorem1(40, 10, 8, n_seeds=5)
    assert rep.in_scope and rep.passed
    s = rep.summary()
    assert s["max_abs_output"] <= 1e-12 and s["lambda_min_sub_min"] > 1e-10
    assert s["max_duplication_rel_err"] <= 1e-9


def test_certify_theorem1_out_of_scope(caplog):
    rep = ex.certify_theorem1(100, 10, 8, n_seeds=2)
    assert not rep.in_scope and rep.passed
    assert all(math.isnan(r.lambda_min_sub) for r in rep.rows)
    assert "scope" in caplog.text


def test_certify_theorem1_odd_width():
    with pytest.raises(WidthError):
        ex.certify_theorem1(10, 4, 5, n_seeds=1)


def test_certify_theorem3_report(tiny):
    ds = ex.preset_dataset(tiny)
    rep = ex.certify_theorem3(ds, 8, [1.0, 0.5], seeds=(0,), max_iters=100, lr_grid_w=(1e-3, 1e-2), lr_grid_v=(1e-2,))
    assert [r.epsilon for r in rep.runs] == [0.5, 1.0]
    checks = rep.checks()
    assert checks["stop_contract"] and checks["feasible"]
    for r in rep.runs:
        assert r.loss_over_eps2 == pytest.approx(r.loss_final / r.epsilon**2)
