"""Experiment harness: configs, sweeps, output files, noise measurement."""

import csv
import json

import numpy as np
import pytest

from tdrk_lab.harness import (ConvergenceRecord, ExperimentConfig,
                              characterize_epsilon, emit_outputs,
                              estimate_order, reference_solution,
                              run_convergence)
from tdrk_lab.precision import Format
from tdrk_lab.spectral import Build


def test_estimate_order_recovers_exact_powers():
    dts = (1e-1, 1e-2, 1e-3)
    for p in (1, 2, 3, 4):
        errs = [7.0 * dt ** p for dt in dts]
        assert estimate_order(dts, errs) == pytest.approx(p, abs=1e-10)


def test_estimate_order_needs_two_finite_points():
    assert estimate_order([1e-1, 1e-2], [None, 1e-3]) is None
    assert estimate_order([1e-1, 1e-2], [np.inf, 1e-3]) is None
    assert estimate_order([], []) is None
    assert estimate_order([1e-1, 1e-2], [None, None]) is None
    assert estimate_order([1e-1, 1e-2, 1e-3],
                          [1e-2, None, 1e-4]) == pytest.approx(1.0, abs=1e-9)


def test_config_normalization_and_validation():
    cfg = ExperimentConfig(methods="TDRK2s3p1e", nx=[25], dts=[0.1],
                           pairs=[["b64", "b16"]])
    assert cfg.methods == ("TDRK2s3p1e",)
    assert cfg.pairs == (("b64", "b16"),)
    with pytest.raises(ValueError):
        ExperimentConfig(impl=3)
    with pytest.raises(ValueError):
        ExperimentConfig(methods=())
    with pytest.raises(ValueError):
        ExperimentConfig(pairs=[("b64", "b99")])
    with pytest.raises(ValueError):
        ExperimentConfig.from_mapping({"bogus_key": 1})


def test_config_json_round_trip(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({
        "problem": "advection",
        "methods": ["TDRK2s3p1e", "TDRK3s3p3e"],
        "nx": [25],
        "dts": [1e-1, 1e-2],
        "pairs": [["b64", "b64"]],
        "t_final": 0.5,
    }))
    cfg = ExperimentConfig.from_json(path)
    assert cfg.methods == ("TDRK2s3p1e", "TDRK3s3p3e")
    assert cfg.dts == (0.1, 0.01)


def test_sweep_reproduces_known_errors():
    cfg = ExperimentConfig(methods=("TDRK2s3p1e",), nx=(25,),
                           dts=(1e-1, 1e-2), pairs=(("b64", "b64"),))
    recs = run_convergence(cfg)
    assert len(recs) == 2
    assert recs[0].error_max == pytest.approx(2.0415e-3, rel=1e-3)
    assert recs[1].error_max == pytest.approx(2.0280e-6, rel=1e-3)
    again = run_convergence(cfg)
    assert [r.error_max for r in again] == [r.error_max for r in recs]


def test_sweep_records_divergence_as_missing_error():
    cfg = ExperimentConfig(methods=("TDRK2s3p1e",), nx=(100,), dts=(1e-1,),
                           pairs=(("b64", "b16"),))
    rec = run_convergence(cfg)[0]
    assert rec.diverged
    assert rec.error_max is None
    assert rec.steps < 5


def test_burgers_sweep_uses_reference_solution():
    cfg = ExperimentConfig(problem="burgers", methods=("TDRK2s3p1e",),
                           nx=(16,), dts=(1e-2, 5e-3),
                           pairs=(("b64", "b64"),), t_final=0.1,
                           ref_dt=1e-3)
    recs = run_convergence(cfg)
    slope = estimate_order([r.dt for r in recs], [r.error_max for r in recs])
    assert slope == pytest.approx(3.0, abs=0.5)


def test_reference_solution_is_cached_and_converged():
    a = reference_solution("burgers", 16, 0.1, 1e-3)
    assert reference_solution("burgers", 16, 0.1, 1e-3) is a
    b = reference_solution("burgers", 16, 0.1, 5e-4)
    assert np.abs(a - b).max() <= 1e-8


def _tiny_records():
    return [
        ConvergenceRecord("TDRK2s3p1e", "advection", 25, 1e-1, "b64", "b64",
                          1, 2.0e-3, False, 5, 1.0),
        ConvergenceRecord("TDRK2s3p1e", "advection", 25, 1e-2, "b64", "b64",
                          1, 2.0e-6, False, 50, 2.0),
        ConvergenceRecord("TDRK2s3p1e", "advection", 25, 1e-1, "b64", "b16",
                          1, None, True, 1, 1.0),
        ConvergenceRecord("TDRK2s3p1e", "advection", 25, 1e-2, "b64", "b16",
                          1, 6.5e-4, False, 50, 2.0),
    ]


def test_emitted_files_and_na_sentinel(tmp_path):
    paths = emit_outputs(_tiny_records(), tmp_path)
    names = [p.name for p in paths]
    assert names[0] == "results.csv"
    assert "table_TDRK2s3p1e.md" in names
    assert "convergence_TDRK2s3p1e_25.svg" in names
    with open(paths[0], newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["method", "problem", "nx", "dt", "high", "low",
                       "impl", "error_max", "diverged", "steps",
                       "wall_time_ms"]
    na_row = [r for r in rows[1:] if r[8] == "1"][0]
    assert na_row[7] == "NA"
    table = (tmp_path / "table_TDRK2s3p1e.md").read_text()
    assert "diverged" in table
    assert "observed order" in table
    svg = (tmp_path / "convergence_TDRK2s3p1e_25.svg").read_text()
    assert "<svg" in svg


def test_outputs_reproducible_modulo_wall_time(tmp_path):
    recs = _tiny_records()
    jitter = [ConvergenceRecord(r.method, r.problem, r.nx, r.dt, r.high,
                                r.low, r.impl, r.error_max, r.diverged,
                                r.steps, r.wall_time_ms + 3.25)
              for r in recs]
    a = emit_outputs(recs, tmp_path / "a")
    b = emit_outputs(jitter, tmp_path / "b")
    with open(a[0], newline="") as fh:
        rows_a = [row[:-1] for row in csv.reader(fh)]
    with open(b[0], newline="") as fh:
        rows_b = [row[:-1] for row in csv.reader(fh)]
    assert rows_a == rows_b
    assert (tmp_path / "a" / "table_TDRK2s3p1e.md").read_bytes() == \
        (tmp_path / "b" / "table_TDRK2s3p1e.md").read_bytes()
    assert (tmp_path / "a" / "convergence_TDRK2s3p1e_25.svg").read_bytes() == \
        (tmp_path / "b" / "convergence_TDRK2s3p1e_25.svg").read_bytes()


def test_effective_noise_levels():
    # the dense half-precision square is an order-one perturbation; the
    # once-rounded build is an order of magnitude cleaner
    e16 = characterize_epsilon("advection", 50, Format.B16, Build.NATIVE)
    assert 0.9 <= e16 <= 1.15
    e16d = characterize_epsilon("advection", 50, Format.B16, Build.DOWNCAST)
    assert 0.07 <= e16d <= 0.10
    assert characterize_epsilon("advection", 50, Format.B32) <= 1e-3
    assert characterize_epsilon("advection", 50, Format.B64) <= 1e-10
