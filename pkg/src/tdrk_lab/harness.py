"""Convergence studies over methods, grids, step sizes and format pairs.

A study sweeps the cross product in ExperimentConfig, measures the final
time error of every run against either the closed-form solution or a tight
reference integration, and writes a CSV of raw records plus per-method
markdown tables and log-log convergence plots.  Everything except wall
times is reproducible byte for byte.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, fields
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .catalog import get_method
from .integrator import StepConfig, integrate, ssp33_integrate
from .precision import Format
from .problems import make_problem
from .spectral import Build

__all__ = [
    "ExperimentConfig",
    "ConvergenceRecord",
    "run_convergence",
    "estimate_order",
    "emit_outputs",
    "reference_solution",
    "characterize_epsilon",
]

_SHORT = {"b16": "16", "b32": "32", "b64": "64", "ext": "ext"}


@dataclass
class ExperimentConfig:
    problem: str = "advection"
    methods: tuple[str, ...] = ("TDRK2s3p1e",)
    nx: tuple[int, ...] = (25,)
    dts: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    pairs: tuple[tuple[str, str], ...] = (("b64", "b64"),)
    t_final: float = 0.5
    impl: int = 1
    ref_dt: float = 1e-4
    out_dir: str = "out"

    def __post_init__(self):
        if isinstance(self.methods, str):
            self.methods = (self.methods,)
        self.methods = tuple(self.methods)
        self.nx = tuple(int(n) for n in self.nx)
        self.dts = tuple(float(d) for d in self.dts)
        self.pairs = tuple((str(h), str(l)) for h, l in self.pairs)
        self.impl = int(self.impl)
        if self.impl not in (1, 2):
            raise ValueError(f"impl must be 1 or 2, got {self.impl}")
        if not self.methods or not self.nx or not self.dts or not self.pairs:
            raise ValueError("methods, nx, dts and pairs must be non-empty")
        for h, l in self.pairs:
            Format.parse(h), Format.parse(l)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - allowed)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**raw)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_mapping(json.load(fh))


@dataclass(frozen=True)
class ConvergenceRecord:
    method: str
    problem: str
    nx: int
    dt: float
    high: str
    low: str
    impl: int
    error_max: float | None
    diverged: bool
    steps: int
    wall_time_ms: float

    @property
    def pair_label(self) -> str:
        lab = f"{_SHORT[self.high]}/{_SHORT[self.low]}"
        if self.impl != 1:
            lab += f" i{self.impl}"
        return lab


_REFERENCE_CACHE: dict[tuple, np.ndarray] = {}


def reference_solution(problem: str, nx: int, t_final: float,
                       ref_dt: float = 1e-4) -> np.ndarray:
    """Extended-precision three-stage SSP reference state, cached per call
    signature.  Used whenever the problem has no closed form."""
    key = (problem, nx, float(t_final), float(ref_dt))
    if key not in _REFERENCE_CACHE:
        p = make_problem(problem, nx, Format.EXT, Format.EXT)
        traj = ssp33_integrate(p, ref_dt, t_final, Format.EXT)
        if traj.diverged:
            raise RuntimeError(
                f"reference integration diverged for {problem} nx={nx}")
        _REFERENCE_CACHE[key] = traj.final_state.to_float64()
    return _REFERENCE_CACHE[key]


def _baseline(problem: str, nx: int, t_final: float, ref_dt: float) -> np.ndarray:
    probe = make_problem(problem, nx, Format.B64, Format.B64)
    exact = probe.exact_solution(t_final)
    if exact is not None:
        return exact.to_float64()
    return reference_solution(problem, nx, t_final, ref_dt)


def run_convergence(config: ExperimentConfig) -> list[ConvergenceRecord]:
    records = []
    build = Build(config.impl)
    for name in config.methods:
        method = get_method(name)
        for nx in config.nx:
            target = _baseline(config.problem, nx, config.t_final,
                               config.ref_dt)
            for high_s, low_s in config.pairs:
                high, low = Format.parse(high_s), Format.parse(low_s)
                problem = make_problem(config.problem, nx, high, low, build)
                for dt in config.dts:
                    cfg = StepConfig(method, problem, dt, config.t_final)
                    t0 = time.perf_counter()
                    traj = integrate(cfg)
                    wall = (time.perf_counter() - t0) * 1e3
                    if traj.diverged:
                        err = None
                    else:
                        diff = traj.final_state.to_float64() - target
                        err = float(np.max(np.abs(diff)))
                    records.append(ConvergenceRecord(
                        method=method.name, problem=config.problem, nx=nx,
                        dt=dt, high=high.value, low=low.value,
                        impl=int(build), error_max=err,
                        diverged=traj.diverged, steps=traj.steps_taken,
                        wall_time_ms=wall))
    return records


def estimate_order(dts, errors) -> float | None:
    """Least-squares slope of log(error) against log(dt).

    Returns None when fewer than two finite positive errors remain, e.g.
    when most runs diverged or hit an error floor at exactly zero.
    """
    pts = [(d, e) for d, e in zip(dts, errors)
           if e is not None and np.isfinite(e) and e > 0.0]
    if len(pts) < 2:
        return None
    ld = np.log([p[0] for p in pts])
    le = np.log([p[1] for p in pts])
    return float(np.polyfit(ld, le, 1)[0])


def _write_results_csv(records, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "problem", "nx", "dt", "high", "low",
                         "impl", "error_max", "diverged", "steps",
                         "wall_time_ms"])
        for r in records:
            err = "NA" if r.error_max is None else f"{r.error_max:.9e}"
            writer.writerow([r.method, r.problem, r.nx, f"{r.dt:g}", r.high,
                             r.low, r.impl, err, int(r.diverged), r.steps,
                             f"{r.wall_time_ms:.3f}"])


def _column_key(r: ConvergenceRecord):
    return (r.nx, r.high, r.low, r.impl)


def _write_method_table(method: str, records, path: Path) -> None:
    cols: list[tuple] = []
    for r in records:
        k = _column_key(r)
        if k not in cols:
            cols.append(k)
    dts = sorted({r.dt for r in records}, reverse=True)
    cell = {(r.dt, _column_key(r)): r for r in records}
    labels = []
    for k in cols:
        rep = next(r for r in records if _column_key(r) == k)
        labels.append(f"nx={k[0]} {rep.pair_label}")
    lines = [f"# {method} on {records[0].problem}", ""]
    lines.append("| dt | " + " | ".join(labels) + " |")
    lines.append("|---:|" + "---:|" * len(cols))
    for dt in dts:
        row = [f"{dt:g}"]
        for k in cols:
            r = cell.get((dt, k))
            if r is None:
                row.append("")
            elif r.error_max is None:
                row.append("diverged")
            else:
                row.append(f"{r.error_max:.3e}")
        lines.append("| " + " | ".join(row) + " |")
    orders = []
    for k in cols:
        seq = [cell.get((dt, k)) for dt in dts]
        p = estimate_order([r.dt for r in seq if r is not None],
                           [r.error_max for r in seq if r is not None])
        orders.append("n/a" if p is None else f"{p:.2f}")
    lines.append("| observed order | " + " | ".join(orders) + " |")
    path.write_text("\n".join(lines) + "\n")


def _write_convergence_svg(method: str, nx: int, records, path: Path) -> None:
    fig = Figure(figsize=(5.5, 4.5))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(111)
    groups: dict[tuple, list[ConvergenceRecord]] = {}
    for r in records:
        groups.setdefault((r.high, r.low, r.impl), []).append(r)
    for key, recs in groups.items():
        pts = sorted((r.dt, r.error_max) for r in recs
                     if r.error_max is not None and r.error_max > 0.0)
        if not pts:
            continue
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker="o",
                  label=recs[0].pair_label)
    ax.set_xlabel("dt")
    ax.set_ylabel("max error at final time")
    ax.set_title(f"{method}, {records[0].problem}, nx={nx}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    with matplotlib.rc_context({"svg.hashsalt": "tdrk-lab"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def emit_outputs(records, out_dir) -> list[Path]:
    """Write results.csv, one markdown table per method and one SVG per
    (method, nx).  Returns the paths written, results.csv first."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "results.csv"]
    _write_results_csv(records, written[0])
    methods = []
    for r in records:
        if r.method not in methods:
            methods.append(r.method)
    for m in methods:
        mrecs = [r for r in records if r.method == m]
        p = out / f"table_{m}.md"
        _write_method_table(m, mrecs, p)
        written.append(p)
        for nx in sorted({r.nx for r in mrecs}):
            q = out / f"convergence_{m}_{nx}.svg"
            _write_convergence_svg(m, nx, [r for r in mrecs if r.nx == nx], q)
            written.append(q)
    return written


def characterize_epsilon(problem: str = "advection", nx: int = 50,
                         low: Format = Format.B16,
                         build: Build = Build.NATIVE) -> float:
    """Measured relative error of the low-format second derivative at the
    initial state, against an extended-precision evaluation.

    This is the effective noise level the stability scans take as epsilon;
    for dense operators it can exceed the unit roundoff of the storage
    format by orders of magnitude because the matrix entries themselves are
    rounded and the row sums cancel.
    """
    p_lo = make_problem(problem, nx, Format.B64, low, build)
    p_ref = make_problem(problem, nx, Format.EXT, Format.EXT)
    fd_lo = p_lo.Fdot(p_lo.initial_condition()).to_float64()
    fd_ref = p_ref.Fdot(p_ref.initial_condition()).to_float64()
    scale = max(1.0, float(np.max(np.abs(fd_ref))))
    return float(np.max(np.abs(fd_lo - fd_ref)) / scale)
