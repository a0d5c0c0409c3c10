"""Linear stability regions, with and without second-derivative noise.

For the test equation u' = lam*u a two-derivative stage sees F = lam*u and
Fd = lam^2*u, so with z = lam*dt every stage is a polynomial in z and the
full step amplifies u by R(z).  When Fd is evaluated in a cheaper format it
carries a relative error delta, which turns every z^2 coefficient into
z^2*(1 + delta).  Sampling delta from eps*Uniform(0,1) and intersecting the
resulting |R_delta| <= 1 sets shows how the stability region erodes as the
second derivative loses accuracy.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .tableau import TdrkTableau, stability_polynomial

__all__ = [
    "RegionGrid",
    "StabilityScan",
    "eval_R",
    "scan_region",
    "emit_region_svg",
    "write_boundary_csv",
]

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class RegionGrid:
    """Rectangular sampling of the complex z-plane, row-major over Im then Re."""

    re_min: float = -6.0
    re_max: float = 1.0
    im_min: float = -4.0
    im_max: float = 4.0
    n_re: int = 600
    n_im: int = 600

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.re_min, self.re_max, self.n_re),
            np.linspace(self.im_min, self.im_max, self.n_im),
        )

    def points(self) -> np.ndarray:
        re, im = self.axes()
        return re[None, :] + 1j * im[:, None]


@dataclass(frozen=True)
class StabilityScan:
    """Result of a region scan: mask[i, j] is True where every sampled
    perturbation kept |R_delta(z_ij)| <= 1."""

    label: str
    grid: RegionGrid
    epsilon: float
    n_samples: int
    seed: int
    delta_mode: str
    mask: np.ndarray

    @property
    def stable_cells(self) -> int:
        return int(self.mask.sum())


@lru_cache(maxsize=None)
def _poly_coeffs(tableau: TdrkTableau) -> tuple[float, ...]:
    return tuple(float(c) for c in stability_polynomial(tableau))


@lru_cache(maxsize=None)
def _float_weights(tableau: TdrkTableau):
    a = tuple(tuple(float(x) for x in row) for row in tableau.a)
    ad = tuple(tuple(float(x) for x in row) for row in tableau.ad)
    b = tuple(float(x) for x in tableau.b)
    bd = tuple(float(x) for x in tableau.bd)
    return a, ad, b, bd


def eval_R(tableau: TdrkTableau, z):
    """Amplification factor R(z), Horner evaluation of the exact polynomial."""
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=np.complex128)
    coeffs = _poly_coeffs(tableau)
    acc = np.full(zz.shape, coeffs[-1], dtype=np.complex128)
    for c in reversed(coeffs[:-1]):
        acc = acc * zz + c
    return complex(acc) if scalar else acc


def _amplify(tableau: TdrkTableau, z: np.ndarray, stage_delta, update_delta):
    """Forward substitution for R_delta(z) with per-coefficient z^2 noise.

    stage_delta[i][j] perturbs the z^2 weight ad[i][j]; update_delta[j]
    perturbs bd[j].  All zeros reproduces the nominal polynomial.
    """
    a, ad, b, bd = _float_weights(tableau)
    z2 = z * z
    stages: list[np.ndarray] = []
    for i in range(tableau.stages):
        acc = np.ones_like(z)
        for j in range(i):
            if a[i][j]:
                acc = acc + a[i][j] * z * stages[j]
            if ad[i][j]:
                acc = acc + ad[i][j] * (1.0 + stage_delta[i][j]) * z2 * stages[j]
        stages.append(acc)
    out = np.ones_like(z)
    for j in range(tableau.stages):
        if b[j]:
            out = out + b[j] * z * stages[j]
        if bd[j]:
            out = out + bd[j] * (1.0 + update_delta[j]) * z2 * stages[j]
    return out


def _sample_deltas(tableau: TdrkTableau, epsilon: float, n_samples: int,
                   seed: int, delta_mode: str):
    """Draw perturbations for each sample.

    "shared" applies one delta to every second-derivative term, the worst
    case of a systematically biased Fd; "per-stage" draws independently for
    every nonzero ad and bd entry.
    """
    if delta_mode not in ("shared", "per-stage"):
        raise ValueError(f"unknown delta mode {delta_mode!r}")
    rng = np.random.default_rng(seed)
    s = tableau.stages
    out = []
    for _ in range(n_samples):
        if delta_mode == "shared":
            d = epsilon * rng.uniform()
            stage = [[d] * s for _ in range(s)]
            upd = [d] * s
        else:
            stage = [
                [epsilon * rng.uniform() if tableau.ad[i][j] else 0.0
                 for j in range(s)]
                for i in range(s)
            ]
            upd = [epsilon * rng.uniform() if tableau.bd[j] else 0.0
                   for j in range(s)]
        out.append((stage, upd))
    return out


def scan_region(tableau: TdrkTableau, grid: RegionGrid | None = None,
                epsilon: float = 0.0, n_samples: int = 32,
                seed: int = DEFAULT_SEED, delta_mode: str = "shared",
                label: str = "tdrk") -> StabilityScan:
    """Scan the grid and intersect stability over all sampled perturbations.

    delta = 0 is always included, so the scan with epsilon > 0 is a subset
    of the unperturbed region by construction.
    """
    if grid is None:
        grid = RegionGrid()
    z = grid.points()
    s = tableau.stages
    zero_stage = [[0.0] * s for _ in range(s)]
    zero_upd = [0.0] * s
    mask = np.abs(_amplify(tableau, z, zero_stage, zero_upd)) <= 1.0
    if epsilon > 0.0:
        for stage_d, upd_d in _sample_deltas(tableau, epsilon, n_samples,
                                             seed, delta_mode):
            mask &= np.abs(_amplify(tableau, z, stage_d, upd_d)) <= 1.0
    return StabilityScan(label=label, grid=grid, epsilon=epsilon,
                         n_samples=n_samples, seed=seed,
                         delta_mode=delta_mode, mask=mask)


def emit_region_svg(scan: StabilityScan, path) -> Path:
    """Render the stable set to an SVG and drop a boundary CSV beside it."""
    path = Path(path)
    fig = Figure(figsize=(6.0, 5.5))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(111)
    g = scan.grid
    ax.imshow(scan.mask.astype(float), origin="lower",
              extent=(g.re_min, g.re_max, g.im_min, g.im_max),
              aspect="auto", cmap="Greys", vmin=0.0, vmax=1.4)
    ax.axhline(0.0, color="0.6", linewidth=0.6)
    ax.axvline(0.0, color="0.6", linewidth=0.6)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    title = f"{scan.label}: |R(z)| <= 1"
    if scan.epsilon > 0.0:
        title += (f", eps={scan.epsilon:g} ({scan.delta_mode}, "
                  f"{scan.n_samples} samples)")
    ax.set_title(title)
    # a fixed hash salt and a null Date keep the bytes identical across runs
    with matplotlib.rc_context({"svg.hashsalt": "tdrk-lab"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    write_boundary_csv(scan, path.with_suffix(".csv"))
    return path


def write_boundary_csv(scan: StabilityScan, path) -> Path:
    """List grid cells on either side of the stability boundary.

    A cell is on the boundary when any 4-neighbour disagrees with it, so
    both the last stable and first unstable cells appear.  Rows come out in
    row-major grid order, which makes the file reproducible byte for byte.
    """
    path = Path(path)
    m = scan.mask
    edge = np.zeros_like(m)
    edge[:-1, :] |= m[:-1, :] != m[1:, :]
    edge[1:, :] |= m[1:, :] != m[:-1, :]
    edge[:, :-1] |= m[:, :-1] != m[:, 1:]
    edge[:, 1:] |= m[:, 1:] != m[:, :-1]
    re, im = scan.grid.axes()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "stable"])
        for i, j in zip(*np.nonzero(edge)):
            writer.writerow([f"{re[j]:.12g}", f"{im[i]:.12g}", int(m[i, j])])
    return path
