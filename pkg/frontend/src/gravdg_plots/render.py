"""Render figures from gravdg CSV artifacts.

Input schemas (CSV, one header row):

- 1D solution:      x,rho,mx,E,u,p
- 2D solution:      x,y,rho,mx,my,E,u,v,p
- 1D perturbation:  x,drho,dmx,dE,du,dp
- 2D perturbation:  x,y,drho,dmx,dmy,dE,du,dv,dp
- entropy log:      step,t,dt,total_entropy,min_rho,min_p

Contour figures draw exactly the requested number of levels (linearly
spaced over the data range). PNG output omits the writer metadata so a
re-render of the same inputs is byte-identical; vector formats may embed
toolchain timestamps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("line", "contour", "entropy", "perturbation")

#: default contour-line counts per figure family
DEFAULT_CONTOURS = {"contour": 30, "perturbation": 15}

_LABELS = {
    "rho": r"$\rho$", "u": "$u$", "v": "$v$", "p": "$p$",
    "mx": r"$\rho u$", "my": r"$\rho v$", "E": r"$\mathcal{E}$",
    "drho": r"$\delta\rho$", "du": r"$\delta u$", "dv": r"$\delta v$",
    "dp": r"$\delta p$", "dmx": r"$\delta(\rho u)$",
    "dmy": r"$\delta(\rho v)$", "dE": r"$\delta\mathcal{E}$",
    "total_entropy": "total entropy",
}


class SchemaError(ValueError):
    """The input CSV does not match the documented schema."""


@dataclass(frozen=True)
class PlotJob:
    kind: str
    input: Path
    output: Path
    variable: str | None = None
    contours: int | None = None
    reference: Path | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; "
                             f"expected one of {KINDS}")
        if self.contours is not None and self.contours < 2:
            raise ValueError("contour count must be at least 2")


def read_table(path: Path) -> dict[str, np.ndarray]:
    """Read a CSV artifact into named float columns."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file {path} does not exist")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {i + 2} has {len(row)} fields, "
                              f"header has {len(header)}")
        for j, val in enumerate(row):
            try:
                data[i, j] = float(val)
            except ValueError:
                raise SchemaError(
                    f"{path}: non-numeric value {val!r} in column "
                    f"{header[j]!r}, row {i + 2}") from None
    return {name: data[:, j] for j, name in enumerate(header)}


def _require(table: dict[str, np.ndarray], cols: tuple[str, ...],
             path: Path) -> None:
    for c in cols:
        if c not in table:
            raise SchemaError(f"{path}: missing required column {c!r} "
                              f"(found {sorted(table)})")


def _pick_variable(job: PlotJob, table: dict[str, np.ndarray],
                   default: str) -> str:
    var = job.variable or default
    if var not in table:
        raise SchemaError(f"{job.input}: no column {var!r} "
                          f"(found {sorted(table)})")
    return var


def _grid_2d(table, xcol, ycol, vcol, path):
    x = table[xcol]
    y = table[ycol]
    xs = np.unique(x)
    ys = np.unique(y)
    if xs.size * ys.size != x.size:
        raise SchemaError(f"{path}: nodes do not form a tensor grid "
                          f"({xs.size} x {ys.size} != {x.size})")
    order = np.lexsort((y, x))
    Z = table[vcol][order].reshape(xs.size, ys.size)
    return xs, ys, Z


def _new_axes():
    fig, ax = plt.subplots(figsize=(5.0, 4.0), dpi=150)
    return fig, ax


def _save(fig, out: Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    kw = {}
    if out.suffix.lower() == ".png":
        kw["metadata"] = {"Software": None}
    fig.savefig(out, **kw)
    plt.close(fig)
    return out


def _render_line(job: PlotJob) -> Path:
    table = read_table(job.input)
    _require(table, ("x",), job.input)
    var = _pick_variable(job, table, "rho")
    order = np.argsort(table["x"])
    fig, ax = _new_axes()
    ax.plot(table["x"][order], table[var][order], "b-", lw=1.0,
            label="numerical")
    if job.reference is not None:
        ref = read_table(job.reference)
        _require(ref, ("x",), job.reference)
        rvar = var if var in ref else None
        if rvar is None:
            raise SchemaError(f"{job.reference}: no column {var!r} to overlay")
        rorder = np.argsort(ref["x"])
        ax.plot(ref["x"][rorder], ref[rvar][rorder], "k--", lw=1.0,
                label="reference")
        ax.legend()
    ax.set_xlabel("$x$")
    ax.set_ylabel(_LABELS.get(var, var))
    fig.tight_layout()
    return _save(fig, job.output)


def contour_levels(Z: np.ndarray, n: int) -> np.ndarray:
    """Exactly ``n`` levels, linearly spaced over the data range."""
    lo = float(Z.min())
    hi = float(Z.max())
    if hi <= lo:
        hi = lo + 1.0  # flat field: keep the requested level count anyway
    return np.linspace(lo, hi, n)


def _render_contour(job: PlotJob, default_var: str, xcol="x", ycol="y") -> Path:
    table = read_table(job.input)
    _require(table, (xcol, ycol), job.input)
    var = _pick_variable(job, table, default_var)
    xs, ys, Z = _grid_2d(table, xcol, ycol, var, job.input)
    n = job.contours or DEFAULT_CONTOURS[job.kind]
    levels = contour_levels(Z, n)
    fig, ax = _new_axes()
    cs = ax.contour(xs, ys, Z.T, levels=levels, linewidths=0.7)
    ax.set_xlabel("$x$")
    ax.set_ylabel("$y$")
    ax.set_title(_LABELS.get(var, var))
    ax.set_aspect("equal")
    fig.colorbar(cs, ax=ax, shrink=0.85)
    fig.tight_layout()
    return _save(fig, job.output)


def _render_perturbation(job: PlotJob) -> Path:
    table = read_table(job.input)
    if "y" in table:
        return _render_contour(job, "drho")
    _require(table, ("x",), job.input)
    var = _pick_variable(job, table, "drho")
    order = np.argsort(table["x"])
    fig, ax = _new_axes()
    ax.plot(table["x"][order], table[var][order], "b-", lw=1.0)
    ax.set_xlabel("$x$")
    ax.set_ylabel(_LABELS.get(var, var))
    fig.tight_layout()
    return _save(fig, job.output)


def _render_entropy(job: PlotJob) -> Path:
    table = read_table(job.input)
    _require(table, ("t", "total_entropy"), job.input)
    fig, ax = _new_axes()
    ax.plot(table["t"], table["total_entropy"], "b-", lw=1.0)
    ax.set_xlabel("$t$")
    ax.set_ylabel("total entropy")
    fig.tight_layout()
    return _save(fig, job.output)


def render(job: PlotJob) -> Path:
    """Render one figure; returns the output path."""
    if job.kind == "line":
        return _render_line(job)
    if job.kind == "contour":
        return _render_contour(job, "rho")
    if job.kind == "perturbation":
        return _render_perturbation(job)
    return _render_entropy(job)
