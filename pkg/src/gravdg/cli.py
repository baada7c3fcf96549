"""Command-line entry point: case runs, convergence sweeps, and property
verification.  Owns all file formats (CSV artifacts and the JSON run
manifest)."""

from __future__ import annotations

import configparser
import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import harness, physics, verify
from .backend import backend_name, get_kernels
from .harness import CASES, convergence_table, error_norms, get_case, run_case
from .solver import SchemeVariant
from .timestep import StepControl

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_PROPERTY = 4

_OUT_ENV = "GRAVDG_OUTDIR"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _flatten_nodes(result) -> tuple[list[str], np.ndarray]:
    """Solution table: one row per node, cells in index order, nodes in
    tensor order; conserved values first, then velocity and pressure."""
    grid = result.grid
    gas = result.disc.gas
    U = result.U
    W = physics.cons_to_prim(U, gas)
    if grid.dim == 1:
        header = ["x", "rho", "mx", "E", "u", "p"]
        cols = [grid.x.ravel(), U[..., 0].ravel(), U[..., 1].ravel(),
                U[..., 2].ravel(), W[..., 1].ravel(), W[..., 2].ravel()]
    else:
        header = ["x", "y", "rho", "mx", "my", "E", "u", "v", "p"]
        X, Y = grid.node_mesh()
        shape = grid.field_shape[:-1]
        cols = [np.broadcast_to(X, shape).ravel(),
                np.broadcast_to(Y, shape).ravel(),
                U[..., 0].ravel(), U[..., 1].ravel(), U[..., 2].ravel(),
                U[..., 3].ravel(), W[..., 1].ravel(), W[..., 2].ravel(),
                W[..., 3].ravel()]
    return header, np.column_stack(cols)


def _write_csv(path: Path, header: list[str], rows: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def write_solution_csv(result, path: Path) -> None:
    header, rows = _flatten_nodes(result)
    _write_csv(path, header, rows)


def write_perturbation_csv(result, path: Path) -> None:
    """Deviation from the attached equilibrium, primitive deltas included."""
    grid = result.grid
    gas = result.disc.gas
    dU = harness.perturbation_fields(result)
    W = physics.cons_to_prim(result.U, gas)
    We = physics.cons_to_prim(result.disc.eqdata.U, gas)
    dW = W - We
    if grid.dim == 1:
        header = ["x", "drho", "dmx", "dE", "du", "dp"]
        cols = [grid.x.ravel(), dU[..., 0].ravel(), dU[..., 1].ravel(),
                dU[..., 2].ravel(), dW[..., 1].ravel(), dW[..., 2].ravel()]
    else:
        header = ["x", "y", "drho", "dmx", "dmy", "dE", "du", "dv", "dp"]
        X, Y = grid.node_mesh()
        shape = grid.field_shape[:-1]
        cols = [np.broadcast_to(X, shape).ravel(),
                np.broadcast_to(Y, shape).ravel(),
                dU[..., 0].ravel(), dU[..., 1].ravel(), dU[..., 2].ravel(),
                dU[..., 3].ravel(), dW[..., 1].ravel(), dW[..., 2].ravel(),
                dW[..., 3].ravel()]
    _write_csv(path, header, np.column_stack(cols))


def write_entropy_csv(result, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("step,t,dt,total_entropy,min_rho,min_p\n")
        for step, t, dt, ent, mr, mp in result.entropy_log:
            f.write(f"{step},{_fmt(t)},{_fmt(dt)},{_fmt(ent)},"
                    f"{_fmt(mr)},{_fmt(mp)}\n")


def write_manifest(result, path: Path, config: dict, kernels) -> None:
    case = result.case
    manifest = {
        "case": case.name,
        "description": case.description,
        "variant": result.variant.value,
        "backend": backend_name(kernels),
        "config": config,
        "t_final_requested": case.t_final,
        "t_reached": float(result.t),
        "steps": result.steps,
        "completed": result.completed,
        "abort": result.aborted,
        "min_rho": None if math.isinf(result.min_rho) else result.min_rho,
        "min_p": None if math.isinf(result.min_p) else result.min_p,
        "wall_time_s": result.wall_time,
    }
    if result.completed and case.reference is not None:
        ref = harness.reference_field(case, result)
        manifest["density_error_vs_reference"] = {
            k: float(v) for k, v in error_norms(result.U, ref,
                                                result.grid).items()}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _load_config(path: str | None, case: str | None) -> dict:
    """Flat key=value config with one section per case; returns the section
    matching the requested case (or the single section present)."""
    if path is None:
        return {}
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise click.ClickException(f"config file {path!r} not found")
    sections = cp.sections()
    name = case if case in sections else (sections[0] if len(sections) == 1
                                          else None)
    if name is None:
        raise click.ClickException(
            f"config {path!r} has sections {sections}; pass --case to pick one")
    out = dict(cp[name])
    out.setdefault("case", name)
    return out


def _resolve(cli_value, cfg: dict, key: str, cast, default):
    if cli_value is not None:
        return cli_value
    if key in cfg:
        return cast(cfg[key])
    return default


@click.group()
def main():
    """Nodal DG solver for the Euler equations with gravity."""


@main.command("run")
@click.option("--case", "case_name", type=str, default=None,
              help="benchmark case name (see --list)")
@click.option("--config", "config_path", type=str, default=None,
              help="key=value config file with one section per case")
@click.option("--list", "list_cases", is_flag=True, help="list cases and exit")
@click.option("--nx", type=int, default=None, help="cells (x)")
@click.option("--ny", type=int, default=None, help="cells (y, 2D only)")
@click.option("--k", "degree", type=int, default=None, help="polynomial degree")
@click.option("--cfl", type=float, default=None, help="CFL number")
@click.option("--scheme", type=str, default=None,
              help="wbespp | non-wb | non-es | non-pp")
@click.option("--eps", type=float, default=None, help="positivity floor")
@click.option("--integrator", type=str, default=None,
              help="ssprk104 | euler")
@click.option("--limit-per-step", is_flag=True, default=False,
              help="apply the limiter once per step instead of per stage")
@click.option("--snapshots", type=str, default=None,
              help="comma-separated snapshot times")
@click.option("--out", "out_dir", type=str, default=None,
              help=f"output directory (default: env {_OUT_ENV} or cwd)")
@click.option("--backend", type=str, default=None, help="numba | numpy")
def cmd_run(case_name, config_path, list_cases, nx, ny, degree, cfl, scheme,
            eps, integrator, limit_per_step, snapshots, out_dir, backend):
    """Run one benchmark case and write CSV artifacts plus a manifest."""
    if list_cases:
        for name in sorted(CASES):
            c = CASES[name]
            click.echo(f"{name:14s} {c.dim}D  T={c.t_final:g}  "
                       f"{c.description}")
        return
    try:
        cfg = _load_config(config_path, case_name)
        case_name = case_name or cfg.get("case")
        if case_name is None:
            raise click.ClickException("pass --case or a config file")
        case = get_case(case_name)
        variant = SchemeVariant.from_name(
            _resolve(scheme, cfg, "scheme", str, "wbespp"))
        degree = _resolve(degree, cfg, "k", int, 2)
        cfl = _resolve(cfl, cfg, "cfl", float, 0.5)
        eps = _resolve(eps, cfg, "eps", float, 1e-13)
        integrator = _resolve(integrator, cfg, "integrator", str, "ssprk104")
        nx = _resolve(nx, cfg, "nx", int, case.default_cells[0])
        if case.dim == 2:
            ny = _resolve(ny, cfg, "ny", int,
                          case.default_cells[1]
                          if len(case.default_cells) > 1 else nx)
            cells = (nx, ny)
        else:
            cells = (nx,)
        snap = []
        snap_raw = snapshots if snapshots is not None else cfg.get("snapshots")
        if snap_raw:
            snap = [float(s) for s in str(snap_raw).split(",") if s.strip()]
        out_dir = Path(_resolve(out_dir, cfg, "out", str,
                                os.environ.get(_OUT_ENV, ".")))
        kernels = get_kernels(backend or cfg.get("backend"))
        control = StepControl(cfl=cfl, limit_per_stage=not limit_per_step)
    except (click.ClickException, KeyError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)

    result = run_case(case, cells=cells, degree=degree, variant=variant,
                      control=control, eps=eps, integrator=integrator,
                      snapshot_times=tuple(snap), kernels=kernels)

    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{case.name}_{variant.value}"
    config_used = {"case": case.name, "cells": list(cells), "k": degree,
                   "cfl": cfl, "eps": eps, "integrator": integrator,
                   "scheme": variant.value, "snapshots": snap,
                   "limit_per_stage": control.limit_per_stage}
    write_solution_csv(result, out_dir / f"{stem}_solution.csv")
    write_entropy_csv(result, out_dir / f"{stem}_entropy.csv")
    if result.disc.eqdata is not None:
        write_perturbation_csv(result, out_dir / f"{stem}_perturbation.csv")
    write_manifest(result, out_dir / f"{stem}_manifest.json", config_used,
                   kernels)

    if result.completed:
        click.echo(f"{case.name}: reached t={result.t:g} in {result.steps} "
                   f"steps ({result.wall_time:.2f} s), min rho "
                   f"{result.min_rho:.3e}, min p {result.min_p:.3e}")
        sys.exit(EXIT_OK)
    click.echo(f"{case.name}: aborted ({result.aborted})", err=True)
    sys.exit(EXIT_NUMERICAL)


@main.command("convergence")
@click.option("--case", "case_name", type=str, required=True)
@click.option("--levels", type=str, default="20,40,80",
              help="comma-separated cell counts")
@click.option("--k", "degree", type=int, default=2)
@click.option("--scheme", type=str, default="wbespp")
@click.option("--out", "out_dir", type=str, default=None)
@click.option("--backend", type=str, default=None)
def cmd_convergence(case_name, levels, degree, scheme, out_dir, backend):
    """Error/order table over a mesh refinement sequence."""
    try:
        case = get_case(case_name)
        if case.reference is None:
            raise click.ClickException(
                f"case {case_name!r} has no error reference")
        variant = SchemeVariant.from_name(scheme)
        ns = [int(s) for s in levels.split(",") if s.strip()]
        kernels = get_kernels(backend)
    except (click.ClickException, KeyError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        rows = convergence_table(case, ns, degree=degree, variant=variant,
                                 kernels=kernels)
    except RuntimeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)

    header = ["N", "L1", "order_L1", "L2", "order_L2", "Linf", "order_Linf"]
    click.echo("  ".join(f"{h:>10s}" for h in header))
    table_rows = []
    for row in rows:
        vals = [row["N"]] + [row.get(k, float("nan"))
                             for k in header[1:]]
        table_rows.append(vals)
        txt = [f"{vals[0]:>10d}"]
        for v in vals[1:]:
            txt.append(f"{v:>10.3e}" if not math.isnan(v) else f"{'--':>10s}")
        click.echo("  ".join(txt))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{case.name}_{variant.value}_k{degree}_convergence.csv"
        with open(path, "w", encoding="utf-8") as f:
            f.write(",".join(header) + "\n")
            for vals in table_rows:
                f.write(",".join([str(vals[0])]
                                 + [_fmt(v) for v in vals[1:]]) + "\n")
    sys.exit(EXIT_OK)


@main.command("verify")
@click.option("--gamma", type=float, default=1.4)
@click.option("--fast", is_flag=True, default=False,
              help="smaller sample counts")
@click.option("--backend", type=str, default=None)
@click.option("--mutate", type=str, default=None, hidden=True)
def cmd_verify(gamma, fast, backend, mutate):
    """Run the property suites and print a pass/fail matrix."""
    try:
        kernels = get_kernels(backend)
        results = verify.run_all(gamma=gamma, fast=fast, mutate=mutate,
                                 kernels=kernels)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    failed = False
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed = failed or not r.passed
        click.echo(f"[{status}] {r.name:24s} {r.detail}")
    sys.exit(EXIT_PROPERTY if failed else EXIT_OK)


if __name__ == "__main__":
    main()
