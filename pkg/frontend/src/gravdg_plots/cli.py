"""Command line wrapper: one figure per invocation."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .render import KINDS, PlotJob, SchemaError, render


@click.command("plot")
@click.option("--kind", type=click.Choice(KINDS), required=True,
              help="figure family")
@click.option("--in", "input_path", type=str, required=True,
              help="input CSV artifact")
@click.option("--out", "output_path", type=str, required=True,
              help="output image path (extension picks the format)")
@click.option("--var", "variable", type=str, default=None,
              help="column to plot (default: rho / drho / total entropy)")
@click.option("--contours", type=int, default=None,
              help="number of contour lines (default 30, or 15 for "
                   "perturbation figures)")
@click.option("--ref", "reference", type=str, default=None,
              help="reference CSV overlaid on line plots")
def main(kind, input_path, output_path, variable, contours, reference):
    try:
        job = PlotJob(kind=kind, input=Path(input_path),
                      output=Path(output_path), variable=variable,
                      contours=contours,
                      reference=Path(reference) if reference else None)
        out = render(job)
    except (SchemaError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(str(out))


if __name__ == "__main__":
    main()
