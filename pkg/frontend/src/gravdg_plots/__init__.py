"""Figure rendering for gravdg CSV artifacts.

This package consumes only the documented CSV formats written by the
``gravdg`` command line tool; it has no dependency on the solver package.
"""

from .render import KINDS, PlotJob, SchemaError, render

__all__ = ["KINDS", "PlotJob", "SchemaError", "render"]
