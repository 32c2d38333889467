"""Figure rendering for anonlab experiment CSVs."""

from anonlab_plots.render import PlotSpec, SchemaError, cell_means, render

__all__ = ["PlotSpec", "SchemaError", "cell_means", "render"]
