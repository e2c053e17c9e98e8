"""Figure rendering for jump-chain run artifacts.

Reads only the serialized run artifacts (CSV/JSON); never imports the
engine that produced them.
"""

from .artifacts import ArtifactError, read_classification_table, read_samples, read_summaries
from .render import PLOT_KINDS, PlotSpec, RenderResult, render

__version__ = "0.1.0"
