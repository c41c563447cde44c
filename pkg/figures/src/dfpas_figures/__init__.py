"""Figure rendering for dfpas sweep CSV outputs."""

from .render import build_figure, collect_series, read_table, render_figure
from .spec import FigureSpec

__version__ = "0.1.0"
