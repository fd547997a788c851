"""Figure rendering for pneumatic pressure-tracking benchmark CSVs."""

from .radar import polygon_area, rank_table, render_radar
from .schema import SchemaError, Trace, read_metrics, read_trace
from .timeseries import PANELS, FigureSpec, render_timeseries

__version__ = "0.1.0"
