"""Publication-style figure renderer for sublora result CSVs."""

__version__ = "0.1.0"

from .reader import ENERGY_NEUTRAL, ReaderError, ResultTable, read_table  # noqa: F401
from .render import FigureSpec, KindMismatchError, RenderInfo, render  # noqa: F401
