"""Exact DP-coloring: covers, coloring counts, the DP color function and
certified constructions."""

from .covers import Cover, count_colorings, fiber_counts, format_cover, parse_cover
from .errors import BudgetExceeded, CertificationError, DpColorError, FormulaDomainError, ParseError
from .graphs import Graph, chromatic_polynomial
from .search import DpResult, dp_exact, dp_value

__all__ = [
    "BudgetExceeded",
    "CertificationError",
    "Cover",
    "DpColorError",
    "DpResult",
    "FormulaDomainError",
    "Graph",
    "ParseError",
    "chromatic_polynomial",
    "count_colorings",
    "dp_exact",
    "dp_value",
    "fiber_counts",
    "format_cover",
    "parse_cover",
]
