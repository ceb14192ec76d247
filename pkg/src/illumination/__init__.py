"""Illumination index of points relative to the graph of a smooth function.

Counts the distinct odd-order Taylor polynomials of ``f`` passing through a
point off the graph (order 1 counts tangent lines), plus the Taylor mean,
an integral-remainder cross-check, hypothesis diagnostics, and a raster of
the index over a rectangle.
"""

__version__ = "0.1.0"

from .atlas import RegionAtlas, compute_atlas, export_atlas
from .errors import (
    DomainError,
    EvenOrder,
    ExprSyntaxError,
    IlluminationError,
    NoSignChange,
    NonConstantExponent,
    NonFiniteError,
    PointOnGraph,
    QuadratureNonConvergence,
    UnknownIdentifier,
)
from .expr import parse, render
from .jet import Jet, eval_jet, evaluate, jet_coeffs
from .mean import MeanResult, taylor_mean
from .solver import (
    Finite,
    HypothesisReport,
    IlluminationQuery,
    IlluminationReport,
    SolverConfig,
    TangencySolution,
    WindowLimited,
    check_hypotheses,
    find_tangencies,
    illumination_index,
    offset,
    offset_derivative,
)
from .taylor import RemainderCheck, TaylorPoly, eval_poly, remainder_check, taylor_poly
