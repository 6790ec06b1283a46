"""Explicit upper bounds on the gap sequence and its coupling derivative.

All bounds are driven by a star decomposition: each edge is split
between its endpoints, and for a coupled vertex v the assigned total
length |S_v| and the harmonic split quantity s_v control how far the
spectrum can move.  The flat bound is 2 sigma / min |S_v|; a midpoint
split specializes it to 4 sigma / l_min.  The refined bound integrates
the sensitivity estimate from an uncoupled eigenvalue lambda0 upward
and is only defined above the threshold lambda0 > 1/(4 s_check S_check).

Checks are reported with a relative slack of 1e-10 so that strict
mathematical inequalities are not failed on root-refinement noise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDecomposition, DegenerateParameters, PreconditionViolated
from .graphs import MetricGraph, RobinSpec, StarDecomposition
from .stats import RngSeries

__all__ = [
    "BoundReport",
    "gap_bound",
    "shortest_edge_bound",
    "sensitivity_bound",
    "lowest_eigenvalue_slope",
    "improved_bound",
    "star_bound_parameters",
    "decomposition_bound_parameters",
    "check_all",
]

VIOLATION_SLACK = 1e-10


@dataclass(frozen=True)
class BoundReport:
    """Per-index comparison of measured values against one bound family.

    bound entries may be NaN where the bound does not apply
    (refined bound below its threshold); those indices are never
    counted as violations.  violations holds 1-based indices.
    """

    name: str
    bound: np.ndarray
    actual: np.ndarray
    violations: tuple
    decomposition: StarDecomposition | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def applicable(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.bound)))


def _evaluate(name, bound, actual, decomposition) -> BoundReport:
    bound = np.broadcast_to(np.asarray(bound, dtype=float), np.shape(actual)).copy()
    actual = np.asarray(actual, dtype=float)
    with np.errstate(invalid="ignore"):
        bad = actual >= bound + VIOLATION_SLACK * (1.0 + bound)
    bad &= ~np.isnan(bound)
    return BoundReport(
        name=name,
        bound=bound,
        actual=actual,
        violations=tuple(int(i) + 1 for i in np.flatnonzero(bad)),
        decomposition=decomposition,
    )


def _coupled_star_lengths(decomp: StarDecomposition, robin: RobinSpec) -> np.ndarray:
    if not robin.vertices:
        raise ValueError("no coupled vertices to bound")
    return np.array([decomp.star_length(v) for v in sorted(robin.vertices)])


def gap_bound(decomp: StarDecomposition, robin: RobinSpec) -> float:
    """Flat bound 2 sigma / min |S_v| over the coupled vertices."""
    if robin.sigma == 0.0:
        return 0.0
    smallest = float(np.min(_coupled_star_lengths(decomp, robin)))
    if smallest == 0.0:
        raise DegenerateDecomposition(
            "a coupled vertex received a star of zero length"
        )
    return 2.0 * robin.sigma / smallest


def shortest_edge_bound(graph: MetricGraph, sigma: float) -> float:
    """Midpoint-split specialization: 4 sigma / l_min."""
    return 4.0 * sigma / graph.min_edge_length


def sensitivity_bound(decomp: StarDecomposition, robin: RobinSpec, lam) -> np.ndarray:
    """Upper bound on the coupling derivative at energy lam.

    2 ... max over coupled v of 1/(|S_v| + (sigma^2 s_v + sigma)/lam);
    decays from 2 sigma-corrected values to 2/min|S_v| as lam grows.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0.0):
        raise ValueError("energy must be positive")
    sigma = robin.sigma
    verts = sorted(robin.vertices)
    if not verts:
        raise ValueError("no coupled vertices to bound")
    denoms = []
    for v in verts:
        big_s = decomp.star_length(v)
        small_s = decomp.harmonic_split(v)
        if big_s == 0.0 and sigma == 0.0:
            raise DegenerateDecomposition(
                "a coupled vertex received a star of zero length"
            )
        denoms.append(big_s + (sigma**2 * small_s + sigma) / lam)
    return 2.0 / np.min(denoms, axis=0)


def lowest_eigenvalue_slope(graph: MetricGraph, vertices) -> float:
    """Derivative of the bottom eigenvalue in the coupling, |V_R|/|G|."""
    return len(frozenset(vertices)) / graph.total_length


def _improved_bound_values(lambda0, sigma, s_check, S_check) -> np.ndarray:
    lambda0 = np.asarray(lambda0, dtype=float)
    threshold = 1.0 / (4.0 * s_check * S_check)
    out = np.full(lambda0.shape, np.nan)
    live = lambda0 > threshold
    lam = lambda0[live]
    alpha = 2.0 / np.sqrt(4.0 * lam * s_check * S_check - 1.0)
    growth = 2.0 * alpha * (
        np.arctan(0.5 * alpha * (1.0 + 2.0 * s_check * sigma))
        - np.arctan(0.5 * alpha)
    )
    out[live] = (np.exp(growth) - 1.0) * lam
    return out


def improved_bound(lambda0: float, sigma: float, s_check: float, S_check: float) -> float:
    """Refined bound grown from the uncoupled eigenvalue lambda0.

    Only defined above the threshold lambda0 > 1/(4 s_check S_check).
    """
    if s_check <= 0.0 or S_check <= 0.0:
        raise DegenerateParameters("split parameters must be positive")
    if not lambda0 > 1.0 / (4.0 * s_check * S_check):
        raise PreconditionViolated(
            f"eigenvalue {lambda0} at or below threshold "
            f"{1.0 / (4.0 * s_check * S_check)}"
        )
    return float(_improved_bound_values(np.array([lambda0]), sigma, s_check, S_check)[0])


def star_bound_parameters(graph: MetricGraph, robin: RobinSpec) -> tuple:
    """(s_check, S_check) for a star with one coupled vertex.

    Assigns every edge to the coupled center, so S_check is the full
    graph length and s_check the center's harmonic split.
    """
    from .graphs import boundary_star_decomposition

    if len(robin.vertices) != 1:
        raise ValueError("star recipe needs exactly one coupled vertex")
    decomp = boundary_star_decomposition(graph, robin)
    (v,) = robin.vertices
    return decomp.harmonic_split(v), decomp.star_length(v)


def decomposition_bound_parameters(decomp: StarDecomposition, robin: RobinSpec) -> tuple:
    """(s_check, S_check) = (min s_v, min |S_v|) over the coupled vertices."""
    verts = sorted(robin.vertices)
    if not verts:
        raise ValueError("no coupled vertices")
    s_check = min(decomp.harmonic_split(v) for v in verts)
    S_check = min(decomp.star_length(v) for v in verts)
    if s_check <= 0.0 or S_check <= 0.0:
        raise DegenerateParameters(
            "decomposition gives a coupled vertex a zero split"
        )
    return s_check, S_check


def check_all(
    series: RngSeries,
    decomp: StarDecomposition,
    *,
    params: tuple | None = None,
) -> tuple:
    """Audit all gap bounds against a computed series.

    Returns three BoundReports: the flat star-decomposition bound, the
    shortest-edge bound, and the refined bound (NaN below threshold).
    """
    robin = RobinSpec(series.vertices, series.sigma)
    gaps = series.gaps
    flat = _evaluate("gap-bound", gap_bound(decomp, robin), gaps, decomp)
    edge = _evaluate(
        "shortest-edge-bound",
        shortest_edge_bound(series.graph, series.sigma),
        gaps,
        None,
    )
    if params is None:
        params = decomposition_bound_parameters(decomp, robin)
    s_check, S_check = params
    refined_values = _improved_bound_values(
        series.k_neumann**2, series.sigma, s_check, S_check
    )
    refined = _evaluate("improved-bound", refined_values, gaps, decomp)
    return flat, edge, refined
