"""Replacing the continuous time window by finitely many sample times.

Two directions live here. ``find_discretization`` searches for a uniform
grid whose Riemann-weighted lower bound captures a target fraction of the
semi-continuous one. ``verify_discrete_implies_semicont`` goes the other
way: given a discrete frame over T and an invertible operator, it certifies
a semi-continuous lower bound over [0, L] with an explicit analytic
constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DiscreteNotFrame,
    DomainError,
    NoConvergence,
    NotAFrame,
    NotInvertible,
)
from .analysis import FRAME, FrameReport, frame_bounds
from .gram import TimeGrid, discrete_gram, semicont_gram
from .spectral import SpectralOperator, VectorSet, pair_integral

__all__ = [
    "DiscretizationResult",
    "WindowScanResult",
    "find_discretization",
    "verify_discrete_implies_semicont",
    "window_scan",
    "discretization_to_dict",
    "window_scan_to_dict",
    "window_scan_to_csv_rows",
]


@dataclass(frozen=True)
class DiscretizationResult:
    """Accepted grid with its (unweighted) frame report."""

    grid: TimeGrid
    report: FrameReport
    delta_used: float
    iterations: int

    def __post_init__(self):
        if (
            self.report.classification == FRAME
            and self.grid.max_gap > self.delta_used * (1.0 + 1e-9)
        ):
            raise ValueError("grid gap exceeds the reported mesh size")


@dataclass(frozen=True)
class WindowScanResult:
    """Frame bounds as a function of the window length."""

    lengths: tuple
    lower_bounds: tuple
    upper_bounds: tuple
    condition_numbers: tuple
    classifications: tuple
    invertible_self_adjoint: bool


def find_discretization(
    A: SpectralOperator,
    G: VectorSet,
    L: float,
    target_ratio: float,
    max_points: int = 1 << 20,
) -> DiscretizationResult:
    """Search doubling uniform grids until the weighted bound is captured.

    Acceptance compares the Riemann-weighted discrete lower bound against
    target_ratio times the semi-continuous lower bound; the returned report
    carries the plain unweighted bounds of the accepted grid. Raises
    NotAFrame when the continuous system itself has no lower bound, and
    NoConvergence when the doubling passes max_points.
    """
    target_ratio = float(target_ratio)
    if not 0.0 < target_ratio < 1.0:
        raise ValueError("target_ratio must lie strictly between 0 and 1")
    sc = frame_bounds(semicont_gram(A, G, L))
    if sc.classification != FRAME:
        raise NotAFrame(
            f"semi-continuous lower bound {sc.lower:.3e} is below tolerance"
        )
    target = target_ratio * sc.lower

    n = 2
    iterations = 0
    last = -math.inf
    while n <= max_points:
        grid = TimeGrid.uniform(n, L)
        weighted = frame_bounds(discrete_gram(A, G, grid, weights="riemann"))
        iterations += 1
        last = weighted.lower
        if weighted.lower >= target:
            plain = frame_bounds(discrete_gram(A, G, grid))
            return DiscretizationResult(grid, plain, L / n, iterations)
        n *= 2
    raise NoConvergence(
        f"no uniform grid up to {max_points} points reached "
        f"{target_ratio} of the continuous lower bound (last {last:.3e})"
    )


def _min_gap(T: TimeGrid) -> float:
    return float(np.min(np.diff(np.append(T.times, T.L))))


def verify_discrete_implies_semicont(
    A: SpectralOperator, G: VectorSet, T: TimeGrid, L: float
) -> tuple:
    """Certify the [0, L] system from a discrete frame over T.

    For invertible A, a discrete lower bound c over T forces a
    semi-continuous lower bound of at least
    c * (1 - r^(-2*m)) / (2 ln r) with r = 1 / min|lambda| and m the least
    gap of T adjoined with L. Returns (semi-continuous FrameReport,
    that analytic constant). Raises NotInvertible or DiscreteNotFrame when
    the hypotheses fail.
    """
    L = float(L)
    if not L > 0:
        raise DomainError("interval length must be positive")
    if T.L > L:
        raise DomainError("grid interval extends past the requested window")
    if not A.is_invertible:
        raise NotInvertible(
            f"smallest eigenvalue modulus {A.min_modulus:.3e} is below tolerance"
        )
    discrete = frame_bounds(discrete_gram(A, G, T))
    if discrete.classification != FRAME:
        raise DiscreteNotFrame(
            f"discrete lower bound {discrete.lower:.3e} is below tolerance"
        )
    mhat = _min_gap(T)
    decay = A.min_modulus
    analytic = discrete.lower * pair_integral(decay, decay, mhat).real
    cont = frame_bounds(semicont_gram(A, G, L))
    if cont.lower < analytic * (1.0 - 1e-9) - 1e-12:
        raise RuntimeError(
            "internal inconsistency: continuous bound fell below its certificate"
        )
    return cont, analytic


def window_scan(A: SpectralOperator, G: VectorSet, lengths) -> WindowScanResult:
    """Frame bounds for each window [0, L], L running over ``lengths``.

    Scans never raise on negative classifications; each window gets its own
    verdict. The ``invertible_self_adjoint`` flag marks the regime where the
    windows must agree (all frames or none).
    """
    Ls = [float(x) for x in lengths]
    if not Ls:
        raise ValueError("need at least one window length")
    if any(not x > 0 for x in Ls):
        raise DomainError("window lengths must be positive")
    if any(b <= a for a, b in zip(Ls, Ls[1:])):
        raise ValueError("window lengths must be strictly increasing")

    flag = A.is_self_adjoint and A.is_invertible
    lows, ups, conds, labels = [], [], [], []
    for L in Ls:
        rep = frame_bounds(semicont_gram(A, G, L))
        lows.append(rep.lower)
        ups.append(rep.upper)
        conds.append(rep.condition_number)
        labels.append(rep.classification)
    return WindowScanResult(
        lengths=tuple(Ls),
        lower_bounds=tuple(lows),
        upper_bounds=tuple(ups),
        condition_numbers=tuple(conds),
        classifications=tuple(labels),
        invertible_self_adjoint=flag,
    )


def discretization_to_dict(result: DiscretizationResult) -> dict:
    return {
        "n": len(result.grid),
        "delta_used": result.delta_used,
        "max_gap": result.grid.max_gap,
        "iterations": result.iterations,
        "report": result.report.to_dict(),
    }


def window_scan_to_dict(result: WindowScanResult) -> dict:
    return {
        "L": list(result.lengths),
        "lower": list(result.lower_bounds),
        "upper": list(result.upper_bounds),
        "condition_number": list(result.condition_numbers),
        "classification": list(result.classifications),
        "invertible_self_adjoint": result.invertible_self_adjoint,
    }


def window_scan_to_csv_rows(result: WindowScanResult) -> list:
    rows = [["L", "lower", "upper", "condition_number"]]
    for L, lo, up, cond in zip(
        result.lengths,
        result.lower_bounds,
        result.upper_bounds,
        result.condition_numbers,
    ):
        rows.append([L, lo, up, cond])
    return rows
