"""Frame-theoretic analysis of orbit systems: bounds, completeness, Carleson.

The eigensolver here is a cyclic-by-row complex Jacobi iteration written for
Hermitian input; the stock LAPACK path is deliberately not used so that tests
can play the two against each other.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, DomainError, NoConvergence, NonHermitian
from .gram import DiscreteGram, SemiContGram, _check_hermitian
from .spectral import (
    SpectralOperator,
    TimeInterval,
    VectorSet,
    apply_power_batch,
    group_eigenspaces,
    pair_integral,
    power_integral,
    rank_tolerance_factor,
)

__all__ = [
    "FRAME",
    "BESSEL_ONLY",
    "INCOMPLETE",
    "NOT_BESSEL",
    "FrameReport",
    "GroupRank",
    "CompletenessCertificate",
    "CarlesonReport",
    "jacobi_eigh",
    "frame_bounds",
    "completeness_check",
    "brute_force_completeness",
    "bessel_check_fd",
    "bessel_upper_constant",
    "multiplier_bounds",
    "carleson_check",
]

FRAME = "frame"
BESSEL_ONLY = "bessel_only"
INCOMPLETE = "incomplete"
NOT_BESSEL = "not_bessel"


@dataclass(frozen=True)
class FrameReport:
    """Extreme eigenvalues of a Gram matrix plus the resulting verdict.

    ``bessel_only`` and ``not_bessel`` are kept for interchange completeness;
    a finite Hermitian Gram always has a finite upper bound, and a positive
    lower bound makes it a frame, so those two values are unreachable from
    this code path.
    """

    lower: float
    upper: float
    classification: str
    dimension: int
    method: str
    condition_number: float

    def to_dict(self) -> dict:
        return asdict(self)


class GroupRank(NamedTuple):
    value: complex
    indices: tuple
    required: int
    achieved: int


@dataclass(frozen=True)
class CompletenessCertificate:
    groups: tuple
    complete: bool

    def to_dict(self) -> dict:
        return {
            "complete": self.complete,
            "groups": [
                {
                    "eigenvalue": [g.value.real, g.value.imag],
                    "indices": list(g.indices),
                    "required_rank": g.required,
                    "achieved_rank": g.achieved,
                }
                for g in self.groups
            ],
        }


@dataclass(frozen=True)
class CarlesonReport:
    inf_product: float
    per_index_products: tuple
    conditions: dict
    c_v: float
    C_v: float
    verdict: str
    tail_increasing: bool

    def to_dict(self) -> dict:
        return {
            "inf_product": self.inf_product,
            "per_index_products": list(self.per_index_products),
            "conditions": dict(self.conditions),
            "c_v": self.c_v,
            "C_v": self.C_v,
            "verdict": self.verdict,
            "tail_increasing": self.tail_increasing,
        }


def jacobi_eigh(
    H: np.ndarray, want_vectors: bool = True, tol_factor: float = 1e-12,
    max_sweeps: int = 60,
):
    """Eigendecomposition of a Hermitian matrix by cyclic-by-row Jacobi.

    Returns (eigenvalues ascending, eigenvector columns or None). Sweeps stop
    once the largest off-diagonal modulus falls below tol_factor times the
    largest initial modulus.
    """
    A = np.asarray(H, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("eigensolver needs a square matrix")
    _check_hermitian(A, "eigensolver input")
    d = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    V = np.eye(d, dtype=np.complex128) if want_vectors else None

    scale = float(np.max(np.abs(A))) if d else 0.0
    if scale == 0.0 or d == 1:
        w = A.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return w[order], (V[:, order] if want_vectors else None)
    threshold = tol_factor * scale

    for _ in range(max_sweeps):
        off = np.abs(A - np.diag(A.diagonal()))
        if float(off.max()) <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                absa = abs(apq)
                if absa == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                u = apq / absa
                tau = (aqq - app) / (2.0 * absa)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ubar = np.conj(u)

                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - ubar * s * colq
                A[:, q] = s * colp + ubar * c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - u * s * rowq
                A[q, :] = s * rowp + u * c * rowq
                A[p, p] = app - t * absa
                A[q, q] = aqq + t * absa
                A[p, q] = 0.0
                A[q, p] = 0.0

                if want_vectors:
                    vp = V[:, p].copy()
                    vq = V[:, q].copy()
                    V[:, p] = c * vp - ubar * s * vq
                    V[:, q] = s * vp + ubar * c * vq

    off = np.abs(A - np.diag(A.diagonal()))
    if float(off.max()) > threshold:
        raise NoConvergence(
            f"jacobi sweep budget exhausted at off-diagonal {off.max():.3e}"
        )

    w = A.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], (V[:, order] if want_vectors else None)


def _unwrap_gram(S) -> tuple:
    if isinstance(S, SemiContGram):
        return S.matrix, S.method
    if isinstance(S, DiscreteGram):
        return S.matrix, "discrete"
    M = np.asarray(S, dtype=np.complex128)
    return M, "matrix"


def frame_bounds(S) -> FrameReport:
    """Extreme eigenvalues of a Gram matrix and the frame classification.

    The system is a frame exactly when the lower bound clears the relative
    rank tolerance (1e-9 times the upper bound by default); otherwise the
    family fails to span and the report says ``incomplete``.
    """
    M, src = _unwrap_gram(S)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("gram matrix must be square")
    _check_hermitian(M, "frame_bounds input")
    w, _ = jacobi_eigh(M, want_vectors=False)
    lower = float(w[0])
    upper = float(w[-1])
    if lower < -1e-9 * max(1.0, abs(upper)):
        raise ValueError(
            f"gram matrix has significantly negative eigenvalue {lower:.3e}"
        )
    lower = max(lower, 0.0)
    upper = max(upper, 0.0)
    tau_r = rank_tolerance_factor() * upper
    if lower > tau_r:
        classification = FRAME
        cond = upper / lower
    else:
        classification = INCOMPLETE
        cond = math.inf
    return FrameReport(
        lower=lower,
        upper=upper,
        classification=classification,
        dimension=M.shape[0],
        method=f"cyclic_jacobi/{src}",
        condition_number=cond,
    )


def _pivoted_gs_rank(B: np.ndarray, rel_factor: float) -> int:
    """Numerical column rank by column-pivoted modified Gram-Schmidt."""
    cols = np.asarray(B, dtype=np.complex128).copy()
    if cols.size == 0:
        return 0
    norms = np.linalg.norm(cols, axis=0)
    scale = float(norms.max())
    if scale == 0.0:
        return 0
    tol = rel_factor * scale
    rank = 0
    for _ in range(min(cols.shape)):
        norms = np.linalg.norm(cols, axis=0)
        j = int(np.argmax(norms))
        if norms[j] <= tol:
            break
        q = cols[:, j] / norms[j]
        rank += 1
        cols -= np.outer(q, q.conj() @ cols)
        cols[:, j] = 0.0
    return rank


def completeness_check(A: SpectralOperator, G: VectorSet) -> CompletenessCertificate:
    """Spanning test for the orbit family, one eigenvalue group at a time.

    The orbit of G under continuous powers spans C^d exactly when, within
    every eigenvalue group, the projected generators already span that
    group's eigenspace. Rank decisions use a pivoted Gram-Schmidt with a
    relative cutoff.
    """
    if A.dimension != G.dimension:
        raise DimensionMismatch(
            f"generators live in C^{G.dimension} but the operator acts on C^{A.dimension}"
        )
    ghat = A.to_eigenbasis(G.vectors)
    rel = rank_tolerance_factor()
    entries = []
    complete = True
    for grp in group_eigenspaces(A):
        block = ghat[:, list(grp.indices)].T
        required = len(grp.indices)
        achieved = _pivoted_gs_rank(block, rel)
        if achieved < required:
            complete = False
        entries.append(GroupRank(grp.value, grp.indices, required, achieved))
    return CompletenessCertificate(tuple(entries), complete)


def brute_force_completeness(
    A: SpectralOperator, G: VectorSet, L: float, grid_points: int
) -> bool:
    """Rank of the raw orbit sample matrix on a uniform grid (oracle path).

    Stacks A^t g for grid_points uniform times in [0, L] and asks a singular
    value decomposition whether the columns span C^d. Requires
    grid_points >= dimension * |G| so the column count cannot be the binding
    constraint.
    """
    d, m = A.dimension, len(G)
    if grid_points < d * m:
        raise ValueError(f"grid_points must be at least d*|G| = {d * m}")
    times = np.linspace(0.0, float(L), int(grid_points))
    blocks = [apply_power_batch(A, times, g).T for g in G]
    stacked = np.hstack(blocks)
    svals = np.linalg.svd(stacked, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return d == 0
    rank = int(np.sum(svals > rank_tolerance_factor() * svals[0]))
    return rank == d


def bessel_check_fd(A: SpectralOperator, G: VectorSet) -> tuple:
    """Finite families are always Bessel; returns (True, energy on range(A)).

    The reported number is the total squared norm of the generator
    projections onto the span of eigenvectors with nonnegligible eigenvalue
    (the part of the space the orbit can actually see).
    """
    if A.dimension != G.dimension:
        raise DimensionMismatch(
            f"generators live in C^{G.dimension} but the operator acts on C^{A.dimension}"
        )
    mask = np.abs(A.eigenvalues) > A.tolerance
    ghat = A.to_eigenbasis(G.vectors)
    energy = float(np.sum(np.abs(ghat[:, mask]) ** 2))
    return True, energy


def bessel_upper_constant(A: SpectralOperator, L: float) -> float:
    """Closed-form Bessel scaling: integral of ||A||^{2t} over [0, L]."""
    nrm = A.operator_norm
    if nrm == 0.0:
        return 0.0
    return pair_integral(nrm, nrm, L).real


def multiplier_bounds(A: SpectralOperator, L: float) -> tuple:
    """Extremes of |power_integral(lambda, ell)| over the spectrum.

    ell is the clipped window min(L, 1/2); the returned pair (m, M) brackets
    the modulus of the averaging multiplier on every eigenvalue.
    """
    ell = TimeInterval(L).ell
    vals = [abs(power_integral(z, ell)) for z in A.eigenvalues]
    return min(vals), max(vals)


def carleson_check(
    lambdas: Sequence[complex],
    g: Optional[np.ndarray] = None,
    P_norms: Optional[Sequence[float]] = None,
) -> CarlesonReport:
    """One-generator frameability diagnostics for a diagonal system.

    Five conditions are tracked. Two of them cannot be decided from a finite
    truncation and are reported as ``assumed`` (orbit-closure coverage) and
    ``undecidable`` (tail summability; a monotone-moduli diagnostic for the
    observed tail is included). The remaining three are decided from the
    data: all eigenvalues strictly inside the unit disk, a positive infimum
    of pseudohyperbolic separation products, and two-sided bounds on
    ||P_j g|| / sqrt(1 - |lambda_j|^2).

    Raises DomainError when any eigenvalue sits on (or numerically on) the
    unit circle, where the scaling is meaningless.
    """
    lam = np.asarray(lambdas, dtype=np.complex128).reshape(-1)
    if lam.size == 0:
        raise ValueError("need at least one eigenvalue")
    mods = np.abs(lam)
    if np.any(np.abs(mods - 1.0) <= 1e-14):
        raise DomainError("eigenvalue modulus is numerically 1")

    inside = mods < 1.0
    cond_ii = "pass" if bool(inside.all()) else "fail"

    diff = np.abs(lam[:, None] - lam[None, :])
    blaschke = np.abs(1.0 - np.conj(lam)[:, None] * lam[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = diff / blaschke
    ratio = np.where(np.isnan(ratio), 0.0, ratio)
    np.fill_diagonal(ratio, 1.0)
    per = np.prod(ratio, axis=1)
    inf_product = float(per.min())
    cond_iv = "pass" if inf_product > 0.0 else "fail"

    if P_norms is None:
        if g is None:
            raise ValueError("supply the generator g or explicit P_norms")
        gv = np.asarray(g, dtype=np.complex128).reshape(-1)
        if gv.size != lam.size:
            raise DimensionMismatch("generator length must match eigenvalue count")
        norms = np.abs(gv)
    else:
        norms = np.asarray(P_norms, dtype=np.float64).reshape(-1)
        if norms.size != lam.size:
            raise DimensionMismatch("one projection norm per eigenvalue is required")

    if inside.any():
        scaled = norms[inside] / np.sqrt(1.0 - mods[inside] ** 2)
        c_v = float(scaled.min())
        C_v = float(scaled.max())
        cond_v = "pass" if c_v > 0.0 else "fail"
    else:
        c_v = C_v = math.nan
        cond_v = "fail"

    tail = mods[lam.size // 2:]
    tail_increasing = bool(np.all(np.diff(tail) >= -1e-15)) if tail.size > 1 else True

    conditions = {
        "i": "assumed",
        "ii": cond_ii,
        "iii": "undecidable",
        "iv": cond_iv,
        "v": cond_v,
    }
    failed = any(conditions[k] == "fail" for k in ("ii", "iv", "v"))
    verdict = "not_frameable" if failed else "consistent_at_truncation"
    return CarlesonReport(
        inf_product=inf_product,
        per_index_products=tuple(float(x) for x in per),
        conditions=conditions,
        c_v=c_v,
        C_v=C_v,
        verdict=verdict,
        tail_increasing=tail_increasing,
    )
