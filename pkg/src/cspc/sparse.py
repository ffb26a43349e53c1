"""Cycle selection, sparsification, approximate spectra and their error
bounds, plus the entry-magnitude sparsifier used as a baseline.

The pipeline: transform A, keep the k cycles of B = W A W* with the
largest l2 norm, and treat the rest as the perturbation Delta.  Because
distinct cycles are orthogonal slices of the matrix, norm bookkeeping is
exact: |B|_F^2 = |B~|_F^2 + |Delta|_F^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .core import (
    CycleSelection,
    NumericalError,
    apply_cycle_mask,
    cycle_positions,
    require_square,
)

__all__ = [
    "SparseCycleMatrix",
    "EigenApproxResult",
    "BauerFikeBound",
    "PdCheckReport",
    "select_dominant_cycles",
    "sparsify",
    "direct_sparsify",
    "approx_eigenvalues",
    "eigen_error_report",
    "bauer_fike_bound",
    "pd_sufficient_check",
]

# eigenvalues smaller than this are excluded from relative-error statistics
RELATIVE_ERROR_FLOOR = 1e-14

# optimal assignment is cubic; above this size a greedy matching is used
HUNGARIAN_LIMIT = 512


@dataclass(frozen=True)
class SparseCycleMatrix:
    """A subset of cycles of an n x n matrix.

    cycles[t] holds the values of cycle selection.indices[t] in the
    reading order of core.cycle_positions.  nnz is |selection| * n
    regardless of stored zeros.
    """

    n: int
    selection: CycleSelection
    cycles: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cycles, dtype=np.complex128)
        if c.shape != (len(self.selection), self.n):
            raise ValueError(
                f"expected cycles of shape {(len(self.selection), self.n)}, got {c.shape}"
            )
        if self.selection.n != self.n:
            raise ValueError("selection dimension does not match matrix dimension")
        object.__setattr__(self, "cycles", c)

    @property
    def nnz(self) -> int:
        return len(self.selection) * self.n

    def cycle(self, k: int) -> np.ndarray:
        t = self.selection.indices.index(int(k))
        return self.cycles[t]

    def densify(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for t, k in enumerate(self.selection.indices):
            rows, cols = cycle_positions(self.n, k)
            out[rows, cols] = self.cycles[t]
        return out

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.cycles))


def select_dominant_cycles(b, k: int) -> CycleSelection:
    """Indices of the k cycles of b with the largest l2 norm.

    Ties break toward the smaller index, so the result is deterministic.
    """
    b = require_square(b)
    n = b.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cycle count {k} out of range [1, {n}]")
    norms = np.array([np.linalg.norm(apply_cycle_mask(b, j)) for j in range(n)])
    order = np.lexsort((np.arange(n), -norms))
    return CycleSelection.of(n, order[:k])


def sparsify(b, sel: CycleSelection) -> SparseCycleMatrix:
    b = require_square(b)
    if sel.n != b.shape[0]:
        raise ValueError(f"selection is for n={sel.n}, matrix has n={b.shape[0]}")
    if len(sel) == 0:
        raise ValueError("empty cycle selection")
    cycles = np.array([apply_cycle_mask(b, j) for j in sel.indices])
    return SparseCycleMatrix(b.shape[0], sel, cycles)


def direct_sparsify(a, nnz: int) -> np.ndarray:
    """Keep the nnz largest-magnitude entries of a, zero the rest.

    Ties keep the entry that comes first in row-major order.
    """
    a = require_square(a)
    n2 = a.size
    if not 0 <= nnz <= n2:
        raise ValueError(f"nnz {nnz} out of range [0, {n2}]")
    flat = a.ravel()
    order = np.argsort(-np.abs(flat), kind="stable")
    out = np.zeros_like(flat)
    keep = order[:nnz]
    out[keep] = flat[keep]
    return out.reshape(a.shape)


def approx_eigenvalues(b_sparse: SparseCycleMatrix) -> np.ndarray:
    """All n eigenvalues of the densified sparse matrix.

    A dense general eigensolver stands in for a structured sparse one;
    adequate at the matrix sizes this library targets.
    """
    if len(b_sparse.selection) == 0:
        raise ValueError("empty cycle selection")
    try:
        return np.linalg.eigvals(b_sparse.densify())
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigensolver failed to converge: {e}") from e


@dataclass
class EigenApproxResult:
    approx_eigenvalues: np.ndarray
    reference_eigenvalues: np.ndarray | None
    matching: np.ndarray | None
    mean_relative_error: float
    std_relative_error: float
    n_excluded: int
    residual_norms: tuple[float | None, float | None] = (None, None)

    def to_json_dict(self) -> dict:
        def pairs(v):
            return [[float(x.real), float(x.imag)] for x in v]

        return {
            "approx_eigenvalues": pairs(self.approx_eigenvalues),
            "reference_eigenvalues": (
                pairs(self.reference_eigenvalues)
                if self.reference_eigenvalues is not None
                else None
            ),
            "matching": None if self.matching is None else [int(i) for i in self.matching],
            "mean_relative_error": self.mean_relative_error,
            "std_relative_error": self.std_relative_error,
            "n_excluded": self.n_excluded,
            "residual_norms": list(self.residual_norms),
        }


def _match_eigenvalues(reference: np.ndarray, approx: np.ndarray) -> np.ndarray:
    """matching[i] = index into approx paired with reference[i]."""
    n = len(reference)
    cost = np.abs(reference[:, None] - approx[None, :])
    if n <= HUNGARIAN_LIMIT:
        rows, cols = scipy.optimize.linear_sum_assignment(cost)
        matching = np.empty(n, dtype=np.int64)
        matching[rows] = cols
        return matching
    # greedy fallback: biggest reference values pick first; suboptimal but
    # deterministic and adequate for the trend statistics it feeds
    matching = np.full(n, -1, dtype=np.int64)
    taken = np.zeros(n, dtype=bool)
    for i in np.argsort(-np.abs(reference), kind="stable"):
        c = np.where(taken, np.inf, cost[i])
        j = int(np.argmin(c))
        matching[i] = j
        taken[j] = True
    return matching


def eigen_error_report(
    approx,
    reference,
    delta_frobenius: float | None = None,
    delta_spectral: float | None = None,
) -> EigenApproxResult:
    """Match approximate to reference eigenvalues and report error stats.

    Matching minimizes the total |lambda - lambda~| over bijections
    (optimal assignment up to HUNGARIAN_LIMIT, greedy beyond).  Relative
    error per pair is |lambda - lambda~| / |lambda|; pairs with
    |lambda| < RELATIVE_ERROR_FLOOR are excluded from the statistics and
    counted in n_excluded.  Std is the population standard deviation.
    """
    approx = np.asarray(approx, dtype=np.complex128).ravel()
    reference = np.asarray(reference, dtype=np.complex128).ravel()
    if approx.shape != reference.shape:
        raise ValueError(f"length mismatch: {approx.shape} vs {reference.shape}")
    matching = _match_eigenvalues(reference, approx)
    absref = np.abs(reference)
    ok = absref >= RELATIVE_ERROR_FLOOR
    rel = np.abs(reference[ok] - approx[matching[ok]]) / absref[ok]
    mean = float(rel.mean()) if rel.size else 0.0
    std = float(rel.std()) if rel.size else 0.0
    return EigenApproxResult(
        approx_eigenvalues=approx,
        reference_eigenvalues=reference,
        matching=matching,
        mean_relative_error=mean,
        std_relative_error=std,
        n_excluded=int((~ok).sum()),
        residual_norms=(delta_frobenius, delta_spectral),
    )


@dataclass(frozen=True)
class BauerFikeBound:
    absolute: float
    relative: float | None
    eigenvector_condition: float
    delta_spectral: float


def bauer_fike_bound(b, b_sparse: SparseCycleMatrix) -> BauerFikeBound:
    """Eigenvalue perturbation bound kappa(X) * |Delta|_2 for Delta = B - B~.

    X is the eigenvector matrix of B with columns normalized to unit
    length; kappa its 2-norm condition number.  The relative variant
    kappa(X) * |B^{-1} Delta|_2 is included when B is invertible, None
    otherwise.  Numerically defective B (eigenvector matrix singular to
    working precision) raises NumericalError.
    """
    b = require_square(b)
    n = b.shape[0]
    if b_sparse.n != n:
        raise ValueError("matrix and sparse approximation sizes differ")
    delta = b - b_sparse.densify()
    _, x = np.linalg.eig(b)
    x = x / np.linalg.norm(x, axis=0, keepdims=True)
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[-1] <= n * np.finfo(float).eps * sv[0]:
        raise NumericalError("matrix is numerically defective, eigenvector basis is singular")
    kappa = float(sv[0] / sv[-1])
    dnorm = float(np.linalg.norm(delta, 2))
    sv_b = np.linalg.svd(b, compute_uv=False)
    relative = None
    if sv_b[-1] > n * np.finfo(float).eps * sv_b[0]:
        relative = kappa * float(np.linalg.norm(np.linalg.solve(b, delta), 2))
    return BauerFikeBound(
        absolute=kappa * dnorm,
        relative=relative,
        eigenvector_condition=kappa,
        delta_spectral=dnorm,
    )


@dataclass(frozen=True)
class PdCheckReport:
    holds: bool
    worst_pair: tuple[int, int]
    margin: float
    reason: str = ""


def pd_sufficient_check(b_sparse: SparseCycleMatrix) -> PdCheckReport:
    """Diagonal-dominance style sufficient condition for positive definiteness.

    Requires the selection to contain cycle 0 and to be closed under the
    index reflection a -> n - a (so off-diagonal mass comes in conjugate
    position pairs).  With T the number of selected cycles, checks

        sqrt(B(p,p) * B(q,q)) / T  >=  |Re B(p,q)|

    at every structurally nonzero off-diagonal position.  margin is the
    worst slack; holds means margin >= 0.  A diagonal entry that is not
    positive real fails the check outright (reported, not raised).
    """
    sel = b_sparse.selection
    n = b_sparse.n
    if 0 not in sel:
        raise ValueError("positive definiteness check requires cycle 0 in the selection")
    present = set(sel.indices)
    for a in sel.indices:
        if a != 0 and (n - a) % n not in present:
            raise ValueError(f"selection is not reflection-closed: cycle {a} lacks {(n - a) % n}")

    diag = b_sparse.cycle(0)
    t = len(sel)
    scale = float(np.abs(diag).max()) if n else 0.0
    bad = (diag.real <= 0) | (np.abs(diag.imag) > 1e-12 * max(scale, 1.0))
    if bad.any():
        p = int(np.argmax(bad))
        return PdCheckReport(
            holds=False,
            worst_pair=(p, p),
            margin=float("-inf"),
            reason=f"diagonal entry {p} is not positive real",
        )
    d = diag.real

    if t == 1:
        p = int(np.argmin(d))
        return PdCheckReport(holds=True, worst_pair=(p, p), margin=float(d.min()) / t)

    margin = np.inf
    worst = (0, 0)
    for idx, k in enumerate(sel.indices):
        if k == 0:
            continue
        rows, cols = cycle_positions(n, k)
        slack = np.sqrt(d[rows] * d[cols]) / t - np.abs(b_sparse.cycles[idx].real)
        q = int(np.argmin(slack))
        if slack[q] < margin:
            margin = float(slack[q])
            worst = (int(rows[q]), int(cols[q]))
    return PdCheckReport(holds=margin >= 0, worst_pair=worst, margin=margin)
