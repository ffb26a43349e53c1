"""Circulant-cycle preconditioners and the conjugate gradient harness.

Both preconditioners mask B = W A W* down to a cheaply invertible
pattern and conjugate the masked inverse back: M^{-1} v = W* S^{-1} W v,
one FFT pair plus a pre-factorized solve per application.

* Cycle preconditioner: S keeps the k dominant cycles of B.
* Corner-block preconditioner: S keeps the full diagonal plus a dense
  s x s bottom-right corner, s maximal under the nonzero budget
  (n - s) + s^2.  At s = 1 the two coincide (single dominant cycle of a
  Toeplitz transform is the diagonal).

The solver is plain left-preconditioned conjugate gradient for Hermitian
positive definite systems with x0 = 0.  Iteration counts are sensitive
to residual bookkeeping, so the policy is fixed: the recurrence residual
is replaced by the true residual b - A x every 50 iterations, and
convergence is declared on |r| / |b| < tol right after the x update.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import ConfigError, NumericalError, require_square
from .generators import StructuredMatrixSpec, generate
from .sparse import SparseCycleMatrix, select_dominant_cycles, sparsify
from .transform import similarity_transform

__all__ = [
    "CyclePreconditioner",
    "TChanPreconditioner",
    "PcgReport",
    "BenchmarkRow",
    "build_cycle_preconditioner",
    "build_tchan_preconditioner",
    "pcg_solve",
    "precond_benchmark",
]


def _check_factor_diagonal(lu: np.ndarray, what: str):
    d = np.abs(np.diag(lu))
    if d.size and d.min() <= d.max() * np.finfo(float).eps * lu.shape[0]:
        raise NumericalError(f"{what} is numerically singular")


def _lu_factor_quiet(matrix: np.ndarray):
    # singularity is detected and reported by the callers; scipy's own
    # warning would just duplicate that
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(matrix, check_finite=False)


class CyclePreconditioner:
    """Applies the inverse of W* B~ W for B~ = dominant cycles of B."""

    def __init__(self, b_sparse: SparseCycleMatrix):
        self.selection = b_sparse.selection
        self.cycles = b_sparse.cycles
        self.n = b_sparse.n
        dense = b_sparse.densify()
        try:
            self._lu = _lu_factor_quiet(dense)
        except scipy.linalg.LinAlgError as e:
            raise NumericalError(
                f"cycle preconditioner with cycles {self.selection.indices} is singular"
            ) from e
        try:
            _check_factor_diagonal(self._lu[0], "masked cycle matrix")
        except NumericalError:
            raise NumericalError(
                f"cycle preconditioner with cycles {self.selection.indices} is singular"
            ) from None

    def apply(self, v: np.ndarray) -> np.ndarray:
        w = np.fft.fft(v)
        y = scipy.linalg.lu_solve(self._lu, w, check_finite=False)
        return np.fft.ifft(y)


class TChanPreconditioner:
    """Applies the inverse of W* (B masked to diagonal + corner block) W."""

    def __init__(self, n: int, nnz_budget: int, block_size: int, diag_head: np.ndarray, corner: np.ndarray):
        self.n = n
        self.k_target = nnz_budget
        self.block_size = block_size
        self.diag_head = diag_head
        self.corner = corner
        if diag_head.size and np.abs(diag_head).min() <= np.finfo(float).eps * max(
            np.abs(diag_head).max(), 1.0
        ):
            raise NumericalError("masked diagonal of the transform has a zero entry")
        try:
            self._lu = _lu_factor_quiet(corner)
        except scipy.linalg.LinAlgError as e:
            raise NumericalError("corner block of the transform is singular") from e
        _check_factor_diagonal(self._lu[0], "corner block")

    @property
    def nnz(self) -> int:
        return (self.n - self.block_size) + self.block_size**2

    def apply(self, v: np.ndarray) -> np.ndarray:
        n, s = self.n, self.block_size
        w = np.fft.fft(v)
        y = np.empty_like(w)
        y[: n - s] = w[: n - s] / self.diag_head
        y[n - s :] = scipy.linalg.lu_solve(self._lu, w[n - s :], check_finite=False)
        return np.fft.ifft(y)


def build_cycle_preconditioner(a, k_cycles: int) -> CyclePreconditioner:
    a = require_square(a)
    n = a.shape[0]
    if not 1 <= k_cycles <= n:
        raise ValueError(f"cycle count {k_cycles} out of range [1, {n}]")
    b = similarity_transform(a)
    sel = select_dominant_cycles(b, k_cycles)
    return CyclePreconditioner(sparsify(b, sel))


def corner_block_side(n: int, nnz_budget: int) -> int:
    """Largest s with (n - s) + s^2 within the budget; s = 1 at budget n."""
    if nnz_budget < n:
        raise ConfigError(f"budget {nnz_budget} below dimension {n}")
    s = int((1 + np.sqrt(1 + 4 * (nnz_budget - n))) / 2)
    s = min(max(s, 1), n)
    while s > 1 and (n - s) + s * s > nnz_budget:
        s -= 1
    while s < n and (n - (s + 1)) + (s + 1) ** 2 <= nnz_budget:
        s += 1
    return s


def build_tchan_preconditioner(a, nnz_budget: int) -> TChanPreconditioner:
    a = require_square(a)
    n = a.shape[0]
    s = corner_block_side(n, nnz_budget)
    b = similarity_transform(a)
    diag_head = np.diag(b)[: n - s].copy()
    corner = b[n - s :, n - s :].copy()
    return TChanPreconditioner(n, nnz_budget, s, diag_head, corner)


@dataclass
class PcgReport:
    iterations: int
    relative_residuals: list[float]
    converged: bool
    tolerance: float


def pcg_solve(
    a,
    b,
    m=None,
    tol: float = 1e-6,
    max_iter: int | None = None,
    collect_iterates: list | None = None,
) -> tuple[np.ndarray, PcgReport]:
    """Left-preconditioned conjugate gradient for Hermitian PD systems.

    m is any object with an apply(v) method (or None for no
    preconditioning).  Returns the solution and a report with the
    per-iteration relative residuals |b - A x| / |b|.  Definiteness is
    only checked along the way: a search direction with Re(p* A p) <= 0
    raises NumericalError.  Hermitian symmetry is checked up front.
    """
    a = require_square(a)
    n = a.shape[0]
    b = np.asarray(b, dtype=np.complex128).ravel()
    if b.size != n:
        raise ValueError(f"rhs has length {b.size}, matrix has n={n}")
    herm_defect = np.linalg.norm(a - a.conj().T, "fro")
    if herm_defect > 1e-10 * max(np.linalg.norm(a, "fro"), 1e-300):
        raise ValueError("matrix is not Hermitian to working tolerance")
    if max_iter is None:
        max_iter = max(10 * n, 100)

    x = np.zeros(n, dtype=np.complex128)
    nb = np.linalg.norm(b)
    residuals: list[float] = []
    if nb == 0:
        return x, PcgReport(0, residuals, True, tol)

    r = b.copy()
    z = m.apply(r) if m is not None else r.copy()
    p = z.copy()
    rho = np.vdot(r, z)
    it = 0
    converged = False
    while it < max_iter:
        ap = a @ p
        denom = np.vdot(p, ap).real
        if denom <= 0:
            raise NumericalError(f"conjugate gradient breakdown at iteration {it}: p*Ap = {denom:g}")
        alpha = rho / denom
        x += alpha * p
        it += 1
        if collect_iterates is not None:
            collect_iterates.append(x.copy())
        if it % 50 == 0:
            r = b - a @ x
        else:
            r = r - alpha * ap
        rel = np.linalg.norm(r) / nb
        residuals.append(float(rel))
        if rel < tol:
            converged = True
            break
        z = m.apply(r) if m is not None else r.copy()
        rho_new = np.vdot(r, z)
        beta = rho_new / rho
        rho = rho_new
        p = z + beta * p
    return x, PcgReport(it, residuals, converged, tol)


@dataclass(frozen=True)
class BenchmarkRow:
    method: str
    budget: int
    iterations: int
    converged: bool
    final_residual: float


def precond_benchmark(
    spec: StructuredMatrixSpec,
    budgets,
    tol: float = 1e-6,
    max_iter: int | None = None,
) -> list[BenchmarkRow]:
    """Iteration counts for no preconditioner, corner-block and cycle
    preconditioners over a list of nonzero budgets.

    The matrix comes from the spec; the right-hand side is (1, ..., n)
    throughout so runs are comparable.  Cycle budgets translate to
    k = budget // n cycles.
    """
    a, info = generate(spec)
    n = spec.n
    rhs = info.get("rhs", np.arange(1, n + 1, dtype=np.complex128))
    rows = []
    _, rep = pcg_solve(a, rhs, None, tol=tol, max_iter=max_iter)
    rows.append(
        BenchmarkRow("identity", 0, rep.iterations, rep.converged,
                     rep.relative_residuals[-1] if rep.relative_residuals else 0.0)
    )
    for budget in budgets:
        m = build_tchan_preconditioner(a, int(budget))
        _, rep = pcg_solve(a, rhs, m, tol=tol, max_iter=max_iter)
        rows.append(
            BenchmarkRow("tchan", int(budget), rep.iterations, rep.converged,
                         rep.relative_residuals[-1] if rep.relative_residuals else 0.0)
        )
    for budget in budgets:
        k = max(int(budget) // n, 1)
        m = build_cycle_preconditioner(a, k)
        _, rep = pcg_solve(a, rhs, m, tol=tol, max_iter=max_iter)
        rows.append(
            BenchmarkRow("cycles", int(budget), rep.iterations, rep.converged,
                         rep.relative_residuals[-1] if rep.relative_residuals else 0.0)
        )
    return rows
