"""Dense complex matrix substrate: cycles, special matrices, inner products.

Matrices are plain numpy arrays with dtype complex128 throughout; a
"ComplexMatrix" in the public API is any 2-d array-like coercible to that
dtype, a "DiagonalVector" is a 1-d complex array, and a cycle index is a
plain int in [0, n-1].

Cycle k of an n x n matrix is the wrapped diagonal through positions
((q + k) mod n, q): cycle 0 is the main diagonal, cycle 1 the first
subdiagonal plus the top-right corner entry, cycle n-1 the first
superdiagonal plus the bottom-left corner.  The n cycles partition the
entries of the matrix.  Orientation is fixed here once and inherited by
every other module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfigError",
    "NumericalError",
    "CycleSelection",
    "as_complex_matrix",
    "require_square",
    "full_cycle_matrix",
    "flip_matrix",
    "fourier_matrix",
    "relaxation_diagonal",
    "frobenius_inner",
    "cycle_positions",
    "apply_cycle_mask",
    "materialize_cycle",
]


class ConfigError(ValueError):
    """Invalid configuration: bad sizes, malformed specs, impossible options."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: singular factor, breakdown, non-convergence."""


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting anything else."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={m.ndim}")
    return m


def require_square(a) -> np.ndarray:
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def _check_dim(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return n


def _check_cycle_index(n: int, k: int) -> int:
    k = int(k)
    if not 0 <= k <= n - 1:
        raise ValueError(f"cycle index {k} out of range [0, {n - 1}]")
    return k


def full_cycle_matrix(n: int) -> np.ndarray:
    """Permutation matrix of the length-n cycle.

    Ones sit at (0, n-1) and at (i, i-1) for i >= 1, so C shifts basis
    vectors forward: C @ e_q = e_{(q+1) mod n}.  Powers C^k then have their
    ones exactly on cycle k as defined in this module.
    """
    n = _check_dim(n)
    c = np.zeros((n, n), dtype=np.complex128)
    c[np.arange(n), np.arange(-1, n - 1)] = 1.0
    return c


def flip_matrix(n: int) -> np.ndarray:
    """Flipped identity: ones on the anti-diagonal."""
    n = _check_dim(n)
    return np.fliplr(np.eye(n, dtype=np.complex128))


def fourier_matrix(n: int) -> np.ndarray:
    """Unitary Fourier matrix, entry (p, q) = exp(-2i*pi*p*q/n) / sqrt(n)."""
    n = _check_dim(n)
    pq = np.outer(np.arange(n), np.arange(n))
    return np.exp(-2j * np.pi * pq / n) / np.sqrt(n)


def relaxation_diagonal(n: int, k: int) -> np.ndarray:
    """Diagonal of the k-th relaxation matrix: entry q is exp(+2i*pi*k*q/n)."""
    n = _check_dim(n)
    k = _check_cycle_index(n, k)
    return np.exp(2j * np.pi * k * np.arange(n) / n)


def frobenius_inner(a, b) -> complex:
    """Frobenius inner product, conjugate-linear in the first argument."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def cycle_positions(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column index arrays of cycle k, in reading order.

    A wrapped diagonal splits into two straight runs; entries are listed
    with the longer run first.  For 2k <= n that walks columns q = 0..n-1
    through ((q+k) mod n, q); for 2k > n it walks rows p = 0..n-1 through
    (p, (p-k) mod n).  Both walks cover the same n positions, the order is
    what apply_cycle_mask and materialize_cycle agree on.
    """
    n = _check_dim(n)
    k = _check_cycle_index(n, k)
    idx = np.arange(n)
    if 2 * k <= n:
        return (idx + k) % n, idx
    return idx, (idx - k) % n


def apply_cycle_mask(a, k: int) -> np.ndarray:
    """Extract the n entries of square matrix a lying on cycle k."""
    a = require_square(a)
    rows, cols = cycle_positions(a.shape[0], k)
    return a[rows, cols]


def materialize_cycle(values, n: int, k: int) -> np.ndarray:
    """Dense n x n matrix holding `values` on cycle k, zero elsewhere.

    Inverse of apply_cycle_mask: materialize_cycle(apply_cycle_mask(a, k), n, k)
    reproduces a's cycle-k entries exactly, no arithmetic involved.
    """
    v = np.asarray(values, dtype=np.complex128)
    if v.shape != (n,):
        raise ValueError(f"expected {n} cycle values, got shape {v.shape}")
    rows, cols = cycle_positions(n, k)
    out = np.zeros((n, n), dtype=np.complex128)
    out[rows, cols] = v
    return out


@dataclass(frozen=True)
class CycleSelection:
    """A strictly increasing set of cycle indices of an n x n matrix."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        n = _check_dim(self.n)
        idx = tuple(int(i) for i in self.indices)
        if any(not 0 <= i <= n - 1 for i in idx):
            raise ValueError(f"cycle indices {idx} out of range for n={n}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"cycle indices must be strictly increasing, got {idx}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, n: int, indices) -> "CycleSelection":
        """Build from any iterable, deduplicating and sorting."""
        return cls(n, tuple(sorted(set(int(i) for i in indices))))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, k) -> bool:
        return int(k) in set(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    def complement(self) -> "CycleSelection":
        missing = sorted(set(range(self.n)) - set(self.indices))
        return CycleSelection(self.n, tuple(missing))
