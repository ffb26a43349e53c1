"""Cycle and circulant decompositions, component orthogonality, and the
weight/energy accounting that predicts when few cycles dominate.

Every square matrix splits exactly into its n cycles (an entry
permutation, no arithmetic) and, equivalently, into n circulant
components A = sum_k R_k D_k where D_k is the relaxation diagonal
exp(+2i*pi*k*q/n).  The components are mutually orthogonal under the
Frobenius inner product, so norm bookkeeping across the split is exact.

The dominance identity ties the two pictures together: the energy that
the cycles of A concentrate on a frequency set S equals the share of
|B|_F^2 that B = W A W* carries on the reflected cycle set T (index_reflect
of S).  dominance_relation computes both sides and checks them against
each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigError,
    CycleSelection,
    NumericalError,
    apply_cycle_mask,
    materialize_cycle,
    relaxation_diagonal,
    require_square,
)
from .transform import similarity_transform

__all__ = [
    "CycleDecomposition",
    "CirculantComponent",
    "DominanceReport",
    "cycle_decompose",
    "recompose_cycles",
    "circulant_dense",
    "component_dense",
    "circulant_decompose_recursive",
    "circulant_decompose_via_transform",
    "recompose",
    "orthogonality_check",
    "cycle_weights",
    "partial_energy",
    "index_reflect",
    "dominance_relation",
    "toeplitz_s0",
    "toeplitz_partial_energy",
    "block_toeplitz_frequency_sets",
]


@dataclass(frozen=True)
class CycleDecomposition:
    n: int
    cycles: np.ndarray  # shape (n, n), row k = values on cycle k

    def cycle(self, k: int) -> np.ndarray:
        return self.cycles[k]


@dataclass(frozen=True)
class CirculantComponent:
    """First row of a circulant R_k together with its relaxation index k."""

    k: int
    first_row: np.ndarray

    def __post_init__(self):
        fr = np.asarray(self.first_row, dtype=np.complex128)
        if fr.ndim != 1 or fr.size < 1:
            raise ValueError("first_row must be a nonempty vector")
        object.__setattr__(self, "first_row", fr)
        object.__setattr__(self, "k", int(self.k))


def cycle_decompose(a) -> CycleDecomposition:
    """Split a into its n cycles; lossless by construction."""
    a = require_square(a)
    n = a.shape[0]
    return CycleDecomposition(n, np.array([apply_cycle_mask(a, k) for k in range(n)]))


def recompose_cycles(dec: CycleDecomposition) -> np.ndarray:
    out = np.zeros((dec.n, dec.n), dtype=np.complex128)
    for k in range(dec.n):
        out += materialize_cycle(dec.cycles[k], dec.n, k)
    return out


def circulant_dense(first_row) -> np.ndarray:
    """Dense circulant whose rows are successive right rotations of first_row."""
    r = np.asarray(first_row, dtype=np.complex128)
    n = r.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return r[idx]


def component_dense(comp: CirculantComponent) -> np.ndarray:
    """The dense matrix R_k D_k of a component."""
    n = comp.first_row.size
    return circulant_dense(comp.first_row) * relaxation_diagonal(n, comp.k)[None, :]


def _column_walk(a: np.ndarray, k: int) -> np.ndarray:
    # cycle k read along columns q: entry q is a[(q+k) % n, q]
    n = a.shape[0]
    q = np.arange(n)
    return a[(q + k) % n, q]


def _all_cycle_means(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    q = np.arange(n)
    rows = (q[None, :] + q[:, None]) % n
    return a[rows, q[None, :]].mean(axis=1)


def circulant_decompose_recursive(a) -> list[CirculantComponent]:
    """Peel off circulant components one relaxation at a time.

    Step k averages each cycle of the residual to get the nearest
    circulant, subtracts it, and unwinds one relaxation so the next
    component is again a plain circulant.  Entry j of R_k's first row is
    the mean of residual cycle (n - j) mod n; that pairing is what makes
    the recomposition sum_k R_k D_k land back on a.
    """
    a = require_square(a)
    n = a.shape[0]
    d_back = relaxation_diagonal(n, n - 1)[None, :] if n > 1 else None
    residual = a.copy()
    comps = []
    for k in range(n):
        means = _all_cycle_means(residual)
        first_row = means[(-np.arange(n)) % n]
        comps.append(CirculantComponent(k, first_row))
        if k < n - 1:
            residual = (residual - circulant_dense(first_row)) * d_back
    return comps


def circulant_decompose_via_transform(a) -> list[CirculantComponent]:
    """Same components as the recursive variant, read off B = W A W*.

    Conjugating the cycle-k slice of B back out of the transform gives
    R_k times the relaxation D_k; dividing the relaxation phases out of
    the first row is cheaper than the full conjugation, one FFT per
    component of B's cycle along the column walk.
    """
    a = require_square(a)
    n = a.shape[0]
    b = similarity_transform(a)
    phase = np.exp(-2j * np.pi * np.arange(n) / n)
    comps = []
    for k in range(n):
        mu = _column_walk(b, k)
        first_row = np.fft.fft(mu) / n * phase**k
        comps.append(CirculantComponent(k, first_row))
    return comps


def recompose(components: list[CirculantComponent], n: int) -> np.ndarray:
    """Dense sum of R_k D_k over the given components."""
    out = np.zeros((n, n), dtype=np.complex128)
    for comp in components:
        if comp.first_row.size != n:
            raise ValueError(
                f"component k={comp.k} has length {comp.first_row.size}, expected {n}"
            )
        out += component_dense(comp)
    return out


def orthogonality_check(components: list[CirculantComponent]) -> float:
    """Largest normalized cross inner product |<R_iD_i, R_jD_j>| over pairs.

    Zero for a clean decomposition; the epsilon keeps all-zero
    components from dividing by zero.
    """
    if len(components) < 2:
        raise ValueError("need at least two components to compare")
    dense = [component_dense(c) for c in components]
    norms = [np.linalg.norm(d, "fro") for d in dense]
    worst = 0.0
    for i in range(len(dense)):
        for j in range(i + 1, len(dense)):
            ip = abs(np.vdot(dense[i], dense[j]))
            worst = max(worst, ip / (norms[i] * norms[j] + 1e-300))
    return worst


def cycle_weights(b) -> np.ndarray:
    """Fraction of |b|_F^2 carried by each cycle; sums to 1.

    Meaningful for any square matrix; when b is a similarity transform
    W A W* these are the component weights of A's circulant split.
    """
    b = require_square(b)
    total = np.linalg.norm(b, "fro") ** 2
    if total == 0:
        raise ValueError("weights are undefined for the zero matrix")
    n = b.shape[0]
    w = np.array([np.linalg.norm(apply_cycle_mask(b, k)) ** 2 for k in range(n)])
    return w / total


def partial_energy(cycle, freq_set: CycleSelection) -> float:
    """Share of a cycle's spectral energy on the given frequency bins.

    Spectrum taken with the positive-kernel DFT; the value is scale free.
    """
    c = np.asarray(cycle, dtype=np.complex128)
    if c.ndim != 1 or c.size != freq_set.n:
        raise ValueError(f"cycle has shape {c.shape}, selection expects length {freq_set.n}")
    gamma = np.abs(np.fft.ifft(c) * c.size) ** 2
    total = gamma.sum()
    if total == 0:
        raise ValueError("partial energy is undefined for a zero cycle")
    return float(gamma[freq_set.as_array()].sum() / total)


def index_reflect(s: CycleSelection) -> CycleSelection:
    """Map each index a to n - a (0 stays put); an involution."""
    return CycleSelection.of(s.n, [0 if a == 0 else s.n - a for a in s.indices])


@dataclass(frozen=True)
class DominanceReport:
    """Both sides of the dominance identity for one frequency set.

    relative_magnitude is the direct measurement on B = W A W* (cycle
    norms over the reflected index set); weighted_sum is sum_i w_i E_i
    from A's cycles.  They agree to the tolerance enforced at
    construction time in dominance_relation.
    """

    weights: np.ndarray
    partial_energies: np.ndarray
    relative_magnitude: float
    weighted_sum: float


def dominance_relation(a, freq_set: CycleSelection) -> DominanceReport:
    """Evaluate s = sum_i w_i E_i both directly and cycle by cycle.

    The direct side masks B = W A W* to the reflection of freq_set and
    measures the retained Frobenius energy.  The predicted side weights
    each cycle of A by its share of |A|_F^2 and its partial energy on
    freq_set.  Zero cycles of A carry zero weight; their (undefined)
    energies are reported as 0.  Disagreement beyond 1e-9 means the
    inputs broke an exact identity, so it raises instead of returning.
    """
    a = require_square(a)
    n = a.shape[0]
    if freq_set.n != n:
        raise ValueError(f"selection is for n={freq_set.n}, matrix has n={n}")
    total = np.linalg.norm(a, "fro") ** 2
    if total == 0:
        raise ValueError("dominance is undefined for the zero matrix")

    b = similarity_transform(a)
    reflected = index_reflect(freq_set)
    b_total = np.linalg.norm(b, "fro") ** 2
    s_direct = (
        sum(np.linalg.norm(apply_cycle_mask(b, j)) ** 2 for j in reflected.indices) / b_total
    )

    weights = np.empty(n)
    energies = np.empty(n)
    for i in range(n):
        c = apply_cycle_mask(a, i)
        wi = np.linalg.norm(c) ** 2 / total
        weights[i] = wi
        energies[i] = partial_energy(c, freq_set) if wi > 0 else 0.0
    weighted = float(np.dot(weights, energies))

    if abs(s_direct - weighted) > 1e-9:
        raise NumericalError(
            f"dominance identity violated: direct {s_direct!r} vs weighted {weighted!r}"
        )
    return DominanceReport(
        weights=weights,
        partial_energies=energies,
        relative_magnitude=float(s_direct),
        weighted_sum=weighted,
    )


def _toeplitz_parts(entries) -> tuple[int, np.ndarray, np.ndarray, complex]:
    e = np.asarray(entries, dtype=np.complex128).ravel()
    if e.size % 2 == 0 or e.size < 1:
        raise ValueError(f"expected 2n-1 diagonal entries, got {e.size}")
    n = (e.size + 1) // 2
    a0 = e[n - 1]
    # a_minus[i] = a_{-i}, a_plus[j] = a_j, both 1-based into the vector
    a_minus = e[n - 2 :: -1] if n > 1 else np.zeros(0, dtype=np.complex128)
    a_plus = e[n:]
    return n, a_minus, a_plus, a0


def toeplitz_s0(entries) -> float:
    """Closed-form weight of cycle 0 of W A W* for a Toeplitz matrix A.

    entries lists the diagonal values a_{-(n-1)} .. a_{n-1} of
    A(p, q) = a_{q-p}.  Equals cycle_weights(similarity_transform(A))[0]
    without forming the matrix.
    """
    n, a_minus, a_plus, a0 = _toeplitz_parts(entries)
    i = np.arange(1, n)
    fro2 = n * abs(a0) ** 2
    if n > 1:
        fro2 += np.sum((n - i) * np.abs(a_minus) ** 2) + np.sum((n - i) * np.abs(a_plus) ** 2)
    if fro2 == 0:
        raise ValueError("all-zero entries")
    num = n * n * abs(a0) ** 2
    if n > 1:
        num += np.sum(np.abs((n - i) * a_minus + i * a_plus[::-1]) ** 2)
    return float(num / (n * fro2))


def toeplitz_partial_energy(entries, i: int, k: int) -> float:
    """Closed-form partial energy of Toeplitz cycle i at frequency bin k.

    Cycle i of a Toeplitz matrix holds a_{-i} on n-i positions and
    a_{n-i} on the remaining i, so its spectrum is a two-level Dirichlet
    profile.  Valid for 1 <= i, k <= n-1; the k = 0 share is
    1 - sum over k >= 1, or toeplitz_s0 for the whole-matrix view.
    """
    n, a_minus, a_plus, _ = _toeplitz_parts(entries)
    if not 1 <= i <= n - 1:
        raise ValueError(f"cycle index {i} out of range [1, {n - 1}]")
    if not 1 <= k <= n - 1:
        raise ValueError(f"frequency index {k} out of range [1, {n - 1}]")
    am = a_minus[i - 1]
    ap = a_plus[n - i - 1]
    denom = (n - i) * abs(am) ** 2 + i * abs(ap) ** 2
    if denom == 0:
        raise ValueError(f"cycle {i} is zero, partial energy undefined")
    s = np.sin(np.pi * k / n)
    # removable singularity guard; unreachable for k in range but kept for
    # callers evaluating the formula off-domain
    ratio = i if abs(s) < 1e-12 else np.sin(np.pi * k * i / n) / s
    return float(abs(am - ap) ** 2 * ratio**2 / (n * denom))


def block_toeplitz_frequency_sets(n: int, m: int) -> tuple[CycleSelection, CycleSelection]:
    """Frequencies and cycles that a block-Toeplitz structure privileges.

    For block size m dividing n these are the m multiples of n/m, as
    both the frequency set and its reflection (the set is symmetric).
    """
    if n < 1 or m < 1 or n % m:
        raise ConfigError(f"block size {m} must divide dimension {n}")
    step = n // m
    s = CycleSelection.of(n, [(j * step) % n for j in range(1, m + 1)])
    return s, index_reflect(s)
