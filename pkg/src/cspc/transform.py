"""Fourier engines: 1-d DFT plans, the two-sided similarity transform, and
pruned cycle extraction.

Sign conventions, fixed once:

* ``dft`` with a forward plan uses the positive kernel, X(k) = sum_p
  x(p) exp(+2i*pi*p*k/n).  That equals ``n * np.fft.ifft(x)`` before
  normalization.
* The similarity transform conjugates by the unitary Fourier matrix W
  (negative kernel, 1/sqrt(n)): B = W A W*.  Implemented as two passes of
  one-dimensional FFTs, B = ifft(fft(A, axis=0), axis=1); the explicit
  triple product is only ever used as a test oracle.

extract_cycles computes selected cycles of B without forming B.  The
column pass runs in full; the row pass is outputs-pruned down to the
dependency cone of the requested positions (see _kernels).  Cost per row
for k selected cycles on power-of-two n is at most (n-k) + n*log2(k)
butterfly/leaf operations, which the optional OpCounter reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import CycleSelection, require_square
from .sparse import SparseCycleMatrix

__all__ = [
    "DftPlan",
    "OpCounter",
    "dft",
    "similarity_transform",
    "inverse_similarity_transform",
    "extract_cycles",
]

_NORMS = ("none", "1/n", "1/sqrt(n)")


@dataclass(frozen=True)
class DftPlan:
    """Length, direction and normalization of a 1-d transform.

    The normalization label names the scaling of the forward transform;
    an inverse plan with the same label applies the complementary factor,
    so forward followed by inverse under one label is the identity.
    """

    n: int
    direction: str = "forward"
    normalization: str = "none"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"transform length must be >= 1, got {self.n}")
        if self.direction not in ("forward", "inverse"):
            raise ValueError(f"direction must be forward or inverse, got {self.direction!r}")
        if self.normalization not in _NORMS:
            raise ValueError(f"normalization must be one of {_NORMS}, got {self.normalization!r}")

    def inverse(self) -> "DftPlan":
        other = "inverse" if self.direction == "forward" else "forward"
        return DftPlan(self.n, other, self.normalization)


def dft(x, plan: DftPlan) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (plan.n,):
        raise ValueError(f"expected vector of length {plan.n}, got shape {x.shape}")
    n = plan.n
    if plan.direction == "forward":
        y = np.fft.ifft(x) * n
        scale = {"none": 1.0, "1/n": 1.0 / n, "1/sqrt(n)": 1.0 / np.sqrt(n)}[plan.normalization]
    else:
        y = np.fft.fft(x)
        scale = {"none": 1.0 / n, "1/n": 1.0, "1/sqrt(n)": 1.0 / np.sqrt(n)}[plan.normalization]
    return y * scale


def similarity_transform(a) -> np.ndarray:
    """B = W A W* via two FFT passes, never a triple matrix product."""
    a = require_square(a)
    return np.fft.ifft(np.fft.fft(a, axis=0), axis=1)


def inverse_similarity_transform(b) -> np.ndarray:
    """A = W* B W, exact inverse of similarity_transform."""
    b = require_square(b)
    return np.fft.fft(np.fft.ifft(b, axis=0), axis=1)


class OpCounter:
    """Collects the arithmetic-operation count of a pruned extraction.

    Counting convention: one operation per butterfly output written, and
    s*log2(s) for a full size-s leaf FFT.  The count covers the pruned
    row pass only; the full column pass is delegated to the FFT library
    and not instrumented.  ``ops`` is None when the pruned path was not
    taken (non-power-of-two n).
    """

    def __init__(self):
        self.ops: int | None = None
        self.vectors: int = 0

    @property
    def per_vector(self) -> float | None:
        if self.ops is None or self.vectors == 0:
            return None
        return self.ops / self.vectors


def _cycles_from_pruned(out: np.ndarray, sel: CycleSelection) -> list[np.ndarray]:
    # out[:, t] is already cycle j in row-major walk order; reading order
    # flips to the column walk (a roll by -j) when the sub-diagonal run
    # is the longer one.
    n = sel.n
    cycles = []
    for t, j in enumerate(sel.indices):
        if 2 * j <= n:
            cycles.append(np.roll(out[:, t], -j))
        else:
            cycles.append(out[:, t].copy())
    return cycles


def extract_cycles(a, sel: CycleSelection, counter: OpCounter | None = None) -> SparseCycleMatrix:
    """Selected cycles of W A W*, without forming the rest of it.

    For power-of-two n the row pass touches only the dependency cone of
    the requested outputs; otherwise it falls back to the full transform
    plus masking (counter.ops stays None).  Values match the masked full
    transform to roundoff either way.
    """
    a = require_square(a)
    n = a.shape[0]
    if sel.n != n:
        raise ValueError(f"selection is for n={sel.n}, matrix has n={n}")
    if len(sel) == 0:
        raise ValueError("empty cycle selection")

    if n & (n - 1):
        from .core import apply_cycle_mask

        b = similarity_transform(a)
        cycles = np.array([apply_cycle_mask(b, j) for j in sel.indices])
        return SparseCycleMatrix(n, sel, cycles)

    base = tuple(sorted({(n - j) % n for j in sel.indices}))
    plan = _kernels.build_plan(n, base)
    y = np.fft.fft(a, axis=0)
    w_plus = np.exp(2j * np.pi * np.arange(n) / n)
    if _kernels.HAVE_NUMBA and not _kernels.numba_disabled():
        out = _kernels.pruned_rows_numba(y, plan, w_plus)
    else:
        out = _kernels.pruned_rows_numpy(y, plan, w_plus)
    out = out / n
    if counter is not None:
        counter.ops = (counter.ops or 0) + plan[4] * n
        counter.vectors += n

    # column t of the kernel output corresponds to base[t]; map back to
    # the requested cycle order
    slot = {bj: t for t, bj in enumerate(base)}
    cols = [slot[(n - j) % n] for j in sel.indices]
    cycles = np.array(_cycles_from_pruned(out[:, cols], sel))
    return SparseCycleMatrix(n, sel, cycles)
