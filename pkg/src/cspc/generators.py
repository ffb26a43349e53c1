"""Structured matrix generators: random Toeplitz and block-Toeplitz
families, quasi-periodic diagonals, the geometric-decay benchmark system,
and Toeplitz matrices built from a symbol.

All randomness comes from numpy's PCG64 generator seeded from the spec,
so a spec regenerates its matrix bit for bit.  Entries are drawn N(0,1)
real and stored complex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .core import ConfigError

__all__ = [
    "SymbolSpec",
    "StructuredMatrixSpec",
    "generate",
    "gen_toeplitz",
    "gen_example1",
    "gen_block_toeplitz",
    "gen_quasi_periodic",
    "eval_symbol",
    "gen_symbol_toeplitz",
    "banded_diag_sequence",
]

KINDS = ("toeplitz", "block_toeplitz", "quasi_periodic", "example1", "symbol_toeplitz")


@dataclass(frozen=True)
class SymbolSpec:
    """A function on the unit circle given as polynomial and trig parts.

    form selects how the parts combine at angle theta:
      * "banded":  sum_k trig[k] * exp(i*k*theta)          (poly ignored)
      * "product": poly(theta) * sum_k trig[k] * exp(i*k*theta)
      * "sum":     poly(theta) + sum_k trig[k] * exp(i*k*theta)

    poly holds ascending power coefficients in theta.  truncation bounds
    the Fourier orders kept when building a matrix from a non-banded
    form; None means n-1.
    """

    form: str
    poly: tuple = ()
    trig: tuple = ()  # pairs (k, a_k)
    truncation: int | None = None

    def __post_init__(self):
        if self.form not in ("banded", "product", "sum"):
            raise ConfigError(f"unknown symbol form {self.form!r}")
        object.__setattr__(self, "poly", tuple(complex(c) for c in self.poly))
        object.__setattr__(
            self, "trig", tuple((int(k), complex(a)) for k, a in dict(self.trig).items())
        )
        if self.form == "banded" and not self.trig:
            raise ConfigError("banded symbol needs at least one trig coefficient")

    def to_json_dict(self) -> dict:
        return {
            "form": self.form,
            "poly": [[c.real, c.imag] for c in self.poly],
            "trig": [[k, a.real, a.imag] for k, a in self.trig],
            "truncation": self.truncation,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SymbolSpec":
        return cls(
            form=d["form"],
            poly=tuple(complex(re, im) for re, im in d.get("poly", ())),
            trig={int(k): complex(re, im) for k, re, im in d.get("trig", ())},
            truncation=d.get("truncation"),
        )


@dataclass(frozen=True)
class StructuredMatrixSpec:
    kind: str
    n: int
    m: int = 1
    periods: tuple[int, ...] = ()
    period_weights: tuple[float, ...] | None = None
    symmetric: bool = False
    seed: int = 0
    symbol: SymbolSpec | None = None
    make_pd: bool = False
    target_condition: float = 1.0e4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown matrix kind {self.kind!r}, expected one of {KINDS}")
        if self.n < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.n}")
        object.__setattr__(self, "periods", tuple(int(p) for p in self.periods))
        if self.period_weights is not None:
            object.__setattr__(
                self, "period_weights", tuple(float(w) for w in self.period_weights)
            )

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "periods": list(self.periods),
            "period_weights": None if self.period_weights is None else list(self.period_weights),
            "symmetric": self.symmetric,
            "seed": self.seed,
            "symbol": None if self.symbol is None else self.symbol.to_json_dict(),
            "make_pd": self.make_pd,
            "target_condition": self.target_condition,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "StructuredMatrixSpec":
        d = dict(d)
        sym = d.get("symbol")
        if sym is not None:
            d["symbol"] = SymbolSpec.from_json_dict(sym)
        if "periods" in d:
            d["periods"] = tuple(d["periods"])
        if d.get("period_weights") is not None:
            d["period_weights"] = tuple(d["period_weights"])
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "StructuredMatrixSpec":
        with open(path) as f:
            return cls.from_json_dict(json.load(f))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _toeplitz_from_diag_values(vals: np.ndarray, n: int) -> np.ndarray:
    # vals[d + n - 1] is the constant on diagonal d = q - p
    first_col = vals[n - 1 :: -1]
    first_row = vals[n - 1 :]
    return scipy.linalg.toeplitz(first_col, first_row).astype(np.complex128)


def gen_toeplitz(spec: StructuredMatrixSpec) -> np.ndarray:
    """Random Toeplitz: one N(0,1) draw per diagonal, mirrored if symmetric."""
    if spec.kind != "toeplitz":
        raise ConfigError(f"gen_toeplitz got kind {spec.kind!r}")
    n = spec.n
    rng = _rng(spec.seed)
    if spec.symmetric:
        half = rng.standard_normal(n)
        vals = np.concatenate([half[:0:-1], half])
    else:
        vals = rng.standard_normal(2 * n - 1)
    return _toeplitz_from_diag_values(vals.astype(np.complex128), n)


def gen_example1(n: int) -> tuple[np.ndarray, np.ndarray]:
    """The geometric-decay benchmark system: first row (2, -1/2, ..., -1/2^{n-1}).

    Symmetric Toeplitz, diagonally dominant with row margin
    2^{-p} + 2^{-(n-1-p)} > 0, hence positive definite.  Right-hand side
    is (1, 2, ..., n).
    """
    if n < 1:
        raise ConfigError(f"dimension must be >= 1, got {n}")
    first = np.zeros(n, dtype=np.complex128)
    first[0] = 2.0
    if n > 1:
        first[1:] = -(0.5 ** np.arange(1, n))
    a = scipy.linalg.toeplitz(first).astype(np.complex128)
    b = np.arange(1, n + 1, dtype=np.complex128)
    return a, b


def example1_gershgorin_margin(n: int) -> float:
    p = np.arange(n)
    return float(np.min(2.0 ** (-p) + 2.0 ** (-(n - 1 - p))))


def gen_block_toeplitz(spec: StructuredMatrixSpec, info: dict | None = None) -> np.ndarray:
    """Constant m x m blocks along block diagonals, N(0,1) block entries.

    symmetric draws only the upper block diagonals, symmetrizes the
    blocks themselves and mirrors them, giving a symmetric matrix with
    symmetric blocks.  make_pd (symmetric only) then shifts by alpha*I
    with alpha solving for the target condition number exactly; the
    achieved value lands in info["achieved_condition"] when a dict is
    passed.
    """
    if spec.kind != "block_toeplitz":
        raise ConfigError(f"gen_block_toeplitz got kind {spec.kind!r}")
    n, m = spec.n, spec.m
    if m < 1 or n % m:
        raise ConfigError(f"block size {m} must divide dimension {n}")
    if spec.make_pd and not spec.symmetric:
        raise ConfigError("make_pd only applies to symmetric block-Toeplitz matrices")
    nb = n // m
    rng = _rng(spec.seed)
    if spec.symmetric:
        upper = rng.standard_normal((nb, m, m))
        upper = (upper + upper.transpose(0, 2, 1)) / 2
        blocks = np.concatenate([upper[:0:-1], upper])  # G_{-d} = G_d
    else:
        blocks = rng.standard_normal((2 * nb - 1, m, m))
    blocks = blocks.astype(np.complex128)

    bi = np.arange(nb)
    sel = blocks[(bi[None, :] - bi[:, None]) + nb - 1]  # (nb, nb, m, m)
    a = sel.transpose(0, 2, 1, 3).reshape(n, n)

    if spec.make_pd:
        if spec.target_condition <= 1.0:
            raise ConfigError(f"target condition must exceed 1, got {spec.target_condition}")
        eigs = np.linalg.eigvalsh(a.real)
        lo, hi = eigs[0], eigs[-1]
        if hi - lo < 1e-12 * max(abs(hi), abs(lo), 1.0):
            raise ConfigError("cannot condition a matrix with a degenerate spectrum")
        delta = (hi - lo) / (spec.target_condition - 1.0)
        alpha = delta - lo
        a = a + alpha * np.eye(n)
        if info is not None:
            info["shift"] = float(alpha)
            info["achieved_condition"] = float((hi + alpha) / (lo + alpha))
    return a


def gen_quasi_periodic(spec: StructuredMatrixSpec) -> np.ndarray:
    """Each of the 2n-1 diagonals gets its own period drawn from the list
    and a fresh random pattern of that length tiled along it.

    Periods are drawn per diagonal with the given weights (uniform when
    omitted), in diagonal order d = -(n-1) .. n-1.  Tiling starts at the
    first element of the diagonal.
    """
    if spec.kind != "quasi_periodic":
        raise ConfigError(f"gen_quasi_periodic got kind {spec.kind!r}")
    if not spec.periods:
        raise ConfigError("quasi_periodic needs a nonempty period list")
    if any(p < 1 for p in spec.periods):
        raise ConfigError(f"periods must be positive, got {spec.periods}")
    weights = None
    if spec.period_weights is not None:
        if len(spec.period_weights) != len(spec.periods):
            raise ConfigError("period_weights length must match periods")
        w = np.asarray(spec.period_weights, dtype=float)
        weights = w / w.sum()
    n = spec.n
    rng = _rng(spec.seed)
    a = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n)
    for d in range(-(n - 1), n):
        p = int(rng.choice(np.asarray(spec.periods), p=weights))
        pattern = rng.standard_normal(p)
        length = n - abs(d)
        tiled = np.resize(pattern, length)
        if d >= 0:
            a[idx[:length], idx[:length] + d] = tiled
        else:
            a[idx[:length] - d, idx[:length]] = tiled
    return a


def _trig_sum(trig, theta):
    total = np.zeros_like(np.asarray(theta, dtype=np.complex128))
    for k, ak in trig:
        total = total + ak * np.exp(1j * k * np.asarray(theta, dtype=float))
    return total


def eval_symbol(sym: SymbolSpec, theta):
    """Value of the symbol at angle theta in [0, 2*pi); broadcasts."""
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0) or np.any(th >= 2 * np.pi):
        raise ValueError("theta out of range [0, 2*pi)")
    trig = _trig_sum(sym.trig, th)
    if sym.form == "banded":
        out = trig
    else:
        p = np.polynomial.polynomial.polyval(th, np.asarray(sym.poly, dtype=np.complex128))
        out = p * trig if sym.form == "product" else p + trig
    if np.isscalar(theta) or np.ndim(theta) == 0:
        return complex(out)
    return out


def symbol_coefficients(sym: SymbolSpec, n: int, resolution: int | None = None) -> np.ndarray:
    """Fourier coefficients a_{-(n-1)} .. a_{n-1} of the symbol.

    Banded forms are exact.  Other forms are integrated on a uniform
    grid of at least 16n points (power of two), one FFT; truncation
    zeroes orders beyond the requested cutoff.
    """
    trunc = sym.truncation if sym.truncation is not None else n - 1
    if trunc > n - 1:
        raise ConfigError(f"truncation {trunc} exceeds n-1 = {n - 1}")
    vals = np.zeros(2 * n - 1, dtype=np.complex128)
    if sym.form == "banded":
        for k, ak in sym.trig:
            if abs(k) > n - 1:
                raise ConfigError(f"band order {k} does not fit in dimension {n}")
            vals[k + n - 1] = ak
        return vals
    if resolution is None:
        resolution = 1 << max(int(np.ceil(np.log2(16 * n))), 4)
    theta = 2 * np.pi * np.arange(resolution) / resolution
    samples = eval_symbol(sym, theta)
    coeffs = np.fft.fft(samples) / resolution  # coeffs[k] = a_k, k mod resolution
    for k in range(-trunc, trunc + 1):
        vals[k + n - 1] = coeffs[k % resolution]
    return vals


def gen_symbol_toeplitz(sym: SymbolSpec, n: int) -> np.ndarray:
    """Toeplitz matrix whose diagonals are the symbol's Fourier coefficients."""
    if n < 1:
        raise ConfigError(f"dimension must be >= 1, got {n}")
    return _toeplitz_from_diag_values(symbol_coefficients(sym, n), n)


def banded_diag_sequence(first_row, first_col, n: int) -> np.ndarray:
    """Transform diagonal of a banded Toeplitz matrix, in closed form.

    first_row holds a_0 .. a_l (upper band), first_col holds a_0 .. a_{-m}
    (lower band); both start with a_0 and must agree there.  Builds the
    length-n weighted sequence

        (a_0, (n-1)/n a_1, ..., (n-l)/n a_l, 0, ..., 0,
         (n-m)/n a_{-m}, ..., (n-1)/n a_{-1})

    and returns its positive-kernel DFT, which equals
    diag(similarity_transform(A)) for the banded Toeplitz A.
    """
    fr = np.asarray(first_row, dtype=np.complex128).ravel()
    fc = np.asarray(first_col, dtype=np.complex128).ravel()
    if fr.size < 1 or fc.size < 1:
        raise ConfigError("first_row and first_col must contain at least a_0")
    l, m = fr.size - 1, fc.size - 1
    if l + m > n - 1:
        raise ConfigError(f"band width l+m = {l + m} too wide for dimension {n}")
    a0 = fr[0]
    if abs(fc[0] - a0) > 1e-12 * max(1.0, abs(a0)):
        raise ConfigError("first_row[0] and first_col[0] must both be a_0")
    seq = np.zeros(n, dtype=np.complex128)
    seq[0] = a0
    d = np.arange(1, l + 1)
    seq[d] = (n - d) / n * fr[1:]
    j = np.arange(1, m + 1)
    seq[n - j] = (n - j) / n * fc[1:]
    return np.fft.ifft(seq) * n


def generate(spec: StructuredMatrixSpec):
    """Build the matrix a spec describes.

    Returns (matrix, info): info carries the seed echo plus per-kind
    extras (the rhs and Gershgorin margin for example1, the achieved
    condition number when make_pd is set).
    """
    info: dict = {"kind": spec.kind, "n": spec.n, "seed": spec.seed}
    if spec.kind == "toeplitz":
        a = gen_toeplitz(spec)
    elif spec.kind == "block_toeplitz":
        a = gen_block_toeplitz(spec, info)
    elif spec.kind == "quasi_periodic":
        a = gen_quasi_periodic(spec)
    elif spec.kind == "example1":
        a, rhs = gen_example1(spec.n)
        info["rhs"] = rhs
        info["gershgorin_margin"] = example1_gershgorin_margin(spec.n)
    elif spec.kind == "symbol_toeplitz":
        if spec.symbol is None:
            raise ConfigError("symbol_toeplitz spec needs a symbol")
        a = gen_symbol_toeplitz(spec.symbol, spec.n)
    else:  # unreachable, kinds validated at construction
        raise ConfigError(f"unknown kind {spec.kind!r}")
    return a, info


def with_seed(spec: StructuredMatrixSpec, seed: int) -> StructuredMatrixSpec:
    return replace(spec, seed=int(seed))
