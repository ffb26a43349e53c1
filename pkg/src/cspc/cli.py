"""Experiment harness: generates matrices, runs the decomposition and
preconditioning pipelines, and writes CSV or JSON data files.

Every run writes a manifest next to the data file (same path plus
".manifest.json") echoing the full configuration, the library version
and the seed, which is enough to regenerate the data exactly.

Exit codes: 0 on success, 2 for configuration problems (also what
argparse uses), 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .core import ConfigError, CycleSelection, NumericalError, apply_cycle_mask, cycle_positions
from .generators import (
    StructuredMatrixSpec,
    SymbolSpec,
    eval_symbol,
    generate,
    with_seed,
)
from .precond import precond_benchmark
from .sparse import eigen_error_report, select_dominant_cycles, sparsify
from .transform import similarity_transform

__all__ = ["main", "ExperimentConfig"]

EXPERIMENTS = (
    "cycle-norms",
    "eig-errors",
    "eig-vs-n",
    "sparsifier-compare",
    "precond-table",
    "symbol-compare",
    "heatmap",
)


@dataclass
class ExperimentConfig:
    experiment: str
    spec: StructuredMatrixSpec
    cycles: tuple[int, ...] | None
    budgets: tuple[int, ...] | None
    tol: float
    trials: int
    seed: int
    out: str
    fmt: str


def _thread_count() -> int:
    raw = os.environ.get("CSPC_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"CSPC_THREADS must be an integer, got {raw!r}")
    return min(os.cpu_count() or 1, 8)


def _map_trials(fn, seeds):
    workers = _thread_count()
    if workers == 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


def _trial_seeds(seed: int, trials: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in ss.spawn(trials)]


def _write_rows(cfg: ExperimentConfig, header: list[str], rows: list[tuple]) -> str:
    path = cfg.out
    if cfg.fmt == "csv":
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            w.writerows(rows)
    else:
        payload = [dict(zip(header, row)) for row in rows]
        with open(path, "w") as f:
            json.dump(payload, f, indent=1)
    manifest = {
        "experiment": cfg.experiment,
        "config": {
            "spec": cfg.spec.to_json_dict(),
            "cycles": None if cfg.cycles is None else list(cfg.cycles),
            "budgets": None if cfg.budgets is None else list(cfg.budgets),
            "tol": cfg.tol,
            "trials": cfg.trials,
            "format": cfg.fmt,
        },
        "version": __version__,
        "seed": cfg.seed,
    }
    with open(path + ".manifest.json", "w") as f:
        json.dump(manifest, f, indent=1)
    return path


def run_cycle_norms(cfg: ExperimentConfig) -> str:
    a, _ = generate(cfg.spec)
    b = similarity_transform(a)
    n = cfg.spec.n
    rows = []
    for k in range(n):
        norm = float(np.linalg.norm(apply_cycle_mask(b, k)))
        folded = n if k == 0 else k  # plotting convention: cycle 0 shown at n
        rows.append((k, folded, norm))
    return _write_rows(cfg, ["cycle_index", "folded_index", "l2_norm"], rows)


def _eig_error_stats(a: np.ndarray, k: int) -> tuple[float, float, float]:
    b = similarity_transform(a)
    sel = select_dominant_cycles(b, k)
    sp = sparsify(b, sel)
    approx = np.linalg.eigvals(sp.densify())
    reference = np.linalg.eigvals(a)
    rep = eigen_error_report(approx, reference)
    delta_f = np.sqrt(
        max(np.linalg.norm(b, "fro") ** 2 - sp.frobenius_norm() ** 2, 0.0)
    )
    ratio = float(delta_f / np.linalg.norm(a, "fro"))
    return rep.mean_relative_error, rep.std_relative_error, ratio


def run_eig_errors(cfg: ExperimentConfig) -> str:
    if not cfg.cycles:
        raise ConfigError("eig-errors needs --cycles")
    seeds = _trial_seeds(cfg.seed, cfg.trials)

    def one(seed):
        a, _ = generate(with_seed(cfg.spec, seed))
        return [_eig_error_stats(a, k) for k in cfg.cycles]

    per_trial = _map_trials(one, seeds)
    rows = []
    for j, k in enumerate(cfg.cycles):
        means = np.array([t[j][0] for t in per_trial])
        stds = np.array([t[j][1] for t in per_trial])
        ratios = np.array([t[j][2] for t in per_trial])
        rows.append(
            (
                k,
                float(means.mean()),
                float(stds.mean()),
                float(means.std()),
                float(ratios.mean()),
            )
        )
    header = ["k_cycles", "mean_rel_err", "std_rel_err", "std_rel_err_across", "frob_residual_ratio"]
    return _write_rows(cfg, header, rows)


def run_eig_vs_n(cfg: ExperimentConfig) -> str:
    n_max = cfg.spec.n
    if n_max < 100:
        raise ConfigError("eig-vs-n sweeps n from 100 up; give --n >= 100")
    seeds = _trial_seeds(cfg.seed, cfg.trials)
    rows = []
    for n in range(100, n_max + 1, 100):
        spec_n = replace(cfg.spec, n=n)

        def one(seed, spec_n=spec_n, n=n):
            a, _ = generate(with_seed(spec_n, seed))
            b = similarity_transform(a)
            sel = CycleSelection.of(n, {0, n // 2})
            sp = sparsify(b, sel)
            rep = eigen_error_report(np.linalg.eigvals(sp.densify()), np.linalg.eigvals(a))
            delta_f = np.sqrt(max(np.linalg.norm(b, "fro") ** 2 - sp.frobenius_norm() ** 2, 0.0))
            return rep.mean_relative_error, rep.std_relative_error, float(
                delta_f / np.linalg.norm(a, "fro")
            )

        stats = np.array(_map_trials(one, seeds))
        rows.append(
            (n, float(stats[:, 0].mean()), float(stats[:, 1].mean()), float(stats[:, 2].mean()))
        )
    header = ["n", "mean_rel_err", "std_rel_err", "frob_residual_ratio"]
    return _write_rows(cfg, header, rows)


def run_sparsifier_compare(cfg: ExperimentConfig) -> str:
    from .sparse import direct_sparsify

    k = cfg.cycles[0] if cfg.cycles else 5
    n = cfg.spec.n
    nnz = k * n
    seeds = _trial_seeds(cfg.seed, cfg.trials)

    def one(seed):
        a, _ = generate(with_seed(cfg.spec, seed))
        b = similarity_transform(a)
        sp = sparsify(b, select_dominant_cycles(b, k))
        cyc = float(np.mean(np.abs(np.linalg.eigvals(sp.densify()))))
        direct = float(np.mean(np.abs(np.linalg.eigvals(direct_sparsify(a, nnz)))))
        return cyc, direct

    results = _map_trials(one, seeds)
    rows = []
    for t, (cyc, direct) in enumerate(results):
        rows.append((t, "cycle", nnz, cyc))
        rows.append((t, "direct", nnz, direct))
    header = ["trial", "method", "nnz", "mean_abs_eigenvalue"]
    return _write_rows(cfg, header, rows)


def run_precond_table(cfg: ExperimentConfig) -> str:
    if not cfg.budgets:
        raise ConfigError("precond-table needs --budgets")
    rows = [
        (r.method, r.budget, r.iterations, r.converged, r.final_residual)
        for r in precond_benchmark(cfg.spec, cfg.budgets, tol=cfg.tol)
    ]
    header = ["method", "budget", "iterations", "converged", "final_residual"]
    return _write_rows(cfg, header, rows)


def run_symbol_compare(cfg: ExperimentConfig) -> str:
    if cfg.spec.symbol is None:
        raise ConfigError("symbol-compare needs a spec with a symbol")
    a, _ = generate(cfg.spec)
    n = cfg.spec.n
    b = similarity_transform(a)
    theta = 2 * np.pi * np.arange(n) / n
    symbol_vals = np.atleast_1d(eval_symbol(cfg.spec.symbol, theta))
    diag = np.diag(b)
    eigs = np.linalg.eigvals(a)
    rows = []
    for q in range(n):
        rows.append(("symbol", q, float(symbol_vals[q].real), float(symbol_vals[q].imag)))
    for q in range(n):
        rows.append(("transform_diag", q, float(diag[q].real), float(diag[q].imag)))
    for q in range(n):
        rows.append(("eigenvalues", q, float(eigs[q].real), float(eigs[q].imag)))
    return _write_rows(cfg, ["set", "index", "re", "im"], rows)


def run_heatmap(cfg: ExperimentConfig) -> str:
    n = cfg.spec.n
    if n > 1024:
        raise ConfigError(f"heatmap dumps n^2 rows; n={n} exceeds the 1024 cap")
    a, _ = generate(cfg.spec)
    b = similarity_transform(a)
    scale = np.zeros((n, n))
    for k in range(n):
        r, c = cycle_positions(n, k)
        peak = np.abs(b[r, c]).max()
        scale[r, c] = peak if peak > 0 else np.inf  # zero cycle rows emit 0
    rows = []
    mags = np.abs(b) / scale
    for p in range(n):
        for q in range(n):
            rows.append((p, q, float(mags[p, q])))
    return _write_rows(cfg, ["row", "col", "normalized_magnitude"], rows)


_RUNNERS = {
    "cycle-norms": run_cycle_norms,
    "eig-errors": run_eig_errors,
    "eig-vs-n": run_eig_vs_n,
    "sparsifier-compare": run_sparsifier_compare,
    "precond-table": run_precond_table,
    "symbol-compare": run_symbol_compare,
    "heatmap": run_heatmap,
}

_DEFAULT_KINDS = {
    "cycle-norms": "toeplitz",
    "eig-errors": "toeplitz",
    "eig-vs-n": "block_toeplitz",
    "sparsifier-compare": "toeplitz",
    "precond-table": "example1",
    "symbol-compare": "symbol_toeplitz",
    "heatmap": "example1",
}


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def _parse_budgets(raw: str, n: int) -> tuple[int, ...]:
    """Budget tokens: plain integers, or multiples of the dimension like "3n"."""
    out = []
    for tok in raw.replace(",", " ").split():
        t = tok.strip().lower()
        if t.endswith("n"):
            mult = t[:-1]
            out.append(int(float(mult) * n) if mult else n)
        else:
            out.append(int(t))
    return tuple(out)


def _build_spec(args) -> StructuredMatrixSpec:
    if args.spec:
        spec = StructuredMatrixSpec.from_json_file(args.spec)
        if args.n:
            spec = replace(spec, n=args.n)
        if args.seed is not None:
            spec = with_seed(spec, args.seed)
        return spec
    if not args.n:
        raise ConfigError("give either --spec FILE or --n")
    kind = _DEFAULT_KINDS[args.experiment]
    kwargs = {"kind": kind, "n": args.n, "seed": args.seed or 0}
    if kind == "toeplitz":
        kwargs["symmetric"] = True
    if kind == "block_toeplitz":
        kwargs.update(m=5, symmetric=True)
    if kind == "symbol_toeplitz":
        # the default symbol: (1 + theta) * exp(i * theta)
        kwargs["symbol"] = SymbolSpec(form="product", poly=(1.0, 1.0), trig={1: 1.0})
    return StructuredMatrixSpec(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspc",
        description="cycle-decomposition experiment harness",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--spec", help="JSON matrix spec file")
        p.add_argument("--n", type=int, help="matrix dimension (overrides spec)")
        p.add_argument("--cycles", help="comma-separated cycle counts")
        p.add_argument("--budgets", help="comma-separated nnz budgets; '3n' means 3*n")
        p.add_argument("--tol", type=float, default=1e-6, help="solver tolerance")
        p.add_argument("--trials", type=int, default=50, help="number of random trials")
        p.add_argument("--seed", type=int, default=None, help="base seed")
        p.add_argument("--out", help="output data file")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _build_spec(args)
        cycles = _parse_int_list(args.cycles) if args.cycles else None
        budgets = _parse_budgets(args.budgets, spec.n) if args.budgets else None
        out = args.out or f"{args.experiment.replace('-', '_')}.{args.fmt}"
        cfg = ExperimentConfig(
            experiment=args.experiment,
            spec=spec,
            cycles=cycles,
            budgets=budgets,
            tol=args.tol,
            trials=args.trials,
            seed=args.seed if args.seed is not None else 0,
            out=out,
            fmt=args.fmt,
        )
        path = _RUNNERS[args.experiment](cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
