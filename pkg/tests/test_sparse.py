import json

import numpy as np
import pytest

import cspc.sparse as sparse_mod
from cspc.core import CycleSelection, NumericalError, apply_cycle_mask, materialize_cycle
from cspc.decomposition import circulant_dense
from cspc.sparse import (
    SparseCycleMatrix,
    approx_eigenvalues,
    bauer_fike_bound,
    direct_sparsify,
    eigen_error_report,
    pd_sufficient_check,
    select_dominant_cycles,
    sparsify,
)
from cspc.transform import DftPlan, dft, similarity_transform


def _random_b(n, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_sparse_cycle_matrix_basics():
    b = _random_b(6, 0)
    sel = CycleSelection.of(6, [0, 2, 5])
    sp = sparsify(b, sel)
    assert sp.nnz == 18
    assert np.array_equal(sp.cycle(2), apply_cycle_mask(b, 2))
    expected = sum(materialize_cycle(apply_cycle_mask(b, k), 6, k) for k in (0, 2, 5))
    assert np.allclose(sp.densify(), expected)
    assert sp.frobenius_norm() == pytest.approx(np.linalg.norm(sp.densify()))


def test_sparse_cycle_matrix_validation():
    sel = CycleSelection.of(4, [0, 1])
    with pytest.raises(ValueError):
        SparseCycleMatrix(4, sel, np.zeros((3, 4)))
    with pytest.raises(ValueError):
        SparseCycleMatrix(5, sel, np.zeros((2, 5)))
    with pytest.raises(ValueError):
        sparsify(np.eye(4), CycleSelection.of(5, [0]))


def test_parseval_split_between_kept_and_dropped():
    b = _random_b(9, 1)
    sel = CycleSelection.of(9, [0, 3, 4])
    kept = sparsify(b, sel)
    dropped = sparsify(b, sel.complement())
    assert kept.frobenius_norm() ** 2 + dropped.frobenius_norm() ** 2 == pytest.approx(
        np.linalg.norm(b) ** 2
    )


def test_select_dominant_cycles_known_ranking():
    n = 5
    b = np.zeros((n, n), dtype=complex)
    for k, scale in enumerate([3.0, 0.5, 7.0, 1.0, 2.0]):
        b += materialize_cycle(np.full(n, scale), n, k)
    assert select_dominant_cycles(b, 1).indices == (2,)
    assert select_dominant_cycles(b, 3).indices == (0, 2, 4)
    assert select_dominant_cycles(b, 5).indices == (0, 1, 2, 3, 4)


def test_select_dominant_cycles_tie_breaks_low():
    b = np.eye(4, dtype=complex) + materialize_cycle(np.ones(4), 4, 2)
    sel = select_dominant_cycles(b, 1)
    assert sel.indices == (0,)


def test_select_dominant_cycles_range():
    with pytest.raises(ValueError):
        select_dominant_cycles(np.eye(3), 0)
    with pytest.raises(ValueError):
        select_dominant_cycles(np.eye(3), 4)


def test_direct_sparsify_keeps_largest():
    a = np.array([[1.0, -5.0], [3.0, 2.0]], dtype=complex)
    out = direct_sparsify(a, 2)
    assert np.array_equal(out, np.array([[0, -5.0], [3.0, 0]]))
    assert np.count_nonzero(direct_sparsify(a, 0)) == 0
    assert np.array_equal(direct_sparsify(a, 4), a)
    with pytest.raises(ValueError):
        direct_sparsify(a, 5)


def test_direct_sparsify_tie_row_major():
    a = np.full((2, 2), 2.0, dtype=complex)
    out = direct_sparsify(a, 2)
    assert np.count_nonzero(out) == 2
    assert out[0, 0] == 2.0 and out[0, 1] == 2.0


def test_approx_eigenvalues_circulant_exact():
    rng = np.random.default_rng(2)
    n = 8
    r = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    b = similarity_transform(circulant_dense(r))
    sp = sparsify(b, CycleSelection.of(n, [0]))
    got = np.sort_complex(approx_eigenvalues(sp))
    assert np.allclose(got, np.sort_complex(dft(r, DftPlan(n))), atol=1e-10)


def test_eigen_error_report_exact_match_any_order():
    rng = np.random.default_rng(3)
    ref = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    rep = eigen_error_report(np.random.default_rng(4).permutation(ref), ref)
    assert rep.mean_relative_error == pytest.approx(0.0, abs=1e-15)
    assert rep.std_relative_error == pytest.approx(0.0, abs=1e-15)
    assert rep.n_excluded == 0


def test_eigen_error_report_known_errors():
    ref = np.array([1.0, 2.0, -4.0], dtype=complex)
    approx = np.array([1.1, 2.0, -4.0], dtype=complex)
    rep = eigen_error_report(approx, ref)
    rel = np.array([0.1, 0.0, 0.0])
    assert rep.mean_relative_error == pytest.approx(rel.mean())
    assert rep.std_relative_error == pytest.approx(rel.std())


def test_eigen_error_report_excludes_tiny_reference():
    ref = np.array([1e-16, 1.0], dtype=complex)
    rep = eigen_error_report(np.array([0.5e-16, 1.0 + 1e-3j]), ref)
    assert rep.n_excluded == 1
    assert rep.mean_relative_error == pytest.approx(1e-3, rel=1e-6)


def test_eigen_error_report_validation_and_json():
    with pytest.raises(ValueError):
        eigen_error_report(np.ones(3), np.ones(4))
    rep = eigen_error_report(np.ones(2), np.ones(2), delta_frobenius=0.5)
    blob = json.dumps(rep.to_json_dict())
    assert json.loads(blob)["residual_norms"] == [0.5, None]


def test_matching_greedy_path(monkeypatch):
    monkeypatch.setattr(sparse_mod, "HUNGARIAN_LIMIT", 2)
    rng = np.random.default_rng(5)
    ref = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    rep = eigen_error_report(rng.permutation(ref), ref)
    assert rep.mean_relative_error == pytest.approx(0.0, abs=1e-15)


def test_bauer_fike_bound_controls_matched_errors():
    rng = np.random.default_rng(6)
    n = 20
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = similarity_transform(h + h.conj().T)
    sel = select_dominant_cycles(b, 5)
    sp = sparsify(b, sel)
    bound = bauer_fike_bound(b, sp)
    # hermitian input: orthonormal eigenbasis
    assert bound.eigenvector_condition == pytest.approx(1.0, abs=1e-8)
    assert bound.delta_spectral <= np.linalg.norm(b - sp.densify(), "fro") + 1e-12
    ref = np.linalg.eigvals(b)
    rep = eigen_error_report(approx_eigenvalues(sp), ref)
    worst = np.abs(ref - rep.approx_eigenvalues[rep.matching]).max()
    assert worst <= bound.absolute * (1 + 1e-8)


def test_bauer_fike_relative_none_for_singular():
    b = np.diag([1.0, 2.0, 0.0]).astype(complex)
    sp = sparsify(b, CycleSelection.of(3, [0]))
    bound = bauer_fike_bound(b, sp)
    assert bound.relative is None
    assert bound.absolute == pytest.approx(0.0, abs=1e-14)


def test_bauer_fike_defective_matrix_raises():
    b = np.array([[2.0, 1.0], [0.0, 2.0]], dtype=complex)  # Jordan block
    sp = sparsify(b, CycleSelection.of(2, [0]))
    with pytest.raises(NumericalError):
        bauer_fike_bound(b, sp)


def _sparse_from_cycles(n, mapping):
    sel = CycleSelection.of(n, sorted(mapping))
    cycles = np.array([np.asarray(mapping[k], dtype=complex) for k in sorted(mapping)])
    return SparseCycleMatrix(n, sel, cycles)


def test_pd_check_requires_zero_cycle_and_reflection():
    n = 6
    with pytest.raises(ValueError):
        pd_sufficient_check(_sparse_from_cycles(n, {2: np.ones(n), 4: np.ones(n)}))
    with pytest.raises(ValueError):
        pd_sufficient_check(_sparse_from_cycles(n, {0: np.ones(n), 2: np.ones(n)}))


def test_pd_check_diagonal_only():
    rep = pd_sufficient_check(_sparse_from_cycles(4, {0: [4.0, 2.0, 3.0, 5.0]}))
    assert rep.holds
    assert rep.margin == pytest.approx(2.0)
    assert rep.worst_pair == (1, 1)


def test_pd_check_rejects_bad_diagonal():
    rep = pd_sufficient_check(_sparse_from_cycles(3, {0: [1.0, -2.0, 1.0]}))
    assert not rep.holds
    assert rep.margin == float("-inf")
    assert "not positive real" in rep.reason


def test_pd_check_hand_computed_margin():
    n = 2
    sp = _sparse_from_cycles(n, {0: [4.0, 9.0], 1: [2.0 + 5.0j, -1.0]})
    rep = pd_sufficient_check(sp)
    # slack at each off-diagonal position: sqrt(4*9)/2 - |Re value|
    assert rep.margin == pytest.approx(1.0)
    assert rep.worst_pair == (1, 0)
    assert rep.holds


def test_pd_check_holding_implies_pd_for_hermitian_input():
    rng = np.random.default_rng(7)
    n = 12
    diag = 2.0 + rng.random(n)
    vals = 0.05 * rng.standard_normal(n)
    b = np.diag(diag) + materialize_cycle(vals, n, 3) + materialize_cycle(vals, n, 3).T
    sp = sparsify(b.astype(complex), CycleSelection.of(n, [0, 3, 9]))
    rep = pd_sufficient_check(sp)
    assert rep.holds
    assert np.linalg.eigvalsh(sp.densify()).min() >= -1e-12


def test_pd_check_fails_on_dominant_off_diagonal():
    n = 4
    sp = _sparse_from_cycles(
        n, {0: np.ones(n), 1: np.full(n, 3.0), 3: np.full(n, 3.0)}
    )
    rep = pd_sufficient_check(sp)
    assert not rep.holds
    assert rep.margin < 0
