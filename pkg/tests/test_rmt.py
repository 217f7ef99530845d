import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freelab.errors import DomainError, NumericError, ResourceError
from freelab.rmt import (
    ALL_CIRCULAR,
    QUARTER_COLUMN,
    BlockMatrix,
    MatrixUnits,
    RngStream,
    adversarial_diag_search,
    build_Ik_factor,
    build_voiculescu_blocks,
    conditional_expectation_En,
    conditional_expectation_onto_Ik,
    ek_norm,
    en_norm,
    estimate_En_norm,
    haar_unitary,
    hermitian_eigen,
    matdist_curve,
    norm2,
    ntrace,
    polar_decompose,
    pythagoras_defect,
    sample_ginibre,
    sample_gue,
    verify_polar_conjugation,
)


def gen(seed=0):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# ensembles


def test_rng_stream_reproducible_and_distinct():
    s = RngStream(7, 2)
    assert np.array_equal(s.generator().standard_normal(5), s.generator().standard_normal(5))
    a = s.child(0).generator().standard_normal(5)
    b = s.child(1).generator().standard_normal(5)
    c = RngStream(7, 3).generator().standard_normal(5)
    assert not np.array_equal(a, b)
    assert not np.array_equal(s.generator().standard_normal(5), c)


def test_gue_n1_is_real():
    x = [sample_gue(1, 2.0, gen(i))[0, 0] for i in range(4000)]
    assert all(v.imag == 0 for v in x)
    assert np.var(np.real(x)) == pytest.approx(2.0, rel=0.1)


def test_ginibre_n1_variance():
    x = np.array([sample_ginibre(1, 3.0, gen(i))[0, 0] for i in range(4000)])
    assert np.mean(np.abs(x) ** 2) == pytest.approx(3.0, rel=0.1)


def test_gue_hermitian_and_moments():
    h = sample_gue(256, 1.0, gen(1))
    assert np.array_equal(h, h.conj().T)
    assert abs(ntrace(h @ h).real - 1) <= 0.05
    assert abs(ntrace(np.linalg.matrix_power(h, 4)).real - 2) <= 0.15


@pytest.mark.parametrize("k,catalan", [(1, 1), (2, 2), (3, 5)])
def test_gue_catalan_moments(k, catalan):
    h = sample_gue(256, 1.0, gen(10 + k))
    assert abs(ntrace(np.linalg.matrix_power(h, 2 * k)).real - catalan) <= 10 * (2 * k) ** 2 / 256


def test_ginibre_moments():
    c = sample_ginibre(256, 1.0, gen(2))
    assert abs(ntrace(c @ c.conj().T).real - 1) <= 0.05
    assert abs(ntrace(c)) <= 0.1


def test_sampler_domain():
    with pytest.raises(DomainError):
        sample_gue(0, 1.0, gen())
    with pytest.raises(DomainError):
        sample_ginibre(4, 0.0, gen())
    with pytest.raises(DomainError):
        sample_gue(4, 1.0, 123)


def test_haar_unitary():
    u = haar_unitary(32, gen(4))
    assert np.linalg.norm(u.conj().T @ u - np.eye(32)) <= 1e-12


# ---------------------------------------------------------------------------
# eigen and polar


def test_eigen_identity():
    e = hermitian_eigen(np.eye(5))
    assert np.allclose(e.values, 1.0)


def test_eigen_diag_sorted():
    e = hermitian_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(e.values, [1, 2, 3])
    assert e.residual(np.diag([3.0, 1.0, 2.0])) <= 1e-14


def test_eigen_zero_matrix():
    e = hermitian_eigen(np.zeros((3, 3)))
    assert np.array_equal(e.values, np.zeros(3))


def test_eigen_rejects_non_hermitian():
    with pytest.raises(DomainError):
        hermitian_eigen(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eigen_nonconvergence():
    with pytest.raises(NumericError):
        hermitian_eigen(sample_gue(16, 1.0, gen()), tol=1e-30, max_sweeps=1)


@pytest.mark.parametrize("N", [16, 64])
def test_eigen_random(N):
    a = sample_gue(N, 1.0, gen(N))
    e = hermitian_eigen(a)
    fro = np.linalg.norm(a)
    assert e.residual(a) <= 1e-8 * fro
    assert e.unitarity_error() <= 1e-8 * math.sqrt(N)
    assert np.allclose(e.values, np.linalg.eigvalsh(a), atol=1e-10)
    assert np.all(np.diff(e.values) >= 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31))
def test_eigen_property(N, seed):
    a = sample_gue(N, 1.0, gen(seed))
    e = hermitian_eigen(a)
    assert e.residual(a) <= 1e-10 * max(1.0, np.linalg.norm(a))
    assert e.unitarity_error() <= 1e-10


def test_polar_unitary_input():
    u0 = haar_unitary(8, gen(3))
    u, h = polar_decompose(u0)
    assert np.allclose(h, np.eye(8), atol=1e-10)
    assert np.allclose(u, u0, atol=1e-10)


def test_polar_real_diagonal():
    u, h = polar_decompose(np.diag([2.0, -3.0]))
    assert np.allclose(h, np.diag([2.0, 3.0]), atol=1e-14)
    assert np.allclose(u, np.diag([1.0, -1.0]), atol=1e-14)


def test_polar_ginibre():
    c = sample_ginibre(32, 1.0, gen(5))
    u, h = polar_decompose(c)
    assert np.linalg.norm(u @ h - c) <= 1e-8 * np.linalg.norm(c)
    assert np.linalg.norm(u.conj().T @ u - np.eye(32)) <= 1e-8 * math.sqrt(32)
    assert np.min(np.linalg.eigvalsh(h)) >= -1e-12


@pytest.mark.parametrize("rank", [0, 1, 3])
def test_polar_rank_deficient(rank):
    g = gen(rank)
    x = sample_ginibre(6, 1.0, g)[:, :rank] @ sample_ginibre(6, 1.0, g)[:rank, :] if rank else np.zeros((6, 6))
    u, h = polar_decompose(x)
    assert np.linalg.norm(u @ h - x) <= 1e-8 * max(1.0, np.linalg.norm(x))
    assert np.linalg.norm(u.conj().T @ u - np.eye(6)) <= 1e-8


# ---------------------------------------------------------------------------
# block models and E_n


def test_blocks_selfadjoint_and_normalized():
    B = build_voiculescu_blocks(4, 64, ALL_CIRCULAR, gen(6))
    assert B.is_selfadjoint()
    assert abs(B.moment(2) - 1) <= 0.1


def test_quarter_column_psd():
    B = build_voiculescu_blocks(3, 32, QUARTER_COLUMN, gen(7))
    for i in range(2):
        assert np.min(np.linalg.eigvalsh(B.block(i, 2))) >= -1e-10


def test_block_guards():
    with pytest.raises(DomainError):
        build_voiculescu_blocks(1, 8, ALL_CIRCULAR, gen())
    with pytest.raises(DomainError):
        build_voiculescu_blocks(2, 8, "nope", gen())
    with pytest.raises(ResourceError):
        build_voiculescu_blocks(8, 512, ALL_CIRCULAR, gen())


def test_En_of_lift():
    m0 = np.arange(9).reshape(3, 3) + 1j * np.eye(3)
    assert np.allclose(conditional_expectation_En(BlockMatrix.lift(m0, 5)), m0)


def test_En_traceless_blocks():
    g = gen(8)
    blocks = []
    for i in range(2):
        row = []
        for j in range(2):
            b = sample_ginibre(6, 1.0, g)
            row.append(b - ntrace(b) * np.eye(6))
        blocks.append(row)
    assert np.allclose(conditional_expectation_En(BlockMatrix.from_blocks(blocks)), 0, atol=1e-14)


def test_En_norm_identity():
    B = build_voiculescu_blocks(3, 16, ALL_CIRCULAR, gen(9))
    direct = 0.0
    for i in range(3):
        for j in range(3):
            direct += abs(np.trace(B.block(i, j)) / 16) ** 2
    e = conditional_expectation_En(B)
    assert en_norm(e) ** 2 == pytest.approx(direct / 3, rel=1e-12)
    # E_n(B) is also the norm of the lifted element in M_nN
    assert norm2(BlockMatrix.lift(e, 16).data) == pytest.approx(en_norm(e), rel=1e-12)


def test_En_idempotent_and_trace_preserving():
    B = build_voiculescu_blocks(3, 16, QUARTER_COLUMN, gen(10))
    e = conditional_expectation_En(B)
    lifted = BlockMatrix.lift(e, 16)
    assert np.allclose(conditional_expectation_En(lifted), e, atol=1e-12)
    assert abs(lifted.trace() - B.trace()) <= 1e-12


def test_adversarial_fixed_point_on_scalar_blocks():
    m0 = np.array([[1.0, 2.0], [2.0, -1.0]])
    B = BlockMatrix.lift(m0, 4)
    start = [np.eye(4, dtype=complex)] * 2
    res = adversarial_diag_search(B, 5, gen(), start=start)
    assert res.value == pytest.approx(en_norm(m0))
    assert all(h == pytest.approx(res.history[0]) for h in res.history)


def test_adversarial_monotone_and_dominates_start():
    B = build_voiculescu_blocks(3, 16, ALL_CIRCULAR, gen(11))
    g = gen(12)
    start = [haar_unitary(16, g) for _ in range(3)]
    base = en_norm(conditional_expectation_En(B.conjugate_by_diagonal(start)))
    res = adversarial_diag_search(B, 10, g, start=start)
    assert np.all(np.diff(res.history) >= 0)
    assert res.history[0] == pytest.approx(base)
    assert res.value >= base
    check = en_norm(conditional_expectation_En(B.conjugate_by_diagonal(res.unitaries)))
    assert check == pytest.approx(res.value, rel=1e-10)


def test_adversarial_never_exceeds_bound():
    stats = estimate_En_norm(4, 16, 3, "adversarial", RngStream(1, 9), iterations=200)
    assert stats.max <= stats.bound


def test_estimate_small_without_conjugation():
    stats = estimate_En_norm(4, 64, 5, "none", RngStream(2))
    assert stats.max <= 3 / math.sqrt(4 * 64) * 2
    assert stats.passed


def test_estimate_deterministic():
    a = estimate_En_norm(2, 16, 3, "random-diagonal", RngStream(5))
    b = estimate_En_norm(2, 16, 3, "random-diagonal", RngStream(5))
    assert a.values == b.values


def test_estimate_domain():
    with pytest.raises(DomainError):
        estimate_En_norm(2, 16, 0, "none", RngStream(1))
    with pytest.raises(DomainError):
        estimate_En_norm(2, 16, 1, "bogus", RngStream(1))
    with pytest.raises(DomainError):
        estimate_En_norm(2, 16, 1, "none", gen())


# ---------------------------------------------------------------------------
# matrix units and E_k


def test_units_k_equals_N():
    a = sample_gue(6, 1.0, gen(13))
    u = build_Ik_factor(a, 6)
    vecs = hermitian_eigen(a).vectors
    for i in range(6):
        assert np.linalg.matrix_rank(u.unit(i, i)) == 1
        assert np.allclose(u.unit(i, 0), np.outer(vecs[:, i], vecs[:, 0].conj()))


def test_units_k_one():
    u = build_Ik_factor(sample_gue(8, 1.0, gen()), 1)
    assert np.allclose(u.unit(0, 0), np.eye(8), atol=1e-12)


def test_units_relations():
    u = build_Ik_factor(sample_gue(64, 1.0, gen(14)), 8)
    assert u.relation_error() <= 1e-8
    assert u.relation_error(explicit=True) <= 1e-8
    assert all(abs(t - 1 / 8) <= 1e-10 for t in u.traces())


def test_units_require_divisor():
    with pytest.raises(DomainError):
        build_Ik_factor(np.eye(6), 4)


def test_Ek_unital_and_idempotent():
    u = build_Ik_factor(sample_gue(32, 1.0, gen(15)), 4)
    assert np.allclose(conditional_expectation_onto_Ik(np.eye(32), u), np.eye(32), atol=1e-12)
    b = sample_gue(32, 1.0, gen(16))
    e = conditional_expectation_onto_Ik(b, u)
    assert np.allclose(conditional_expectation_onto_Ik(e, u), e, atol=1e-10)
    in_span = sum((i + 2 * j) * u.unit(i, j) for i in range(4) for j in range(4))
    assert np.allclose(conditional_expectation_onto_Ik(in_span, u), in_span, atol=1e-10)


def test_Ek_formula_and_trace_compatibility():
    u = build_Ik_factor(sample_gue(24, 1.0, gen(17)), 3)
    b = sample_ginibre(24, 1.0, gen(18))
    e = conditional_expectation_onto_Ik(b, u)
    formula = 3 * sum(ntrace(u.unit(j, i) @ b) * u.unit(i, j) for i in range(3) for j in range(3))
    assert np.allclose(e, formula, atol=1e-12)
    for p in range(3):
        for q in range(3):
            f = u.unit(p, q)
            assert abs(ntrace(e @ f) - ntrace(b @ f)) <= 1e-8
    assert ek_norm(b, u) == pytest.approx(norm2(e), rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([1, 2, 4, 8]), st.integers(0, 2**31))
def test_pythagoras_property(k, seed):
    g = gen(seed)
    u = build_Ik_factor(sample_gue(16, 1.0, g), k)
    assert pythagoras_defect(sample_gue(16, 1.0, g), u) <= 1e-8


def test_matdist_k1_is_scalar_compression():
    rows = matdist_curve(32, [1, 4], 2, RngStream(3, 3))
    r1 = rows[0]
    assert r1.k == 1
    assert r1.mean_ratio == pytest.approx(1.0, abs=0.05)
    assert rows[1].mean_ek_norm < 1


def test_matdist_domain():
    with pytest.raises(DomainError):
        matdist_curve(30, [4], 1, RngStream(1))
    with pytest.raises(DomainError):
        matdist_curve(32, [4], 1, gen())


def test_matrix_units_factored_matches_manual():
    vecs = np.linalg.qr(sample_ginibre(8, 1.0, gen(20)))[0]
    u = MatrixUnits([vecs[:, :4], vecs[:, 4:]])
    assert u.k == 2 and u.N == 8
    assert u.relation_error(explicit=True) <= 1e-12


# ---------------------------------------------------------------------------
# polar conjugation of the last column


def test_polar_conjugation_identity_on_quarter_model():
    B = build_voiculescu_blocks(3, 64, QUARTER_COLUMN, gen(21))
    rep = verify_polar_conjugation(B)
    assert rep["psd"]
    assert rep["skipped"] == []


def test_polar_conjugation_recovers_psd():
    g = gen(22)
    B = build_voiculescu_blocks(3, 128, QUARTER_COLUMN, g)
    us = [haar_unitary(128, g) for _ in range(2)] + [np.eye(128)]
    rep = verify_polar_conjugation(B.conjugate_by_diagonal(us))
    assert rep["psd"]
    assert rep["pass"]
    diag2 = [c for c in rep["moments"] if c["class"] == "diagonal" and c["order"] == 2]
    assert all(abs(c["value"] - 1 / 3) <= 5 / math.sqrt(128) for c in diag2)


def test_polar_conjugation_reports_singular_block():
    g = gen(23)
    B = build_voiculescu_blocks(2, 8, QUARTER_COLUMN, g)
    data = B.data.copy()
    data[:8, 8:] = 0
    data[8:, :8] = 0
    rep = verify_polar_conjugation(BlockMatrix(data, 2))
    assert rep["skipped"] == [0]
