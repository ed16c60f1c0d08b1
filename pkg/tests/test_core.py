import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_triples.bounds import limit_dirac
from toeplitz_triples.core import (
    ExtElement,
    ParameterError,
    Params,
    TruncatedTriple,
    commutator_direct,
    commutator_ext,
    dirac_ext,
    lip_a,
    lip_c,
    lip_ext,
    m_matrix,
    random_element,
    represent,
    scaling_identity_check,
    t_map,
    theta,
    trace_identity_check,
    validate_params,
)
from toeplitz_triples.instances import build_circle
from toeplitz_triples.linalg import ValidationError, hermitian_eigen
from toeplitz_triples.states import ext_parameterization

from helpers import random_hermitian

CIRCLE = build_circle(4)
PARAMS = [Params(1, 1), Params(0.5, 1), Params(0.25, 2), Params(2, 0.5)]
seeds = st.integers(min_value=0, max_value=2**32 - 1)
param_st = st.sampled_from(PARAMS)


def test_validate_params_examples():
    assert validate_params(Params(0.5, 2.0)) is None
    bad = validate_params(Params(2.0, 1.0))
    assert bad is not None and bad.value == pytest.approx(2.0) and bad.bound == 1.0
    assert "alpha*beta" in bad.constraint
    assert validate_params(Params(0, 5.0)) is None
    assert validate_params(Params(0, math.inf)) is None
    assert validate_params(Params(1, 0)) is not None
    assert validate_params(Params(-1, 0.5)) is not None


def test_triple_validation():
    with pytest.raises(ValidationError, match="trivial kernel"):
        TruncatedTriple([0.0, 1.0, -1.0], [True, True, False])
    with pytest.raises(ValidationError):
        TruncatedTriple([1.0, 2.0], [True, True])
    with pytest.raises(ValidationError):
        TruncatedTriple([1.0, 2.0], [False, False])
    TruncatedTriple([1.0, 2.0], [True, True], allow_full=True)


def test_t_map_unit_and_zero():
    t = t_map(CIRCLE, np.eye(CIRCLE.dim_h))
    assert np.allclose(represent(CIRCLE, t), np.eye(CIRCLE.dim_k))
    z = t_map(CIRCLE, np.zeros((CIRCLE.dim_h, CIRCLE.dim_h)))
    assert not np.any(represent(CIRCLE, z))


def test_t_map_shift_is_unilateral_shift():
    c = build_circle(2)
    s = c.shift()
    comp = c.compress(s)
    assert np.array_equal(comp, np.array([[0, 0], [1, 0]]))
    # the bilateral truncation has four ones, the compression keeps one
    assert int(np.sum(np.abs(s))) == 4


def test_t_map_size_mismatch():
    with pytest.raises(ValidationError):
        t_map(CIRCLE, np.eye(3))


def test_theta_examples(rng):
    a = CIRCLE.symbols.matrix(rng.standard_normal(CIRCLE.symbols.dim))
    assert not np.any(theta(t_map(CIRCLE, a)))
    k = np.zeros((CIRCLE.n_p, CIRCLE.n_p))
    k[0, 0] = 1
    assert np.array_equal(theta(CIRCLE.compact_element(k)), k)


@given(seed=seeds)
def test_theta_idempotent(seed):
    t = random_element(CIRCLE, np.random.default_rng(seed))
    k = theta(t)
    assert np.array_equal(theta(CIRCLE.compact_element(k)), k)


def test_represent_pure_compact(rng):
    k = random_hermitian(rng, CIRCLE.n_p)
    pi = represent(CIRCLE, CIRCLE.compact_element(k))
    expect = np.zeros_like(pi)
    expect[: CIRCLE.n_p, : CIRCLE.n_p] = k
    assert np.array_equal(pi, expect)


@given(seed=seeds)
def test_represent_lower_block_multiplicative(seed):
    rng = np.random.default_rng(seed)
    t1, t2 = random_element(CIRCLE, rng), random_element(CIRCLE, rng)
    n = CIRCLE.n_p
    prod = represent(CIRCLE, t1) @ represent(CIRCLE, t2)
    ab = t1.symbol @ t2.symbol
    perm = CIRCLE.perm
    assert np.allclose(prod[n:, n:], ab[np.ix_(perm, perm)])


def test_dirac_ext_hand_example():
    tr = TruncatedTriple([1.0, -1.0], [True, False])
    d = dirac_ext(tr, Params(1, 1))
    assert np.array_equal(d.real, [[0, 1, 0], [1, 1, 0], [0, 0, -1]])
    assert not np.any(d.imag)


def test_dirac_ext_rejects():
    with pytest.raises(ParameterError):
        dirac_ext(CIRCLE, Params(0, 1))
    with pytest.raises(ParameterError, match="alpha\\*beta"):
        dirac_ext(CIRCLE, Params(2, 1))


def test_dirac_beta_zero_pattern():
    d = limit_dirac(CIRCLE, 1.0)
    n = CIRCLE.n_p
    assert not np.any(d[:n, :]) and not np.any(d[:, :n])
    assert np.allclose(np.diag(d)[n:], CIRCLE.dirac[CIRCLE.perm])


def test_commutator_unit_vanishes():
    t = t_map(CIRCLE, np.eye(CIRCLE.dim_h))
    for p in PARAMS:
        assert not np.any(np.abs(commutator_ext(CIRCLE, t, p)) > 1e-14)


def test_commutator_pure_compact_blocks(rng):
    k = random_hermitian(rng, CIRCLE.n_p)
    n = CIRCLE.n_p
    dp = np.diag(CIRCLE.d_p)
    for beta in (1.0, 0.5):
        c = commutator_ext(CIRCLE, CIRCLE.compact_element(k), Params(1, beta))
        assert np.allclose(c[:n, n : 2 * n], -beta * k @ dp)
        assert np.allclose(c[n : 2 * n, :n], beta * dp @ k)
        c[:n, n : 2 * n] = 0
        c[n : 2 * n, :n] = 0
        assert not np.any(np.abs(c) > 1e-14)


@given(seed=seeds, p=param_st)
def test_commutator_block_formula(seed, p):
    t = random_element(CIRCLE, np.random.default_rng(seed))
    assert np.max(np.abs(commutator_ext(CIRCLE, t, p) - commutator_direct(CIRCLE, t, p))) <= 1e-10


def test_commutator_block_formula_custom_triple(rng):
    tr = TruncatedTriple([3.0, -1.0, 0.0, 2.0, -5.0], [True, False, False, True, False])
    for _ in range(20):
        a = random_hermitian(rng, 5)
        t = ExtElement(a, random_hermitian(rng, 2))
        assert np.max(np.abs(commutator_ext(tr, t, Params(0.7, 1.3)) - commutator_direct(tr, t, Params(0.7, 1.3)))) <= 1e-10


def test_lip_c_examples():
    tr = TruncatedTriple([1.0, 2.0, 3.0, -1.0], [True, True, True, False])
    e = np.zeros((3, 3))
    e[0, 0] = 1
    assert lip_c(tr, e) == pytest.approx(1.0)
    assert lip_c(tr, np.zeros((3, 3))) == 0.0
    e = np.zeros((3, 3))
    e[2, 2] = 1
    assert lip_c(tr, e) == pytest.approx(3.0)


def test_lip_a_examples(rng):
    assert lip_a(CIRCLE, np.eye(CIRCLE.dim_h)) == 0.0
    assert lip_a(CIRCLE, np.diag(rng.standard_normal(CIRCLE.dim_h))) == 0.0
    for n in (2, 5, 9):
        assert lip_a(build_circle(n), build_circle(n).shift()) == pytest.approx(1.0)


def test_lip_ext_kernel_is_scalars():
    param = ext_parameterization(CIRCLE)
    stack = np.array([commutator_ext(CIRCLE, e, Params(0.5, 1)).ravel() for e in param.basis_elements()]).T
    real = np.vstack([stack.real, stack.imag])
    _, sv, vt = np.linalg.svd(real)
    kernel = vt[sv < 1e-10 * sv[0]]
    assert kernel.shape[0] == 1
    u = param.unit / np.linalg.norm(param.unit)
    assert abs(abs(kernel[0] @ u) - 1) < 1e-10


@given(seed=seeds, p=param_st, c=st.floats(min_value=-50, max_value=50))
def test_lip_ext_seminorm_axioms(seed, p, c):
    rng = np.random.default_rng(seed)
    s, t = random_element(CIRCLE, rng), random_element(CIRCLE, rng)
    ls, lt = lip_ext(CIRCLE, s, p), lip_ext(CIRCLE, t, p)
    assert lip_ext(CIRCLE, c * s, p) == pytest.approx(abs(c) * ls, rel=1e-9, abs=1e-9)
    assert lip_ext(CIRCLE, s + t, p) <= ls + lt + 1e-9


def test_lip_ext_pure_compact(rng):
    k = random_hermitian(rng, CIRCLE.n_p)
    lc = lip_c(CIRCLE, k)
    for beta in (1.0, 0.3):
        v = lip_ext(CIRCLE, CIRCLE.compact_element(k), Params(1, beta))
        assert beta * lc - 1e-9 <= v <= 2 * beta * lc + 1e-9
        assert v == pytest.approx(beta * lc, rel=1e-12)


def test_m_matrix():
    m, eig = m_matrix(Params(1, 1))
    assert np.array_equal(m, [[0, 1], [1, 1]])
    assert sorted(eig) == pytest.approx([(1 - math.sqrt(5)) / 2, (1 + math.sqrt(5)) / 2])
    assert np.allclose(sorted(np.linalg.eigvalsh(m)), sorted(eig))


def test_m_matrix_beta_zero():
    _, eig = m_matrix(Params(1, 0))
    assert sorted(eig) == pytest.approx([0.0, 1.0])


def test_one_mode_dirac_is_scaled_m():
    tr = TruncatedTriple([2.5], [True], allow_full=True)
    for p in PARAMS:
        w, _ = hermitian_eigen(dirac_ext(tr, p))
        assert np.allclose(w, np.sort(2.5 * m_matrix(p)[1]))


@pytest.mark.parametrize("n", [8, 16])
@pytest.mark.parametrize("s", [1, 2, 4])
def test_trace_identity(n, s):
    c = build_circle(n)
    for p in PARAMS[:3]:
        rep = trace_identity_check(c, p, s)
        assert rep.passed and rep.lhs <= 1e-10 * max(1, rep.context["trace_formula"])
        assert rep.context["zero_modes_skipped"] == 1


def test_trace_identity_empty_q_part():
    tr = TruncatedTriple([1.0, 2.0, 3.0], [True, True, True], allow_full=True)
    rep = trace_identity_check(tr, Params(1, 1), 2)
    assert rep.passed and rep.context["zero_modes_skipped"] == 0
    m_sum = np.sum(np.abs(m_matrix(Params(1, 1))[1]) ** -2.0)
    assert rep.context["trace_formula"] == pytest.approx(m_sum * (1 + 1 / 4 + 1 / 9))


def test_scaling_identity_examples():
    c8 = build_circle(8)
    assert scaling_identity_check(c8, Params(1, 1), Params(1, 1)).lhs == 0.0
    assert scaling_identity_check(c8, Params(1, 1), Params(0.5, 1)).passed


def test_offdiag_blocks_uniformly_bounded():
    coeffs = {1: 0.5, -1: 0.5, 2: 0.25j, -2: -0.25j, 3: 0.1, -3: 0.1}
    bound = sum(abs(m) * abs(c) for m, c in coeffs.items())
    norms = []
    for n in (8, 16, 32, 64):
        c = build_circle(n, degree=3)
        a = c.fourier_symbol(coeffs)
        p = np.diag(c.p_mask.astype(float))
        d = np.diag(c.dirac)
        q = np.eye(c.dim_h) - p
        norms.append(max(np.linalg.norm(d @ p @ a @ q, 2), np.linalg.norm(d @ q @ a @ p, 2)))
    assert all(b >= a - 1e-12 for a, b in zip(norms, norms[1:]))
    assert max(norms) <= bound
