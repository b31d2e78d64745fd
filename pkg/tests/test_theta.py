from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from endodga.arith import TOP, Context, s_tilde
from endodga.errors import NegativeTwistExponent, PrecisionExhausted, TruncationOverflow
from endodga.theta import (
    ThetaSeq,
    mul_linear_factor,
    mul_theta1,
    n_exp,
    n_exp_exact,
    product_exponent,
    psi_post,
    psi_pre,
    psi_pre_rat,
    q_post,
    q_pre,
    random_product_pair,
    safe_support,
    seq_product,
    theta_scalar,
)


def evaluate(seq: ThetaSeq, x: int) -> int:
    """sum_m a_m Theta_m(x) mod p^M, straight from the product definition."""
    ctx = seq.ctx
    total, theta = 0, 1
    for m in range(ctx.N):
        if m:
            theta = theta * (x - pow(ctx.r, s_tilde(m), ctx.modulus)) % ctx.modulus
        total = (total + int(seq.coeffs[m]) * theta) % ctx.modulus
    return total


def random_seq(ctx: Context, twist: int, rng: np.random.Generator, support: int) -> ThetaSeq:
    arr = np.zeros(ctx.N, dtype=np.int64)
    arr[:support] = rng.integers(0, ctx.modulus, size=support)
    return ThetaSeq(twist, arr, ctx)


def test_psi_post_examples(ctx5):
    assert psi_post(ThetaSeq.from_list(ctx5, 1, [1, 2, 3])) == ThetaSeq.from_list(ctx5, 1, [5, 10, 15])
    assert psi_post(ThetaSeq.from_list(ctx5, 0, [4, 4])).is_zero()
    assert psi_post(ThetaSeq.from_list(ctx5, 5, [1])) == ThetaSeq.from_list(ctx5, 5, [25])
    with pytest.raises(PrecisionExhausted):
        psi_post(ThetaSeq.from_list(ctx5, 25, [1]))


def test_psi_pre_examples(ctx5):
    assert psi_pre(ThetaSeq.from_list(ctx5, 0, [1])) == ThetaSeq.from_list(ctx5, 0, [0, 1])
    assert psi_pre(ThetaSeq.from_list(ctx5, 0, [0, 1])) == ThetaSeq.from_list(ctx5, 0, [0, 1, 1])
    assert psi_pre(ThetaSeq.from_list(ctx5, 1, [1])) == ThetaSeq.from_list(ctx5, 1, [5, 1])


def test_q_maps_examples(ctx5):
    assert q_post(ThetaSeq.from_list(ctx5, 0, [3, 7, 1])) == 3
    assert q_post(ThetaSeq.from_list(ctx5, 2, [3, 7, 1])) == 0
    assert q_post(ThetaSeq.zero(ctx5, 0)) == 0
    for x in (ctx5.fraction(1), ctx5.fraction(0), ctx5.fraction(7, 2)):
        assert q_pre(x) == x


def test_psi_pre_rat_examples(ctx5):
    assert psi_pre_rat(ctx5.fraction(9), 0) == 0
    assert psi_pre_rat(ctx5.fraction(1, 2), 1) == ctx5.fraction(1, 1)
    assert psi_pre_rat(ctx5.fraction(3), 5) == 75


def test_theta_scalar_examples(ctx5):
    for i in (-3, 0, 7):
        assert theta_scalar(ctx5, i, 0) == 1 and n_exp(ctx5, i, 0) == 0
    assert theta_scalar(ctx5, 1, 1) == 15 and n_exp(ctx5, 1, 1) == 1
    assert theta_scalar(ctx5, 0, 1) == 0 and n_exp(ctx5, 0, 1) is TOP
    assert 2**4 - 2**0 == 15


@pytest.mark.parametrize("p", [3, 5, 7])
def test_exact_exponent_agrees_with_residue_valuation(p):
    ctx = Context(p)
    for i in range(-6, 7):
        for m in range(0, 12):
            exact = n_exp_exact(ctx, i, m)
            mod = n_exp(ctx, i, m)
            if exact == math.inf or exact >= ctx.M:
                assert mod is TOP
            else:
                assert mod == exact


def test_mul_theta1_examples(ctx5):
    assert mul_theta1(ThetaSeq.from_list(ctx5, 0, [1])) == ThetaSeq.from_list(ctx5, 0, [0, 1])
    assert mul_theta1(ThetaSeq.zero(ctx5, 0)).is_zero()
    assert mul_linear_factor(ThetaSeq.from_list(ctx5, 0, [1]), 0) == ThetaSeq.from_list(ctx5, 0, [0, 1])


@pytest.mark.parametrize("m", [0, 1, 2, 5, 17, 40])
def test_linear_factors_build_basis_sequence(ctx5, m):
    acc = ThetaSeq.basis(ctx5, 0, 0)
    for j in range(1, m + 1):
        acc = mul_linear_factor(acc, s_tilde(j))
    assert acc == ThetaSeq.basis(ctx5, 0, m)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_structure_maps_agree_with_polynomial_evaluation(p):
    ctx = Context(p)
    rng = np.random.default_rng(p)
    for k in (0, 1, -2):
        c = 0 if k == 0 else p ** (1 + (k % p == 0))
        a = random_seq(ctx, k, rng, 30)
        b = psi_pre(a)
        for x in rng.integers(0, ctx.modulus, size=4):
            x = int(x)
            assert evaluate(b, x) == (x - 1 + c) * evaluate(a, x) % ctx.modulus
        c_shift = int(rng.integers(-5, 6))
        m = mul_linear_factor(a, c_shift)
        for x in rng.integers(0, ctx.modulus, size=4):
            x = int(x)
            want = (x - pow(ctx.r, c_shift, ctx.modulus)) * evaluate(a, x) % ctx.modulus
            assert evaluate(m, x) == want


@pytest.mark.parametrize("p, k", [(5, 1), (5, -3), (5, 5), (7, 2), (3, 1)])
def test_psi_maps_commute(p, k):
    ctx = Context(p)
    rng = np.random.default_rng(k + 100)
    for _ in range(200):
        a = random_seq(ctx, k, rng, ctx.N)
        assert psi_pre(psi_post(a)) == psi_post(psi_pre(a))


def test_psi_pre_agrees_with_theta1_at_twist_zero(ctx5):
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = random_seq(ctx5, 0, rng, ctx5.N)
        assert psi_pre(a) == mul_theta1(a)
        assert q_post(psi_pre(a)) == 0


def test_seq_product_examples(ctx5):
    out = seq_product(ThetaSeq.from_list(ctx5, 1, [2]), ThetaSeq.from_list(ctx5, -1, [3]))
    assert out[0] == 6 and out.twist == 0
    a = ThetaSeq.from_list(ctx5, 2, [1, 2, 3])
    assert seq_product(a, ThetaSeq.zero(ctx5, 0)).is_zero()
    unit = ThetaSeq.from_list(ctx5, 0, [1])
    assert seq_product(unit, ThetaSeq.from_list(ctx5, 0, [0, 1])) == ThetaSeq.from_list(ctx5, 0, [0, 1])


def test_seq_product_twist_zero_matches_evaluation(ctx5):
    rng = np.random.default_rng(8)
    for _ in range(5):
        a = random_seq(ctx5, 0, rng, 12)
        b = random_seq(ctx5, 0, rng, 12)
        prod = seq_product(a, b)
        for x in rng.integers(0, ctx5.modulus, size=4):
            x = int(x)
            assert evaluate(prod, x) == evaluate(a, x) * evaluate(b, x) % ctx5.modulus


def test_seq_product_twist_zero_commutative_and_associative(ctx5):
    rng = np.random.default_rng(9)
    quarter = ctx5.N // 4
    for _ in range(4):
        a, b, c = (random_seq(ctx5, 0, rng, quarter // 2) for _ in range(3))
        assert seq_product(a, b) == seq_product(b, a)
        assert seq_product(seq_product(a, b), c) == seq_product(a, seq_product(b, c))


def test_seq_product_errors(ctx5):
    far = ThetaSeq.basis(ctx5, 0, ctx5.N - 2)
    with pytest.raises(TruncationOverflow):
        seq_product(far, ThetaSeq.basis(ctx5, 0, 5))
    with pytest.raises(NegativeTwistExponent):
        product_exponent(ctx5, 1, 0, 1, 4)  # i = 5 lowers the valuation of Theta_1
    with pytest.raises(NegativeTwistExponent):
        seq_product(ThetaSeq.basis(ctx5, 1, 1), ThetaSeq.basis(ctx5, 0, 4))


def test_safe_support(ctx5):
    assert safe_support(ctx5, 0, 0) == ctx5.N // 2
    s = safe_support(ctx5, 1, -1)
    assert s >= 1
    for m in range(s):
        for n in range(s):
            assert product_exponent(ctx5, 1, -1, m, n) >= 0


@given(k=st.sampled_from([0, 1, 2, -1, 3]), seed=st.integers(0, 2**32 - 1))
def test_index_zero_multiplicativity(k, seed):
    ctx = Context(5)
    rng = np.random.default_rng(seed)
    a, b = random_product_pair(ctx, k, -k, rng)
    assert seq_product(a, b)[0] == a[0] * b[0]


def test_sequence_value_semantics(ctx5):
    a = ThetaSeq.from_list(ctx5, 1, [1, 2])
    b = ThetaSeq.from_list(ctx5, 1, [1, 2, 0, 0])
    assert a == b and hash(a) == hash(b)
    assert a != ThetaSeq.from_list(ctx5, 2, [1, 2])
    assert (a - a).is_zero() and (-a + a).is_zero()
    assert a.scale(126) == a
    with pytest.raises(ValueError):
        a + ThetaSeq.from_list(ctx5, 2, [1])
    with pytest.raises(TruncationOverflow):
        ThetaSeq.from_list(ctx5, 0, [1] * (ctx5.N + 1))
    with pytest.raises(ValueError):
        a.coeffs[0] = 3
