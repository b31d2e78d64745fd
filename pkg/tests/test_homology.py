from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from endodga.arith import Context, nu
from endodga.cochain import Cochain, degree_of, differential, window
from endodga.errors import PrecisionExhausted, UntrustedSupport
from endodga.homology import (
    HomologyClass,
    NotBoundary,
    boundary_witness,
    class_of,
    class_order,
    full_support_cycle,
    homology_group,
    is_cycle,
    random_cycle,
    second_sequence_defects,
)
from endodga.theta import ThetaSeq


def test_is_cycle_examples(ctx5):
    assert is_cycle(Cochain.of(ctx5, 9, [3, 1, 4], 0))
    assert is_cycle(Cochain.of(ctx5, 0, [2, 7], [], 0))
    assert not is_cycle(Cochain.of(ctx5, 0, [], [1], 0))


def test_boundary_witness_examples(ctx5):
    target = Cochain.of(ctx5, 9, [5], 0)
    w = boundary_witness(target)
    assert isinstance(w, Cochain) and differential(w) == target
    nb = boundary_witness(Cochain.of(ctx5, 9, [1], 0))
    assert isinstance(nb, NotBoundary) and nb.reason == "divisibility" and not nb
    x = Cochain.of(ctx5, 0, [0, 3, 1], [], 0)
    w = boundary_witness(x)
    assert isinstance(w, Cochain) and differential(w) == x
    assert boundary_witness(Cochain.of(ctx5, 0, [], [1], 0)).reason == "not a cycle"


def test_class_of_examples(ctx5):
    assert class_of(Cochain.of(ctx5, 0, [7, 1], [], 0)) == HomologyClass(0, "local", ctx5.padic(7))
    c = class_of(Cochain.of(ctx5, 41, [5], 0))
    assert (c.kind, c.value, c.exponent) == ("cyclic", 5, 2)
    c = class_of(Cochain.of(ctx5, 2, (1, 1)))
    assert c.value == ctx5.fraction(1, 1)


def test_class_order_examples(ctx5):
    assert class_order(HomologyClass(9, "cyclic", 1, 1, ctx5)) == 5
    assert class_order(HomologyClass(41, "cyclic", 5, 2, ctx5)) == 5
    assert class_order(HomologyClass(0, "local", ctx5.padic(7), 0, ctx5)) == math.inf
    assert class_order(HomologyClass(2, "rational", ctx5.fraction(3, 2), 0, ctx5)) == 25


@pytest.mark.parametrize(
    "n, kind, exponent",
    [(0, "FreeLocalRankOne", 0), (-1, "Zero", 0), (1, "Zero", 0), (2, "RationalsModLocal", 0),
     (9, "CyclicPPower", 1), (41, "CyclicPPower", 2), (3, "Zero", 0), (8, "Zero", 0), (-7, "CyclicPPower", 1)],
)
def test_homology_group_examples(ctx5, n, kind, exponent):
    g = homology_group(ctx5, n)
    assert g.kind == kind and g.exponent == exponent
    assert g.certified, [c for c in g.certificate if not c["ok"]]


def test_homology_group_beyond_precision(ctx5):
    with pytest.raises(PrecisionExhausted):
        homology_group(ctx5, degree_of(ctx5, 25, 1))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_witnesses_for_random_boundaries(p):
    ctx = Context(p)
    rng = np.random.default_rng(p)
    for k in (-2, 0, 1, p):
        for n in window(ctx, k).degrees:
            for _ in range(25):
                x = differential(Cochain.random(ctx, n - 1, rng, support=ctx.trusted_limit - 1))
                w = boundary_witness(x)
                assert isinstance(w, Cochain) and differential(w) == x


@pytest.mark.parametrize("p", [5, 7])
def test_boundary_criterion_both_directions(p):
    ctx = Context(p)
    rng = np.random.default_rng(1)
    for k in (1, -1, 2, p, -p):
        v = nu(k, p) + 1
        n = degree_of(ctx, k, 1)
        for _ in range(40):
            x = random_cycle(ctx, n, rng)
            divisible = int(x.components[0].coeffs[0]) % p**v == 0
            assert isinstance(boundary_witness(x), Cochain) == divisible
            arr = x.components[0].coeffs.copy()
            arr[0] = p**v * int(rng.integers(0, p**ctx.M))
            forced = Cochain(ctx, n, (ThetaSeq(k, arr, ctx), ctx.fraction(0)))
            assert isinstance(boundary_witness(forced), Cochain)


@pytest.mark.parametrize("k", [1, -3, 5])
def test_generator_order(ctx5, k):
    v = nu(k, 5) + 1
    n = degree_of(ctx5, k, 1)
    gen = Cochain.basis(ctx5, n, 0, 0)
    assert class_order(class_of(gen)) == 5**v
    assert isinstance(boundary_witness(gen.scale(5 ** (v - 1))), NotBoundary)
    assert isinstance(boundary_witness(gen.scale(5**v)), Cochain)


@pytest.mark.parametrize("k", [1, 2, 5, -5])
def test_second_sequence_divisibility(ctx5, k):
    rng = np.random.default_rng(k + 50)
    for _ in range(30):
        x = full_support_cycle(ctx5, k, rng)
        assert is_cycle(x)
        assert second_sequence_defects(x) == []


def test_divisibility_fails_past_last_pivot(ctx5):
    """The truncation really bites: b near N is generally not divisible."""
    rng = np.random.default_rng(0)
    v = 1
    hits = 0
    for _ in range(10):
        x = full_support_cycle(ctx5, 1, rng)
        b = x.components[1].coeffs
        hits += int(np.any(b[ctx5.pivots()[-1]:] % 5**v))
    assert hits > 0


@given(seed=st.integers(0, 2**32 - 1), k=st.sampled_from([0, 1, -2, 5]), pos=st.sampled_from([0, 1, 2]))
def test_class_map_additive_and_kills_boundaries(seed, k, pos):
    ctx = Context(5)
    rng = np.random.default_rng(seed)
    n = degree_of(ctx, k, pos)
    x, y = random_cycle(ctx, n, rng, support=40), random_cycle(ctx, n, rng, support=40)
    assert class_of(x + y) == class_of(x) + class_of(y)
    bd = differential(Cochain.random(ctx, n - 1, rng, support=40))
    assert class_of(x + bd) == class_of(x)
    assert class_of(bd).is_zero()
    assert class_of(x).is_zero() == isinstance(boundary_witness(x), Cochain)


def test_precision_only_cycles(ctx5):
    rng = np.random.default_rng(2)
    x = random_cycle(ctx5, 8, rng, precision_noise=True)
    while int(x.components[0].coeffs[0]) == int(x.components[1].coeffs[0]):
        x = random_cycle(ctx5, 8, rng, precision_noise=True)
    assert is_cycle(x)
    assert boundary_witness(x).reason == "precision"
    with pytest.raises(PrecisionExhausted):
        class_of(x)
    y = Cochain.of(ctx5, 9, [], 25)
    assert is_cycle(y) and boundary_witness(y).reason == "precision"


def test_untrusted_support(ctx5):
    far = Cochain.basis(ctx5, 0, 0, ctx5.trusted_limit + 3)
    with pytest.raises(UntrustedSupport):
        boundary_witness(far)
    with pytest.raises(UntrustedSupport):
        class_of(far)


def test_h2_membership(ctx5):
    for e in range(0, 4):
        x = Cochain.of(ctx5, 2, (7, e))
        assert isinstance(boundary_witness(x), Cochain) == (e == 0)
    for e in range(0, 4):
        x = Cochain.of(ctx5, 10, (7, e))
        w = boundary_witness(x)
        assert isinstance(w, Cochain) and differential(w) == x
