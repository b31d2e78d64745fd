"""Sequences in the Theta basis and the structure maps acting on them.

A :class:`ThetaSeq` at twist ``k`` holds the coefficients ``a_0 .. a_{N-1}``
of ``sum_m a_m Theta_m(Psi^r)`` where

    Theta_m = (Psi^r - r^s~(1)) (Psi^r - r^s~(2)) ... (Psi^r - r^s~(m)).

Every structure map below is lower triangular (output index ``m`` only reads
input indices ``<= m``), so truncation at ``N`` is exact.  Only
:func:`seq_product` can push mass past the end, and it refuses to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import (
    Context,
    PadicFraction,
    PadicInt,
    check_twist_precision,
    int_valuation,
    nu,
    rpow,
    s_tilde,
)
from .errors import NegativeTwistExponent, TruncationOverflow


@dataclass(frozen=True, eq=False)
class ThetaSeq:
    twist: int
    coeffs: np.ndarray
    ctx: Context = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.int64) % self.ctx.modulus
        if arr.shape != (self.ctx.N,):
            raise ValueError(f"expected {self.ctx.N} coefficients, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zero(cls, ctx: Context, twist: int) -> "ThetaSeq":
        return cls(twist, np.zeros(ctx.N, dtype=np.int64), ctx)

    @classmethod
    def from_list(cls, ctx: Context, twist: int, values) -> "ThetaSeq":
        arr = np.zeros(ctx.N, dtype=np.int64)
        values = [int(v) % ctx.modulus for v in values]
        if len(values) > ctx.N:
            raise TruncationOverflow(f"{len(values)} coefficients exceed N={ctx.N}")
        arr[: len(values)] = values
        return cls(twist, arr, ctx)

    @classmethod
    def basis(cls, ctx: Context, twist: int, m: int, scale: int = 1) -> "ThetaSeq":
        arr = np.zeros(ctx.N, dtype=np.int64)
        arr[m] = scale % ctx.modulus
        return cls(twist, arr, ctx)

    def __getitem__(self, m: int) -> PadicInt:
        return PadicInt(int(self.coeffs[m]), self.ctx)

    def __len__(self) -> int:
        return self.ctx.N

    def _check(self, other: "ThetaSeq") -> None:
        if other.twist != self.twist:
            raise ValueError(f"twist mismatch: {self.twist} vs {other.twist}")

    def __add__(self, other: "ThetaSeq") -> "ThetaSeq":
        self._check(other)
        return ThetaSeq(self.twist, self.coeffs + other.coeffs, self.ctx)

    def __sub__(self, other: "ThetaSeq") -> "ThetaSeq":
        self._check(other)
        return ThetaSeq(self.twist, self.coeffs - other.coeffs, self.ctx)

    def __neg__(self) -> "ThetaSeq":
        return ThetaSeq(self.twist, -self.coeffs, self.ctx)

    def scale(self, x) -> "ThetaSeq":
        return ThetaSeq(self.twist, self.coeffs * (int(x) % self.ctx.modulus), self.ctx)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThetaSeq):
            return NotImplemented
        return self.twist == other.twist and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.twist, self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def support_end(self) -> int:
        """One past the largest index with a nonzero coefficient (0 for zero)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) + 1 if nz.size else 0

    def tolist(self) -> list[int]:
        return [int(v) for v in self.coeffs]

    def __repr__(self) -> str:
        end = max(self.support_end(), 1)
        head = ", ".join(str(int(v)) for v in self.coeffs[: min(end, 8)])
        tail = ", ..." if end > 8 else ""
        return f"ThetaSeq(@{self.twist}: <{head}{tail}>)"


@lru_cache(maxsize=64)
def _nodes(ctx: Context) -> np.ndarray:
    """node[m] = r^s~(m+1) mod p^M, so node[m] = r^s(m) for m >= 1."""
    out = np.array([pow(ctx.r, s_tilde(m + 1), ctx.modulus) for m in range(ctx.N)], dtype=np.int64)
    out.flags.writeable = False
    return out


def twist_scalar(ctx: Context, k: int, modulus: int | None = None) -> int:
    """The constant by which Psi_* acts at twist ``k``.

    ``p^(nu(k)+1)`` by default; ``r^(k(p-1)) - 1`` itself when the context
    asks for exact scalars.  Zero at twist 0.
    """
    if k == 0:
        return 0
    modulus = modulus or ctx.modulus
    if ctx.exact_scalars:
        return (pow(ctx.r, k * (ctx.p - 1), modulus) - 1) % modulus
    return ctx.p ** (nu(k, ctx.p) + 1) % modulus


def psi_post(a: ThetaSeq) -> ThetaSeq:
    if a.twist == 0:
        return ThetaSeq.zero(a.ctx, 0)
    check_twist_precision(a.ctx, a.twist)
    return a.scale(twist_scalar(a.ctx, a.twist))


def psi_pre(a: ThetaSeq) -> ThetaSeq:
    ctx = a.ctx
    c = twist_scalar(ctx, a.twist)
    coef = (_nodes(ctx) - 1 + c) % ctx.modulus
    out = a.coeffs * coef
    out[1:] += a.coeffs[:-1]
    out[0] = c * a.coeffs[0]
    return ThetaSeq(a.twist, out, ctx)


def mul_linear_factor(a: ThetaSeq, c: int) -> ThetaSeq:
    """Multiply by (Psi^r - r^c) in the Theta basis."""
    ctx = a.ctx
    coef = (_nodes(ctx) - int(rpow(ctx, c))) % ctx.modulus
    out = a.coeffs * coef
    out[1:] += a.coeffs[:-1]
    return ThetaSeq(a.twist, out, ctx)


def mul_theta1(a: ThetaSeq) -> ThetaSeq:
    return mul_linear_factor(a, 0)


def q_post(a: ThetaSeq) -> PadicFraction:
    if a.twist != 0:
        return PadicFraction.make(a.ctx, 0)
    return PadicFraction.make(a.ctx, int(a.coeffs[0]))


def q_pre(x: PadicFraction) -> PadicFraction:
    return x


def psi_pre_rat(x: PadicFraction, k: int) -> PadicFraction:
    ctx = x.ctx
    if k == 0:
        return PadicFraction.make(ctx, 0)
    return x.scale(twist_scalar(ctx, k, ctx.p ** (ctx.M + x.exponent)))


def theta_scalar(ctx: Context, i: int, m: int) -> PadicInt:
    """Theta_m evaluated at Psi^r -> r^(i(p-1)), modulo p^M."""
    if not 0 <= m < ctx.N:
        raise ValueError(f"m={m} outside 0..{ctx.N - 1}")
    x = pow(ctx.r, i * (ctx.p - 1), ctx.modulus)
    prod = 1
    for j in range(1, m + 1):
        prod = prod * (x - pow(ctx.r, s_tilde(j), ctx.modulus)) % ctx.modulus
    return PadicInt(prod, ctx)


def n_exp(ctx: Context, i: int, m: int):
    return int_valuation(int(theta_scalar(ctx, i, m)), ctx.p, ctx.M)


def n_exp_exact(ctx: Context, i: int, m: int) -> float:
    """Exact valuation of Theta_m(r^(i(p-1))) over Z_(p); ``math.inf`` if it vanishes.

    Uses nu(r^d - 1) = 0 if (p-1) does not divide d, else nu(d/(p-1)) + 1,
    valid for any generator r of (Z/p^2)^x.
    """
    p = ctx.p
    total = 0
    for j in range(1, m + 1):
        d = i * (p - 1) - s_tilde(j)
        if d == 0:
            return math.inf
        if d % (p - 1) == 0:
            total += nu(d // (p - 1), p) + 1
    return total


def _exponent_shift(ctx: Context, i: int, twist: int, m: int) -> float:
    """N(i+twist, m) - N(i, m), taken as 0 at twist 0 and for m = 0."""
    if twist == 0 or m == 0:
        return 0
    den = n_exp_exact(ctx, i, m)
    if den == math.inf:
        raise NegativeTwistExponent(f"N({i},{m}) is infinite; the product coefficient is undefined")
    return n_exp_exact(ctx, i + twist, m) - den


def product_exponent(ctx: Context, k: int, l: int, m: int, n: int) -> float:
    """Power of p attached to a_m b_n Theta_m Theta_n in a product at twists (k, l)."""
    i = m + n
    e = _exponent_shift(ctx, i, k, m) + _exponent_shift(ctx, i, l, n)
    if e < 0:
        raise NegativeTwistExponent(
            f"exponent {e} < 0 for (m, n) = ({m}, {n}) at twists ({k}, {l})"
        )
    return e


def seq_product(a: ThetaSeq, b: ThetaSeq) -> ThetaSeq:
    ctx = a.ctx
    ma = np.flatnonzero(a.coeffs)
    nb = np.flatnonzero(b.coeffs)
    out = np.zeros(ctx.N, dtype=np.int64)
    if ma.size == 0 or nb.size == 0:
        return ThetaSeq(a.twist + b.twist, out, ctx)
    if ma[-1] + nb[-1] >= ctx.N:
        raise TruncationOverflow(
            f"Theta_{ma[-1]} * Theta_{nb[-1]} needs index {ma[-1] + nb[-1]} >= N={ctx.N}"
        )
    top = int(ma[-1])
    a_set = set(int(m) for m in ma)
    for n in nb:
        n = int(n)
        # acc = Theta_n * Theta_m, built up one linear factor at a time
        acc = ThetaSeq.basis(ctx, 0, n)
        for m in range(top + 1):
            if m:
                acc = mul_linear_factor(acc, s_tilde(m))
            if m not in a_set:
                continue
            e = product_exponent(ctx, a.twist, b.twist, m, n)
            if e == math.inf or e >= ctx.M:
                continue
            weight = int(a.coeffs[m]) * int(b.coeffs[n]) * ctx.p ** int(e) % ctx.modulus
            out = (out + weight * acc.coeffs) % ctx.modulus
    result = ThetaSeq(a.twist + b.twist, out, ctx)
    if int(out[0]) != int(a.coeffs[0]) * int(b.coeffs[0]) % ctx.modulus:
        raise AssertionError("index-zero coefficient of a product must be a_0 b_0")
    return result


def safe_support(ctx: Context, k: int, l: int, limit: int | None = None) -> int:
    """Largest S such that every pair (m, n) with m, n < S has a valid product exponent."""
    limit = limit if limit is not None else ctx.N // 2
    S = 0
    while S < limit:
        m = S
        try:
            for n in range(S + 1):
                product_exponent(ctx, k, l, m, n)
                product_exponent(ctx, k, l, n, m)
        except NegativeTwistExponent:
            break
        S += 1
    return S


def random_product_pair(
    ctx: Context, k: int, l: int, rng: np.random.Generator, span: int = 24, terms: int = 4
) -> tuple[ThetaSeq, ThetaSeq]:
    """Random a@k, b@l whose product is defined: every (m, n) in the supports has a valid exponent.

    Supports always contain index 0 and are drawn from ``0..span-1``.
    """
    span = min(span, ctx.N // 2)
    for _ in range(200):
        ms = {0} | {int(m) for m in rng.integers(0, span, size=int(rng.integers(0, terms)))}
        ns = {0} | {int(n) for n in rng.integers(0, span, size=int(rng.integers(0, terms)))}
        try:
            for m in ms:
                for n in ns:
                    product_exponent(ctx, k, l, m, n)
        except NegativeTwistExponent:
            continue
        break
    else:
        ms, ns = {0}, {0}

    def draw(twist: int, idx: set[int]) -> ThetaSeq:
        arr = np.zeros(ctx.N, dtype=np.int64)
        for m in idx:
            arr[m] = int(rng.integers(0, ctx.modulus))
        return ThetaSeq(twist, arr, ctx)

    return draw(k, ms), draw(l, ns)
