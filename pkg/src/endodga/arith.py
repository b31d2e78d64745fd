"""Exact p-local arithmetic at finite precision.

Elements of Z_(p) are stored as residues modulo p^M.  Elements of Q with a
p-power denominator are stored as ``mantissa / p^e`` where the mantissa is
reduced modulo ``p^(M+e)``, so every rational value is known modulo
``p^M Z_(p)`` -- the same absolute precision as the integral values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering

from .errors import ConfigError, PrecisionExhausted

#: Extra room above M allowed for denominators of rational values.
FRACTION_HEADROOM = 8


@total_ordering
class _Top:
    """Valuation of an exact zero residue: at least M, nothing more is known."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __eq__(self, other) -> bool:
        return other is self

    def __lt__(self, other) -> bool:
        return False

    def __hash__(self) -> int:
        return hash("TOP")


TOP = _Top()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def nu(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def int_valuation(x: int, p: int, cap: int):
    """Valuation of ``x`` modulo ``p^cap``; ``TOP`` if ``x`` vanishes there."""
    x %= p**cap
    if x == 0:
        return TOP
    return nu(x, p)


def multiplicative_order(a: int, modulus: int) -> int:
    if modulus == 1:
        return 1
    a %= modulus
    x, k = a, 1
    while x != 1:
        if x == 0 or k > modulus:
            raise ValueError(f"{a} is not a unit modulo {modulus}")
        x = x * a % modulus
        k += 1
    return k


def adams_unit(p: int) -> int:
    """Smallest positive integer generating (Z/p^2)^x."""
    if p % 2 == 0 or not is_prime(p):
        raise ConfigError(f"p must be an odd prime, got {p}")
    target = (p - 1) * p
    for r in range(2, p * p):
        if r % p and multiplicative_order(r, p * p) == target:
            return r
    raise AssertionError("cyclic group without generator")  # pragma: no cover


def s_tilde(m: int) -> int:
    if m < 0:
        raise ValueError("s_tilde is defined for m >= 0")
    return m // 2 if m % 2 == 0 else (1 - m) // 2


def s(m: int) -> int:
    if m < 1:
        raise ValueError("s is defined for m >= 1")
    return s_tilde(m + 1)


@dataclass(frozen=True)
class Context:
    """Global parameters shared by all values.

    ``reduced=True`` relaxes the length requirement to a nonempty trusted
    window; it exists for the small dense-matrix cross checks.
    """

    p: int
    M: int = 3
    N: int | None = None
    r: int | None = None
    exact_scalars: bool = False
    reduced: bool = False
    modulus: int = field(init=False, repr=False)
    period: int = field(init=False, repr=False)

    def __post_init__(self):
        p, M = self.p, self.M
        if not isinstance(p, int) or p < 3 or p % 2 == 0 or not is_prime(p):
            raise ConfigError(f"p must be an odd prime >= 3, got {p!r}")
        if not isinstance(M, int) or M < 2:
            raise ConfigError(f"precision M must be >= 2, got {M!r}")
        if p**M >= 2**31:
            raise ConfigError(f"p^M = {p**M} too large for int64 sequence arithmetic")
        period = (p - 1) * p ** (M - 1)
        object.__setattr__(self, "modulus", p**M)
        object.__setattr__(self, "period", period)
        if self.N is None:
            object.__setattr__(self, "N", default_length(p, M))
        minimum = 2 * period + 2 if self.reduced else 2 * period + 16
        if not isinstance(self.N, int) or self.N < minimum:
            raise ConfigError(f"length N must be >= {minimum} for p={p}, M={M}; got {self.N!r}")
        if self.r is None:
            object.__setattr__(self, "r", adams_unit(p))
        r = self.r
        if not isinstance(r, int) or r % p == 0 or multiplicative_order(r, p * p) != (p - 1) * p:
            raise ConfigError(f"r={r!r} does not generate (Z/{p}^2)^x")
        # a generator mod p^2 generates mod p^M for odd p; re-check anyway
        if pow(r, period, p**M) != 1 or any(
            pow(r, period // q, p**M) == 1 for q in _prime_factors(period)
        ):
            raise ConfigError(f"r={r} does not have order {period} modulo {p}^{M}")

    def padic(self, value: int) -> "PadicInt":
        return PadicInt(value % self.modulus, self)

    def fraction(self, numerator: int, exponent: int = 0) -> "PadicFraction":
        return PadicFraction.make(self, numerator, exponent)

    @property
    def pivot_gap(self) -> int:
        """Least index l >= 1 with (p-1)p^(M-1) | s(l); pivots recur with this spacing + 1."""
        return 2 * self.period - 1

    @property
    def trusted_limit(self) -> int:
        """Sequences supported strictly below this index admit exact answers."""
        return self.N - self.pivot_gap

    def pivots(self) -> list[int]:
        """All indices l < N with r^(s(l)) == 1 mod p^M."""
        return [l for l in range(1, self.N) if s(l) % self.period == 0]

    def key(self) -> dict:
        return {"p": self.p, "precision": self.M, "length": self.N, "unit": self.r}


def default_length(p: int, M: int) -> int:
    return 2 * (p - 1) * p ** (M - 1) + 64


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PadicInt:
    residue: int
    ctx: Context = field(repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.residue < self.ctx.modulus:
            object.__setattr__(self, "residue", self.residue % self.ctx.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, PadicInt):
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt((self.residue + o) % self.ctx.modulus, self.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt((self.residue - o) % self.ctx.modulus, self.ctx)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt((o - self.residue) % self.ctx.modulus, self.ctx)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.residue * o % self.ctx.modulus, self.ctx)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(-self.residue % self.ctx.modulus, self.ctx)

    def __eq__(self, other) -> bool:
        if isinstance(other, PadicInt):
            return self.residue == other.residue and self.ctx.modulus == other.ctx.modulus
        if isinstance(other, int):
            return self.residue == other % self.ctx.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.residue, self.ctx.modulus))

    def __int__(self) -> int:
        return self.residue

    def __bool__(self) -> bool:
        return self.residue != 0

    def valuation(self):
        return valuation(self)

    def is_unit(self) -> bool:
        return self.residue % self.ctx.p != 0

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.residue} is not a unit mod {self.ctx.p}")
        return PadicInt(pow(self.residue, -1, self.ctx.modulus), self.ctx)

    def divide_by_p_power(self, e: int) -> "PadicInt":
        """Some y with p^e * y == self; the top e digits of y are chosen zero."""
        if e == 0:
            return self
        if e >= self.ctx.M:
            raise PrecisionExhausted(f"division by p^{e} at precision M={self.ctx.M}")
        v = valuation(self)
        if v is not TOP and v < e:
            raise ArithmeticError(f"{self.residue} is not divisible by {self.ctx.p}^{e}")
        return PadicInt(self.residue // self.ctx.p**e, self.ctx)


def valuation(x: PadicInt):
    """Exact p-adic valuation of the residue, or ``TOP`` for zero."""
    return int_valuation(x.residue, x.ctx.p, x.ctx.M)


def rpow(ctx: Context, e: int) -> PadicInt:
    return PadicInt(pow(ctx.r, e, ctx.modulus), ctx)


def twist_valuation(ctx: Context, k: int) -> int:
    """nu(k) + 1: the p-adic valuation of r^(k(p-1)) - 1 for k != 0."""
    if k == 0:
        raise ValueError("twist 0 has no finite valuation")
    return nu(k, ctx.p) + 1


def check_twist_precision(ctx: Context, k: int) -> int:
    v = twist_valuation(ctx, k)
    if v >= ctx.M:
        raise PrecisionExhausted(f"nu({k})+1 = {v} needs precision M > {v}, have M={ctx.M}")
    return v


@dataclass(frozen=True)
class PadicFraction:
    """``mantissa / p^exponent`` known modulo ``p^M Z_(p)``.

    Canonical: zero is (0, 0); otherwise either exponent 0 (an element of
    Z_(p)) or a unit mantissa reduced modulo ``p^(M+exponent)``.
    """

    mantissa: int
    exponent: int
    ctx: Context = field(repr=False, compare=False)

    @classmethod
    def make(cls, ctx: Context, numerator: int, exponent: int = 0) -> "PadicFraction":
        if exponent < 0:
            numerator *= ctx.p ** (-exponent)
            exponent = 0
        p = ctx.p
        numerator %= p ** (ctx.M + exponent)
        while exponent > 0 and numerator % p == 0:
            numerator //= p
            exponent -= 1
        if numerator == 0:
            exponent = 0
        if exponent > ctx.M + FRACTION_HEADROOM:
            raise PrecisionExhausted(
                f"denominator p^{exponent} exceeds the cap p^{ctx.M + FRACTION_HEADROOM}"
            )
        return cls(numerator % p ** (ctx.M + exponent), exponent, ctx)

    @classmethod
    def from_int(cls, x: PadicInt) -> "PadicFraction":
        return cls.make(x.ctx, x.residue, 0)

    def _lift(self, e: int) -> int:
        """Numerator over p^e for e >= self.exponent."""
        return self.mantissa * self.ctx.p ** (e - self.exponent)

    def __add__(self, other: "PadicFraction") -> "PadicFraction":
        if not isinstance(other, PadicFraction):
            return NotImplemented
        e = max(self.exponent, other.exponent)
        return PadicFraction.make(self.ctx, self._lift(e) + other._lift(e), e)

    def __neg__(self) -> "PadicFraction":
        return PadicFraction.make(self.ctx, -self.mantissa, self.exponent)

    def __sub__(self, other: "PadicFraction") -> "PadicFraction":
        return self + (-other)

    def scale(self, factor: int) -> "PadicFraction":
        """Multiply by an exact integer."""
        return PadicFraction.make(self.ctx, self.mantissa * factor, self.exponent)

    def divide_by_p_power(self, e: int) -> "PadicFraction":
        return PadicFraction.make(self.ctx, self.mantissa, self.exponent + e)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def is_integral(self) -> bool:
        return self.exponent == 0

    def mod_local(self) -> "PadicFraction":
        """Canonical representative of the class in Q/Z_(p)."""
        if self.exponent == 0:
            return PadicFraction(0, 0, self.ctx)
        e = self.exponent
        return PadicFraction.make(self.ctx, self.mantissa % self.ctx.p**e, e)

    def to_int(self) -> PadicInt:
        if self.exponent:
            raise ArithmeticError(f"{self} is not in Z_(p)")
        return self.ctx.padic(self.mantissa)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = PadicFraction.make(self.ctx, other)
        if not isinstance(other, PadicFraction):
            return NotImplemented
        return (self.mantissa, self.exponent) == (other.mantissa, other.exponent)

    def __hash__(self) -> int:
        return hash((self.mantissa, self.exponent))

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.mantissa)
        return f"{self.mantissa}/{self.ctx.p}^{self.exponent}"

    def as_json(self) -> dict:
        return {"numerator": self.mantissa, "exponent": self.exponent}
