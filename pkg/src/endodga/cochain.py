"""Degree windows of the endomorphism complex and its differential.

Writing ``w = 2p - 2``, the complex is nonzero only in the four degrees
``wk - 1 .. wk + 2`` of each window ``k``:

    wk - 1 :  S
    wk     :  S + S        (S + S + Q when k = 0)
    wk + 1 :  S + Q
    wk + 2 :  Q

where S is a Theta-sequence at twist k and Q a rational value.  The
differential is taken from the condensed displays, signs included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .arith import Context, PadicFraction
from .errors import ShapeMismatch
from .theta import ThetaSeq, psi_post, psi_pre, psi_pre_rat, q_post, q_pre

Component = Union[ThetaSeq, PadicFraction]

SHAPES = {
    -1: ("S",),
    0: ("S", "S"),
    1: ("S", "Q"),
    2: ("Q",),
}


def window_width(ctx: Context) -> int:
    return 2 * ctx.p - 2


def locate(ctx: Context, n: int) -> tuple[int, int | None]:
    """(window k, position in -1..2) of degree n; position None for zero degrees."""
    w = window_width(ctx)
    k, pos = divmod(n, w)
    if pos == w - 1:
        return k + 1, -1
    if pos <= 2:
        return k, pos
    return k, None


def degree_of(ctx: Context, k: int, pos: int) -> int:
    return window_width(ctx) * k + pos


def shape(ctx: Context, n: int) -> tuple[str, ...]:
    k, pos = locate(ctx, n)
    if pos is None:
        return ()
    if pos == 0 and k == 0:
        return ("S", "S", "Q")
    return SHAPES[pos]


@dataclass(frozen=True)
class ComplexWindow:
    ctx: Context = field(repr=False)
    k: int
    degrees: tuple[int, ...]
    shapes: tuple[tuple[str, ...], ...]

    def zero(self, n: int) -> "Cochain":
        return Cochain.zero(self.ctx, n)


def window(ctx: Context, k: int) -> ComplexWindow:
    degrees = tuple(degree_of(ctx, k, pos) for pos in (-1, 0, 1, 2))
    return ComplexWindow(ctx, k, degrees, tuple(shape(ctx, n) for n in degrees))


@dataclass(frozen=True, eq=False)
class Cochain:
    ctx: Context = field(repr=False)
    degree: int
    components: tuple

    def __post_init__(self):
        want = shape(self.ctx, self.degree)
        k, _ = locate(self.ctx, self.degree)
        comps = tuple(self.components)
        if len(comps) != len(want):
            raise ShapeMismatch(f"degree {self.degree} expects {want}, got {len(comps)} components")
        for kind, comp in zip(want, comps):
            if kind == "S":
                if not isinstance(comp, ThetaSeq) or comp.twist != k:
                    raise ShapeMismatch(f"degree {self.degree} expects a sequence at twist {k}, got {comp!r}")
            elif not isinstance(comp, PadicFraction):
                raise ShapeMismatch(f"degree {self.degree} expects a rational component, got {comp!r}")
        object.__setattr__(self, "components", comps)

    @property
    def window(self) -> int:
        return locate(self.ctx, self.degree)[0]

    @property
    def position(self) -> int | None:
        return locate(self.ctx, self.degree)[1]

    @property
    def shape(self) -> tuple[str, ...]:
        return shape(self.ctx, self.degree)

    @classmethod
    def zero(cls, ctx: Context, n: int) -> "Cochain":
        k, _ = locate(ctx, n)
        comps = [ThetaSeq.zero(ctx, k) if kind == "S" else ctx.fraction(0) for kind in shape(ctx, n)]
        return cls(ctx, n, tuple(comps))

    @classmethod
    def of(cls, ctx: Context, n: int, *parts) -> "Cochain":
        """Build from loose parts: lists/arrays become sequences, ints or
        (numerator, exponent) pairs become rationals."""
        k, _ = locate(ctx, n)
        kinds = shape(ctx, n)
        if len(parts) != len(kinds):
            raise ShapeMismatch(f"degree {n} expects {kinds}")
        comps = []
        for kind, part in zip(kinds, parts):
            if kind == "S":
                comps.append(part if isinstance(part, ThetaSeq) else ThetaSeq.from_list(ctx, k, part))
            elif isinstance(part, PadicFraction):
                comps.append(part)
            elif isinstance(part, tuple):
                comps.append(ctx.fraction(*part))
            else:
                comps.append(ctx.fraction(int(part)))
        return cls(ctx, n, tuple(comps))

    @classmethod
    def basis(cls, ctx: Context, n: int, slot: int, index: int = 0) -> "Cochain":
        """Elementary cochain: e_index in sequence slot, or 1 in a rational slot."""
        z = cls.zero(ctx, n)
        comps = list(z.components)
        if isinstance(comps[slot], ThetaSeq):
            comps[slot] = ThetaSeq.basis(ctx, comps[slot].twist, index)
        else:
            comps[slot] = ctx.fraction(1)
        return cls(ctx, n, tuple(comps))

    @classmethod
    def random(
        cls,
        ctx: Context,
        n: int,
        rng: np.random.Generator,
        support: int | None = None,
        max_exponent: int | None = None,
    ) -> "Cochain":
        k, _ = locate(ctx, n)
        support = ctx.N if support is None else support
        max_exponent = ctx.M if max_exponent is None else max_exponent
        comps = []
        for kind in shape(ctx, n):
            if kind == "S":
                arr = np.zeros(ctx.N, dtype=np.int64)
                arr[:support] = rng.integers(0, ctx.modulus, size=support)
                comps.append(ThetaSeq(k, arr, ctx))
            else:
                e = int(rng.integers(0, max_exponent + 1))
                comps.append(ctx.fraction(int(rng.integers(0, ctx.p ** (ctx.M + e))), e))
        return cls(ctx, n, tuple(comps))

    def _zip(self, other: "Cochain"):
        if other.degree != self.degree:
            raise ShapeMismatch(f"degree mismatch: {self.degree} vs {other.degree}")
        return zip(self.components, other.components)

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.ctx, self.degree, tuple(x + y for x, y in self._zip(other)))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.ctx, self.degree, tuple(x - y for x, y in self._zip(other)))

    def __neg__(self) -> "Cochain":
        return Cochain(self.ctx, self.degree, tuple(-x for x in self.components))

    def scale(self, x) -> "Cochain":
        x = int(x)
        return Cochain(self.ctx, self.degree, tuple(c.scale(x) for c in self.components))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.degree == other.degree and all(x == y for x, y in self._zip(other))

    def __hash__(self) -> int:
        return hash((self.degree, self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def sequences(self) -> list[ThetaSeq]:
        return [c for c in self.components if isinstance(c, ThetaSeq)]

    def support_end(self) -> int:
        return max((c.support_end() for c in self.sequences()), default=0)

    def max_residue(self) -> int:
        """Largest stored residue or numerator; 0 exactly when the cochain is zero."""
        out = 0
        for c in self.components:
            if isinstance(c, ThetaSeq):
                out = max(out, int(c.coeffs.max(initial=0)))
            else:
                out = max(out, c.mantissa)
        return out

    def as_json(self) -> dict:
        comps = []
        for c in self.components:
            if isinstance(c, ThetaSeq):
                end = c.support_end()
                comps.append({"kind": "S", "twist": c.twist, "coeffs": c.tolist()[:end]})
            else:
                comps.append({"kind": "Q", **c.as_json()})
        return {"degree": self.degree, "components": comps}

    @classmethod
    def from_json(cls, ctx: Context, data: dict) -> "Cochain":
        parts = []
        for c in data["components"]:
            if c["kind"] == "S":
                parts.append(c["coeffs"])
            else:
                parts.append(ctx.fraction(c["numerator"], c["exponent"]))
        return cls.of(ctx, data["degree"], *parts)

    def __repr__(self) -> str:
        return f"Cochain(deg={self.degree}, {list(self.components)!r})"


def differential(x: Cochain) -> Cochain:
    if not isinstance(x, Cochain):
        raise ShapeMismatch(f"not a cochain: {x!r}")
    ctx, n = x.ctx, x.degree
    k, pos = locate(ctx, n)
    target = n + 1
    if pos is None or pos == 2:
        # the p = 3 map out of degree wk + 2 is zero as well
        return Cochain.zero(ctx, target)
    if pos == -1:
        (a,) = x.components
        out = [psi_pre(a), psi_post(a)]
        if k == 0:
            out.append(ctx.fraction(0))
        return Cochain(ctx, target, tuple(out))
    if pos == 0:
        a, b = x.components[:2]
        if k == 0:
            xq = x.components[2]
            rat = q_post(b) - q_pre(xq)
        else:
            rat = ctx.fraction(0)
        return Cochain(ctx, target, (psi_post(a) - psi_pre(b), rat))
    a, y = x.components
    return Cochain(ctx, target, (q_post(a) + psi_pre_rat(y, k),))


@dataclass
class VerificationReport:
    k: int
    samples: int
    seed: int
    max_residue: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(v == 0 for v in self.max_residue.values())


def verify_dd(ctx: Context, k: int, samples: int, seed: int) -> VerificationReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng([seed, k & 0xFFFFFFFF])
    report = VerificationReport(k, samples, seed)
    for n in window(ctx, k).degrees:
        worst = 0
        for t in range(samples):
            x = Cochain.random(ctx, n, rng)
            dd = differential(differential(x))
            res = dd.max_residue()
            if res:
                report.failures.append({"degree": n, "sample": t, "residue": res})
            worst = max(worst, res)
        report.max_residue[n] = worst
    return report
