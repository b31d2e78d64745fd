"""Products on cohomology and the triple Massey product with the class p.

Chain-level products only multiply the first sequence components of their
factors (rational components never enter the Massey computation).  The
pairing ``H^(-(2p-2)k+1) x H^((2p-2)k+1) -> H^2`` is evaluated by its closed
formula ``a b / p^(2v)`` in Q/Z_(p), ``v = nu(k) + 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .arith import Context, check_twist_precision, nu
from .cochain import Cochain, degree_of, differential, locate, shape
from .errors import ConfigError, DegreeMismatch
from .homology import (
    GroupDescriptor,
    HomologyClass,
    NotBoundary,
    boundary_witness,
    class_of,
    class_order,
    closed_form,
)
from .theta import ThetaSeq, seq_product


class RepresentativeMode(enum.Enum):
    ORDER_P = "order-p"
    LITERAL = "literal"


def cohomology_product(alpha: HomologyClass, beta: HomologyClass) -> HomologyClass:
    ctx = alpha.ctx or beta.ctx
    if ctx is None:
        raise DegreeMismatch("classes carry no context")
    ka, pa = locate(ctx, alpha.degree)
    kb, pb = locate(ctx, beta.degree)
    if pa != 1 or pb != 1 or ka == 0 or ka != -kb:
        raise DegreeMismatch(
            f"pairing needs degrees -(2p-2)k+1 and (2p-2)k+1 with k != 0, got {alpha.degree}, {beta.degree}"
        )
    v = check_twist_precision(ctx, kb)
    a = int(alpha.value) if alpha.kind == "cyclic" else 0
    b = int(beta.value) if beta.kind == "cyclic" else 0
    value = ctx.fraction(a * b, 2 * v).mod_local()
    return HomologyClass(2, "rational", value, 0, ctx)


def chain_product(x: Cochain, y: Cochain) -> Cochain:
    """Product of the leading sequences, placed in the leading slot of degree |x|+|y|."""
    ctx = x.ctx
    n = x.degree + y.degree
    kinds = shape(ctx, n)
    if not kinds or kinds[0] != "S" or not x.sequences() or not y.sequences():
        raise DegreeMismatch(f"no sequence-level product from degrees {x.degree}, {y.degree}")
    lead = seq_product(x.sequences()[0], y.sequences()[0])
    k, _ = locate(ctx, n)
    if lead.twist != k:
        raise DegreeMismatch(f"twist {lead.twist} does not match window {k} of degree {n}")
    rest = [ThetaSeq.zero(ctx, k) if kind == "S" else ctx.fraction(0) for kind in kinds[1:]]
    return Cochain(ctx, n, (lead, *rest))


def koszul_sign(degree: int) -> int:
    return -1 if (1 + degree) % 2 else 1


@dataclass
class MasseyResult:
    i: int
    j: int
    mode: RepresentativeMode
    a: Cochain
    b: Cochain
    c: Cochain
    u: Cochain
    v: Cochain
    result: Cochain
    result_class: HomologyClass
    order: int | float
    indeterminacy: GroupDescriptor
    witness_checks: list = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.result.degree

    def as_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "mode": self.mode.value,
            "representatives": {"a": self.a.as_json(), "b": self.b.as_json(), "c": self.c.as_json()},
            "witnesses": {"u": self.u.as_json(), "v": self.v.as_json()},
            "result": self.result.as_json(),
            "class": self.result_class.as_json(),
            "order": None if self.order == float("inf") else self.order,
            "indeterminacy": self.indeterminacy.as_json(),
            "witness_checks": self.witness_checks,
        }


def indeterminacy(ctx: Context, i: int, j: int) -> GroupDescriptor:
    if i == 0 or j == 0:
        raise ConfigError("indeterminacy needs i, j != 0")
    left = closed_form(ctx, degree_of(ctx, j, 0))
    right = closed_form(ctx, degree_of(ctx, i, 0))
    if left.kind == "Zero" and right.kind == "Zero":
        return GroupDescriptor("Zero", ctx.p)
    return GroupDescriptor("DirectSum", ctx.p, certificate=[left.as_json(), right.as_json()])


def _perturbation(ctx: Context, n: int, seed: list[int]) -> Cochain:
    """A boundary d(z) with z random on indices 0, 1 at degree n - 1."""
    rng = np.random.default_rng(seed)
    return differential(Cochain.random(ctx, n - 1, rng, support=2))


def massey(
    ctx: Context,
    i: int,
    j: int,
    mode: RepresentativeMode = RepresentativeMode.ORDER_P,
    a0: int = 1,
    c0: int = 1,
    perturb: int | None = None,
) -> MasseyResult:
    """<gamma_i, p, gamma_j> with explicit witnesses.

    ``perturb`` adds seeded boundaries to both witnesses, giving an
    independent witness choice for the same representatives.
    """
    if i == 0 or j == 0 or i + j == 0:
        raise ConfigError(f"need i, j, i+j nonzero; got i={i}, j={j}")
    for t in (i, j, i + j):
        check_twist_precision(ctx, t)
    p = ctx.p
    extra = 1 if mode is RepresentativeMode.LITERAL else 0

    def rep(t: int, scale: int) -> Cochain:
        n = degree_of(ctx, t, 1)
        seq = ThetaSeq.basis(ctx, t, 0, p ** (nu(t, p) + extra) * scale)
        return Cochain(ctx, n, (seq, ctx.fraction(0)))

    a = rep(i, a0)
    c = rep(j, c0)
    b = Cochain.of(ctx, 0, [p], [], 0)

    ab = chain_product(a, b).scale(koszul_sign(a.degree))
    bc = chain_product(b, c).scale(koszul_sign(b.degree))
    checks = []
    witnesses = []
    for slot, (target, label) in enumerate(((ab, "u"), (bc, "v"))):
        w = boundary_witness(target)
        if isinstance(w, NotBoundary):
            raise ValueError(f"witness {label} does not exist: {w.reason} ({w.detail})")
        if perturb is not None:
            w = w + _perturbation(ctx, w.degree, [perturb, slot])
        residue = (differential(w) - target).max_residue()
        checks.append({"witness": label, "degree": w.degree, "residue_zero": residue == 0})
        witnesses.append(w)
    u, v = witnesses

    result = chain_product(u, c).scale(koszul_sign(u.degree)) + chain_product(a, v).scale(
        koszul_sign(a.degree)
    )
    checks.append({"witness": "result", "degree": result.degree,
                   "residue_zero": differential(result).is_zero()})
    cls = class_of(result)
    return MasseyResult(
        i, j, mode, a, b, c, u, v, result, cls, class_order(cls), indeterminacy(ctx, i, j), checks
    )
