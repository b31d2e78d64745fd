"""Cycles, boundary witnesses, class invariants and the homology table.

Witnesses are built by downward induction along the sequence index, solving
one subdiagonal equation ``w_m * D_m + w_(m-1) = R_m`` per step.  For
finitely supported input the induction can start at the support end (all
higher coefficients are zero); this agrees with starting at the next index
``l`` where ``r^s(l) == 1 mod p^M``, since every coefficient in between is 0.

Two kinds of cycle exist only because Z_(p) is replaced by Z/p^M: at degree
``(2p-2)k`` a pair with ``a_0 - b_0`` a nonzero multiple of ``p^(M-v)``, and at
degree ``(2p-2)k + 1`` a rational part ``y != 0`` with ``p^v y == 0 mod p^M``
(``v = nu(k) + 1``).  Neither has a counterpart over Z_(p); they are reported
as non-boundaries with reason ``"precision"``, and :func:`class_of` refuses
them with :class:`PrecisionExhausted`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import Context, PadicFraction, check_twist_precision, nu
from .cochain import Cochain, degree_of, differential, locate, window
from .errors import DegreeMismatch, PrecisionExhausted, UntrustedSupport
from .theta import ThetaSeq, _nodes, psi_pre, twist_scalar


@dataclass(frozen=True)
class NotBoundary:
    reason: str
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def is_cycle(x: Cochain) -> bool:
    return differential(x).is_zero()


def _check_trusted(x: Cochain) -> None:
    end = x.support_end()
    if end > x.ctx.trusted_limit:
        raise UntrustedSupport(
            f"support reaches index {end - 1}; exact answers need support below {x.ctx.trusted_limit}"
        )


def _subdiagonal_solve(rhs: np.ndarray, diag: np.ndarray, modulus: int) -> np.ndarray:
    """w with w_m * diag_m + w_(m-1) == rhs_m for all m >= 1, w zero above the support of rhs."""
    out = np.zeros_like(rhs)
    nz = np.flatnonzero(rhs % modulus)
    if nz.size == 0:
        return out
    top = int(nz[-1])
    # equation at index top: w_top * D + w_(top-1) = rhs_top, with w_top = 0
    w = 0
    for m in range(top, 0, -1):
        w = (int(rhs[m]) - int(diag[m]) * w) % modulus
        out[m - 1] = w
    return out


def _scalar_parts(ctx: Context, k: int) -> tuple[int, int, int]:
    """(c, v, u^-1): the twist scalar c = p^v u and the inverse of its unit part mod p^M."""
    c = twist_scalar(ctx, k)
    v = nu(k, ctx.p) + 1
    u = c // ctx.p**v
    return c, v, pow(u, -1, ctx.modulus)


def _divide_sequence(arr: np.ndarray, ctx: Context, k: int) -> np.ndarray | None:
    """y with c*y == arr mod p^M, or None if some entry is not divisible by p^v."""
    _, v, uinv = _scalar_parts(ctx, k)
    pv = ctx.p**v
    if np.any(arr % pv):
        return None
    return (arr // pv) * uinv % ctx.modulus


def _divide_fraction(z: PadicFraction, k: int) -> PadicFraction:
    """w with psi_pre_rat(w, k) == z, carried at enough digits to be exact."""
    ctx = z.ctx
    v = nu(k, ctx.p) + 1
    e = z.exponent + v
    big = ctx.p ** (ctx.M + e)
    c = twist_scalar(ctx, k, big)
    u = c // ctx.p**v
    return ctx.fraction(z.mantissa * pow(u, -1, big), e)


def _validated(w: Cochain, x: Cochain) -> Cochain:
    if differential(w) != x:
        raise AssertionError(f"constructed witness fails d(w) == x at degree {x.degree}")
    return w


def boundary_witness(x: Cochain) -> Cochain | NotBoundary:
    ctx, n = x.ctx, x.degree
    k, pos = locate(ctx, n)
    if not is_cycle(x):
        return NotBoundary("not a cycle", f"d(x) != 0 at degree {n}")
    _check_trusted(x)
    src = n - 1
    mod = ctx.modulus
    nodes = _nodes(ctx)
    if pos is None or pos == -1:
        # on finite support the kernel at wk-1 is zero (unit subdiagonal of Psi^*)
        if not x.is_zero():
            raise AssertionError("nonzero finitely supported cycle at a window start")
        return Cochain.zero(ctx, src)

    if pos == 0 and k == 0:
        a = x.components[0]
        if a.coeffs[0]:
            return NotBoundary("index zero", f"a_0 = {int(a.coeffs[0])} is nonzero")
        w = _subdiagonal_solve(a.coeffs, (nodes - 1) % mod, mod)
        return _validated(Cochain(ctx, src, (ThetaSeq(0, w, ctx),)), x)

    if pos == 0:
        check_twist_precision(ctx, k)
        a, b = x.components
        c, v, _ = _scalar_parts(ctx, k)
        if (int(a.coeffs[0]) - int(b.coeffs[0])) % mod:
            return NotBoundary(
                "precision",
                f"a_0 - b_0 is a nonzero multiple of {ctx.p}^{ctx.M - v}, killed by the twist scalar",
            )
        w0 = _divide_sequence(b.coeffs, ctx, k)
        if w0 is None:
            raise AssertionError("cycle whose second sequence is not divisible by the twist scalar")
        # residual R = a - Psi^*(w0) lies in p^(M-v); fix it modulo p^v
        base = ThetaSeq(k, w0, ctx)
        resid = (a.coeffs - psi_pre(base).coeffs) % mod
        shift = ctx.p ** (ctx.M - v)
        if np.any(resid % shift):
            raise AssertionError("residual outside p^(M-v)")
        pv = ctx.p**v
        diag = (nodes - 1 + c) % pv
        t = _subdiagonal_solve((resid // shift) % pv, diag, pv)
        w = ThetaSeq(k, w0 + shift * t, ctx)
        return _validated(Cochain(ctx, src, (w,)), x)

    if pos == 1 and k == 0:
        a, y = x.components
        bp = _subdiagonal_solve((-a.coeffs) % mod, (nodes - 1) % mod, mod)
        xq = ctx.fraction(int(bp[0])) - y
        w = Cochain(ctx, src, (ThetaSeq.zero(ctx, 0), ThetaSeq(0, bp, ctx), xq))
        return _validated(w, x)

    if pos == 1:
        check_twist_precision(ctx, k)
        a, y = x.components
        c, v, uinv = _scalar_parts(ctx, k)
        if not y.is_zero():
            return NotBoundary(
                "precision", f"rational part {y} is a nonzero element killed by the twist scalar"
            )
        a0 = int(a.coeffs[0])
        if a0 % ctx.p**v:
            return NotBoundary(
                "divisibility", f"index-zero coefficient {a0} is not divisible by {ctx.p}^{v}"
            )
        bp = _subdiagonal_solve((-a.coeffs) % mod, (nodes - 1) % mod, mod)
        ap = bp.copy()
        ap[0] = (ap[0] + (a0 // ctx.p**v) * uinv) % mod
        w = Cochain(ctx, src, (ThetaSeq(k, ap, ctx), ThetaSeq(k, bp, ctx)))
        return _validated(w, x)

    # pos == 2
    (z,) = x.components
    if k == 0:
        if not z.is_integral():
            return NotBoundary("not integral", f"{z} is not in Z_({ctx.p})")
        w = Cochain(ctx, src, (ThetaSeq.basis(ctx, 0, 0, z.mantissa), ctx.fraction(0)))
        return _validated(w, x)
    check_twist_precision(ctx, k)
    w = Cochain(ctx, src, (ThetaSeq.zero(ctx, k), _divide_fraction(z, k)))
    return _validated(w, x)


@dataclass(frozen=True)
class HomologyClass:
    """A cohomology class by its canonical invariant.

    ``kind`` is one of ``"zero"``, ``"local"`` (value a PadicInt in Z_(p)),
    ``"cyclic"`` (value an int in ``[0, p^exponent)``) or ``"rational"``
    (value a PadicFraction reduced modulo Z_(p)).
    """

    degree: int
    kind: str
    value: object = 0
    exponent: int = 0
    ctx: Context | None = field(default=None, repr=False, compare=False)

    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "rational":
            return self.value.is_zero()
        return int(self.value) == 0

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        if other.degree != self.degree:
            raise DegreeMismatch(f"classes in degrees {self.degree} and {other.degree}")
        if self.kind == "zero":
            return self
        if self.kind == "local":
            return HomologyClass(self.degree, "local", self.value + other.value, 0, self.ctx)
        if self.kind == "cyclic":
            m = self.ctx.p**self.exponent
            return HomologyClass(
                self.degree, "cyclic", (self.value + other.value) % m, self.exponent, self.ctx
            )
        return HomologyClass(self.degree, "rational", (self.value + other.value).mod_local(), 0, self.ctx)

    def scale(self, x: int) -> "HomologyClass":
        if self.kind == "zero":
            return self
        if self.kind == "local":
            return HomologyClass(self.degree, "local", self.value * x, 0, self.ctx)
        if self.kind == "cyclic":
            m = self.ctx.p**self.exponent
            return HomologyClass(self.degree, "cyclic", self.value * x % m, self.exponent, self.ctx)
        return HomologyClass(self.degree, "rational", self.value.scale(x).mod_local(), 0, self.ctx)

    def __str__(self) -> str:
        if self.kind == "zero":
            return "0"
        if self.kind == "local":
            return f"{int(self.value)} in Z_({self.ctx.p})"
        if self.kind == "cyclic":
            return f"{self.value} in Z/{self.ctx.p ** self.exponent}"
        return f"{self.value} in Q/Z_({self.ctx.p})"

    def as_json(self) -> dict:
        out = {"degree": self.degree, "kind": self.kind}
        if self.kind == "local":
            out["value"] = int(self.value)
        elif self.kind == "cyclic":
            out["value"] = self.value
            out["modulus"] = self.ctx.p**self.exponent
        elif self.kind == "rational":
            out["value"] = self.value.as_json()
        return out


def class_of(x: Cochain) -> HomologyClass:
    ctx, n = x.ctx, x.degree
    k, pos = locate(ctx, n)
    if not is_cycle(x):
        raise ValueError(f"not a cycle at degree {n}")
    _check_trusted(x)
    if pos == 0 and k == 0:
        return HomologyClass(n, "local", x.components[0][0], 0, ctx)
    if pos == 0 and k != 0:
        check_twist_precision(ctx, k)
        a, b = x.components
        if (int(a.coeffs[0]) - int(b.coeffs[0])) % ctx.modulus:
            raise PrecisionExhausted(f"degree {n}: cycle exists only modulo p^{ctx.M}")
        return HomologyClass(n, "zero", 0, 0, ctx)
    if pos == 1 and k != 0:
        v = check_twist_precision(ctx, k)
        a, y = x.components
        if not y.is_zero():
            raise PrecisionExhausted(f"degree {n}: rational part {y} is a precision artifact")
        return HomologyClass(n, "cyclic", int(a.coeffs[0]) % ctx.p**v, v, ctx)
    if pos == 2 and k == 0:
        return HomologyClass(n, "rational", x.components[0].mod_local(), 0, ctx)
    return HomologyClass(n, "zero", 0, 0, ctx)


def class_order(c: HomologyClass) -> int | float:
    """Smallest p^e with p^e * c == 0; ``math.inf`` for nonzero classes in Z_(p)."""
    if c.is_zero():
        return 1
    p = c.ctx.p
    if c.kind == "local":
        return math.inf
    if c.kind == "cyclic":
        return p ** (c.exponent - nu(c.value, p))
    return p**c.value.exponent


@dataclass
class GroupDescriptor:
    kind: str
    p: int
    exponent: int = 0
    certified: bool | None = None
    certificate: list = field(default_factory=list, repr=False)

    def __str__(self) -> str:
        if self.kind == "Zero":
            return "0"
        if self.kind == "FreeLocalRankOne":
            return f"Z_({self.p})"
        if self.kind == "CyclicPPower":
            return f"Z/{self.p ** self.exponent}"
        return f"Q/Z_({self.p})"

    def same_group(self, other: "GroupDescriptor") -> bool:
        return (self.kind, self.p, self.exponent) == (other.kind, other.p, other.exponent)

    def as_json(self) -> dict:
        out = {"kind": self.kind, "group": str(self)}
        if self.kind == "CyclicPPower":
            out["exponent"] = self.exponent
        if self.certified is not None:
            out["certified"] = self.certified
        return out


def closed_form(ctx: Context, n: int) -> GroupDescriptor:
    k, pos = locate(ctx, n)
    if k == 0 and pos == 0:
        return GroupDescriptor("FreeLocalRankOne", ctx.p)
    if k == 0 and pos == 2:
        return GroupDescriptor("RationalsModLocal", ctx.p)
    if k != 0 and pos == 1:
        v = check_twist_precision(ctx, k)
        return GroupDescriptor("CyclicPPower", ctx.p, v)
    return GroupDescriptor("Zero", ctx.p)


# ---- cycle generators -----------------------------------------------------


def random_cycle(
    ctx: Context,
    n: int,
    rng: np.random.Generator,
    support: int | None = None,
    precision_noise: bool = False,
) -> Cochain:
    """A random cycle with sequences supported below ``support`` (trusted by default).

    ``precision_noise`` adds the mod-p^M-only cycle directions described in
    the module docstring.
    """
    k, pos = locate(ctx, n)
    support = ctx.trusted_limit if support is None else support
    mod = ctx.modulus

    def rand_seq() -> np.ndarray:
        arr = np.zeros(ctx.N, dtype=np.int64)
        arr[:support] = rng.integers(0, mod, size=support)
        return arr

    if pos is None or pos == -1:
        return Cochain.zero(ctx, n)
    if pos == 0 and k == 0:
        return Cochain(ctx, n, (ThetaSeq(0, rand_seq(), ctx), ThetaSeq.zero(ctx, 0), ctx.fraction(0)))
    if pos == 0:
        a = rand_seq()
        if support:
            a[support - 1:] = 0
        b = _cycle_partner(ctx, k, a)
        a[0] = b[0]
        if precision_noise:
            v = check_twist_precision(ctx, k)
            a[0] += ctx.p ** (ctx.M - v) * int(rng.integers(0, ctx.p**v))
        return Cochain(ctx, n, (ThetaSeq(k, a, ctx), ThetaSeq(k, b, ctx)))
    if pos == 1 and k == 0:
        a = rand_seq()
        a[0] = 0
        e = int(rng.integers(0, ctx.M + 1))
        y = ctx.fraction(int(rng.integers(0, ctx.p ** (ctx.M + e))), e)
        return Cochain(ctx, n, (ThetaSeq(0, a, ctx), y))
    if pos == 1:
        y = ctx.fraction(0)
        if precision_noise:
            v = check_twist_precision(ctx, k)
            y = ctx.fraction(ctx.p ** (ctx.M - v) * int(rng.integers(0, ctx.p**v)))
        return Cochain(ctx, n, (ThetaSeq(k, rand_seq(), ctx), y))
    e = int(rng.integers(0, ctx.M + 1))
    return Cochain(ctx, n, (ctx.fraction(int(rng.integers(0, ctx.p ** (ctx.M + e))), e),))


def _cycle_partner(ctx: Context, k: int, a: np.ndarray, top: int = 0) -> np.ndarray:
    """b with Psi_*(a) == Psi^*(b) in indices >= 1, by downward induction from b_top."""
    c = twist_scalar(ctx, k)
    mod = ctx.modulus
    coef = (_nodes(ctx) - 1 + c) % mod
    b = np.zeros(ctx.N, dtype=np.int64)
    start = ctx.N - 1
    b[start] = top % mod
    for m in range(start, 0, -1):
        b[m - 1] = (c * int(a[m]) - int(coef[m]) * int(b[m])) % mod
    return b


def full_support_cycle(ctx: Context, k: int, rng: np.random.Generator) -> Cochain:
    """A cycle at degree (2p-2)k, k != 0, with every index up to N-1 populated.

    Used to exercise divisibility of the second sequence away from the
    support-end shortcut: ``b_(N-1)`` and all of ``a`` are random.
    """
    v = check_twist_precision(ctx, k)
    mod = ctx.modulus
    a = rng.integers(0, mod, size=ctx.N).astype(np.int64)
    b = _cycle_partner(ctx, k, a, int(rng.integers(0, mod)))
    a[0] = (b[0] + ctx.p ** (ctx.M - v) * int(rng.integers(0, ctx.p**v))) % mod
    return Cochain(ctx, degree_of(ctx, k, 0), (ThetaSeq(k, a, ctx), ThetaSeq(k, b, ctx)))


def second_sequence_defects(x: Cochain) -> list[int]:
    """Trusted indices m where b_m is not divisible by p^(nu(k)+1), for a cycle at (2p-2)k."""
    ctx = x.ctx
    k, pos = locate(ctx, x.degree)
    if pos != 0 or k == 0:
        raise DegreeMismatch(f"degree {x.degree} is not (2p-2)k with k != 0")
    if not is_cycle(x):
        raise ValueError("not a cycle")
    pv = ctx.p ** (nu(k, ctx.p) + 1)
    b = x.components[1].coeffs[: ctx.trusted_limit]
    return [int(m) for m in np.flatnonzero(b % pv)]


# ---- certification --------------------------------------------------------


def _probe(checks: list, label: str, expect: str, x: Cochain) -> None:
    w = boundary_witness(x)
    got = "boundary" if isinstance(w, Cochain) else "not boundary"
    checks.append({"probe": label, "degree": x.degree, "expect": expect, "got": got, "ok": got == expect})


def certify(ctx: Context, n: int, probes: int = 12, seed: int = 0) -> list[dict]:
    """Run consistency probes for the closed-form group at degree n."""
    k, pos = locate(ctx, n)
    rng = np.random.default_rng([seed, n & 0xFFFFFFFF])
    checks: list[dict] = []
    limit = ctx.trusted_limit
    idx = sorted(set([0, 1, 2, limit - 1] + [int(m) for m in rng.integers(0, limit, size=probes)]))

    if pos is None:
        checks.append({"probe": "shape", "degree": n, "expect": "zero object",
                       "got": "zero object", "ok": Cochain.zero(ctx, n).shape == ()})
        return checks

    if pos == -1:
        # d(e_m) has a unit at index m+1: injective on finite support
        for m in idx:
            d = differential(Cochain.basis(ctx, n, 0, m)).components[0]
            ok = m + 1 < ctx.N and int(d.coeffs[m + 1]) == 1 and d.support_end() == m + 2
            checks.append({"probe": f"unit subdiagonal at e_{m}", "degree": n,
                           "expect": "injective", "got": "injective" if ok else "defect", "ok": ok})
        return checks

    if pos == 0 and k == 0:
        gen = Cochain.basis(ctx, n, 0, 0)
        for j in range(ctx.M):
            _probe(checks, f"{ctx.p}^{j} * generator", "not boundary", gen.scale(ctx.p**j))
        for m in idx:
            if m:
                _probe(checks, f"e_{m}", "boundary", Cochain.basis(ctx, n, 0, m))
        return checks

    if pos == 0:
        check_twist_precision(ctx, k)
        for m in idx:
            if 1 <= m < limit - 1:
                a = np.zeros(ctx.N, dtype=np.int64)
                a[m] = 1
                b = _cycle_partner(ctx, k, a)
                a[0] = b[0]
                x = Cochain(ctx, n, (ThetaSeq(k, a, ctx), ThetaSeq(k, b, ctx)))
                _probe(checks, f"cycle through e_{m}", "boundary", x)
        for t in range(probes):
            _probe(checks, f"random cycle {t}", "boundary", random_cycle(ctx, n, rng))
        return checks

    if pos == 1 and k == 0:
        for m in idx:
            if m:
                _probe(checks, f"(e_{m}, 0)", "boundary", Cochain.basis(ctx, n, 0, m))
        for e in range(ctx.M):
            x = Cochain.of(ctx, n, ThetaSeq.zero(ctx, 0), ctx.fraction(1, e))
            _probe(checks, f"(0, 1/{ctx.p}^{e})", "boundary", x)
        return checks

    if pos == 1:
        v = check_twist_precision(ctx, k)
        gen = Cochain.basis(ctx, n, 0, 0)
        _probe(checks, f"{ctx.p}^{v - 1} * generator", "not boundary", gen.scale(ctx.p ** (v - 1)))
        _probe(checks, f"{ctx.p}^{v} * generator", "boundary", gen.scale(ctx.p**v))
        for m in idx:
            if m:
                _probe(checks, f"(e_{m}, 0)", "boundary", Cochain.basis(ctx, n, 0, m))
        return checks

    if k == 0:
        for e in range(1, ctx.M):
            x = Cochain.of(ctx, n, ctx.fraction(1, e))
            _probe(checks, f"1/{ctx.p}^{e}", "not boundary", x)
            _probe(checks, f"{ctx.p}^{e - 1}/{ctx.p}^{e}", "not boundary", x.scale(ctx.p ** (e - 1)))
            _probe(checks, f"{ctx.p}^{e}/{ctx.p}^{e}", "boundary", x.scale(ctx.p**e))
        _probe(checks, "1", "boundary", Cochain.of(ctx, n, ctx.fraction(1)))
        return checks

    check_twist_precision(ctx, k)
    for e in range(ctx.M):
        _probe(checks, f"1/{ctx.p}^{e}", "boundary", Cochain.of(ctx, n, ctx.fraction(1, e)))
    return checks


def homology_group(ctx: Context, n: int, certify_group: bool = True, probes: int = 12,
                   seed: int = 0) -> GroupDescriptor:
    desc = closed_form(ctx, n)
    if certify_group:
        checks = certify(ctx, n, probes=probes, seed=seed)
        desc.certificate = checks
        desc.certified = all(c["ok"] for c in checks)
    return desc


def generator(ctx: Context, n: int) -> Cochain:
    """Standard generating cycle of a nonzero group: e_0 in the first slot, or 1/p at H^2."""
    k, pos = locate(ctx, n)
    if (pos == 0 and k == 0) or (pos == 1 and k != 0):
        return Cochain.basis(ctx, n, 0, 0)
    if pos == 2 and k == 0:
        return Cochain.of(ctx, n, ctx.fraction(1, 1))
    raise DegreeMismatch(f"H^{n} is zero and has no generator")


def order_witnesses(ctx: Context, k: int) -> dict:
    """Order certificate for the generator at degree (2p-2)k+1."""
    v = check_twist_precision(ctx, k)
    n = degree_of(ctx, k, 1)
    gen = Cochain.basis(ctx, n, 0, 0)
    below = boundary_witness(gen.scale(ctx.p ** (v - 1)))
    at = boundary_witness(gen.scale(ctx.p**v))
    return {
        "degree": n,
        "order": ctx.p**v,
        "below_is_boundary": isinstance(below, Cochain),
        "at_is_boundary": isinstance(at, Cochain),
        "witness": at if isinstance(at, Cochain) else None,
    }


__all__ = [
    "NotBoundary",
    "HomologyClass",
    "GroupDescriptor",
    "is_cycle",
    "boundary_witness",
    "class_of",
    "class_order",
    "closed_form",
    "homology_group",
    "certify",
    "random_cycle",
    "full_support_cycle",
    "second_sequence_defects",
    "generator",
    "order_witnesses",
    "witness_validity",
    "divisibility_check",
]


def witness_validity(ctx: Context, k: int, samples: int, seed: int) -> dict:
    """Witnesses for random trusted boundaries in window k: found, and d(w) == x."""
    rng = np.random.default_rng([seed, 1, k & 0xFFFFFFFF])
    failures = []
    example = None
    for n in window(ctx, k).degrees:
        for t in range(samples):
            src = Cochain.random(ctx, n - 1, rng, support=ctx.trusted_limit - 1)
            target = differential(src)
            w = boundary_witness(target)
            if not isinstance(w, Cochain) or differential(w) != target:
                failures.append({"degree": n, "sample": t})
            elif example is None and not target.is_zero():
                example = (target, w)
    return {"passed": not failures, "failures": failures, "example": example}


def divisibility_check(ctx: Context, k: int, samples: int, seed: int) -> dict:
    """Second-sequence divisibility on random full-support cycles at degree (2p-2)k."""
    rng = np.random.default_rng([seed, 2, k & 0xFFFFFFFF])
    defects = []
    for t in range(samples):
        bad = second_sequence_defects(full_support_cycle(ctx, k, rng))
        if bad:
            defects.append({"sample": t, "indices": bad[:5]})
    return {"passed": not defects, "defects": defects}
