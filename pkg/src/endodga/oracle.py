"""Dense-matrix cross-check of the differentials and boundary decisions.

Nothing here calls the sequence recurrences.  Structure maps are rebuilt by
multiplying polynomials in ``X = Psi^r`` and converting back to the Theta
basis by repeated synthetic division at the nodes ``r^s~(1), r^s~(2), ...``.

All coordinates live in Z/p^K with ``K = M + E``: an integral value ``a``
(known mod p^M) is stored as ``p^E a`` and a rational ``x`` (known mod
p^M Z_(p), denominator at most p^E) as ``p^E x``.  The differentials have
integer entries, so they act on these scaled coordinates unchanged.  Linear
systems are solved by Smith reduction with valuation-minimal pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arith import Context, nu, s_tilde
from .cochain import Cochain, differential, locate, shape, window
from .errors import PrecisionExhausted, ShapeMismatch
from .homology import boundary_witness, random_cycle
from .theta import ThetaSeq


def _poly_mul(f: list[int], g: list[int], mod: int) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % mod
    return out


def _to_theta_basis(ctx: Context, f: list[int], mod: int) -> list[int]:
    """Newton coefficients of f at the nodes r^s~(1), r^s~(2), ..."""
    f = list(f)
    out = []
    j = 1
    while f:
        x = pow(ctx.r, s_tilde(j), mod)
        # synthetic division by (X - x): remainder is f(x)
        q = [0] * (len(f) - 1)
        acc = 0
        for d in range(len(f) - 1, -1, -1):
            acc = (acc * x + f[d]) % mod
            if d:
                q[d - 1] = acc
        out.append(acc)
        f = q
        j += 1
    return out


def _twist_constant(ctx: Context, k: int, mod: int) -> int:
    if k == 0:
        return 0
    if ctx.exact_scalars:
        return (pow(ctx.r, k * (ctx.p - 1), mod) - 1) % mod
    return ctx.p ** (nu(k, ctx.p) + 1) % mod


@dataclass
class DenseMap:
    ctx: Context = field(repr=False)
    degree: int
    source: tuple[str, ...]
    target: tuple[str, ...]
    length: int
    extra: int
    matrix: np.ndarray = field(repr=False)
    _reduction: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def modulus(self) -> int:
        return self.ctx.p ** (self.ctx.M + self.extra)

    def _offsets(self, kinds: tuple[str, ...]) -> list[int]:
        out, pos = [], 0
        for kind in kinds:
            out.append(pos)
            pos += self.length if kind == "S" else 1
        return out + [pos]

    def encode(self, x: Cochain) -> np.ndarray:
        """Scaled coordinate vector of a cochain (sequence indices >= length must vanish)."""
        ctx, E = self.ctx, self.extra
        vec = []
        for comp in x.components:
            if isinstance(comp, ThetaSeq):
                if comp.support_end() > self.length:
                    raise ShapeMismatch(f"support beyond the reduced length {self.length}")
                vec.extend(int(v) * ctx.p**E for v in comp.coeffs[: self.length])
            else:
                if comp.exponent > E:
                    raise PrecisionExhausted(f"denominator p^{comp.exponent} beyond oracle headroom p^{E}")
                vec.append(comp.mantissa * ctx.p ** (E - comp.exponent))
        return np.array(vec, dtype=np.int64) % self.modulus

    def decode(self, vec: np.ndarray, degree: int, kinds: tuple[str, ...]) -> Cochain:
        ctx, E = self.ctx, self.extra
        k, _ = locate(ctx, degree)
        parts, pos = [], 0
        for kind in kinds:
            if kind == "S":
                block = [int(v) for v in vec[pos: pos + self.length]]
                if any(v % ctx.p**E for v in block):
                    raise ValueError("sequence coordinate outside p^E Z")
                parts.append(ThetaSeq.from_list(ctx, k, [v // ctx.p**E for v in block]))
                pos += self.length
            else:
                parts.append(ctx.fraction(int(vec[pos]), E))
                pos += 1
        return Cochain.of(ctx, degree, *parts)

    def apply(self, x: Cochain) -> Cochain:
        if x.degree != self.degree:
            raise ShapeMismatch(f"map at degree {self.degree} applied to degree {x.degree}")
        out = _matvec(self.matrix, self.encode(x), self.modulus)
        return self.decode(out, self.degree + 1, self.target)


def _matvec(A: np.ndarray, x: np.ndarray, mod: int) -> np.ndarray:
    out = np.zeros(A.shape[0], dtype=np.int64)
    for j in np.flatnonzero(x):
        out = (out + A[:, j] * int(x[j])) % mod
    return out


def dense_matrix(ctx: Context, n: int, length: int | None = None, extra: int | None = None) -> DenseMap:
    length = ctx.N if length is None else length
    if not 1 <= length <= ctx.N:
        raise ShapeMismatch(f"reduced length {length} outside 1..{ctx.N}")
    extra = ctx.M + 4 if extra is None else extra
    mod = ctx.p ** (ctx.M + extra)
    src, tgt = shape(ctx, n), shape(ctx, n + 1)
    k, pos = locate(ctx, n)
    dims = lambda kinds: sum(length if kind == "S" else 1 for kind in kinds)
    A = np.zeros((dims(tgt), dims(src)), dtype=np.int64)
    dm = DenseMap(ctx, n, src, tgt, length, extra, A)
    if pos is None or pos == 2 or not src or not tgt:
        return dm
    so, to = dm._offsets(src), dm._offsets(tgt)
    c = _twist_constant(ctx, k, mod)

    def pre_block(row0: int, col0: int, sign: int) -> None:
        # multiplication by (X - 1 + c) on Theta_m, re-expanded in the Theta basis
        theta = [1]
        for m in range(length):
            if m:
                theta = _poly_mul(theta, [-pow(ctx.r, s_tilde(m), mod) % mod, 1], mod)
            f = _poly_mul(theta, [(c - 1) % mod, 1], mod)
            coeffs = _to_theta_basis(ctx, f, mod)
            for i, v in enumerate(coeffs[:length]):
                A[row0 + i, col0 + m] = (A[row0 + i, col0 + m] + sign * v) % mod

    def post_block(row0: int, col0: int, sign: int) -> None:
        for m in range(length):
            A[row0 + m, col0 + m] = (A[row0 + m, col0 + m] + sign * c) % mod

    if pos == -1:
        pre_block(to[0], so[0], 1)
        post_block(to[1], so[0], 1)
    elif pos == 0:
        post_block(to[0], so[0], 1)
        pre_block(to[0], so[1], -1)
        if k == 0:
            A[to[1], so[1]] = 1                 # q_* reads index 0
            A[to[1], so[2]] = (mod - 1) % mod   # minus q^*
    else:
        if k == 0:
            A[to[0], so[0]] = 1
        else:
            A[to[0], so[1]] = c
    dm.matrix = A
    return dm


def _val(x: int, p: int, K: int) -> int:
    x %= p**K
    if x == 0:
        return K
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _valuations(X: np.ndarray, p: int, K: int) -> np.ndarray:
    """Entrywise valuation over Z/p^K (K for zero entries)."""
    out = np.zeros(X.shape, dtype=np.int64)
    for e in range(1, K + 1):
        out += (X % p**e == 0)
    return out


def smith(A: np.ndarray, p: int, K: int):
    """U, D, V with U A V = D diagonal over Z/p^K (U, V invertible); diagonal entries are p-powers."""
    mod = p**K
    D = A.copy() % mod
    rows, cols = D.shape
    U = np.eye(rows, dtype=np.int64)
    V = np.eye(cols, dtype=np.int64)
    r = 0
    while r < min(rows, cols):
        sub = D[r:, r:]
        if not sub.any():
            break
        vals = _valuations(sub, p, K)
        i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
        i, j = i + r, j + r
        D[[r, i]] = D[[i, r]]
        U[[r, i]] = U[[i, r]]
        D[:, [r, j]] = D[:, [j, r]]
        V[:, [r, j]] = V[:, [j, r]]
        piv = int(D[r, r])
        e = _val(piv, p, K)
        unit_inv = pow(piv // p**e, -1, mod)
        D[r] = D[r] * unit_inv % mod
        U[r] = U[r] * unit_inv % mod
        for t in range(r + 1, rows):
            f = int(D[t, r])
            if f:
                q = f // p**e  # exact: pivot valuation is minimal
                D[t] = (D[t] - q * D[r]) % mod
                U[t] = (U[t] - q * U[r]) % mod
        for t in range(r + 1, cols):
            f = int(D[r, t])
            if f:
                q = f // p**e
                D[:, t] = (D[:, t] - q * D[:, r]) % mod
                V[:, t] = (V[:, t] - q * V[:, r]) % mod
        r += 1
    return U, D, V, r


@dataclass
class OracleAnswer:
    solvable: bool
    witness: Cochain | None = None
    certificate: np.ndarray | None = field(default=None, repr=False)


def solve_boundary(dm: DenseMap, target: Cochain) -> OracleAnswer:
    """Solve d(w) = target over the dense model.

    Unknown sequence coordinates are substituted as ``p^E w`` so the solution
    respects the scaled lattice.  On failure the certificate is a row
    functional ``f`` with ``f A' == 0`` and ``f . target != 0``.
    """
    ctx = dm.ctx
    p, K = ctx.p, ctx.M + dm.extra
    mod = p**K
    if target.degree != dm.degree + 1:
        raise ShapeMismatch(f"target degree {target.degree} vs map degree {dm.degree}")
    t = dm.encode(target)
    so = dm._offsets(dm.source)
    scale = np.ones(dm.matrix.shape[1], dtype=np.int64)
    for s_idx, kind in enumerate(dm.source):
        if kind == "S":
            scale[so[s_idx]: so[s_idx + 1]] = p**dm.extra
    A = dm.matrix * scale % mod
    if A.shape[1] == 0:
        if t.any():
            return OracleAnswer(False, certificate=t.copy())
        return OracleAnswer(True, Cochain.zero(ctx, dm.degree))
    if dm._reduction is None:
        dm._reduction = smith(A, p, K)
    U, D, V, rank = dm._reduction
    Ut = _matvec(U, t, mod) if t.size else t
    y = np.zeros(A.shape[1], dtype=np.int64)
    for i in range(len(Ut)):
        e = _val(int(D[i, i]), p, K) if i < rank else K
        if int(Ut[i]) % p**e:
            cert = U[i] * p ** (K - e) % mod
            return OracleAnswer(False, certificate=cert)
        if i < rank:
            y[i] = int(Ut[i]) // p**e
    w = _matvec(V, y, mod) * scale % mod
    return OracleAnswer(True, dm.decode(w, dm.degree, dm.source))


def reduced_context(p: int = 5, M: int = 2, N: int | None = None, r: int | None = None) -> Context:
    return Context(p, M, reduced_length(p, M) if N is None else N, r, reduced=True)


def reduced_length(p: int, M: int = 2) -> int:
    """Smallest convenient oracle length: 48, or more when the pivot spacing demands it."""
    return max(48, 2 * (p - 1) * p ** (M - 1) + 8)


def agreement(ctx0: Context, k: int, samples: int, seed: int) -> dict:
    """Compare boundary decisions of the dense solver and the constructive solver in window k.

    Targets cycle through three families: boundaries of random cochains,
    random cycles (with precision-only directions mixed in) and random
    cochains.  Every witness from either side is validated by ``differential``.
    """
    rng = np.random.default_rng([seed, 3, k & 0xFFFFFFFF])
    limit = ctx0.trusted_limit
    disagreements, invalid = [], []
    counts = {"boundary": 0, "not boundary": 0}
    for n in window(ctx0, k).degrees:
        dm = dense_matrix(ctx0, n - 1)
        for t in range(samples):
            family = t % 3
            if family == 0:
                x = differential(Cochain.random(ctx0, n - 1, rng, support=limit - 1))
            elif family == 1:
                x = random_cycle(ctx0, n, rng, support=limit, precision_noise=bool(t % 2))
            else:
                x = Cochain.random(ctx0, n, rng, support=limit)
            mine = boundary_witness(x)
            theirs = solve_boundary(dm, x)
            found = isinstance(mine, Cochain)
            counts["boundary" if found else "not boundary"] += 1
            if found != theirs.solvable:
                disagreements.append({"degree": n, "sample": t})
            if found and differential(mine) != x:
                invalid.append({"degree": n, "sample": t, "solver": "constructive"})
            if theirs.solvable and differential(theirs.witness) != x:
                invalid.append({"degree": n, "sample": t, "solver": "dense"})
    return {
        "passed": not disagreements and not invalid,
        "disagreements": disagreements,
        "invalid_witnesses": invalid,
        "counts": counts,
    }


__all__ = [
    "DenseMap",
    "OracleAnswer",
    "agreement",
    "dense_matrix",
    "reduced_context",
    "reduced_length",
    "smith",
    "solve_boundary",
]
