"""Command-line front end.

Every command builds a JSON-serializable certificate first; the pretty, json
and csv renderings are produced from that certificate, so a cached run and a
fresh run print the same bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .arith import Context, check_twist_precision, nu
from .cochain import Cochain, degree_of, differential, locate, verify_dd
from .errors import EndoDGAError, PrecisionExhausted
from .homology import (
    HomologyClass,
    class_of,
    class_order,
    divisibility_check,
    generator,
    homology_group,
    order_witnesses,
    witness_validity,
)
from .oracle import agreement, reduced_context
from .products import (
    MasseyResult,
    RepresentativeMode,
    chain_product,
    cohomology_product,
    koszul_sign,
    massey,
)
from .theta import random_product_pair, seq_product

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
RANGE_OPTIONS = ("--k", "--degrees")


def parse_range(text: str) -> list[int]:
    """``a..b`` (inclusive), a comma list, or a single integer."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise argparse.ArgumentTypeError(f"empty range {text}")
        return list(range(lo_i, hi_i + 1))
    return [int(t) for t in text.split(",") if t]


def _normalize_argv(argv: list[str]) -> list[str]:
    # "--k -3..3" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in RANGE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5, help="odd prime")
    common.add_argument("--precision", type=int, default=3, help="work modulo p^precision")
    common.add_argument("--length", type=int, default=None, help="sequence truncation N")
    common.add_argument("--unit", type=int, default=None, help="override the Adams unit r")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("pretty", "json", "csv"), default="pretty")
    common.add_argument("--cache-dir", type=Path, default=None)

    parser = argparse.ArgumentParser(prog="endodga", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the property suites")
    v.add_argument("--k", type=parse_range, default=parse_range("-3..3"), help="twist range, e.g. -3..3")
    v.add_argument("--samples", type=int, default=20)

    t = sub.add_parser("table", parents=[common], help="homology groups over a degree range")
    t.add_argument("--degrees", type=parse_range, default=parse_range("-1..10"))
    t.add_argument("--probes", type=int, default=12)

    h = sub.add_parser("homology", parents=[common], help="one group with its certificate")
    h.add_argument("--degree", type=int, required=True)
    h.add_argument("--probes", type=int, default=12)

    pr = sub.add_parser("product", parents=[common], help="pairing into H^2")
    pr.add_argument("--k", type=int, required=True)
    pr.add_argument("--a", type=int, default=None)
    pr.add_argument("--b", type=int, default=None)

    m = sub.add_parser("massey", parents=[common], help="<gamma_i, p, gamma_j>")
    m.add_argument("--i", type=int, required=True)
    m.add_argument("--j", type=int, required=True)
    m.add_argument("--mode", choices=[e.value for e in RepresentativeMode], default="order-p")
    m.add_argument("--perturb", type=int, default=None, help="seed for a perturbed witness choice")
    return parser


def make_context(args: argparse.Namespace) -> Context:
    return Context(args.p, args.precision, args.length, args.unit)


def _inputs(args: argparse.Namespace) -> dict:
    skip = {"p", "precision", "length", "unit", "format", "cache_dir", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _witness_entry(target: Cochain, w: Cochain) -> dict:
    return {
        "degree": target.degree,
        "residue_zero": differential(w) == target,
        "target": target.as_json(),
        "witness": w.as_json(),
    }


def _certificate(ctx: Context, command: str, inputs: dict, results: list, checks: list,
                 passed: bool) -> dict:
    return {
        "context": ctx.key(),
        "command": command,
        "inputs": inputs,
        "results": results,
        "witness_checks": checks,
        "passed": bool(passed) and all(c["residue_zero"] for c in checks),
        "version": __version__,
    }


# ---- commands -------------------------------------------------------------


def cmd_verify(ctx: Context, ks: list[int], samples: int, seed: int) -> dict:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    results, checks = [], []

    def record(prop: str, k: int, fn) -> None:
        try:
            out = fn()
        except PrecisionExhausted as exc:
            results.append({"property": prop, "k": k, "status": "skipped", "detail": str(exc), "seed": seed})
            return
        status = "pass" if out.pop("passed") else "fail"
        results.append({"property": prop, "k": k, "status": status, "seed": seed, **out})

    def dd(k: int) -> dict:
        rep = verify_dd(ctx, k, samples, seed)
        return {"passed": rep.passed, "max_residue": {str(n): r for n, r in rep.max_residue.items()}}

    def witnesses(k: int) -> dict:
        out = witness_validity(ctx, k, samples, seed)
        example = out.pop("example")
        if example is not None:
            checks.append(_witness_entry(*example))
        return out

    def products(k: int) -> dict:
        rng = np.random.default_rng([seed, 4, k & 0xFFFFFFFF])
        bad = []
        for t in range(samples):
            a, b = random_product_pair(ctx, k, -k, rng)
            if int(seq_product(a, b).coeffs[0]) != int(a.coeffs[0]) * int(b.coeffs[0]) % ctx.modulus:
                bad.append(t)
        return {"passed": not bad, "failures": bad}

    ctx0 = reduced_context(ctx.p, 2, r=ctx.r)
    for k in ks:
        record("d^2 = 0", k, lambda: dd(k))
        record("witness validity", k, lambda: witnesses(k))
        if k != 0:
            record("second sequence divisible", k, lambda: divisibility_check(ctx, k, samples, seed))
        record("index-zero product", k, lambda: products(k))
        if k == 0 or nu(k, ctx.p) + 1 < ctx0.M:
            record("oracle agreement", k, lambda: agreement(ctx0, k, samples, seed))
    passed = all(r["status"] != "fail" for r in results)
    return _certificate(ctx, "verify", {"k": ks, "samples": samples, "seed": seed}, results, checks, passed)


def _group_row(ctx: Context, n: int, probes: int, seed: int) -> dict:
    k, pos = locate(ctx, n)
    g = homology_group(ctx, n, probes=probes, seed=seed)
    return {"degree": n, "window": k, "position": pos, **g.as_json(), "probes": len(g.certificate)}


def cmd_table(ctx: Context, degrees: list[int], probes: int, seed: int) -> dict:
    rows = [_group_row(ctx, n, probes, seed) for n in degrees]
    return _certificate(ctx, "table", {"degrees": degrees, "probes": probes, "seed": seed}, rows, [],
                        all(r["certified"] for r in rows))


def cmd_homology(ctx: Context, n: int, probes: int, seed: int) -> dict:
    g = homology_group(ctx, n, probes=probes, seed=seed)
    k, pos = locate(ctx, n)
    row = {"degree": n, "window": k, "position": pos, **g.as_json(), "probes": g.certificate}
    checks = []
    if g.kind == "CyclicPPower":
        cert = order_witnesses(ctx, k)
        row["order"] = cert["order"]
        row["order_verified"] = cert["at_is_boundary"] and not cert["below_is_boundary"]
        gen = generator(ctx, n).scale(ctx.p ** g.exponent)
        checks.append(_witness_entry(gen, cert["witness"]))
    elif g.kind in ("FreeLocalRankOne", "RationalsModLocal"):
        cls = class_of(generator(ctx, n))
        order = class_order(cls)
        row["generator"] = cls.as_json()
        row["order"] = None if order == float("inf") else order
    passed = bool(g.certified) and row.get("order_verified", True)
    return _certificate(ctx, "homology", {"degree": n, "probes": probes, "seed": seed}, [row], checks,
                        passed)


def _pairing_reference(p: int, v: int, a: int, b: int) -> Fraction:
    return Fraction(a * b, p ** (2 * v)) % 1


def cmd_product(ctx: Context, k: int, a: int | None, b: int | None) -> dict:
    if k == 0:
        raise ValueError("the pairing needs k != 0")
    v = check_twist_precision(ctx, k)
    q = ctx.p**v
    left, right = degree_of(ctx, -k, 1), degree_of(ctx, k, 1)
    avals = [a % q] if a is not None else list(range(q))
    bvals = [b % q] if b is not None else list(range(q))
    rows, ok = [], True
    for x in avals:
        for y in bvals:
            alpha = HomologyClass(left, "cyclic", x, v, ctx)
            beta = HomologyClass(right, "cyclic", y, v, ctx)
            prod = cohomology_product(alpha, beta)
            ref = _pairing_reference(ctx.p, v, x, y)
            got = Fraction(prod.value.mantissa, ctx.p**prod.value.exponent)
            ok &= got == ref
            rows.append({"a": x, "b": y, "product": str(prod.value), "matches_formula": got == ref})
    injective = None
    if a is None and b is None:
        nonzero = {(r["a"], r["b"]) for r in rows if r["product"] != "0"}
        injective = all(any((x, y) in nonzero for y in bvals) for x in avals if x) and all(
            any((x, y) in nonzero for x in avals) for y in bvals if y
        )
        ok &= injective
    inputs = {"k": k, "a": a, "b": b}
    results = [{"degrees": [left, right], "modulus": q, "injective": injective, "entries": rows}]
    return _certificate(ctx, "product", inputs, results, [], ok)


def cmd_massey(ctx: Context, i: int, j: int, mode: str, perturb: int | None, seed: int) -> dict:
    rmode = RepresentativeMode(mode)
    res = massey(ctx, i, j, rmode, perturb=perturb)
    alt = massey(ctx, i, j, rmode, perturb=seed if perturb is None else perturb + 1)
    body = res.as_json()
    body["degree"] = res.degree
    body["group"] = f"Z/{ctx.p ** (nu(i + j, ctx.p) + 1)}"
    body["expected_order"] = ctx.p
    body["order_matches"] = res.order == ctx.p
    body["alternative_class"] = alt.result_class.as_json()
    body["independent_of_witnesses"] = alt.result_class == res.result_class
    checks = [
        _witness_entry(chain_target(res, "u"), res.u),
        _witness_entry(chain_target(res, "v"), res.v),
    ]
    passed = body["order_matches"] and body["independent_of_witnesses"] and res.indeterminacy.kind == "Zero"
    inputs = {"i": i, "j": j, "mode": mode, "perturb": perturb, "seed": seed}
    return _certificate(ctx, "massey", inputs, [body], checks, passed)


def chain_target(res: MasseyResult, which: str) -> Cochain:
    """The cochain a witness of a Massey computation is required to bound."""
    if which == "u":
        return chain_product(res.a, res.b).scale(koszul_sign(res.a.degree))
    return chain_product(res.b, res.c).scale(koszul_sign(res.b.degree))


# ---- rendering ------------------------------------------------------------


def render(cert: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(cert, indent=2, sort_keys=True)
    if fmt == "csv":
        if cert["command"] != "table":
            raise ValueError("csv output is only available for the table command")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "window", "group", "certified"])
        for r in cert["results"]:
            w.writerow([r["degree"], r["window"], r["group"], r["certified"]])
        return buf.getvalue().rstrip("\n")
    return _PRETTY[cert["command"]](cert)


def _header(cert: dict) -> str:
    c = cert["context"]
    return f"p={c['p']} M={c['precision']} N={c['length']} r={c['unit']}"


def _pretty_verify(cert: dict) -> str:
    lines = [_header(cert)]
    for r in cert["results"]:
        extra = f"  ({r['detail']})" if r["status"] == "skipped" else ""
        lines.append(f"  k={r['k']:>4}  {r['property']:<28} {r['status'].upper()}{extra}")
    lines.append("all properties hold" if cert["passed"] else f"FAILURES (seed {cert['inputs']['seed']})")
    return "\n".join(lines)


def _pretty_table(cert: dict) -> str:
    lines = [_header(cert), f"{'n':>5}  {'k':>4}  {'H^n':<12} certified"]
    for r in cert["results"]:
        lines.append(f"{r['degree']:>5}  {r['window']:>4}  {r['group']:<12} {'yes' if r['certified'] else 'NO'}")
    return "\n".join(lines)


def _pretty_homology(cert: dict) -> str:
    r = cert["results"][0]
    lines = [_header(cert), f"H^{r['degree']} = {r['group']}  (window {r['window']})"]
    if "order" in r and r["order"] is not None:
        lines.append(f"generator order: {r['order']}")
    elif "order" in r:
        lines.append("generator order: infinite")
    for probe in r["probes"]:
        mark = "ok" if probe["ok"] else "MISMATCH"
        lines.append(f"  {probe['probe']:<28} expect {probe['expect']:<13} {mark}")
    lines.append("certified" if cert["passed"] else "NOT certified")
    return "\n".join(lines)


def _pretty_product(cert: dict) -> str:
    r = cert["results"][0]
    n1, n2 = r["degrees"]
    lines = [_header(cert), f"H^{n1} x H^{n2} -> H^2, Z/{r['modulus']} x Z/{r['modulus']} -> Q/Z_({cert['context']['p']})"]
    for e in r["entries"]:
        lines.append(f"  {e['a']} * {e['b']} = {e['product']}")
    if r["injective"] is not None:
        lines.append(f"injective on each factor: {'yes' if r['injective'] else 'NO'}")
    return "\n".join(lines)


def _pretty_massey(cert: dict) -> str:
    r = cert["results"][0]
    lines = [
        _header(cert),
        f"<gamma_{r['i']}, p, gamma_{r['j']}>  mode={r['mode']}",
        f"  a = {_seq_text(r['representatives']['a'])}",
        f"  c = {_seq_text(r['representatives']['c'])}",
        f"  u = {_seq_text(r['witnesses']['u'])}",
        f"  v = {_seq_text(r['witnesses']['v'])}",
    ]
    for chk in cert["witness_checks"]:
        lines.append(f"  d-check at degree {chk['degree']}: residue {'0' if chk['residue_zero'] else 'NONZERO'}")
    cls = r["class"]
    value = cls.get("value", 0)
    lines.append(f"result: {value} in H^{r['degree']} = {r['group']}, order {r['order']}")
    alt = r["alternative_class"].get("value", 0)
    lines.append(f"other witness choice: {alt}  ({'same class' if r['independent_of_witnesses'] else 'DIFFERENT class'})")
    lines.append(f"indeterminacy: {r['indeterminacy']['group']}")
    if not r["order_matches"]:
        lines.append(f"order differs from the expected {r['expected_order']}")
    return "\n".join(lines)


def _seq_text(cochain: dict) -> str:
    parts = []
    for comp in cochain["components"]:
        if comp["kind"] == "S" and not comp["coeffs"]:
            parts.append("0")
        elif comp["kind"] == "S":
            parts.append("<" + ", ".join(str(c) for c in comp["coeffs"][:6]) + (", ..." if len(comp["coeffs"]) > 6 else "") + ">")
        else:
            parts.append(str(comp["numerator"]) if comp["exponent"] == 0 else f"{comp['numerator']}/p^{comp['exponent']}")
    return f"deg {cochain['degree']}: (" + ", ".join(parts) + ")"


_PRETTY = {
    "verify": _pretty_verify,
    "table": _pretty_table,
    "homology": _pretty_homology,
    "product": _pretty_product,
    "massey": _pretty_massey,
}


# ---- certificates and cache -----------------------------------------------


def recheck(cert: dict) -> bool:
    """Re-verify every embedded witness with the library; True iff every recorded check reproduces."""
    c = cert["context"]
    ctx = Context(c["p"], c["precision"], c["length"], c["unit"])
    for chk in cert["witness_checks"]:
        if "target" not in chk:
            continue
        target = Cochain.from_json(ctx, chk["target"])
        w = Cochain.from_json(ctx, chk["witness"])
        if (differential(w) == target) != chk["residue_zero"]:
            return False
    return True


def cache_key(ctx: Context, command: str, inputs: dict) -> str:
    blob = json.dumps(
        {"context": ctx.key(), "command": command, "inputs": inputs, "version": __version__},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def run(args: argparse.Namespace, ctx: Context) -> dict:
    if args.command == "verify":
        return cmd_verify(ctx, args.k, args.samples, args.seed)
    if args.command == "table":
        return cmd_table(ctx, args.degrees, args.probes, args.seed)
    if args.command == "homology":
        return cmd_homology(ctx, args.degree, args.probes, args.seed)
    if args.command == "product":
        return cmd_product(ctx, args.k, args.a, args.b)
    return cmd_massey(ctx, args.i, args.j, args.mode, args.perturb, args.seed)


def main(argv: list[str] | None = None) -> int:
    argv = _normalize_argv(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    if args.format == "csv" and args.command != "table":
        print("error: csv output is only available for the table command", file=sys.stderr)
        return EXIT_CONFIG
    try:
        ctx = make_context(args)
    except EndoDGAError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    inputs = _inputs(args)
    path = None
    cert = None
    if args.cache_dir is not None:
        path = args.cache_dir / f"{cache_key(ctx, args.command, inputs)}.json"
        if path.exists():
            cert = json.loads(path.read_text())
    if cert is None:
        try:
            # normalize through JSON so fresh and cached runs render identically
            cert = json.loads(json.dumps(run(args, ctx), sort_keys=True))
        except (EndoDGAError, ValueError) as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(cert, sort_keys=True))
    print(render(cert, args.format))
    return EXIT_OK if cert["passed"] else EXIT_FAIL


__all__ = ["main", "build_parser", "parse_range", "recheck", "render", "cache_key", "run"]
