"""Command-line surface binding the modules into a reproducible pipeline.

JSON reports go to stdout (or -o FILE); a short human summary goes to
stderr so pipelines like ``pcgl preset matrix --m 2 --n 2 | pcgl analyze -``
stay machine-clean.  Exit codes: 0 all verified, 1 verification failure,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import cluster as cl
from . import serialize as ser
from .cgl import alpha_q_matrices, certify_prime_sequence, compute_eta_and_primes, hmax_equations
from .poly import MvLaurent, PolyError
from .presentation import PresentationError, validate_algebra
from .presets import build_affine_space, build_matrix_poisson
from .serialize import FormatError
from .symmetric import (
    compute_d_integers,
    rescale_generators,
    u_element_and_pi,
    validate_symmetric,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2


class CliInputError(Exception):
    pass


def _read_doc(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliInputError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and "presentation" in doc and "n_gens" not in doc:
        doc = doc["presentation"]
    return doc


def _load_presentation(path: str):
    doc = _read_doc(path)
    p, names = ser.presentation_from_doc(doc)
    return p, names, doc


def _emit(report: dict, out: Optional[str], summary: str) -> None:
    text = ser.dump_json(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if summary:
        print(summary, file=sys.stderr)


def _parse_tau(text: str, n: int) -> Tuple[int, ...]:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise CliInputError(f"--tau must be a comma-separated permutation: {text!r}") from exc
    if sorted(vals) != list(range(1, n + 1)):
        raise CliInputError(f"--tau must be a permutation of 1..{n}")
    return tuple(v - 1 for v in vals)


def _parse_inv(text: Optional[str]) -> List[int]:
    if not text:
        return []
    try:
        return [int(x) - 1 for x in text.split(",")]
    except ValueError as exc:
        raise CliInputError(f"--inv must be comma-separated indices: {text!r}") from exc


def _max_n() -> int:
    raw = os.environ.get("PCGL_MAX_N", "20")
    try:
        return int(raw)
    except ValueError:
        raise CliInputError(f"PCGL_MAX_N must be an integer, got {raw!r}")


def _check_enum_cap(n: int) -> None:
    cap = _max_n()
    if n > cap:
        raise CliInputError(f"N = {n} exceeds the enumeration cap PCGL_MAX_N = {cap}")


def _error_report(command: str, exc: Exception) -> dict:
    return {"command": command, "error": {"code": type(exc).__name__, "detail": str(exc)}}


def _bmatrix_dict(b: cl.BMatrix) -> dict:
    return {
        "ex": [l + 1 for l in b.ex],
        "rows": b.as_rows(),
    }


def _rmatrix_dict(r) -> List[List[str]]:
    return [[ser.fraction_to_json(x) for x in row] for row in r]


def _bundle_dict(bundle: cl.TauSeedBundle, names) -> dict:
    return {
        "tau": [v + 1 for v in bundle.tau],
        "tau_bullet_tau": [v + 1 for v in bundle.sigma],
        "variables_x": [ser.poly_report(v, names) for v in bundle.vars_x],
        "variables_y": [ser.poly_report(v, [f"y{i+1}" for i in range(len(bundle.vars_x))])
                        for v in bundle.vars_y],
        "intervals": [[i + 1, m] for (i, m) in bundle.intervals],
        "weights": [list(w) for w in bundle.weights],
        "r": _rmatrix_dict(bundle.r),
        "btilde": _bmatrix_dict(bundle.btilde),
        "beta": {str(l + 1): ser.fraction_to_json(v) for l, v in sorted(bundle.beta.items())},
    }


# --------------------------------------------------------------------- commands


def cmd_preset(args) -> int:
    if args.kind == "matrix":
        p = build_matrix_poisson(args.m, args.n)
        if args.m <= 9 and args.n <= 9:
            names = [f"t{r}{c}" for r in range(1, args.m + 1) for c in range(1, args.n + 1)]
        else:
            names = [f"t{r}_{c}" for r in range(1, args.m + 1) for c in range(1, args.n + 1)]
        summary = f"matrix Poisson preset {args.m}x{args.n}: N = {p.n}, torus rank {p.torus_rank}"
    else:
        q_rows = json.loads(args.q) if args.q else [[0] * args.n for _ in range(args.n)]
        p = build_affine_space(args.n, q_rows)
        names = None
        summary = f"Poisson affine space preset: N = {p.n}"
    _emit(ser.presentation_to_doc(p, names), args.output, summary)
    return EXIT_OK


def cmd_validate(args) -> int:
    p, names, _ = _load_presentation(args.file)
    report = validate_algebra(p, max_nilpotence_iters=args.max_nilpotence_iters)
    doc = {"command": "validate", "validation": report.as_dict()}
    ok = report.passed
    _emit(doc, args.output, f"validation {'passed' if ok else 'FAILED'}: "
          + ", ".join(f"{k}={v}" for k, v in sorted(report.checks.items())))
    return EXIT_OK if ok else EXIT_INPUT


def cmd_analyze(args) -> int:
    p, names, _ = _load_presentation(args.file)
    vrep = validate_algebra(p, max_nilpotence_iters=args.max_nilpotence_iters)
    if not vrep.passed:
        _emit({"command": "analyze", "validation": vrep.as_dict()}, args.output,
              "validation FAILED; aborting analysis")
        return EXIT_INPUT
    eta, seq = compute_eta_and_primes(p)
    qd = certify_prime_sequence(p, eta, seq)
    eqs, dim = hmax_equations(p, eta)
    doc = {
        "command": "analyze",
        "validation": vrep.as_dict(),
        "eta": eta.as_dict(),
        "y": [ser.poly_report(f, names) for f in seq.y],
        "leading_exponents": [list(e) for e in seq.leading_exponents],
        "y_weights": [list(w) for w in seq.weights],
        "alpha": _rmatrix_dict(qd.alpha),
        "q": _rmatrix_dict(qd.q),
        "hmax": {"equations": [e.as_dict() for e in eqs], "dimension": dim},
        "certified": True,
    }
    _emit(doc, args.output,
          f"rank {eta.rank}; exchangeable {[x+1 for x in eta.exchangeable]}; certification passed")
    return EXIT_OK


def cmd_symmetric(args) -> int:
    p, names, _ = _load_presentation(args.file)
    vrep = validate_algebra(p)
    if not vrep.passed:
        _emit({"command": "symmetric", "validation": vrep.as_dict()}, args.output,
              "P-CGL validation FAILED")
        return EXIT_INPUT
    srep, ps = validate_symmetric(p)
    doc = {"command": "symmetric", "validation": vrep.as_dict(), "symmetric": srep.as_dict()}
    if not srep.passed:
        _emit(doc, args.output, "symmetric validation FAILED")
        return EXIT_INPUT
    eta, _seq = compute_eta_and_primes(ps)
    from .symmetric import Incompatible, lambda_star
    doc["lambda_star"] = [ser.fraction_to_json(lambda_star(ps, j)) for j in range(ps.n)]
    try:
        d_map, qscale = compute_d_integers(ps, eta)
    except Incompatible as exc:
        doc["d_integers"] = {"error": {"code": "Incompatible", "detail": str(exc)}}
        _emit(doc, args.output, f"symmetric, but d-integers incompatible: {exc}")
        return EXIT_INPUT
    doc["d_integers"] = {"by_label": {str(k): v for k, v in sorted(d_map.items())},
                         "q": ser.fraction_to_json(qscale)}
    _emit(doc, args.output, f"symmetric; lambda* consistent; d = {d_map}, q = {qscale}")
    return EXIT_OK


def cmd_rescale(args) -> int:
    p, names, _ = _load_presentation(args.file)
    vrep = validate_algebra(p)
    srep, ps = validate_symmetric(p)
    if not (vrep.passed and srep.passed):
        _emit({"command": "rescale", "validation": vrep.as_dict(), "symmetric": srep.as_dict()},
              args.output, "input not a valid symmetric presentation")
        return EXIT_INPUT
    eta, _ = compute_eta_and_primes(ps)
    gamma, p2 = rescale_generators(ps, eta)
    pis = {}
    eta2, _ = compute_eta_and_primes(p2)
    for i in range(p2.n):
        if eta2.succ[i] is not None:
            pis[i] = u_element_and_pi(p2, eta2, i, 1).pi
    doc = {
        "command": "rescale",
        "gamma": [ser.fraction_to_json(g) for g in gamma],
        "pi_after": {str(i + 1): ser.fraction_to_json(v) for i, v in sorted(pis.items())},
        "presentation": ser.presentation_to_doc(p2, names),
    }
    ok = all(v == 1 for v in pis.values())
    _emit(doc, args.output, f"gamma = {[str(g) for g in gamma]}; pi normalized: {ok}")
    return EXIT_OK if ok else EXIT_VERIFY


def _build_context(p, auto_rescale: bool = True):
    """Cluster context; rescales first when the pi-condition fails."""
    try:
        return cl.ClusterContext.build(p), None
    except cl.ClusterError:
        if not auto_rescale:
            raise
        ctx, gamma = cl.ClusterContext.build_normalizing(p)
        return ctx, gamma


def cmd_seeds(args) -> int:
    p, names, doc_in = _load_presentation(args.file)
    ctx, gamma = _build_context(p)
    if args.gamma:
        _check_enum_cap(p.n)
        taus = ctx.gamma().perms
    elif args.tau:
        taus = [_parse_tau(args.tau, p.n)]
    else:
        taus = [tuple(range(p.n))]
    bundles = _map_taus(args, doc_in, taus, ctx, names)
    doc = {"command": "seeds", "bundles": bundles}
    if gamma:
        doc["gamma_applied"] = [ser.fraction_to_json(g) for g in gamma]
    _emit(doc, args.output, f"{len(bundles)} seed bundle(s) computed")
    return EXIT_OK


def _map_taus(args, doc_in, taus, ctx, names) -> List[dict]:
    jobs = getattr(args, "jobs", 1) or 1
    if jobs > 1 and len(taus) > 1:
        payload = json.dumps(ser.presentation_to_doc(ctx.p))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bundle_worker, [(payload, tau, names) for tau in taus]))
        return results
    return [_bundle_dict(cl.seed_for_tau(ctx, tau), names) for tau in taus]


_WORKER_CONTEXTS: dict = {}


def _worker_context(payload: str) -> cl.ClusterContext:
    ctx = _WORKER_CONTEXTS.get(payload)
    if ctx is None:
        p, _ = ser.presentation_from_doc(json.loads(payload))
        ctx = cl.ClusterContext.build(p)
        _WORKER_CONTEXTS[payload] = ctx
    return ctx


def _bundle_worker(item) -> dict:
    payload, tau, names = item
    return _bundle_dict(cl.seed_for_tau(_worker_context(payload), tau), names)


def cmd_btilde(args) -> int:
    p, names, _ = _load_presentation(args.file)
    ctx, gamma = _build_context(p)
    tau = _parse_tau(args.tau, p.n) if args.tau else tuple(range(p.n))
    bundle = cl.seed_for_tau(ctx, tau)
    doc = {"command": "btilde", "tau": [v + 1 for v in tau],
           "btilde": _bmatrix_dict(bundle.btilde),
           "beta": {str(l + 1): ser.fraction_to_json(v) for l, v in sorted(bundle.beta.items())}}
    _emit(doc, args.output, f"exchange matrix with columns {[l+1 for l in bundle.btilde.ex]}")
    return EXIT_OK


def cmd_mutate(args) -> int:
    p, names, _ = _load_presentation(args.file)
    ctx, gamma = _build_context(p)
    tau = _parse_tau(args.tau, p.n) if args.tau else tuple(range(p.n))
    bundle = cl.seed_for_tau(ctx, tau)
    k = args.at - 1
    mutated = cl.mutate_seed(ctx, bundle, k)
    ynames = [f"y{i+1}" for i in range(p.n)]
    doc = {
        "command": "mutate",
        "tau": [v + 1 for v in tau],
        "at": args.at,
        "variables_y": [ser.poly_report(v, ynames) for v in mutated.vars_y],
        "r": _rmatrix_dict(mutated.r),
        "btilde": _bmatrix_dict(mutated.btilde),
        "beta": {str(l + 1): ser.fraction_to_json(v) for l, v in sorted(mutated.beta.items())},
    }
    _emit(doc, args.output, f"mutated seed at direction {args.at}")
    return EXIT_OK


def cmd_chain_verify(args) -> int:
    p, names, doc_in = _load_presentation(args.file)
    _check_enum_cap(p.n)
    ctx, gamma = _build_context(p)
    jobs = args.jobs or 1
    chain = ctx.gamma()
    pairs = [(tau, tau_next) for tau, tau_next, _ in chain.adjacent_pairs()]
    if jobs > 1:
        payload = json.dumps(ser.presentation_to_doc(ctx.p))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            link_dicts = list(pool.map(_link_worker, [(payload, a, b) for a, b in pairs]))
    else:
        link_dicts = [cl.verify_one_step(ctx, a, b).as_dict() for a, b in pairs]
    ok = all(l["verified"] for l in link_dicts)
    n_mut = sum(1 for l in link_dicts if l["branch"] == "mutation")
    doc = {"command": "chain-verify", "links": link_dicts,
           "summary": {"links": len(link_dicts), "mutations": n_mut,
                       "equal": len(link_dicts) - n_mut, "all_verified": ok}}
    if gamma:
        doc["gamma_applied"] = [ser.fraction_to_json(g) for g in gamma]
    _emit(doc, args.output,
          f"{len(link_dicts)} links, {n_mut} mutations, all verified: {ok}")
    return EXIT_OK if ok else EXIT_VERIFY


def _link_worker(item) -> dict:
    payload, tau1, tau2 = item
    return cl.verify_one_step(_worker_context(payload), tau1, tau2).as_dict()


def cmd_membership(args) -> int:
    p, names, _ = _load_presentation(args.file)
    _check_enum_cap(p.n)
    ctx, gamma = _build_context(p)
    coords = args.coords
    elem_text = args.elem
    try:
        triples = json.loads(elem_text)
        f = ser.poly_from_triples(p.n, triples)
    except (json.JSONDecodeError, FormatError):
        prefix = "y" if coords == "y" else "x"
        f = ser.parse_poly_expr(elem_text, p.n, names if coords == "x" else None, prefix=prefix)
    inv = _parse_inv(args.inv)
    ok, witnesses = cl.upper_membership(ctx, f, inv=inv, coords=coords)
    doc = {
        "command": "membership",
        "element": ser.poly_report(f, names if coords == "x" else None),
        "coords": coords,
        "inv": [i + 1 for i in inv],
        "certified": ok,
        "witnesses": [w.as_dict() for w in witnesses],
    }
    _emit(doc, args.output, f"membership certified: {ok}")
    return EXIT_OK if ok else EXIT_VERIFY


# ------------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcgl", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, tau=False, jobs=False):
        sp.add_argument("file", help="presentation JSON file, or - for stdin")
        sp.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
        if tau:
            sp.add_argument("--tau", help="one-line permutation, e.g. 2,3,4,1")
        if jobs:
            sp.add_argument("--jobs", type=int, default=1,
                            help="parallel workers for per-tau computations (default 1)")

    sp = sub.add_parser("preset", help="emit a canonical presentation")
    sp.add_argument("kind", choices=["matrix", "affine"])
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--q", help="affine only: skew-symmetric matrix as JSON rows")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_preset)

    sp = sub.add_parser("validate", help="check the Poisson/torus axioms")
    common(sp)
    sp.add_argument("--max-nilpotence-iters", type=int, default=None)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("analyze", help="eta/p/s, prime sequence, rank, alpha/q, H_max")
    common(sp)
    sp.add_argument("--max-nilpotence-iters", type=int, default=None)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("symmetric", help="symmetry axioms, lambda*, d-integers")
    common(sp)
    sp.set_defaults(func=cmd_symmetric)

    sp = sub.add_parser("rescale", help="normalize pi to 1 by rescaling generators")
    common(sp)
    sp.set_defaults(func=cmd_rescale)

    sp = sub.add_parser("seeds", help="seed bundles per permutation")
    common(sp, tau=True, jobs=True)
    sp.add_argument("--gamma", action="store_true", help="all Gamma_N bundles")
    sp.set_defaults(func=cmd_seeds)

    sp = sub.add_parser("btilde", help="exchange matrix for one permutation")
    common(sp, tau=True)
    sp.set_defaults(func=cmd_btilde)

    sp = sub.add_parser("mutate", help="mutate the tau-seed in one direction")
    common(sp, tau=True)
    sp.add_argument("--at", type=int, required=True, help="1-based exchangeable direction")
    sp.set_defaults(func=cmd_mutate)

    sp = sub.add_parser("chain-verify", help="verify every adjacent Gamma_N link")
    common(sp, jobs=True)
    sp.set_defaults(func=cmd_chain_verify)

    sp = sub.add_parser("membership", help="upper-cluster membership certificate")
    common(sp)
    sp.add_argument("--elem", required=True, help="polynomial (expression or JSON triples)")
    sp.add_argument("--coords", choices=["x", "y"], default="x",
                    help="coordinates of --elem: generators (x) or initial cluster (y)")
    sp.add_argument("--inv", help="frozen indices allowed inverses, e.g. 4,6")
    sp.set_defaults(func=cmd_membership)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, FormatError) as exc:
        _emit(_error_report(args.command, exc), getattr(args, "output", None), f"input error: {exc}")
        return EXIT_INPUT
    except (PresentationError, PolyError) as exc:
        _emit(_error_report(args.command, exc), getattr(args, "output", None), f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
