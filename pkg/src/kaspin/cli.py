"""Command line harness for the verification campaigns.

Subcommands mirror the library layers: verify-algebra drives the
product/representation property suites, square / reconstruct /
check-polyform exercise the quadratic map on explicit JSON payloads,
and check-metric runs residual campaigns on the named chart presets.

Reports are emitted as compact JSON on stdout (and to --out when
given); human-readable one-liners go to stderr.  Runs are seeded and
byte-deterministic.  Negative mathematical verdicts are successful
runs and exit 0; usage, parsing, and unsupported-input errors exit 2;
only verify-algebra property failures exit 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .clifford_rep import Spinor, build_pairings, build_rep, quantize
from .geometry_lab import preset, run_campaign
from .ka_core import Multivector, Signature, geometric_product, ka_trace
from .rng import make_rng, random_multivector, random_spinor
from .spinor_square import (
    ReconstructionError,
    reconstruct,
    square,
    verify_square_conditions,
)

# symmetry signs of the two pairings, keyed by (d/2) mod 4
_PAIRING_TABLE = {1: (1, -1), 2: (-1, -1), 3: (-1, 1), 0: (1, 1)}


class UsageError(Exception):
    """Bad flags or payloads; mapped to exit code 2."""


def _resolve_tol(args, fallback):
    if args.tol is not None:
        tol = args.tol
    else:
        env = os.environ.get("KASPIN_TOL")
        tol = float(env) if env else fallback
    if tol <= 0.0:
        raise UsageError("tol must be positive")
    return tol


def _require_trials(args):
    if args.trials < 1:
        raise UsageError("trials must be at least 1")
    return args.trials


def _emit(report, args):
    text = json.dumps(report, sort_keys=True, separators=(",", ":"))
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")


def _read_payload(args):
    if args.payload is None or args.payload == "-":
        return json.loads(sys.stdin.read())
    return json.loads(args.payload)


def _signature_from(args, payload=None):
    if isinstance(payload, dict) and "p" in payload and "q" in payload:
        sig = Signature(int(payload["p"]), int(payload["q"]))
        if args.p is not None and (args.p, args.q) != (sig.p, sig.q):
            raise UsageError(
                f"flags give signature ({args.p},{args.q}) "
                f"but the payload carries ({sig.p},{sig.q})"
            )
        return sig
    if args.p is None or args.q is None:
        raise UsageError("signature required: pass --p and --q or embed p/q in the payload")
    return Signature(args.p, args.q)


# ---------------------------------------------------------------------------
# verify-algebra
# ---------------------------------------------------------------------------


def _cmd_verify_algebra(args):
    sig = Signature(args.p, args.q)
    if not sig.supports_rep():
        raise UsageError(
            f"signature ({sig.p},{sig.q}) has no real irreducible matrix model; "
            "need d even and p - q in {0, 2}"
        )
    trials = _require_trials(args)
    tol = _resolve_tol(args, 1e-9)
    rep = build_rep(sig)
    pr = build_pairings(rep)
    rng = make_rng(args.seed, stream=7)

    assoc = 0.0
    iso = 0.0
    trace_err = 0.0
    for _ in range(trials):
        a = random_multivector(sig, rng)
        b = random_multivector(sig, rng)
        c = random_multivector(sig, rng)
        left = geometric_product(geometric_product(a, b), c)
        right = geometric_product(a, geometric_product(b, c))
        assoc = max(assoc, (left - right).norm_inf())
        ea, eb = quantize(rep, a), quantize(rep, b)
        eab = quantize(rep, geometric_product(a, b))
        iso = max(iso, float(np.max(np.abs(eab - ea @ eb))))
        trace_err = max(trace_err, abs(ka_trace(a) - float(np.trace(ea))))

    metric = sig.blade_signs()
    cliff = 0.0
    for i in range(1, sig.d + 1):
        for j in range(i, sig.d + 1):
            ei = Multivector.basis(sig, (i,))
            ej = Multivector.basis(sig, (j,))
            anti = geometric_product(ei, ej) + geometric_product(ej, ei)
            target = 2.0 * metric[1 << (i - 1)] if i == j else 0.0
            cliff = max(cliff, (anti - Multivector.scalar(sig, target)).norm_inf())

    expected = _PAIRING_TABLE[(sig.d // 2) % 4]
    computed = (pr.sigma_plus, pr.sigma_minus)
    checks = {
        "associativity": {"max": assoc, "pass": assoc <= tol},
        "clifford_relation": {"max": cliff, "pass": cliff <= tol},
        "isomorphism": {"max": iso, "pass": iso <= tol},
        "trace": {"max": trace_err, "pass": trace_err <= tol},
        "pairing_table": {
            "expected": list(expected),
            "computed": list(computed),
            "pass": computed == expected,
        },
    }
    verdict = "pass" if all(c["pass"] for c in checks.values()) else "fail"
    report = {
        "command": "verify-algebra",
        "signature": [sig.p, sig.q],
        "trials": trials,
        "seed": args.seed,
        "tol": tol,
        "checks": checks,
        "verdict": verdict,
    }
    _emit(report, args)
    worst = max(assoc, cliff, iso, trace_err)
    print(
        f"verify-algebra ({sig.p},{sig.q}): {verdict} "
        f"(worst residual {worst:.3e}, pairing signs {computed})",
        file=sys.stderr,
    )
    return 0 if verdict == "pass" else 1


# ---------------------------------------------------------------------------
# square / reconstruct / check-polyform
# ---------------------------------------------------------------------------


def _spinor_components(payload):
    if isinstance(payload, dict):
        payload = payload.get("components")
    if not isinstance(payload, list):
        raise UsageError("spinor payload must be a component list or carry 'components'")
    return np.asarray([float(v) for v in payload])


def _cmd_square(args):
    payload = _read_payload(args)
    sig = _signature_from(args, payload)
    if not sig.supports_rep():
        raise UsageError(f"signature ({sig.p},{sig.q}) has no real irreducible matrix model")
    pr = build_pairings(build_rep(sig))
    xi = Spinor(pr.rep, _spinor_components(payload))
    result = square(pr, args.pairing, args.kappa, xi)
    report = {
        "command": "square",
        "signature": [sig.p, sig.q],
        "pairing": result.pairing_tag,
        "kappa": result.kappa,
        "s": result.s,
        "sigma": result.sigma,
        "alpha": json.loads(result.alpha.to_json()),
    }
    _emit(report, args)
    grades = sorted(result.alpha.grades())
    print(
        f"square ({sig.p},{sig.q})/{args.pairing}: grades {grades}",
        file=sys.stderr,
    )
    return 0


def _cmd_reconstruct(args):
    payload = _read_payload(args)
    sig = _signature_from(args, payload)
    if not sig.supports_rep():
        raise UsageError(f"signature ({sig.p},{sig.q}) has no real irreducible matrix model")
    pr = build_pairings(build_rep(sig))
    alpha = Multivector.from_json(payload)
    tol = _resolve_tol(args, 1e-8)
    report = {
        "command": "reconstruct",
        "signature": [sig.p, sig.q],
        "pairing": args.pairing,
        "tol": tol,
    }
    try:
        result = reconstruct(pr, args.pairing, alpha, tol=tol)
    except ReconstructionError as exc:
        report["reconstructible"] = False
        report["reason"] = str(exc)
        _emit(report, args)
        print(f"reconstruct ({sig.p},{sig.q})/{args.pairing}: not a square", file=sys.stderr)
        return 0
    report["reconstructible"] = True
    report["spinor"] = [float(v) for v in result.spinor.components]
    report["kappa"] = result.kappa
    report["residual"] = result.residual
    _emit(report, args)
    print(
        f"reconstruct ({sig.p},{sig.q})/{args.pairing}: "
        f"kappa={result.kappa} residual={result.residual:.3e}",
        file=sys.stderr,
    )
    return 0


def _cmd_check_polyform(args):
    payload = _read_payload(args)
    sig = _signature_from(args, payload)
    if not sig.supports_rep():
        raise UsageError(f"signature ({sig.p},{sig.q}) has no real irreducible matrix model")
    pr = build_pairings(build_rep(sig))
    alpha = Multivector.from_json(payload)
    tol = _resolve_tol(args, 1e-8)
    conditions = verify_square_conditions(
        pr, args.pairing, alpha, n_probes=_require_trials(args), seed=args.seed, tol=tol
    )
    report = {
        "command": "check-polyform",
        "signature": [sig.p, sig.q],
        "pairing": args.pairing,
        "is_square": conditions.is_square,
        "residual_symmetry": conditions.residual_symmetry,
        "residual_idempotent": conditions.residual_idempotent,
        "residual_sandwich": conditions.residual_sandwich,
        "witness_found": conditions.witness_found,
        "tol": conditions.tol,
    }
    _emit(report, args)
    print(
        f"check-polyform ({sig.p},{sig.q})/{args.pairing}: "
        f"is_square={str(conditions.is_square).lower()}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# check-metric
# ---------------------------------------------------------------------------


def _comma_floats(text):
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _cmd_check_metric(args):
    params = {}
    if args.params:
        parsed = json.loads(args.params)
        if not isinstance(parsed, dict):
            raise UsageError("--params must be a JSON object")
        params.update(parsed)
    if args.lam is not None:
        params["lam"] = args.lam
    if args.a is not None:
        params["a"] = list(args.a)
    if args.c is not None:
        params["c"] = args.c
    checks = [part.strip() for part in args.check.split(",") if part.strip()]
    if not checks:
        raise UsageError("--check must name at least one residual family")
    tol = _resolve_tol(args, 1e-6)
    n_points = _require_trials(args)
    ps = preset(args.preset, params)
    reports = []
    for check in checks:
        report = run_campaign(
            ps, check, n_points=n_points, seed=args.seed, tol=tol, perturb=args.perturb
        )
        reports.append(report)
        worst = max((r["max"] for r in report["residuals"].values()), default=0.0)
        print(
            f"check-metric {ps.name} [{check}]: {report['verdict']} (worst {worst:.3e})",
            file=sys.stderr,
        )
    _emit(reports[0] if len(reports) == 1 else reports, args)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kaspin",
        description="seeded verification campaigns for the kaspin package",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default):
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None,
                       help="residual tolerance (default from KASPIN_TOL, else per-command)")
        p.add_argument("--out", default=None, help="also write the JSON report to this path")

    va = sub.add_parser("verify-algebra", help="product and representation property suite")
    va.add_argument("--p", type=int, required=True)
    va.add_argument("--q", type=int, required=True)
    common(va, 100)
    va.set_defaults(func=_cmd_verify_algebra)

    def payload_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("payload", nargs="?", default=None,
                       help="JSON payload ('-' or omitted reads stdin)")
        p.add_argument("--p", type=int, default=None)
        p.add_argument("--q", type=int, default=None)
        p.add_argument("--pairing", choices=("plus", "minus"), default="minus")
        common(p, 10)
        return p

    sq = payload_command("square", "polyform square of a spinor")
    sq.add_argument("--kappa", type=int, choices=(1, -1), default=1)
    sq.set_defaults(func=_cmd_square)

    rc = payload_command("reconstruct", "recover a spinor from its polyform square")
    rc.set_defaults(func=_cmd_reconstruct)

    cp = payload_command("check-polyform", "test the square variety conditions")
    cp.set_defaults(func=_cmd_check_polyform)

    cm = sub.add_parser("check-metric", help="residual campaign on a chart preset")
    cm.add_argument("--preset", required=True)
    cm.add_argument("--params", default=None, help="JSON object of preset parameters")
    cm.add_argument("--lambda", dest="lam", type=float, default=None)
    cm.add_argument("--a", type=_comma_floats, default=None)
    cm.add_argument("--c", type=float, default=None)
    cm.add_argument("--check", default="einstein",
                    help="comma list: killing,einstein,walker,heterotic,bianchi")
    cm.add_argument("--perturb", type=float, default=0.0)
    common(cm, 20)
    cm.set_defaults(func=_cmd_check_metric)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
