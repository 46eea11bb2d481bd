"""Command line interface: ``mccert {certify,curves,oracle,simulate,parity-sim}``.

Exit codes: 0 success, 1 oracle disagreement, 2 input error, 3 physics error.
Numeric tolerances can be overridden with ``MCCERT_<FIELD>`` environment
variables (see :class:`mccert.NumericPolicy`).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _stdio
import math
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from ._policy import ClampWarning, InputError, MCCertError, NumericPolicy, PhysicsError
from .certify import CountsRecord, bootstrap, certify, estimate_params_from_counts, neg_entropy_lower_bound
from .densmat import correlation_profile, purity, xlog2x
from .estimator import PurityBoundTransformer
from .io import SCHEMA_VERSION, counts_sha256, counts_to_json, dumps, load_counts, load_state_spec
from .oracle import candidates, exact_d2, grid_oracle_min, sampled_oracle_min
from .photonics import parity_expectation_mixed, simulate_coincidence_counts, simulate_parity_counts

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PHYSICS = 0, 1, 2, 3


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


@contextmanager
def _collect_warnings(sink: list):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ClampWarning)
        yield
    sink.extend({"kind": "clamp", "message": str(w.message)} for w in caught
                if issubclass(w.category, ClampWarning))


def cmd_certify(args, policy: NumericPolicy) -> int:
    policy = dataclasses.replace(policy, mc_threshold=args.mc_threshold)
    counts = load_counts(args.input)
    notices: list[dict] = []
    with _collect_warnings(notices):
        inp = estimate_params_from_counts(counts, args.noise_model, policy=policy)
    report = certify(inp, policy=policy)
    report.warnings[:0] = notices
    doc = {
        "schema_version": SCHEMA_VERSION,
        "input": {
            "d": inp.d,
            "zeta": list(inp.zeta),
            "gamma": inp.gamma,
            "q": inp.q,
            "noise_model": inp.noise_model.kind,
            "purity_total": inp.purity_total,
        },
        "report": report.to_dict(),
        "provenance": {
            "counts_sha256": counts_sha256(counts),
            "flags": {"noise_model": args.noise_model, "mc_threshold": args.mc_threshold,
                      "bootstrap": args.bootstrap, "seed": args.seed},
            "policy": dataclasses.asdict(policy),
            "version": __version__,
        },
    }
    if args.bootstrap > 0:
        doc["bootstrap"] = bootstrap(counts, args.bootstrap, args.seed, args.noise_model, policy=policy)
    _emit(dumps(doc), args.out)
    return EXIT_OK


def curve_rows(d_min: int, d_max: int, points: int, mode: str) -> list[tuple[int, float, float]]:
    if not 2 <= d_min <= d_max <= 64:
        raise InputError("need 2 <= d_min <= d_max <= 64")
    if points < 2:
        raise InputError("need at least 2 points per curve")
    rows = []
    for d in range(d_min, d_max + 1):
        P = np.linspace(1.0 / d, 1.0, points)
        P[0], P[-1] = 1.0 / d, 1.0
        bt = PurityBoundTransformer(d=d, output="ree" if mode == "ree" else "dstar").fit()
        rows.extend((d, float(p), float(b)) for p, b in zip(P, bt.transform(P)[:, 0]))
    return sorted(rows)


def cmd_curves(args, policy: NumericPolicy) -> int:
    rows = curve_rows(args.d_min, args.d_max, args.points, args.mode)
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "purity", "bound"])
    for d, p, b in rows:
        w.writerow([d, _fmt(p), str(int(b)) if args.mode == "dstar" else _fmt(b)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def oracle_check(d: int, P: float, resolution: float = 1e-3, samples: int = 100_000, seed: int = 42):
    """Candidate table plus brute-force comparison for one ``(d, P)``.

    Returns ``(candidates, oracle_min, closed_form, method, passed)``.
    """
    if int(d) != d or d < 2:
        raise InputError("d must be an integer >= 2")
    if not 1.0 / d - 1e-12 <= P <= 1.0 + 1e-12:
        raise InputError(f"purity {P!r} is infeasible for d={d}: must lie in [1/d, 1]")
    closed = neg_entropy_lower_bound(d, P, clamp_tol=1e-12)
    cands = candidates(d, P) if d >= 3 and P > 1.0 / d + 1e-12 else []
    if d == 2:
        found, method = float(np.sum(xlog2x(exact_d2(min(max(P, 0.5), 1.0))))), "exact"
    elif P <= 1.0 / d + 1e-12:
        found, method = -math.log2(d), "unique"
    elif d in (3, 4):
        found, method = grid_oracle_min(d, P, resolution), "grid"
    else:
        found, method = sampled_oracle_min(d, P, samples, np.random.default_rng(seed)), "sampled"
    if method == "sampled":
        passed = found >= closed - 1e-9
    else:
        passed = abs(found - closed) <= 1e-3
    phys = [c for c in cands if c.physical]
    if phys:
        passed = passed and min(phys, key=lambda c: (c.objective, c.s_a)).s_a == 1
    return cands, found, closed, method, passed


def cmd_oracle(args, policy: NumericPolicy) -> int:
    cands, found, closed, method, passed = oracle_check(args.d, args.purity, args.resolution,
                                                        args.samples, args.seed)
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s_a", "phi_a", "phi_x", "objective", "physical"])
    for c in cands:
        w.writerow([c.s_a, _fmt(c.phi_a), _fmt(c.phi_x), _fmt(c.objective), str(c.physical).lower()])
    _emit(buf.getvalue(), args.out)
    verdict = "PASS" if passed else "FAIL"
    print(f"{verdict} d={args.d} purity={_fmt(args.purity)} method={method} "
          f"oracle_min={_fmt(found)} closed_form={_fmt(closed)}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_simulate(args, policy: NumericPolicy) -> int:
    if args.shots <= 0:
        raise InputError("shots must be positive")
    rho, _, _ = load_state_spec(args.spec)
    rng = np.random.default_rng(args.seed)
    coinc = simulate_coincidence_counts(rho, args.shots, rng)
    parity_shots = args.shots if args.parity_shots is None else args.parity_shots
    even, odd = simulate_parity_counts(rho, parity_shots, rng)
    rec = CountsRecord(coinc, even, odd, {"generator": "mccert simulate", "seed": str(args.seed),
                                          "shots": str(args.shots),
                                          "parity_shots": str(parity_shots)})
    _emit(dumps(counts_to_json(rec)), args.out)
    return EXIT_OK


def cmd_parity_sim(args, policy: NumericPolicy) -> int:
    if args.shots <= 0:
        raise InputError("shots must be positive")
    rho, _, _ = load_state_spec(args.spec)
    if correlation_profile(rho).q > 1e-9:
        expected = purity(rho)
    else:
        expected = parity_expectation_mixed(rho, rho)
    even, odd = simulate_parity_counts(rho, args.shots, args.seed)
    n = even + odd
    sigma = math.sqrt(max(1.0 - expected**2, 0.0) / n)
    doc = {"schema_version": SCHEMA_VERSION, "even": even, "odd": odd, "shots": n,
           "estimate": (even - odd) / n, "expected": expected, "sigma": sigma,
           "purity": purity(rho), "seed": args.seed}
    _emit(dumps(doc), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mccert", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify entanglement from a counts file")
    c.add_argument("input")
    c.add_argument("--noise-model", choices=["auto", "none", "white", "incoherent"], default="auto")
    c.add_argument("--mc-threshold", type=float, default=None)
    c.add_argument("--bootstrap", type=int, default=0, metavar="N")
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_certify)

    c = sub.add_parser("curves", help="REE or d* bound curves for uniform correlations")
    c.add_argument("--d-min", type=int, default=2)
    c.add_argument("--d-max", type=int, default=12)
    c.add_argument("--points", type=int, default=101)
    c.add_argument("--mode", choices=["ree", "dstar"], default="ree")
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_curves)

    c = sub.add_parser("oracle", help="candidate table and brute-force check of the entropy bound")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--purity", type=float, required=True)
    c.add_argument("--resolution", type=float, default=1e-3)
    c.add_argument("--samples", type=int, default=100_000)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_oracle)

    c = sub.add_parser("simulate", help="simulate a counts file from a state spec")
    c.add_argument("spec")
    c.add_argument("--shots", type=int, default=100_000)
    c.add_argument("--parity-shots", type=int, default=None)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("parity-sim", help="simulate the two-copy parity (purity) measurement")
    c.add_argument("spec")
    c.add_argument("--shots", type=int, default=100_000)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_parity_sim)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        policy = NumericPolicy.from_env()
        if getattr(args, "mc_threshold", 0.0) is None:
            args.mc_threshold = policy.mc_threshold
        return args.func(args, policy)
    except PhysicsError as exc:
        print(f"mccert: physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except MCCertError as exc:
        print(f"mccert: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
