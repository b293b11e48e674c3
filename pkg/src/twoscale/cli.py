"""Command-line front end.

Exit codes: 0 success, 1 verification failed / saturation did not reach the
goal, 2 regime or range error, 3 a replay step failed, 4 unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import exactq
from .certificate import Certificate, CertificateFormatError, Verdict
from .checker import check_certificate
from .exactq import INFINITY, format_rational
from .prover import DEFAULT_PASSES, HalfGuardViolated, RegimeError, StepFailure, replay_paper_proof, saturate
from .zeroset import DEFAULT_MAX_INTERVALS

EXIT_OK, EXIT_FAIL, EXIT_REGIME, EXIT_STEP, EXIT_PARSE = 0, 1, 2, 3, 4

SWEEP_HEADER = ["q", "regime", "result", "detail", "millis"]

SWEEP_HELP = """\
CSV columns:
  q       exact sample as num/den
  regime  CaseI, CaseII, AboveThreshold or Invalid
  result  certify mode: TRIVIAL_ONLY, REGIME_ERROR or STEP_FAILURE
          spectral mode: dominant eigenvalue from power iteration
  detail  certify mode: step count, or the failing check / regime
          spectral mode: best residual of the minimum-residual search
  millis  wall time of the row in milliseconds
"""


def _rational(text: str) -> Fraction:
    try:
        return exactq.as_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an exact rational num/den") from exc


def _seed_n(text: str):
    if text.lower() in ("inf", "infinity"):
        return INFINITY
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed index must be a natural number or 'inf'") from None
    if n < 0:
        raise argparse.ArgumentTypeError("seed index must be non-negative")
    return n


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _default_out(q: Fraction, stem: str) -> Path:
    return Path(f"{stem}_{q.numerator}_{q.denominator}.json")


def _write_cert(cert: Certificate, out: Optional[str], stem: str) -> Path:
    path = Path(out) if out else _default_out(cert.q, stem)
    path.write_text(cert.dumps())
    return path


def cmd_certify(args) -> int:
    q = args.q
    regime = exactq.classify_regime(q)
    print(f"q = {format_rational(q)}  regime = {regime.tag.value}")
    try:
        cert = replay_paper_proof(q, (args.seed_n, args.seed_eps), override_regime=args.override_regime)
    except RegimeError as exc:
        print(f"RegimeError: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except HalfGuardViolated as exc:
        print(f"RegimeError: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except StepFailure as exc:
        check = f" ({exc.check})" if exc.check else ""
        print(f"StepFailure at step {exc.step_index}{check}: {exc.reason}", file=sys.stderr)
        return EXIT_STEP
    path = _write_cert(cert, args.out, "certificate")
    report = check_certificate(cert)
    print(f"steps = {len(cert.steps)}  verdict = {cert.verdict.value}  verified = {report.ok}")
    print(f"certificate written to {path}")
    if not report.ok:
        print(f"verification failed at step {report.failed_step}: {report.reason}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if cert.verdict is Verdict.TRIVIAL_ONLY else EXIT_FAIL


def cmd_saturate(args) -> int:
    q = args.q
    regime = exactq.classify_regime(q)
    print(f"q = {format_rational(q)}  regime = {regime.tag.value}")
    try:
        result = saturate(q, budget=(args.passes, args.max_intervals), seed=(args.seed_n, args.seed_eps))
    except HalfGuardViolated as exc:
        print(f"RegimeError: {exc}", file=sys.stderr)
        return EXIT_REGIME
    cert = result.certificate
    path = _write_cert(cert, args.out, "saturation")
    report = check_certificate(cert)
    print(f"status = {result.status}  passes = {result.passes}  steps = {len(cert.steps)}  "
          f"intervals = {len(result.zero_set.intervals)}  verified = {report.ok}")
    print(f"certificate written to {path}")
    if not report.ok:
        print(f"verification failed at step {report.failed_step}: {report.reason}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if result.status == "GOAL" else EXIT_FAIL


def cmd_verify(args) -> int:
    try:
        text = Path(args.path).read_text()
        cert = Certificate.loads(text)
    except (OSError, CertificateFormatError) as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = check_certificate(cert)
    if report.ok:
        print(f"OK: q = {format_rational(cert.q)}  verdict = {cert.verdict.value}  steps = {len(cert.steps)}")
        return EXIT_OK
    where = "header" if report.failed_step is None else f"step {report.failed_step}"
    print(f"FAILED at {where}: {report.reason}")
    return EXIT_FAIL


def _sweep_row(q: Fraction, args) -> List[str]:
    start = time.perf_counter()
    regime = exactq.classify_regime(q)
    if args.mode == "certify":
        try:
            cert = replay_paper_proof(q, (args.seed_n, args.seed_eps))
            ok = check_certificate(cert).ok
            result = cert.verdict.value if ok else "UNVERIFIED"
            detail = str(len(cert.steps))
        except RegimeError as exc:
            result, detail = "REGIME_ERROR", exc.tag.value
        except StepFailure as exc:
            result, detail = "STEP_FAILURE", exc.check or str(exc.step_index)
    else:
        from . import spectral

        grid = spectral.Grid(q, args.grid)
        power = spectral.power_iteration(spectral.assemble_matrix(grid), tol=args.tol,
                                         max_iter=args.power_iters, seed=args.rand_seed)
        search = spectral.min_residual_search(grid, args.iters, seed=args.rand_seed)
        result, detail = repr(power.eigenvalue), repr(search.residual)
    millis = (time.perf_counter() - start) * 1000
    return [format_rational(q), regime.tag.value, result, detail, f"{millis:.1f}"]


def cmd_sweep(args) -> int:
    if not 0 < args.qmin < args.qmax < 1 and not (args.steps == 1 and 0 < args.qmin < 1):
        print("sweep needs 0 < qmin < qmax < 1", file=sys.stderr)
        return EXIT_REGIME
    samples = sorted(exactq.rational_grid(args.qmin, args.qmax, args.steps))
    rows = [_sweep_row(q, args) for q in samples]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
        print(f"{len(rows)} rows written to {args.out}")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_spectral(args) -> int:
    from . import spectral

    q = args.q
    if not 0 < q < 1:
        print(f"q = {q} is not in (0, 1)", file=sys.stderr)
        return EXIT_REGIME
    grid = spectral.Grid(q, args.grid)
    A = spectral.assemble_matrix(grid)
    power = spectral.power_iteration(A, tol=args.tol, max_iter=args.power_iters, seed=args.rand_seed)
    v = spectral.GridFunction(grid, power.vector)
    search = spectral.min_residual_search(grid, args.iters, seed=args.rand_seed)
    dev0, devQ = spectral.remark2_check(search.function)
    print(f"q = {format_rational(q)}  grid = {grid.n}  Q = {grid.Q:.12g}")
    print(f"power iteration: lambda = {power.eigenvalue:.12g}  converged = {power.converged}  "
          f"iterations = {power.iterations}  residual(v) = {spectral.residual(v):.6g}")
    print(f"min residual search: r* = {search.residual:.6g}  iters = {args.iters}  seed = {args.rand_seed}")
    print(f"f(0), f(Q) deviations of the minimizer: {dev0:.6g}, {devQ:.6g}")
    if args.out:
        search.function.to_csv(args.out)
        print(f"minimizer written to {args.out}")
    return EXIT_OK


THRESHOLDS = [
    ("case split (3 - sqrt 5)/2", exactq.CASE_SPLIT_POLY, "q^2 - 3q + 1"),
    ("earlier bound sqrt 2 - 1", exactq.SQRT2_POLY, "q^2 + 2q - 1"),
    ("cubic threshold (1 - 2^(1/3) + 4^(1/3))/3", exactq.CUBIC_POLY, "3q^3 - 3q^2 + 3q - 1"),
]


def threshold_decimals(tol=Fraction(1, 10**12)) -> List[float]:
    return [float(exactq.bisect_root(coeffs, 0, 1, tol)) for _, coeffs, _ in THRESHOLDS]


def cmd_constants(args) -> int:
    for (label, _, poly), value in zip(THRESHOLDS, threshold_decimals()):
        print(f"{label}: root of {poly} in (0,1) ~ {value:.10f} (approximation, bisection)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twoscale", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def seed_flags(p):
        p.add_argument("--seed-n", type=_seed_n, default=0, help="seed index n (natural or 'inf')")
        p.add_argument("--seed-eps", type=int, choices=(-1, 1), default=1)

    p = sub.add_parser("certify", help="replay the propagation proof for one q and write a certificate")
    p.add_argument("--q", type=_rational, required=True, help="q as num/den")
    seed_flags(p)
    p.add_argument("--out", help="certificate path (default certificate_<num>_<den>.json)")
    p.add_argument("--override-regime", action="store_true",
                   help="replay even above the threshold, to show where the chain breaks")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("saturate", help="run every rule to a fixpoint and write a certificate")
    p.add_argument("--q", type=_rational, required=True)
    seed_flags(p)
    p.add_argument("--passes", type=_positive, default=DEFAULT_PASSES)
    p.add_argument("--max-intervals", type=_positive, default=DEFAULT_MAX_INTERVALS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_saturate)

    p = sub.add_parser("verify", help="check a certificate file independently")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    def numeric_flags(p):
        p.add_argument("--grid", type=_positive, default=256, help="grid points on [-Q, Q]")
        p.add_argument("--iters", type=_positive, default=200, help="minimum-residual search iterations")
        p.add_argument("--power-iters", type=_positive, default=10_000)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--rand-seed", type=int, default=0)

    p = sub.add_parser("sweep", help="tabulate a range of exact rational q as CSV",
                       epilog=SWEEP_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--qmin", type=_rational, required=True)
    p.add_argument("--qmax", type=_rational, required=True)
    p.add_argument("--steps", type=_positive, default=10)
    p.add_argument("--mode", choices=("certify", "spectral"), default="certify")
    seed_flags(p)
    numeric_flags(p)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectral", help="numerical probes of the transfer operator")
    p.add_argument("--q", type=_rational, required=True)
    numeric_flags(p)
    p.add_argument("--out", help="write the minimizer as x,value CSV")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("constants", help="print the thresholds as polynomials with decimal approximations")
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which doubles as the range/regime code
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
