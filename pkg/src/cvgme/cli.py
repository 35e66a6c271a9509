"""Command-line entry point ``cvgme``.

Exit status is 0 on success, 2 for usage errors and 3 for numerical failures.
Settings are read from the ``key = value`` file named by ``GME_ACTIVATE_CONFIG``
(or ``--config``); command-line flags override it.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import scan
from .entanglement_sdp import pair_activation_scan
from .errors import CvgmeError, NumericalError, UsageError
from .records import records_to_csv
from .sdp import SolverOptions

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


def _solver_options(cfg: dict) -> SolverOptions:
    opts = SolverOptions()
    for key in ("feastol", "gaptol", "max_iter"):
        if key in cfg:
            setattr(opts, key, cfg[key])
    return opts


def _lambda_grid(text: str | None, steps: int) -> list[float]:
    if text:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --lambda-grid {text!r}") from exc
    else:
        if steps < 1:
            raise UsageError("steps must be positive")
        values = [k / (steps + 1) for k in range(1, steps + 1)]
    if not values or any(not (0 <= v < 1) for v in values):
        raise UsageError("lambda values must lie in [0, 1)")
    return values


def build_parser() -> argparse.ArgumentParser:
    # shared flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="key = value settings file (default: $GME_ACTIVATE_CONFIG)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes for grid sweeps")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="cvgme", description="GME activation thresholds, sweeps and checks.",
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    add = lambda s, name, **kw: s.add_parser(name, parents=[common], **kw)  # noqa: E731

    add(sub, "thresholds", help="r0', r0 and r1 as JSON")

    p = add(sub, "scan", help="parameter sweeps")
    scan_sub = p.add_subparsers(dest="what", required=True)
    w = add(scan_sub, "witness", help="symmetric witness and PPT eigenvalue per r (CSV)")
    w.add_argument("--r-min", type=float, default=0.0)
    w.add_argument("--r-max", type=float, default=1.5)
    w.add_argument("--steps", type=int, default=31)

    g = add(sub, "gabriel", help="two-copy Gabriel criterion per lambda (CSV)")
    g.add_argument("--lambda-grid", help="comma-separated lambda values (default: STEPS interior points of (0,1))")
    g.add_argument("--steps", type=int, default=99)
    g.add_argument("--n", type=int, default=0, help="Fock level on the unpaired mode")
    g.add_argument("--cutoff", type=int, help="truncation for the generic cross-check (default 8)")
    g.add_argument("--no-cross-check", action="store_true")

    ps = add(sub, "pair-scan", help="CM witness value on an (r1, r2) grid (CSV)")
    ps.add_argument("--r1-min", type=float, default=0.05)
    ps.add_argument("--r1-max", type=float, default=1.2)
    ps.add_argument("--r2-min", type=float, default=0.05)
    ps.add_argument("--r2-max", type=float, default=1.95)
    ps.add_argument("--steps", type=int, default=20, help="points per axis")

    e = add(sub, "elements", help="8x8 qubit-subspace table, closed form and oracle (CSV)")
    e.add_argument("--r", type=float, required=True)

    q = add(sub, "qubit-gme", help="fully decomposable witness and PPT eigenvalues (JSON)")
    q.add_argument("--r", type=float, required=True)

    m = add(sub, "multicopy-check", help="CM decomposition test on identical copies (JSON)")
    m.add_argument("--r", type=float, required=True)
    m.add_argument("--copies", type=int, default=2)
    return parser


def run(args, cfg: dict) -> str:
    jobs = args.jobs or cfg.get("jobs", 1)
    opts = _solver_options(cfg)
    if args.command == "thresholds":
        res = scan.thresholds(cfg.get("threshold_tol", 1e-6), cfg.get("sdp_threshold_tol", 1e-5), opts)
        flat = {}
        for name, t in res.items():
            flat[name] = t.root
            flat[f"{name}_lo"], flat[f"{name}_hi"] = t.bracket
            flat[f"{name}_tol"], flat[f"{name}_iterations"] = t.tol, t.iterations
        return scan.to_json(flat)
    if args.command == "scan":
        return records_to_csv(scan.witness_scan(args.r_min, args.r_max, args.steps, jobs))
    if args.command == "gabriel":
        lams = _lambda_grid(args.lambda_grid, args.steps)
        cutoff = args.cutoff if args.cutoff is not None else cfg.get("cutoff", 8)
        return records_to_csv(scan.gabriel_scan(lams, args.n, cutoff, not args.no_cross_check, jobs))
    if args.command == "pair-scan":
        if min(args.r1_min, args.r2_min) < 0:
            raise UsageError("squeezing must be nonnegative")
        r1 = scan.linear_grid(args.r1_min, args.r1_max, args.steps)
        r2 = scan.linear_grid(args.r2_min, args.r2_max, args.steps)
        return records_to_csv(pair_activation_scan(r1, r2, jobs))
    if args.command == "elements":
        return records_to_csv(scan.element_records(args.r))
    if args.command == "qubit-gme":
        return scan.to_json(scan.qubit_gme_report(args.r, opts))
    if args.command == "multicopy-check":
        return scan.to_json(scan.multicopy_report(args.r, args.copies, opts))
    raise UsageError(f"unknown command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("config", None), ("out", None), ("jobs", None), ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = scan.load_config(args.config)
        text = run(args, cfg)
    except NumericalError as exc:
        print(f"cvgme: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CvgmeError as exc:
        print(f"cvgme: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
