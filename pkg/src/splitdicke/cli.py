"""Command-line front end (``splitdicke``).

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 resource guard.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, criteria, schemas, shots
from .exceptions import DegenerateStateError, DomainError, InvalidArgumentError, ResourceLimitError
from .splitting import DEFAULT_TAIL_MASS

STATE_CHOICES = ("dicke", "polarized-x", "polarized-y", "polarized-z", "ghz", "twisted", "product-dicke")
SHOT_CRITERIA = ("planar-entanglement", "planar-steering")


def _parse_split(text: str):
    """``binomial``, ``exact`` (n_a = n/2) or ``exact:NA``."""
    if text == "binomial":
        return "binomial", None
    if text == "exact":
        return "exact", None
    if text.startswith("exact:"):
        try:
            return "exact", int(text.split(":", 1)[1])
        except ValueError:
            pass
    raise InvalidArgumentError(f"--split must be 'binomial', 'exact' or 'exact:NA', got {text!r}")


def _parse_list(text: str | None, default):
    if text is None or text == "all":
        return default
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _parse_grid(args) -> np.ndarray:
    if args.mu is not None:
        return np.array([float(t) for t in args.mu.split(",")])
    try:
        start, stop, num = args.mu_grid.split(":")
        return np.linspace(float(start), float(stop), int(num))
    except ValueError:
        raise InvalidArgumentError("--mu-grid must be START:STOP:NUM") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _state_from_args(args):
    name = args.state_pos or args.state
    if name is None:
        raise InvalidArgumentError("a state name is required")
    mode, n_a = _parse_split(args.split)
    return name, analysis.bipartite(name, args.n, mode, n_a, args.mu_value, args.tail_mass)


def cmd_eval(args) -> int:
    name, st = _state_from_args(args)
    names = _parse_list(args.criteria, "all")
    reports = criteria.evaluate_all(st, names)
    done = {r.criterion for r in reports}
    wanted = criteria.CRITERIA if names == "all" else names
    doc = {
        "state": {"name": name, "n": args.n, "split": args.split, "mu": args.mu_value, **criteria.state_info(st)},
        "reports": [r.to_dict() for r in reports],
        "skipped": [c for c in wanted if c not in done],
    }
    schemas.validate(doc, schemas.REPORT_BUNDLE)
    _emit(json.dumps(doc, indent=2), args.out)
    return 0


def cmd_table(args) -> int:
    mode, _ = _parse_split(args.split)
    rows = analysis.cmd_table(args.which, args.n, mode, args.tail_mass)
    if args.out:
        _emit(analysis.table_csv(rows), args.out)
    print(analysis.format_table(rows))
    return 0


def cmd_sweep(args) -> int:
    mode, _ = _parse_split(args.split)
    names = _parse_list(args.criteria, analysis.DEFAULT_SWEEP_CRITERIA)
    res = analysis.cmd_sweep(args.n, _parse_grid(args), mode, names, args.workers, args.tail_mass)
    doc = res.to_dict()
    schemas.validate(doc, schemas.SWEEP_RESULT)
    if args.out and args.out.endswith(".json"):
        _emit(json.dumps(doc, indent=2), args.out)
    else:
        _emit(res.to_csv(), args.out)
    return 0


def cmd_sample(args) -> int:
    _, st = _state_from_args(args)
    records = shots.sample_shots(st, args.shots_z, args.shots_planar, args.seed)
    _emit(shots.records_to_csv(records), args.out)
    return 0


def cmd_ingest(args) -> int:
    records = shots.read_csv(args.csv)
    counts = {s: sum(r.setting == s for r in records) for s in shots.SETTINGS}
    totals = [r.n_a + r.n_b for r in records]
    summary = {
        "records": len(records),
        "counts": counts,
        "n_min": min(totals, default=0),
        "n_max": max(totals, default=0),
    }
    if args.out:
        shots.write_csv(records, args.out)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_estimate(args) -> int:
    records = shots.read_csv(args.csv)
    est = shots.estimate(records, args.bootstrap, args.seed)
    names = _parse_list(args.criteria, SHOT_CRITERIA)
    reports = [shots.evaluate_from_estimates(est, c) for c in names]
    doc = {"estimates": est.to_dict(include_replicates=args.replicates), "reports": [r.to_dict() for r in reports]}
    schemas.validate(doc, schemas.ESTIMATE_BUNDLE)
    _emit(json.dumps(doc, indent=2), args.out)
    return 0


def cmd_verify(args) -> int:
    results = analysis.cmd_verify(args.n)
    passed = all(r.passed for r in results)
    doc = {"passed": passed, "checks": [vars(r) for r in results]}
    schemas.validate(doc, schemas.VERIFY_RESULT)
    if args.out:
        _emit(json.dumps(doc, indent=2), args.out)
    worst = max(results, key=lambda r: r.max_error)
    print(f"{len(results)} oracle checks at N={args.n}: {'all passed' if passed else 'FAILED'} "
          f"(largest deviation {worst.max_error:.2e}, {worst.state} n_a={worst.n_a})")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="splitdicke", description="Steering and entanglement criteria for split spin ensembles.")
    sub = p.add_subparsers(dest="command", required=True)

    def state_args(sp, positional=True):
        if positional:
            sp.add_argument("state_pos", nargs="?", choices=STATE_CHOICES, metavar="STATE")
        sp.add_argument("--state", choices=STATE_CHOICES)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--mu", dest="mu_value", type=float, help="twisting strength for the twisted state")
        sp.add_argument("--split", default="binomial", help="binomial | exact | exact:NA")
        sp.add_argument("--tail-mass", type=float, default=DEFAULT_TAIL_MASS)
        sp.add_argument("--out")

    sp = sub.add_parser("eval", help="evaluate criteria on a split state")
    state_args(sp)
    sp.add_argument("--criteria", default="all", help="'all' or a comma-separated list of criterion ids")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("table", help="reproduce the steering or entanglement table")
    sp.add_argument("which", choices=analysis.TABLES)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--split", default="binomial")
    sp.add_argument("--tail-mass", type=float, default=DEFAULT_TAIL_MASS)
    sp.add_argument("--out", help="write the table as CSV")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("sweep", help="criterion ratios of split twisted states over mu")
    sp.add_argument("--n", type=int, default=500)
    grid = sp.add_mutually_exclusive_group()
    grid.add_argument("--mu", help="comma-separated mu values")
    grid.add_argument("--mu-grid", default="0:0.3:61", help="START:STOP:NUM")
    sp.add_argument("--split", default="binomial")
    sp.add_argument("--tail-mass", type=float, default=DEFAULT_TAIL_MASS)
    sp.add_argument("--criteria", help="comma-separated criterion ids")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="CSV, or JSON when the name ends in .json")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("sample", help="simulate measurement shots as CSV")
    state_args(sp)
    sp.add_argument("--shots-z", type=int, default=10000)
    sp.add_argument("--shots-planar", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("ingest", help="validate a shot CSV")
    sp.add_argument("csv")
    sp.add_argument("--out", help="write the records back in canonical form")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("estimate", help="estimate planar criteria from a shot CSV")
    sp.add_argument("csv")
    sp.add_argument("--bootstrap", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--criteria", help="planar-entanglement,planar-steering")
    sp.add_argument("--replicates", action="store_true", help="include bootstrap replicates in the output")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("verify", help="compare the subspace path with the full qubit oracle")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidArgumentError, DomainError, DegenerateStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
