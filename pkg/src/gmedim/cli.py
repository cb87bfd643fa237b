"""Command-line interface.

Exit codes: 0 success, 2 invalid input or validation failure, 3 size-guard
refusal.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import combinatorics as comb
from .criteria import verdict
from .errors import GmeError, ParameterError, SizeGuardError, UnsupportedInputError, ValidationError
from .oracle import pure_state_from_density, schmidt_profile
from .scan import (
    REGION_HEADER,
    THRESHOLD_HEADER,
    noise_threshold,
    region_scan,
    rows_to_csv,
    threshold_table,
)
from .states import NamedStateSpec
from .tensor import DensityMatrix, PureState, SparseProvider, as_provider, load_json

EXIT_OK, EXIT_INVALID, EXIT_SIZE = 0, 2, 3


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _int_range(text: str) -> range:
    lo, sep, hi = text.partition(":")
    try:
        return range(int(lo), int(hi if sep else lo) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _load_state(args):
    if bool(args.state) == bool(args.input):
        raise ParameterError("give exactly one of --state and --input")
    if args.state:
        return NamedStateSpec.parse(args.state)
    return load_json(args.input)


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(_round(obj), indent=2) + "\n")


def cmd_evaluate(args) -> None:
    state = _load_state(args)
    provider = state.provider() if isinstance(state, NamedStateSpec) else as_provider(state)
    result = verdict(provider, args.m, tol=args.tol, terms=args.terms, deterministic=args.deterministic_sum)
    out = result.to_dict()
    out["state"] = str(state) if isinstance(state, NamedStateSpec) else args.input
    _emit_json(args, out)


def cmd_schmidt(args) -> None:
    state = _load_state(args)
    if isinstance(state, NamedStateSpec):
        if not state.is_pure:
            raise UnsupportedInputError(f"{state} is a mixed state; use the 'evaluate' subcommand")
        psi = state.pure_state()
    elif isinstance(state, PureState):
        psi = state
    elif isinstance(state, DensityMatrix):
        psi = pure_state_from_density(state)
    elif isinstance(state, SparseProvider):
        psi = pure_state_from_density(state.to_density_matrix())
    else:
        raise UnsupportedInputError("schmidt needs a pure state")
    out = schmidt_profile(psi, args.tol).to_dict()
    _emit_json(args, out)


def cmd_threshold(args) -> None:
    spec = NamedStateSpec.parse(args.state)
    m = args.m[0] if args.m else (0 if spec.kind == "ghz" else (spec.m or 1))
    f = args.f if args.f is not None else spec.shape.d
    p = noise_threshold(spec, m, f, args.tol, max_iter=args.max_iter, criterion=args.criterion)
    _emit_json(args, {"state": str(spec), "m": m, "f": f, "criterion": args.criterion, "p_star": p})


def cmd_threshold_table(args) -> None:
    m = args.m[0] if args.m else 0
    rows = threshold_table(args.n_range, args.d_range, m, args.criterion, args.f_mode, args.tol)
    if args.format == "json":
        _emit_json(args, rows)
    else:
        _emit(args, rows_to_csv(rows, THRESHOLD_HEADER))


def cmd_region_scan(args) -> None:
    rows = region_scan(args.grid, args.grid, workers=args.workers)
    if args.format == "json":
        _emit_json(args, rows)
    else:
        _emit(args, rows_to_csv(rows, REGION_HEADER))


def cmd_enumerate(args) -> None:
    n = args.n
    if args.what == "bipartitions":
        sets = [list(a.members) for a in comb.bipartitions(n)]
    elif args.what == "m-subsets":
        sets = [list(a.members) for a in comb.m_subsets(n, args.m[0] if args.m else 1)]
    elif args.what == "sigma":
        sets = [[list(s.alpha.members), list(s.beta.members)] for s in comb.sigma_pairs(n, args.m[0] if args.m else 1)]
    else:
        if args.alpha is None or args.beta is None:
            raise ParameterError("delta enumeration needs --alpha and --beta")
        alpha = comb.PartySubset.of(args.alpha, n)
        beta = comb.PartySubset.of(args.beta, n)
        sets = [list(s.members) for s in comb.delta_sets(alpha, beta, args.k, args.l, n)]
    _emit_json(args, {"what": args.what, "n": n, "count": len(sets), "sets": sets})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmedim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def state_args(p):
        p.add_argument("--state", help='named state, e.g. "ghz:n=3,d=3,f=3" or "w:n=3,d=3,p=0.1"')
        p.add_argument("--input", help="JSON file with a density matrix, sparse elements or amplitudes")

    def out_args(p, formats=False):
        p.add_argument("--output", help="write to this file instead of stdout")
        if formats:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("evaluate", help="evaluate the criteria and certify a dimensionality")
    state_args(p)
    p.add_argument("--m", type=_int_list, help="criterion indices, e.g. 0,1 (default: 0..n//2)")
    p.add_argument("--tol", type=float, default=1e-9, help="certification guard tolerance")
    p.add_argument("--terms", action="store_true", help="include the per-term breakdown")
    p.add_argument("--deterministic-sum", action="store_true", help="exactly rounded, order-independent sums")
    out_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("schmidt", help="Schmidt ranks of a pure state across all bipartitions")
    state_args(p)
    p.add_argument("--tol", type=float, default=1e-8, help="singular-value rank tolerance")
    out_args(p)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("threshold", help="bisect the white-noise detection threshold")
    p.add_argument("--state", required=True)
    p.add_argument("--m", type=_int_list)
    p.add_argument("--f", type=int, help="target dimensionality (default d)")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--criterion", choices=("q", "fidelity"), default="q")
    out_args(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("threshold-table", help="noise thresholds over a grid of (n, d)")
    p.add_argument("--m", type=_int_list, help="0 for GHZ, m >= 1 for m-Dicke")
    p.add_argument("--n-range", type=_int_range, default=range(3, 7), help="LO:HI inclusive (default 3:6)")
    p.add_argument("--d-range", type=_int_range, default=range(2, 6), help="LO:HI inclusive (default 2:5)")
    p.add_argument("--criterion", choices=("q", "fidelity"), default="q")
    p.add_argument("--f-mode", choices=("gme", "full"), default="full")
    p.add_argument("--tol", type=float, default=1e-7)
    out_args(p, formats=True)
    p.set_defaults(func=cmd_threshold_table)

    p = sub.add_parser("region-scan", help="certified f over the GHZ_4/W_4/noise simplex (n=3, d=4)")
    p.add_argument("--grid", type=int, default=101, help="steps per axis")
    p.add_argument("--workers", type=int, default=None, help="worker processes")
    out_args(p, formats=True)
    p.set_defaults(func=cmd_region_scan)

    p = sub.add_parser("enumerate", help="print the index sets used by the criteria")
    p.add_argument("what", choices=("bipartitions", "m-subsets", "sigma", "delta"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=_int_list)
    p.add_argument("--alpha", type=_int_list)
    p.add_argument("--beta", type=_int_list)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--l", type=int, default=0)
    out_args(p)
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ValidationError, ParameterError, UnsupportedInputError, GmeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
