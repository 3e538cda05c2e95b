"""Command-line experiment runner.

Every subcommand writes one report (JSON by default) to ``--output``
(``-`` for stdout).  Exit codes: 0 success, 1 a residual above its threshold,
2 invalid configuration, 3 a size cap exceeded.

An optional ``--config FILE`` of ``key=value`` lines supplies defaults;
explicit flags win.
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .errors import CapExceeded, InvalidSpecError, PermflowError, StateSpaceTooLarge
from .evolve import (
    evolve,
    factorial_cap,
    initial_delta,
    marginal_table,
    verify_marginal_heat,
)
from .lattice import build_lattice, heat_kernel
from .pairings import OrderedPair, PairedSubset
from .permanent import mc_estimate_permanent, permanent
from .polymer import (
    PolymerSolution,
    c_asymptotic,
    derive_w,
    eval_C_expansion,
    eval_marginal_expansion,
    loads_solution,
    rank1_solution,
    solve_c,
    trivial_solution,
)
from .spinwave import evolve_subset_function, forgetful, verify_duality, verify_forgetful
from .verification import run_suite

EXIT_OK, EXIT_RESIDUAL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3

MARGINAL_TOL = 1e-7
FORGETFUL_TOL = 1e-7
DUALITY_TOL = 1e-9


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dims", type=_int_list, default=[2, 2], help="lattice extents, e.g. 2,3")
    p.add_argument("--t", type=float, default=1.0, help="time")
    p.add_argument("--t-grid", type=_float_list, default=None, help="comma-separated times (overrides --t)")
    p.add_argument("--subset", type=_int_list, default=None, help="context vertex set, e.g. 0,3")
    p.add_argument("--method", choices=("auto", "exact-spectral", "ode"), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--cap-factorial", type=int, default=None, help="override the N! state-space cap")
    p.add_argument("--cap-partition", type=int, default=None, help="override the partition-size cap")
    p.add_argument("--output", default="-", help="report path, '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", default=None, help="key=value file merged under explicit flags")


SUBCOMMANDS = {
    "kernel": "single-particle heat kernel g(t)",
    "evolve": "distribution over the group at time t from the identity",
    "marginal": "ordered-pair marginal table on --subset",
    "verify-marginal-heat": "commuting diagram: evolve-then-marginalize vs marginalize-then-evolve",
    "polymer-eval": "polymer expansion of C (or of the marginal on --subset) under a solution",
    "derive-w": "boundary weight w of a paired subset from a solution's u table",
    "solve-c": "constant c with c^N perm(g(t)) = 1",
    "c-asymptotic": "(N!/N^N)^(-1/N) and its gap to e",
    "mc-permanent": "Monte Carlo estimate of perm(g(t))",
    "verify-forgetful": "forgetful commuting diagram against the subset hop generator",
    "verify-duality": "subset function vs its complement dual",
    "verify-all": "full check suite with a pass/fail summary",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommand_parsers = {}
    for name, help_text in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        parser.subcommand_parsers[name] = p
        _common(p)
        if name in ("polymer-eval", "derive-w"):
            p.add_argument("--solution", default="trivial", help="'trivial', 'rank1', or a solution file")
            p.add_argument("--c", type=float, default=None, help="rank-1 constant (default: solve_c at t)")
        if name == "polymer-eval":
            p.add_argument("--state", default=None, help="ordered pair text form, e.g. 0>1,1>0")
            p.add_argument("--complement-in-product", action="store_true")
        if name == "derive-w":
            p.add_argument("--pair", required=False, default=None, help="paired subset, e.g. {0,1}>{2,3}")
        if name == "c-asymptotic":
            p.add_argument("--n", type=int, default=None, help="vertex count (default: from --dims)")
        if name == "verify-all":
            p.add_argument("--skip-large", action="store_true", help="skip the 40320-state chain")
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidSpecError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = _read_config(args.config)
        sub = parser.subcommand_parsers[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(config) - known)
        if unknown:
            raise InvalidSpecError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def _method(args, n_states: int) -> str:
    if args.method != "auto":
        return args.method
    return "exact-spectral" if n_states <= factorial_cap("exact-spectral", None) else "ode"


def _times(args) -> list[float]:
    return list(args.t_grid) if args.t_grid else [args.t]


def _subsets_for(args, n: int, lo: int = 1, hi: int | None = None):
    if args.subset is not None:
        return [tuple(sorted(set(args.subset)))]
    hi = n if hi is None else hi
    return [s for k in range(lo, hi + 1) for s in itertools.combinations(range(n), k)]


def _solution(args, lattice, t: float, C) -> PolymerSolution:
    if args.solution == "trivial":
        return trivial_solution(C)
    if args.solution == "rank1":
        g = heat_kernel(lattice, t)
        c = solve_c(g) if args.c is None else args.c
        return rank1_solution(g, c)
    path = Path(args.solution)
    if not path.exists():
        raise InvalidSpecError(f"solution {args.solution!r} is neither 'trivial', 'rank1' nor a file")
    return loads_solution(path.read_text(), label=path.name, t=t)


def _lattice(args):
    lat = build_lattice(args.dims)
    return lat, lat.n_vertices


def _guard_states(args, n_states: int, method: str) -> None:
    cap = args.cap_factorial
    limit = factorial_cap(method, cap)
    if n_states > limit:
        raise StateSpaceTooLarge(f"{n_states} states exceeds the {method} cap of {limit}")


def run(args: argparse.Namespace) -> tuple[int, dict, str | None]:
    """Execute a parsed command; returns (exit code, report dict, optional CSV text)."""
    cmd = args.command
    lat, n = _lattice(args)
    times = _times(args)
    params = {
        "dims": list(lat.dims),
        "times": times,
        "subset": args.subset,
        "method": args.method,
        "seed": args.seed,
        "samples": args.samples,
    }
    results: dict = {}
    residuals: dict = {}
    csv_text = None
    failed = False
    n_states = math.factorial(n)

    if any(t < 0 for t in times):
        raise InvalidSpecError("times must be nonnegative")
    if args.format == "csv" and cmd not in ("kernel", "evolve", "marginal", "verify-forgetful"):
        raise InvalidSpecError(f"--format csv is not available for {cmd}")

    if cmd == "kernel":
        method = "exact-spectral" if args.method == "auto" else args.method
        for t in times:
            g = heat_kernel(lat, t, method)
            results[io.fmt(t)] = g.g.tolist()
            residuals[io.fmt(t)] = {
                "row_sum_defect": float(np.abs(g.g.sum(axis=1) - 1).max()),
                "col_sum_defect": float(np.abs(g.g.sum(axis=0) - 1).max()),
            }
            csv_text = io.kernel_csv(g)

    elif cmd in ("evolve", "marginal"):
        method = _method(args, n_states)
        _guard_states(args, n_states, method)
        t = times[0]
        C = evolve(initial_delta(n), lat, t, method, args.cap_factorial)
        residuals["mass_defect"] = abs(float(C.values.sum()) - 1.0)
        if cmd == "evolve":
            results["states"] = [str(o) for o, _ in C.items()]
            results["values"] = C.values.tolist()
            csv_text = io.distribution_csv(C)
        else:
            if args.subset is None:
                raise InvalidSpecError("marginal needs --subset")
            m = marginal_table(C, args.subset)
            results["S"] = list(m.S)
            results["states"] = [str(o) for o in m.keys()]
            results["values"] = m.values.tolist()
            csv_text = io.marginal_csv(m)
        params["method"] = method

    elif cmd == "verify-marginal-heat":
        method = _method(args, n_states)
        _guard_states(args, n_states, method)
        worst = 0.0
        for S in _subsets_for(args, n):
            for t in times:
                r = verify_marginal_heat(lat, S, t, method, cap=args.cap_factorial)
                results[f"{','.join(map(str, S))}@{io.fmt(t)}"] = r
                worst = max(worst, r)
        residuals = {"max": worst, "threshold": MARGINAL_TOL}
        failed = worst > MARGINAL_TOL

    elif cmd == "polymer-eval":
        _guard_states(args, n_states, "exact-spectral")
        t = times[0]
        C = evolve(initial_delta(n), lat, t)
        sol = _solution(args, lat, t, C)
        cap = args.cap_partition
        results["solution"] = sol.label
        results["complement_in_product"] = args.complement_in_product
        if args.subset is None:
            states = [OrderedPair.from_text(args.state)] if args.state else [o for o, _ in C.items()]
            values = {str(o): eval_C_expansion(sol, o, "reduced", cap) for o in states}
            exact = {str(o): C[o] for o in states}
            results["expansion"] = values
            results["total"] = float(sum(values.values())) if not args.state else None
        else:
            m = marginal_table(C, args.subset)
            states = [OrderedPair.from_text(args.state)] if args.state else m.keys()
            values = {
                str(o): eval_marginal_expansion(sol, m.S, o, n, "reduced", args.complement_in_product, cap)
                for o in states
            }
            exact = {str(o): m[o] for o in states}
            results["expansion"] = values
        results["exact"] = exact
        residuals["max_abs"] = max(abs(values[k] - exact[k]) for k in values)

    elif cmd == "derive-w":
        _guard_states(args, n_states, "exact-spectral")
        t = times[0]
        C = evolve(initial_delta(n), lat, t)
        sol = _solution(args, lat, t, C)
        vs = PairedSubset.from_text(args.pair) if args.pair else PairedSubset.full(n)
        results = {"solution": sol.label, "pair": str(vs), "w": derive_w(sol.u, vs, args.cap_partition)}

    elif cmd == "solve-c":
        method = "exact-spectral" if args.method == "auto" else args.method
        for t in times:
            results[io.fmt(t)] = solve_c(heat_kernel(lat, t, method))
        results["c_asymptotic"] = c_asymptotic(n)
        results["gap_to_e"] = math.e - results[io.fmt(times[-1])]
        series = [results[io.fmt(t)] for t in sorted(times)]
        results["nondecreasing_on_grid"] = all(b >= a - 1e-12 for a, b in zip(series, series[1:]))

    elif cmd == "c-asymptotic":
        count = args.n if args.n is not None else n
        c = c_asymptotic(count)
        results = {"N": count, "c": c, "e": math.e, "gap_to_e": math.e - c}

    elif cmd == "mc-permanent":
        t = times[0]
        g = heat_kernel(lat, t).g
        est, se = mc_estimate_permanent(g, args.samples, args.seed)
        exact = permanent(g)
        results = {"estimate": est, "std_error": se, "exact": exact}
        residuals = {"z_score": abs(est - exact) / se if se > 0 else 0.0}

    elif cmd == "verify-forgetful":
        method = _method(args, n_states)
        _guard_states(args, n_states, method)
        worst = 0.0
        for s in _subsets_for(args, n):
            for t in times:
                r = verify_forgetful(lat, s, t, method)
                results[f"{','.join(map(str, s))}@{io.fmt(t)}"] = r
                worst = max(worst, r)
        if args.format == "csv":
            if args.subset is None:
                raise InvalidSpecError("--format csv for verify-forgetful needs --subset")
            f0 = forgetful(marginal_table(initial_delta(n), args.subset))
            csv_text = io.subset_function_csv(evolve_subset_function(f0, lat, times[0], method))
        residuals = {"max": worst, "threshold": FORGETFUL_TOL}
        failed = worst > FORGETFUL_TOL

    elif cmd == "verify-duality":
        method = _method(args, n_states)
        _guard_states(args, n_states, method)
        worst = 0.0
        for t in times:
            C = evolve(initial_delta(n), lat, t, method, args.cap_factorial)
            for s in _subsets_for(args, n, 1, n - 1):
                r = verify_duality(lat, s, t, method, C=C)
                results[f"{','.join(map(str, s))}@{io.fmt(t)}"] = r
                worst = max(worst, r)
        residuals = {"max": worst, "threshold": DUALITY_TOL}
        failed = worst > DUALITY_TOL

    elif cmd == "verify-all":
        _guard_states(args, n_states, "exact-spectral")
        checks = run_suite(tuple(lat.dims), times[0], args.seed, args.samples, not args.skip_large)
        for c in checks:
            results[c.name] = {"passed": c.passed, "detail": c.detail}
            residuals[c.name] = {"value": c.residual, "threshold": c.threshold}
        results["summary"] = {
            "passed": sum(c.passed for c in checks),
            "failed": sum(not c.passed for c in checks),
            "lines": [c.line() for c in checks],
        }
        failed = not all(c.passed for c in checks)

    return (EXIT_RESIDUAL if failed else EXIT_OK), {"params": params, "results": results, "residuals": residuals}, csv_text


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    except (PermflowError, OSError) as exc:
        print(f"permflow: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        code, body, csv_text = run(args)
    except (StateSpaceTooLarge, CapExceeded) as exc:
        print(f"permflow: size cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PermflowError, ValueError, OSError) as exc:
        print(f"permflow: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    runtime_ms = (time.perf_counter() - start) * 1000.0

    if args.format == "csv":
        _emit(csv_text, args.output)
    else:
        report = io.make_report(args.command, body["params"], body["results"], body["residuals"], runtime_ms)
        _emit(io.dumps_json(report), args.output)
    if args.command == "verify-all":
        for line in body["results"]["summary"]["lines"]:
            print(line, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
