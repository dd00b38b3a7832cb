"""Command-line interface.

Results go to stdout, diagnostics to stderr.  Exit codes: 0 success, 1 a
dominance violation was found, 2 usage error, 3 a size cap was exceeded,
4 internal numeric error.  Caps default to ``Caps.from_env()``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

import mpmath

from . import analytics, branching, exact_dist
from .errors import CapExceeded, Caps, NumericError
from .rng import make_rng, run_rng
from .tree import LeafVector, TreeShape, root_value, snir_eval
from .worst_case import worst_input

EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_NUMERIC = 4


def fmt(x: Any) -> Any:
    """Rationals as "p/q" strings, reals with 12 significant digits."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, mpmath.mpf)):
        return format(float(x), ".12g")
    if isinstance(x, dict):
        return {str(k): fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


class Output:
    def __init__(self, fmt_name: str, stream=None):
        self.format = fmt_name
        self.stream = stream or sys.stdout

    def json(self, payload: Any) -> None:
        self.stream.write(json.dumps(payload, sort_keys=True) + "\n")

    def text(self, line: str) -> None:
        self.stream.write(line + "\n")

    def csv(self, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        self.stream.write(buf.getvalue())

    def record(self, payload: dict) -> None:
        """Flat key/value payload in any format."""
        if self.format == "json":
            self.json(payload)
        elif self.format == "csv":
            self.csv(list(payload), [[_cell(v) for v in payload.values()]])
        else:
            for key, value in payload.items():
                self.text(f"{key}: {_cell(value)}")


def _cell(v: Any) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _leaf_vector(text: str, m: int, k: Optional[int], caps: Caps) -> LeafVector:
    v = LeafVector.parse(text, m)
    if k is not None and v.shape.half_height != k:
        raise ValueError(f"input has half-height {v.shape.half_height}, but --k {k} was given")
    TreeShape(m, v.shape.half_height, caps.max_leaves)
    return v


# --- commands ----------------------------------------------------------------

def cmd_evaluate(args, out: Output, caps: Caps) -> int:
    if args.runs < 1:
        raise ValueError("--runs must be >= 1")
    v = _leaf_vector(args.input, args.m, args.k, caps)
    costs = []
    root = root_value(v)
    for r in range(args.runs):
        res = snir_eval(v, run_rng(args.seed, r))
        costs.append(res.leaves_read)
    payload = {"seed": args.seed, "m": args.m, "k": v.shape.half_height, "root_value": root,
               "runs": args.runs, "leaves_read": costs if args.runs > 1 else costs[0]}
    out.record(payload)
    return 0


def cmd_worst_input(args, out: Output, caps: Caps) -> int:
    v = worst_input(args.m, args.k, args.root, caps.max_leaves)
    if out.format == "json":
        out.json(list(v.bits))
    elif out.format == "csv":
        out.csv(["leaf", "value"], list(enumerate(v.bits)))
    else:
        out.text(v.to_string())
    return 0


def cmd_exact_pmf(args, out: Output, caps: Caps) -> int:
    if args.input is not None:
        v = _leaf_vector(args.input, args.m, args.k, caps)
    else:
        if args.k is None:
            raise ValueError("give --input or --k (with --root) to select the worst input")
        v = worst_input(args.m, args.k, args.root, caps.max_leaves)
    if v.shape.leaf_count > caps.max_leaves:
        raise CapExceeded("max-leaves", v.shape.leaf_count, caps.max_leaves)
    pmf = exact_dist.exact_cost_pmf(v)
    if out.format == "json":
        out.json(pmf.to_json())
    elif out.format == "csv":
        out.stream.write(pmf.to_csv())
    else:
        for x, p in pmf.entries.items():
            out.text(f"{x} {p}")
        out.text(f"mean {pmf.mean()}")
    return 0


def cmd_dominance(args, out: Output, caps: Caps) -> int:
    report = exact_dist.verify_worst_case(args.m, args.k, caps.max_exhaustive_n)
    if out.format == "json":
        out.json(report.to_json())
    elif out.format == "csv":
        out.csv(["m", "k", "inputs_checked", "zero_class_size", "violations", "zero_violations", "ok"],
                [[report.m, report.k, report.inputs_checked, report.zero_class_size,
                  len(report.violations), len(report.zero_violations), report.ok]])
    else:
        out.text(f"m={report.m} k={report.k} inputs={report.inputs_checked} "
                 f"root-0 inputs={report.zero_class_size} distinct laws={report.distinct_laws}")
        out.text(f"worst input (root 1): {worst_input(args.m, args.k, 1).to_string()}  "
                 f"violations: {len(report.violations)}")
        out.text(f"worst input (root 0): {worst_input(args.m, args.k, 0).to_string()}  "
                 f"violations: {len(report.zero_violations)}")
        out.text(f"inputs attaining the root-1 worst law: {len(report.maximizers)} listed")
        out.text("PASS" if report.ok else "FAIL")
    return 0 if report.ok else EXIT_VIOLATION


def cmd_simulate(args, out: Output, caps: Caps) -> int:
    pop = branching.simulate(args.m, args.k, args.start, make_rng(args.seed), caps.max_population)
    out.record({"seed": args.seed, "m": args.m, "k": args.k, "start": args.start,
                "type0": pop.type0, "type1": pop.type1, "total": pop.total})
    return 0


def cmd_monte_carlo(args, out: Output, caps: Caps) -> int:
    st = branching.monte_carlo(args.m, args.k, args.start, args.runs, args.seed,
                               tuple(args.t), args.workers, caps.max_population)
    payload = st.to_json()
    for key in ("mean", "variance", "scale"):
        payload[key] = None if payload[key] is None else fmt(payload[key])
    payload["empirical_tail"] = {t: fmt(f) for t, f in payload["empirical_tail"].items()}
    if out.format == "json":
        out.json(payload)
    elif out.format == "csv":
        summary = ["m", "k", "start", "runs", "seed", "mean", "variance", "expected", "scale"]
        out.csv(summary, [["" if payload[key] is None else payload[key] for key in summary]])
        out.text("")
        out.csv(["t", "exceedance_frequency"], list(payload["empirical_tail"].items()))
    else:
        out.text(f"seed: {st.seed}")
        out.text(f"m={st.m} k={st.k} start={st.start} runs={st.runs}")
        out.text(f"mean: {fmt(st.mean)}  (exact {st.expected} = {fmt(float(Fraction(st.expected)))})")
        se = st.standard_error
        out.text(f"standard error: {fmt(se) if se is not None else 'undefined'}")
        out.text(f"variance: {fmt(st.variance) if st.variance is not None else 'undefined'}")
        out.text(f"scale n^alpha: {fmt(st.scale)}")
        for t, f in st.empirical_tail.items():
            out.text(f"P((C - EC)/n^alpha > {t:g}) ~ {fmt(f)}")
    return 0


def _constants_payload(m: int, q: Optional[float]) -> dict:
    sp = analytics.spectral(m)
    vc = analytics.variance_constant(m)
    payload: dict = {
        "m": m,
        "mean_matrix": [[str(x) for x in row] for row in analytics.mean_matrix(m).entries],
        "closed_form": {
            "lambda1": fmt(sp.lambda1), "lambda2": fmt(sp.lambda2),
            "alpha": fmt(sp.alpha), "beta": fmt(sp.beta),
            "c0": fmt(sp.c0), "c1": fmt(sp.c1), "c2": fmt(sp.c2),
            "kappa_max": fmt(1 / (1 - sp.alpha)),
        },
        "fixed_point": {"d": fmt(vc.d), "second_moment": fmt(list(vc.second_moment))},
    }
    sups = analytics.toll_sups(m)
    payload["scanned_sup"] = {
        "sup_E_b2": fmt(sups.sup_second_moment),
        "sup_b_inf2": fmt(sups.sup_norm_sq),
        "ratio": fmt(sups.ratio),
        "limit_ratio": fmt(analytics.toll_limit_ratio(m)),
        "levels_scanned": sups.levels_scanned,
        "by_analogy": m != 2,
    }
    if q is not None:
        tc = analytics.mgf_constant(q, m)
        payload["tail"] = fmt({k: v for k, v in tc.as_dict().items()})
    return payload


def cmd_constants(args, out: Output, caps: Caps) -> int:
    payload = _constants_payload(args.m, args.q)
    if out.format == "json":
        out.json(payload)
        return 0
    rows = []
    for section in ("closed_form", "fixed_point", "scanned_sup", "tail"):
        for key, value in payload.get(section, {}).items():
            rows.append((section, key, value))
    if out.format == "csv":
        out.csv(["provenance", "name", "value"], [[s, k, _cell(v)] for s, k, v in rows])
    else:
        out.text(f"m = {args.m}   mean matrix = {payload['mean_matrix']}")
        for s, k, v in rows:
            out.text(f"[{s}] {k} = {_cell(v)}")
    return 0


def cmd_table1(args, out: Output, caps: Caps) -> int:
    rows = analytics.table1(args.m or analytics.TABLE1_M)
    if out.format == "json":
        out.json([{"m": r.m, "alpha": fmt(r.alpha), "d": fmt(r.d), "kappa": fmt(r.kappa),
                   "rounded": list(r.rounded())} for r in rows])
    elif out.format == "csv":
        out.csv(["m", "alpha", "d", "kappa"], [[r.m, *r.rounded()] for r in rows])
    else:
        out.text(f"{'m':>4} {'alpha':>7} {'d':>8} {'kappa':>7}")
        for r in rows:
            a, d, k = r.rounded()
            out.text(f"{r.m:>4} {a:>7} {d:>8} {k:>7}")
    return 0


def cmd_tail_bound(args, out: Output, caps: Caps) -> int:
    tc = analytics.tail_constant(args.kappa, args.m)
    bounds = [(t, analytics.tail_bound(args.kappa, t, args.m)) for t in args.t]
    if out.format == "json":
        out.json({"m": args.m, "kappa": fmt(tc.kappa), "q": fmt(tc.q), "K": fmt(tc.K), "L": fmt(tc.L),
                  "by_analogy": tc.by_analogy,
                  "bounds": [{"t": fmt(t), "bound": fmt(b)} for t, b in bounds]})
    elif out.format == "csv":
        out.csv(["m", "kappa", "q", "K", "L", "t", "bound"],
                [[args.m, fmt(tc.kappa), fmt(tc.q), fmt(tc.K), fmt(tc.L), fmt(t), fmt(b)] for t, b in bounds])
    else:
        note = "  (derived by analogy with the binary case)" if tc.by_analogy else ""
        out.text(f"m={args.m} kappa={fmt(tc.kappa)} q={fmt(tc.q)} K={fmt(tc.K)} L={fmt(tc.L)}{note}")
        for t, b in bounds:
            out.text(f"P((C - EC)/n^alpha > {t:g}) <= {fmt(b)}")
    return 0


def cmd_converge(args, out: Output, caps: Caps) -> int:
    rows = exact_dist.convergence_diagnostics(args.m, args.k_max, exact=args.exact,
                                              max_support=caps.max_pmf_support)
    header = ["k", "kolmogorov", "wasserstein", "rescaled_mean", "rescaled_variance"]
    data = [[r.k, fmt(r.kolmogorov), fmt(r.wasserstein), fmt(r.rescaled_mean), fmt(r.rescaled_variance)]
            for r in rows]
    if out.format == "json":
        out.json([dict(zip(header, row)) for row in data])
    elif out.format == "csv":
        out.csv(header, data)
    else:
        out.text(" ".join(f"{h:>18}" for h in header))
        for row in data:
            out.text(" ".join(f"{str(c):>18}" for c in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gametree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.set_defaults(func=func)
        return p

    p = add("evaluate", cmd_evaluate, "run the randomized evaluation on an input")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--input", required=True, help="0/1 string in left-to-right leaf order")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)

    p = add("worst-input", cmd_worst_input, "print the worst-case input")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--root", type=int, choices=(0, 1), default=1)

    p = add("exact-pmf", cmd_exact_pmf, "exact law of the number of leaves read")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--input")
    p.add_argument("--root", type=int, choices=(0, 1), default=1)

    p = add("dominance", cmd_dominance, "check the worst inputs against every input")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, required=True)

    p = add("simulate", cmd_simulate, "one run of the two-type branching process")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--start", type=int, choices=(0, 1), default=1)
    p.add_argument("--seed", type=int, default=0)

    p = add("monte-carlo", cmd_monte_carlo, "Monte Carlo statistics of the worst-case cost")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--start", type=int, choices=(0, 1), default=1)
    p.add_argument("--runs", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", type=float, nargs="+", default=list(branching.DEFAULT_T_GRID))
    p.add_argument("--workers", type=int, default=1)

    p = add("constants", cmd_constants, "spectral, variance and toll-term constants")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--q", type=float, help="also evaluate the MGF constant at this exponent")

    p = add("table1", cmd_table1, "alpha_m, d_m and kappa_m")
    p.add_argument("--m", type=int, nargs="*")

    p = add("tail-bound", cmd_tail_bound, "explicit tail bound exp(-L t^kappa)")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--t", type=float, nargs="+", required=True)

    p = add("converge", cmd_converge, "distances between consecutive rescaled laws")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="exact arithmetic before rescaling")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        caps = Caps.from_env()
        return args.func(args, Output(args.format), caps)
    except CapExceeded as exc:
        print(f"error: cap {exc.cap} exceeded (requested {exc.requested}, limit {exc.limit})",
              file=sys.stderr)
        return EXIT_CAP
    except NumericError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
