"""Command-line front end: exponent grids, pairwise-error tables, reports.

Emits CSV (RFC-4180 style, header row, '.' decimal separator, 'inf' for
+infinity) or JSON. Identical inputs and seed produce byte-identical
output. Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import bounds, codingapps, hyptest, validate
from .bounds import MartingaleSpec
from .hyptest import HypothesisPair, Thresholds
from .specfun import ConvergenceError, f_delta
from .validate import InfeasibleError, TailQuery

LN2 = math.log(2.0)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


def _fmt(value, precision: int, units_scale: float = 1.0) -> str:
    """Format one table cell; 'inf' token for +infinity."""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v * units_scale, f".{precision}g")


def _emit(columns, rows, args, exponent_columns=()):
    """Write rows (list of dicts) as CSV or JSON to --out or stdout."""
    scale = 1.0 / LN2 if args.units == "bits" else 1.0
    textual = []
    for row in rows:
        textual.append(
            [
                _fmt(row[c], args.precision, scale if c in exponent_columns else 1.0)
                for c in columns
            ]
        )
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(textual)
        payload = buf.getvalue()
    else:
        payload = (
            json.dumps({"columns": list(columns), "rows": textual}, sort_keys=True)
            + "\n"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _parse_grid(spec: str):
    """'start:stop:count' -> list of floats."""
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}, want start:stop:count") from exc
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def _parse_int_list(spec: str):
    """Comma list with 'a..b' ranges: '2,4,6' or '2..10'."""
    out = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ConfigError(f"empty list spec {spec!r}")
    return out


def _parse_float_list(spec: str):
    try:
        return [float(p) for p in spec.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad float list {spec!r}") from exc


def cmd_exponents(args) -> int:
    gammas = [args.gamma] if args.gamma is not None else None
    deltas = _parse_grid(args.grid) if args.grid else None
    if args.config:
        cfg = _load_json(args.config)
        gammas = [float(g) for g in cfg.get("gamma", gammas or [])]
        deltas = [float(d) for d in cfg.get("delta", deltas or [])]
    if not gammas:
        raise ConfigError("need --gamma or a config with a 'gamma' list")
    if not deltas:
        deltas = _parse_grid("0:1:101")
    columns = [
        "gamma",
        "delta",
        "azuma",
        "cor2_f",
        "thm2",
        "thm3",
        "cor4",
        "pinsker",
        "refined_pinsker",
        "cor3",
        "chung_lu",
    ]
    rows = []
    for g in gammas:
        spec = MartingaleSpec(d=1.0, sigma2=g)
        for dl in deltas:
            rows.append(
                {
                    "gamma": g,
                    "delta": dl,
                    "azuma": bounds.azuma_exponent(spec, dl).exponent,
                    "cor2_f": f_delta(dl),
                    "thm2": bounds.thm2_exponent(spec, dl).exponent,
                    "thm3": bounds.thm3_exponent(spec, dl).exponent,
                    "cor4": bounds.cor4_exponent(g, dl).exponent,
                    "pinsker": bounds.pinsker_loosened_exponent(spec, dl).exponent,
                    "refined_pinsker": bounds.refined_pinsker_exponent(dl).exponent,
                    "cor3": bounds.cor3_exponent(spec, dl).exponent,
                    "chung_lu": bounds.chung_lu_exponent(g, dl).exponent,
                }
            )
    _emit(columns, rows, args, exponent_columns=set(columns) - {"gamma", "delta"})
    return EXIT_OK


def _channels_from_args(args):
    if args.config:
        obj = _load_json(args.config)
        try:
            return [("config", codingapps.DmcChannel.from_json(obj))]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if args.qary:
        qspec, p = args.qary
        try:
            p = float(p)
        except ValueError as exc:
            raise ConfigError(f"bad crossover probability {p!r}") from exc
        try:
            qs = _parse_int_list(qspec)
            return [(f"qary({q},{p:g})", codingapps.q_ary_channel(q, p)) for q in qs]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError("need --config CHANNEL.json or --qary QLIST P")


def cmd_pairwise(args) -> int:
    channels = _channels_from_args(args)
    m_list = _parse_int_list(args.m) if args.m else [2, 4, 6, 8, 10]
    columns = ["channel", "zB", "z1"]
    columns += [f"z2_{m}" for m in m_list]
    if args.tilde:
        columns += [f"z2tilde_{m}" for m in m_list]
    rows = []
    for label, ch in channels:
        row = {
            "channel": label,
            "zB": codingapps.bhattacharyya(ch).base,
            "z1": codingapps.z1(ch).base,
        }
        for m in m_list:
            row[f"z2_{m}"] = codingapps.z2m(ch, m).base
        if args.tilde:
            for m in m_list:
                row[f"z2tilde_{m}"] = codingapps.z2m_tilde(ch, m).base
        rows.append(row)
    _emit(columns, rows, args)
    return EXIT_OK


def _pair_from_args(args) -> tuple[HypothesisPair, Thresholds]:
    thresholds = Thresholds.single(0.0)
    if args.config:
        cfg = _load_json(args.config)
        for key in ("p1", "p2"):
            if key not in cfg:
                raise ConfigError(f"hypothesis config missing field {key!r}")
        try:
            pair = HypothesisPair.from_probs(
                cfg["p1"], cfg["p2"], tuple(cfg.get("priors", (0.5, 0.5)))
            )
            if "thresholds" in cfg:
                t = cfg["thresholds"]
                thresholds = Thresholds(
                    float(t["lambda_bar"]), float(t["lambda_under"])
                )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"hypothesis config: {exc}") from exc
        return pair, thresholds
    if args.p1 and args.p2:
        try:
            pair = HypothesisPair.from_probs(
                _parse_float_list(args.p1), _parse_float_list(args.p2)
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if args.thresholds:
            lb, lu = _parse_float_list(args.thresholds)
            thresholds = Thresholds(lb, lu)
        return pair, thresholds
    raise ConfigError("need --config PAIR.json or --p1/--p2")


def cmd_hypothesis(args) -> int:
    pair, thresholds = _pair_from_args(args)
    try:
        thresholds.validate_for(pair)
        exact = hyptest.exact_exponents(pair, thresholds)
        refined = hyptest.refined_lower_bounds(pair, thresholds)
        azuma = hyptest.azuma_lower_bounds(pair, thresholds)
        mp = hyptest.martingale_params(pair, thresholds)
        chernoff = hyptest.chernoff_information(pair)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    columns = ["quantity", "value"]
    rows = [
        {"quantity": "chernoff_information", "value": chernoff},
        {"quantity": "exact_err_or_erasure", "value": exact.err_or_erasure},
        {"quantity": "exact_error", "value": exact.error},
        {"quantity": "refined_err_or_erasure", "value": refined.err_or_erasure},
        {"quantity": "refined_error", "value": refined.error},
        {"quantity": "azuma_err_or_erasure", "value": azuma.err_or_erasure},
        {"quantity": "azuma_error", "value": azuma.error},
        {"quantity": "gamma1", "value": mp.gamma1},
        {"quantity": "gamma2", "value": mp.gamma2},
        {"quantity": "d1", "value": mp.d1},
        {"quantity": "d2", "value": mp.d2},
    ]
    if args.eta is not None:
        try:
            md = hyptest.moderate_deviation_hyptest(
                pair, eps1=args.eps1, eta=args.eta, n=args.mdp_n
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        rows += [
            {"quantity": "mdp_bound", "value": min(1.0, md.bound)},
            {"quantity": "mdp_asymptotic_slope", "value": md.asymptotic_slope},
        ]
    _emit(
        columns,
        rows,
        args,
        exponent_columns={"value"} if args.units == "bits" else set(),
    )
    return EXIT_OK


def cmd_ldpc(args) -> int:
    if args.config:
        try:
            ens = codingapps.LdpcEnsemble.from_json(_load_json(args.config))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    elif args.regular:
        dv, dc = (int(v) for v in args.regular.split(","))
        ens = codingapps.LdpcEnsemble.regular(args.n or 1024, dv, dc)
    else:
        raise ConfigError("need --config LDPC.json or --regular DV,DC")
    res = codingapps.ldpc_cycles_bound(ens, args.alpha)
    columns = ["quantity", "value"]
    rows = [
        {"quantity": "design_rate", "value": res.design_rate},
        {"quantity": "avg_right_degree", "value": res.avg_right_degree},
        {"quantity": "beta", "value": res.beta},
        {"quantity": "bound", "value": min(1.0, res.bound)},
        {"quantity": "azuma_bound", "value": min(1.0, res.azuma_bound)},
    ]
    _emit(columns, rows, args)
    return EXIT_OK


def cmd_ofdm(args) -> int:
    model = codingapps.OfdmModel(n=args.n, M=args.M)
    res = codingapps.ofdm_cf_bounds(model, args.alpha)
    columns = ["quantity", "value"]
    rows = [
        {"quantity": "azuma_bound", "value": min(1.0, res.azuma)},
        {"quantity": "refined_bound", "value": min(1.0, res.refined)},
        {"quantity": "refined_limit", "value": min(1.0, res.refined_limit)},
    ]
    if args.check:
        if args.seed is None:
            raise ConfigError("--check requires --seed")
        rep = codingapps.ofdm_martingale_check(
            model, trials=args.trials, seed=args.seed
        )
        rows += [
            {"quantity": "jump_bound", "value": rep.jump_bound},
            {"quantity": "max_increment", "value": rep.max_increment},
            {"quantity": "violations", "value": rep.violations},
            {"quantity": "second_moment_mean", "value": rep.second_moment_mean},
            {"quantity": "second_moment_target", "value": rep.second_moment_target},
            {"quantity": "trig_identity", "value": str(rep.trig_identity)},
        ]
    _emit(columns, rows, args)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise ConfigError("simulate requires --seed")
    if args.law == "twopoint":
        comp = validate.example3_comparison(args.eps, args.d, args.x, args.k)
        law = validate.two_point_increment(args.d, args.eps)
        query = TailQuery(n=args.k, threshold=args.x * args.k, two_sided=False)
        mc = validate.monte_carlo_tail(law, query, args.trials, args.seed)
        rows = [
            {"quantity": "azuma_bound", "value": comp.azuma},
            {"quantity": "thm2_bound", "value": comp.thm2},
            {"quantity": "exact_tail", "value": comp.exact},
            {"quantity": "mc_estimate", "value": mc.estimate},
            {"quantity": "mc_wilson_lower", "value": mc.lower},
            {"quantity": "mc_wilson_upper", "value": mc.upper},
        ]
    else:
        cfg = _load_json(args.law)
        try:
            law = validate.IncrementLaw(tuple(cfg["values"]), tuple(cfg["probs"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"increment-law JSON: {exc}") from exc
        if args.threshold is None:
            raise ConfigError("custom law simulation requires --threshold")
        query = TailQuery(
            n=args.k, threshold=args.threshold, two_sided=args.two_sided
        )
        exact = validate.exact_tail_dp(law, query)
        mc = validate.monte_carlo_tail(law, query, args.trials, args.seed)
        rows = [
            {"quantity": "exact_tail", "value": exact},
            {"quantity": "mc_estimate", "value": mc.estimate},
            {"quantity": "mc_wilson_lower", "value": mc.lower},
            {"quantity": "mc_wilson_upper", "value": mc.upper},
        ]
    _emit(["quantity", "value"], rows, args)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON input file")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument(
        "--precision", type=int, default=6, help="significant digits, 1..15"
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--units", choices=("nats", "bits"), default="nats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailforge",
        description="Tail exponents for bounded-jump martingales and their "
        "coding/hypothesis-testing applications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="exponent grid over (gamma, delta)")
    _add_common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--grid", help="delta grid start:stop:count (default 0:1:101)")
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("pairwise", help="pairwise-error bases for a DMC")
    _add_common(p)
    p.add_argument(
        "--qary",
        nargs=2,
        metavar=("QLIST", "P"),
        help="q-ary symmetric channels, e.g. --qary 2,3,4,5,10 0.04",
    )
    p.add_argument("--m", help="even moment orders, e.g. 2,4,6,8,10")
    p.add_argument("--tilde", action="store_true", help="add closed-form bases")
    p.set_defaults(func=cmd_pairwise)

    p = sub.add_parser("hypothesis", help="binary hypothesis testing exponents")
    _add_common(p)
    p.add_argument("--p1", help="comma-separated pmf, e.g. 0.4,0.6")
    p.add_argument("--p2", help="comma-separated pmf, e.g. 0.6,0.4")
    p.add_argument("--thresholds", help="lambda_bar,lambda_under")
    p.add_argument(
        "--eta", type=float, help="moderate-deviations exponent in (1/2, 1)"
    )
    p.add_argument("--eps1", type=float, default=0.05)
    p.add_argument("--mdp-n", type=int, default=10**4)
    p.set_defaults(func=cmd_hypothesis)

    p = sub.add_parser("ldpc", help="cycle-space concentration for an ensemble")
    _add_common(p)
    p.add_argument("--regular", help="regular ensemble DV,DC")
    p.add_argument("--n", type=int, help="block length for --regular")
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(func=cmd_ldpc)

    p = sub.add_parser("ofdm", help="crest-factor concentration bounds")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--M", type=int, default=4)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--check", action="store_true", help="sample Doob increments")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_ofdm)

    p = sub.add_parser("simulate", help="exact/Monte-Carlo tails for a law")
    _add_common(p)
    p.add_argument(
        "--law",
        default="twopoint",
        help="'twopoint' or a JSON file with values/probs",
    )
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--threshold", type=float)
    p.add_argument("--two-sided", action="store_true")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 1 <= args.precision <= 15:
        print("error: --precision must be in 1..15", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConvergenceError, InfeasibleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:  # ConfigError and invalid user parameters
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
