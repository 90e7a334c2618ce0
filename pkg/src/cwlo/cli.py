"""Command-line front end: exact values, asymptotics, mean-field data, ladders, scans, self-checks.

Exit codes: 0 ok, 1 a verification case failed, 2 bad usage, 3 numerical
failure, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from cwlo import exact, series
from cwlo.model import ModelParams, Regime, SolverError, beta_critical, classify_regime, locate_beta0, phi, solve_mean_field
from cwlo.oracle.quadrature import QuadratureError
from cwlo.verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

SCAN_COLUMNS = ["d", "beta", "h", "n", "quantity", "exact", "pred_M0", "pred_M1", "residual_M0", "residual_M1", "error"]
QUANTITIES = ("Z", "QnPlus", "Qn", "Pn", "coeffs", "asymptotic")

DEFAULTS = {
    "d": 1,
    "beta": None,
    "h": 0.0,
    "n": None,
    "quantity": "qn",
    "regime": None,
    "kind": "Qn",
    "M": 1,
    "beta0": False,
    "d_list": None,
    "beta_list": None,
    "h_list": [0.0],
    "n_list": None,
    "quantities": ["Qn"],
    "output": None,
    "format": "csv",
    "suite": "all",
}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- serialization


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Regime):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats, rationals as "p/q"."""
    return json.dumps(_clean(obj), sort_keys=True, allow_nan=False)


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


# ---------------------------------------------------------------- argument handling


def _params(opts) -> ModelParams:
    if opts["beta"] is None:
        raise UsageError("--beta is required")
    override = Regime.parse(opts["regime"]) if opts.get("regime") else None
    return ModelParams(int(opts["d"]), float(opts["beta"]), float(opts["h"]), override)


def _resolve(args, config: dict) -> dict:
    """Defaults, then config-file values, then explicit flags."""
    opts = dict(DEFAULTS)
    for k, v in config.items():
        key = k.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {k!r}")
        opts[key] = v
    for k, v in vars(args).items():
        if v is not None and k in DEFAULTS:
            opts[k] = v
    return opts


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return cfg


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _strs(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cwlo", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def model_flags(sp, need_n=False):
        sp.add_argument("--d", type=int)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--h", type=float)
        sp.add_argument("--regime", choices=[r.value for r in Regime], help="force a phase instead of classifying")
        if need_n:
            sp.add_argument("--n", type=int)
        sp.add_argument("--config", help="JSON file with flag values; flags given on the command line win")

    sp = sub.add_parser("exact", help="exact finite-n value")
    model_flags(sp, need_n=True)
    sp.add_argument("--quantity", choices=["z", "qn", "qnplus", "o", "pn"], type=str.lower)

    sp = sub.add_parser("asymptotic", help="leading Q_n^+ asymptotics and ladder predictions")
    model_flags(sp, need_n=True)
    sp.add_argument("--M", type=int)

    sp = sub.add_parser("meanfield", help="mean-field solution and phase")
    model_flags(sp)
    sp.add_argument("--beta0", action="store_const", const=True, help="also locate the extra-root threshold (h != 0)")

    sp = sub.add_parser("coeffs", help="coefficient ladder as JSON")
    model_flags(sp)
    sp.add_argument("--kind", choices=["Z", "O", "Qn", "QnPlus"])
    sp.add_argument("--M", type=int)

    sp = sub.add_parser("scan", help="sweep a parameter grid into CSV or JSON")
    sp.add_argument("--d-list", dest="d_list", type=_ints)
    sp.add_argument("--beta-list", dest="beta_list", type=_floats)
    sp.add_argument("--h-list", dest="h_list", type=_floats)
    sp.add_argument("--n-list", dest="n_list", type=_ints)
    sp.add_argument("--quantities", type=_strs, help=f"comma list from {','.join(QUANTITIES)}")
    sp.add_argument("--output", help="output path (default stdout)")
    sp.add_argument("--format", choices=["csv", "json"])
    sp.add_argument("--regime", choices=[r.value for r in Regime])
    sp.add_argument("--config")

    sp = sub.add_parser("verify", help="run self-check suites")
    sp.add_argument("--suite", choices=[*SUITES, "all"])
    sp.add_argument("--config")
    return ap


# ---------------------------------------------------------------- commands


def cmd_exact(opts) -> dict:
    p = _params(opts)
    n = opts["n"]
    if n is None:
        raise UsageError("--n is required")
    q = opts["quantity"]
    rec = {"d": p.d, "beta": p.beta, "h": p.h, "n": n, "quantity": q, "regime": classify_regime(p)}
    if q == "z":
        lv = exact.log_partition(p, n)
        rec.update(log_value=lv.log_value, log_reduced=lv.reduced, log_scale=lv.scale)
    elif q == "o":
        lv = exact.log_O_even(p, n) if n % 2 == 0 else exact.log_O_odd(p, n)
        rec.update(log_value=lv.log_value, log_reduced=lv.reduced, log_scale=lv.scale)
    elif q == "qn" and n % 2 == 1:
        lo, hi = exact.qn_bounds(p, n)
        rec.update(lower=lo, upper=hi, note="odd n: Q_n is only bracketed")
    else:
        fn = {"qn": exact.qn_even_exact, "qnplus": exact.qn_plus_exact, "pn": exact.pn_odd_exact}[q]
        res = fn(p, n)
        rec.update(
            probability=res.probability,
            attaining_indices=list(res.attaining_indices),
            log_numerator=res.log_numerator,
            log_denominator=res.log_denominator,
        )
    return rec


def cmd_asymptotic(opts) -> dict:
    p = _params(opts)
    const, expo = series.qn_plus_asymptotic(p)
    rec = {"d": p.d, "beta": p.beta, "h": p.h, "regime": classify_regime(p), "qnplus_constant": const, "qnplus_exponent": expo}
    M = min(int(opts["M"]), series.MAX_GAMMA_ORDER)
    H = series.qn_coeffs(p, M)
    rec["qn_coeffs"] = list(H.values)
    rec["qn_powers"] = list(H.powers)
    if opts["n"] is not None:
        n = int(opts["n"])
        rec["n"] = n
        rec["qnplus_pred"] = const * float(n) ** float(expo)
        rec["qn_pred"] = series.predict(p, n, H)
    return rec


def cmd_meanfield(opts) -> dict:
    p = _params(opts)
    sol = solve_mean_field(p)
    rec = {
        "d": p.d,
        "beta": p.beta,
        "h": p.h,
        "beta_c": beta_critical(p.d),
        "regime": classify_regime(p),
        "z_star": sol.z_star,
        "t_star": sol.t_star,
        "residual": sol.residual,
        "all_solutions": list(sol.all_solutions),
    }
    if p.beta > 0:
        rec["phi_star"] = float(phi(p, sol.t_star))
    if opts["beta0"]:
        if p.h == 0:
            raise UsageError("--beta0 needs h != 0")
        rec["beta0"] = locate_beta0(p.d, p.h)
    return rec


def cmd_coeffs(opts) -> dict:
    p = _params(opts)
    M = int(opts["M"])
    kind = opts["kind"]
    if kind == "Z":
        c = series.e_coeffs(p, M)
    elif kind == "O":
        c = series.gamma_coeffs(p, M)
    elif kind == "Qn":
        c = series.qn_coeffs(p, M)
    else:
        c = series.qn_plus_coeffs(p)
    return c.to_json()


def _scan_point(d, beta, h, n, quantity, regime):
    row = {"d": d, "beta": beta, "h": h, "n": n, "quantity": quantity}
    nan = float("nan")
    row.update(exact=nan, pred_M0=nan, pred_M1=nan, residual_M0=nan, residual_M1=nan, error="")
    try:
        p = ModelParams(d, beta, h, Regime.parse(regime) if regime else None)
        preds = [nan, nan]
        if quantity == "Z":
            z = exact.log_partition(p, n)
            c = series.e_coeffs(p, 1)
            # Z over 2^n e^{n phi(t_*)}, the quantity the ladder approximates
            val = math.exp(z.reduced + (z.scale - n * c.prefactor_log))
            preds = [series.ladder_sum(c.truncated(0), n), series.ladder_sum(c, n)]
        elif quantity == "QnPlus":
            val = exact.qn_plus_exact(p, n).probability
            const, expo = series.qn_plus_asymptotic(p)
            preds[0] = const * float(n) ** float(expo)
        elif quantity == "asymptotic":
            const, expo = series.qn_plus_asymptotic(p)
            val = exact.qn_plus_exact(p, n).probability * float(n) ** float(-expo)
            preds[0] = const
        elif quantity in ("Qn", "coeffs"):
            if n % 2:
                raise UsageError("Q_n is only bracketed for odd n; use Pn")
            val = exact.qn_even_exact(p, n).probability
            c = series.qn_coeffs(p, 1)
            preds = [series.ladder_sum(c.truncated(0), n), series.ladder_sum(c, n)]
            if quantity == "coeffs":
                val *= math.sqrt(n)
                preds = [x * math.sqrt(n) for x in preds]
        elif quantity == "Pn":
            if n % 2 == 0:
                raise UsageError("P_n needs odd n")
            val = exact.pn_odd_exact(p, n).probability
            c = series.qn_coeffs(p, 1)
            preds[0] = series.ladder_sum(c.truncated(0), n)
            if classify_regime(p) == Regime.CRITICAL:
                preds[1] = series.ladder_sum(c, n)
        else:
            raise UsageError(f"unknown quantity {quantity!r}")
        row["exact"] = val
        row["pred_M0"], row["pred_M1"] = preds
        row["residual_M0"] = val - preds[0]
        row["residual_M1"] = val - preds[1]
    except (ValueError, ArithmeticError, SolverError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _workers() -> int:
    try:
        cap = int(os.environ.get("CW_LO_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(cap, n) if cap > 0 else n)


def cmd_scan(opts) -> str:
    for key in ("d_list", "beta_list", "n_list"):
        if not opts[key]:
            raise UsageError(f"--{key.replace('_', '-')} is required")
    quantities = opts["quantities"]
    bad = [q for q in quantities if q not in QUANTITIES]
    if bad:
        raise UsageError(f"unknown quantities {bad}")
    ns = sorted(int(n) for n in opts["n_list"])
    points = [
        (int(d), float(b), float(h), n, q)
        for d in opts["d_list"]
        for b in opts["beta_list"]
        for h in opts["h_list"]
        for n in ns
        for q in quantities
    ]
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rows = list(pool.map(lambda pt: _scan_point(*pt, opts.get("regime")), points))
    if opts["format"] == "json":
        return dumps(rows) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for r in rows:
        w.writerow([_num(r[c]) if c != "error" else r[c] for c in SCAN_COLUMNS])
    return buf.getvalue()


def cmd_verify(opts):
    return run_suite(opts["suite"])


# ---------------------------------------------------------------- entry point


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        opts = _resolve(args, _load_config(getattr(args, "config", None)))
        if args.command == "scan":
            text = cmd_scan(opts)
            if opts["output"]:
                with open(opts["output"], "w", newline="") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "verify":
            reports = cmd_verify(opts)
            print(dumps([r.to_json() for r in reports]))
            for r in reports:
                print(r.summary(), file=sys.stderr)
            return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY
        handler = {"exact": cmd_exact, "asymptotic": cmd_asymptotic, "meanfield": cmd_meanfield, "coeffs": cmd_coeffs}
        print(dumps(handler[args.command](opts)))
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SolverError, QuadratureError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
