"""Command-line interface.

Every subcommand prints one JSON document ``{"schema": 1, "command": ...,
"result": ..., "diagnostics": ...}`` (``sample`` prints JSON lines, one
matrix per line).  Exit status is 0 on success, 2 on a usage error (message
on standard error) and 1 on a numeric failure, reported as a JSON document
carrying the error class name.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .distributions import (
    SPECIAL_CASES,
    GgdParams,
    HwgdParams,
    NcwgdParams,
    WgdParams,
    exp_wgd_log_normalizer,
    exp_wgd_logpdf,
    ggd_logpdf,
    hwgd_logpdf,
    iggd_logpdf,
    iwgd_logpdf,
    ncwgd_logpdf,
    special_case,
    wgd_logpdf,
)
from .errors import WgdError
from .generators import ShapeGenerator, generator_from_config
from .inference import PriorIW, bayes_det_sigma, bayes_marginal_ln, beta_product_check, mle_sigma
from .matrix import load_matrix
from .moments import (
    cf_series,
    det_moment,
    laplace_series,
    lmax_cdf,
    prob_less_than,
    trace_moment,
    trace_pdf,
    zonal_expectation,
)
from .sampling import RngStream, sample_wgd
from .series import SeriesValue, Truncation
from .verify import SUITES, run_suite

__all__ = ["main", "build_parser", "emit_report"]

SCHEMA_VERSION = 1
_DISTS = ("wgd", "iwgd", "ggd", "iggd", "ncwgd", "hwgd", "exp-wgd", *SPECIAL_CASES)
_STATS = ("det", "trace", "zonal", "cf", "laplace", "lmax-cdf", "prob-lt", "trace-pdf")


class UsageError(Exception):
    """Bad flag value detected after parsing; reported with exit code 2."""


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def _matrix_arg(value: str) -> np.ndarray:
    """A matrix file path, or an inline JSON list of rows when the value starts with ``[``."""
    if value.lstrip().startswith("["):
        try:
            a = np.array(json.loads(value), dtype=float)
        except (json.JSONDecodeError, ValueError) as exc:
            raise argparse.ArgumentTypeError(f"cannot parse inline matrix: {exc}") from exc
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise argparse.ArgumentTypeError(f"inline matrix must be square, got shape {a.shape}")
        return a
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"file not found: {value}")
    try:
        return load_matrix(path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(f"cannot read matrix from {value}: {exc}") from exc


def _json_arg(value: str) -> dict:
    try:
        obj = json.loads(value)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise argparse.ArgumentTypeError("expected a JSON object")
    return obj


def _float_list(value: str) -> list[float]:
    try:
        obj = json.loads(value)
        return [float(v) for v in (obj if isinstance(obj, list) else [obj])]
    except (json.JSONDecodeError, TypeError, ValueError):
        try:
            return [float(v) for v in value.split(",") if v.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected a list of numbers: {value}") from exc


def _int_list(value: str) -> list[int]:
    vals = _float_list(value)
    if any(not float(v).is_integer() for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers: {value}")
    return [int(v) for v in vals]


def _positive_int(value: str) -> int:
    try:
        v = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _finite_float(value: str) -> float:
    try:
        v = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}") from exc
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {value!r}")
    return v


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.set_defaults(_parser=p)
    p.add_argument("--pretty", action="store_true", help="indented, human-readable output")
    p.add_argument("--output", type=Path, help="write the JSON document to this path instead of standard output")


def _add_trunc(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trunc-k", type=_positive_int, help="maximum series degree (default: $WGD_TRUNC_K or 30)")
    p.add_argument("--tol", type=_finite_float, help="relative layer tolerance of the series")


def _add_model(p: argparse.ArgumentParser, sigma: bool = True) -> None:
    p.add_argument("--generator", type=_json_arg, default={"kind": "exponential"},
                   help='generator as JSON, e.g. \'{"kind": "t_prime", "params": {"p": 2.0}}\'')
    if sigma:
        p.add_argument("--sigma", type=_matrix_arg, required=True, help="scale matrix (file or inline JSON)")
    p.add_argument("--n", type=_finite_float, required=True, help="degrees of freedom")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgd", description="Wishart generator distributions")
    parser.add_argument("--version", action="version", version=f"wgd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="log density of one matrix")
    p.add_argument("--dist", choices=_DISTS, default="wgd")
    _add_model(p)
    p.add_argument("--x", type=_matrix_arg, required=True, help="argument matrix")
    p.add_argument("--alpha", type=_finite_float, help="shape of ggd/iggd")
    p.add_argument("--beta", type=_finite_float, default=1.0, help="power of ggd/iggd")
    p.add_argument("--psi", type=_matrix_arg, help="non-centrality matrix of ncwgd")
    p.add_argument("--omega", type=_matrix_arg, help="matrix argument of hwgd / exp-wgd")
    p.add_argument("--a-list", type=_float_list, default=[], help="hwgd numerator parameters")
    p.add_argument("--b-list", type=_float_list, default=[], help="hwgd denominator parameters")
    p.add_argument("--case-params", type=_json_arg, default={},
                   help="special case parameters as JSON, e.g. '{\"a\": 1, \"b\": 2}'")
    p.add_argument("--as-printed", action="store_true", help="use the uncorrected normalizing constant (ggd/iggd)")
    _add_trunc(p)
    _add_common(p)

    p = sub.add_parser("moments", help="moments, transforms and eigenvalue laws")
    p.add_argument("--stat", choices=_STATS, required=True)
    _add_model(p)
    p.add_argument("--r", type=_finite_float, help="order of det/trace moments")
    p.add_argument("--kappa", type=_int_list, help="partition for zonal, e.g. 2,1")
    p.add_argument("--t-file", type=_matrix_arg, help="argument matrix of the characteristic function")
    p.add_argument("--a-file", type=_matrix_arg, help="threshold matrix A of P(X < A)")
    p.add_argument("--a", type=_finite_float, help="threshold of the largest-eigenvalue cdf")
    p.add_argument("--s", type=_finite_float, help="Laplace transform argument")
    p.add_argument("--y", type=_finite_float, help="trace density argument")
    p.add_argument("--as-printed", action="store_true", help="use the uncorrected literal series")
    _add_trunc(p)
    _add_common(p)

    p = sub.add_parser("sample", help="exact draws, one JSON matrix per line")
    p.add_argument("--dist", choices=("wgd",), default="wgd")
    _add_model(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("fit", help="maximum likelihood estimate of the scale matrix")
    _add_model(p, sigma=False)
    p.add_argument("--x", type=_matrix_arg, required=True)
    _add_common(p)

    p = sub.add_parser("bayes", help="marginal density and Bayes estimate of det(Sigma)")
    _add_model(p, sigma=False)
    p.add_argument("--x", type=_matrix_arg, required=True)
    p.add_argument("--omega", type=_matrix_arg, required=True, help="inverse Wishart prior scale")
    p.add_argument("--p", type=_finite_float, required=True, help="inverse Wishart prior degrees of freedom")
    p.add_argument("--as-printed", action="store_true", help="use the uncorrected literal series")
    _add_trunc(p)
    _add_common(p)

    p = sub.add_parser("identity-check", help="beta-product identity and the matrix-t integral")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_finite_float, required=True)
    p.add_argument("--p", type=_finite_float, required=True)
    p.add_argument("--samples", type=_positive_int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("verify", help="run the oracle suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=42)
    _add_common(p)
    return parser


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(float(obj.real)), "im": _jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def emit_report(command: str, result: Any, diagnostics: dict | None = None) -> dict:
    """Schema-versioned JSON document for one command."""
    return _jsonable({
        "schema": SCHEMA_VERSION,
        "command": command,
        "result": result,
        "diagnostics": diagnostics or {},
    })


def _dump(doc: dict, pretty: bool) -> str:
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _series_diag(*values: SeriesValue | None) -> dict:
    out = [v.diagnostics() for v in values if v is not None]
    if not out:
        return {}
    return {"series": out[0] if len(out) == 1 else out}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _trunc(args) -> Truncation:
    return Truncation.from_env(max_degree=getattr(args, "trunc_k", None), tol=getattr(args, "tol", None))


def _generator(args, m: int) -> ShapeGenerator:
    return generator_from_config(args.generator, n=args.n, m=m)


def _need(args, name: str, flag: str):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"{flag} is required for this choice")
    return v


def _cmd_eval(args) -> dict:
    sigma, x, n = args.sigma, args.x, args.n
    m = sigma.shape[0]
    trunc = _trunc(args)
    diag: dict = {}
    if args.dist in SPECIAL_CASES:
        sc = special_case(args.dist, sigma, n, **args.case_params)
        result = {
            "logpdf": sc.logpdf(x),
            "normalizer_method": "quadrature",
            "log_normalizer": sc.log_normalizer,
            "printed_log_normalizer": sc.printed_log_normalizer,
            "printed_relative_mismatch": sc.relative_mismatch,
        }
        return emit_report("eval", result, diag)
    h = _generator(args, m)
    method = "closed_form" if h.has_analytic_gamma_k else "quadrature"
    if args.dist == "wgd":
        logpdf = wgd_logpdf(WgdParams(sigma, n, h), x)
    elif args.dist == "iwgd":
        logpdf = iwgd_logpdf(WgdParams(sigma, n, h), x)
    elif args.dist in ("ggd", "iggd"):
        alpha = _need(args, "alpha", "--alpha")
        gp = GgdParams(sigma, alpha, args.beta, h)
        fn = ggd_logpdf if args.dist == "ggd" else iggd_logpdf
        logpdf = fn(gp, x, as_printed=args.as_printed)
    elif args.dist == "ncwgd":
        psi = _need(args, "psi", "--psi")
        np_ = NcwgdParams(WgdParams(sigma, n, h), psi, trunc)
        logpdf = ncwgd_logpdf(np_, x)
        method = "series"
        diag = _series_diag(np_.log_normalizer_series)
    elif args.dist == "hwgd":
        omega = _need(args, "omega", "--omega")
        hp = HwgdParams(WgdParams(sigma, n, h), args.a_list, args.b_list, omega, trunc)
        logpdf = hwgd_logpdf(hp, x)
        method = "series"
        diag = _series_diag(hp.log_normalizer_series)
    else:  # exp-wgd
        omega = _need(args, "omega", "--omega")
        logpdf = exp_wgd_logpdf(sigma, n, h, omega, x, trunc)
        method = "series"
        diag = _series_diag(exp_wgd_log_normalizer(sigma, n, h, omega, trunc))
    result = {"logpdf": logpdf, "normalizer_method": method, "series_diagnostics": diag.get("series")}
    return emit_report("eval", result, diag)


def _cmd_moments(args) -> dict:
    sigma = args.sigma
    h = _generator(args, sigma.shape[0])
    params = WgdParams(sigma, args.n, h)
    trunc = _trunc(args)
    stat = args.stat
    sv: SeriesValue | None = None
    if stat == "det":
        value: Any = det_moment(params, _need(args, "r", "--r"))
    elif stat == "zonal":
        value = zonal_expectation(params, _need(args, "kappa", "--kappa"), as_printed=args.as_printed)
    elif stat == "trace":
        sv = trace_moment(params, _need(args, "r", "--r"), trunc, as_printed=args.as_printed)
    elif stat == "cf":
        sv = cf_series(params, _need(args, "t_file", "--t-file"), trunc)
    elif stat == "laplace":
        sv = laplace_series(params, _need(args, "s", "--s"), trunc, as_printed=args.as_printed)
    elif stat == "lmax-cdf":
        sv = lmax_cdf(params, _need(args, "a", "--a"), trunc, as_printed=args.as_printed)
    elif stat == "prob-lt":
        sv = prob_less_than(params, _need(args, "a_file", "--a-file"), trunc, as_printed=args.as_printed)
    else:  # trace-pdf
        sv = trace_pdf(params, _need(args, "y", "--y"), trunc, as_printed=args.as_printed)
    if sv is not None:
        value = sv.value
    result = {"stat": stat, "value": value, "as_printed": bool(args.as_printed)}
    return emit_report("moments", result, _series_diag(sv))


def _cmd_sample(args) -> list[str]:
    if args.count < 1:
        raise UsageError(f"--count must be at least 1, got {args.count}")
    sigma = args.sigma
    h = _generator(args, sigma.shape[0])
    params = WgdParams(sigma, args.n, h)
    rng = RngStream(args.seed, args.stream)
    draws = sample_wgd(params, args.count, rng)
    lines = []
    for i, x in enumerate(draws):
        lines.append(_dump(emit_report("sample", {"index": i, "m": int(x.shape[0]), "rows": x},
                                       {"rng": rng.describe()}), args.pretty))
    return lines


def _cmd_fit(args) -> dict:
    x = args.x
    h = _generator(args, x.shape[0])
    res = mle_sigma(x, args.n, h)
    return emit_report("fit", res.to_dict(), {"generator": h.to_config()})


def _cmd_bayes(args) -> dict:
    x = args.x
    h = _generator(args, x.shape[0])
    prior = PriorIW(args.omega, args.p)
    trunc = _trunc(args)
    marg = bayes_marginal_ln(x, args.n, h, prior, trunc, as_printed=args.as_printed)
    det = bayes_det_sigma(x, args.n, h, prior, trunc, as_printed=args.as_printed)
    result = {"marginal_ln": marg.value, "det_sigma_bayes": det.value, "as_printed": bool(args.as_printed)}
    diag = {"series": {"marginal_ln": marg.diagnostics(), "det_sigma_bayes": det.diagnostics()}}
    return emit_report("bayes", result, diag)


def _cmd_identity(args) -> dict:
    rep = beta_product_check(args.m, args.n, args.p, n_samples=args.samples, seed=args.seed)
    return emit_report("identity-check", rep.to_dict(), {"rng": {"seed": args.seed}})


def _cmd_verify(args) -> tuple[dict, bool]:
    results = run_suite(args.suite, args.seed)
    ok = all(r.passed for r in results)
    result = {
        "suite": args.suite,
        "passed": ok,
        "n_checks": len(results),
        "n_failed": sum(not r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }
    return emit_report("verify", result, {"rng": {"seed": args.seed}}), ok


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _write(text: str, args) -> None:
    if getattr(args, "output", None) is not None:
        args.output.write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one command; return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code) if isinstance(exc.code, int) else 2
    pretty = getattr(args, "pretty", False)
    try:
        if args.command == "sample":
            _write("\n".join(_cmd_sample(args)), args)
            return 0
        if args.command == "verify":
            doc, ok = _cmd_verify(args)
            _write(_dump(doc, pretty), args)
            return 0 if ok else 1
        handlers = {
            "eval": _cmd_eval,
            "moments": _cmd_moments,
            "fit": _cmd_fit,
            "bayes": _cmd_bayes,
            "identity-check": _cmd_identity,
        }
        doc = handlers[args.command](args)
        _write(_dump(doc, pretty), args)
        return 0
    except UsageError as exc:
        args._parser.print_usage(sys.stderr)
        sys.stderr.write(f"wgd {args.command}: error: {exc}\n")
        return 2
    except (WgdError, ValueError, ArithmeticError) as exc:
        err: dict = {"error": type(exc).__name__, "message": str(exc)}
        partial = getattr(exc, "partial", None)
        if isinstance(partial, SeriesValue):
            err["partial"] = {"value": partial.value, **partial.diagnostics()}
        _write(_dump(emit_report(args.command, None, err), pretty), args)
        return 1


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(parse_and_dispatch(argv))


if __name__ == "__main__":
    main()
