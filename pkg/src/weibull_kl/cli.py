"""Command-line interface: ``weibull-kl <command> ...``.

Exit codes: 0 success, 1 verification failure or non-converged fit,
2 usage or input error, 3 numerical error (overflow, quadrature failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .divergence import KernelConfig, kernel_matrix, kl_breakdown, kl_weibull
from .oracle import QuadratureConfig, QuadratureError, kl_monte_carlo, kl_quadrature
from .weibull import WeibullParams, mle_fit, sample

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


def parse_model(text: str) -> WeibullParams:
    """Parse ``"k,l"`` (shape first) into :class:`WeibullParams`."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'shape,scale', got {text!r}")
    values = []
    for name, token in zip(("shape", "scale"), parts):
        try:
            value = float(token)
        except ValueError:
            raise ValueError(f"{name} {token.strip()!r} is not a number") from None
        if not math.isfinite(value) or value <= 0:
            raise ValueError(f"{name} must be positive and finite, got {token.strip()!r}")
        values.append(value)
    return WeibullParams(*values)


def _model_arg(text: str) -> WeibullParams:
    try:
        return parse_model(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text!r}")
    return value


def _model_json(p: WeibullParams) -> dict:
    return {"shape": p.shape, "scale": p.scale}


def envelope(command: str, inputs: dict, result, seed: int | None = None) -> dict:
    metadata = {"version": __version__}
    if seed is not None:
        metadata["seed"] = seed
    return {"command": command, "inputs": inputs, "result": result, "metadata": metadata}


def dumps(obj) -> str:
    # float repr is the shortest string that round-trips to the same double
    return json.dumps(obj, indent=2, allow_nan=False)


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _data_lines(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def read_data(path: Path) -> list[float]:
    values = []
    for lineno, line in _data_lines(path):
        try:
            value = float(line)
        except ValueError:
            raise InputError(f"{path}: line {lineno}: {line!r} is not a number") from None
        if not math.isfinite(value) or value <= 0:
            raise InputError(f"{path}: line {lineno}: value must be positive and finite, got {line!r}")
        values.append(value)
    return values


def read_models(path: Path) -> list[WeibullParams]:
    models = []
    for lineno, line in _data_lines(path):
        try:
            models.append(parse_model(line))
        except ValueError as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from None
    if not models:
        raise InputError(f"{path}: no models found")
    return models


def _fit(path: Path):
    data = read_data(path)
    try:
        return mle_fit(data)
    except ValueError as exc:
        raise InputError(f"{path}: cannot fit: {exc}") from None


def cmd_kl(args, out) -> int:
    value = kl_weibull(args.p, args.q)
    if args.format == "json":
        inputs = {"p": _model_json(args.p), "q": _model_json(args.q)}
        print(dumps(envelope("kl", inputs, value)), file=out)
    else:
        print(_fmt(value), file=out)
    return EXIT_OK


def cmd_breakdown(args, out) -> int:
    b = kl_breakdown(args.p, args.q)
    result = {
        "const_terms": b.const_terms,
        "log_moment_term": b.log_moment_term,
        "cross_gamma_term": b.cross_gamma_term,
        "self_term": b.self_term,
        "total": b.total,
    }
    inputs = {"p": _model_json(args.p), "q": _model_json(args.q)}
    print(dumps(envelope("breakdown", inputs, result)), file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    closed = kl_weibull(args.p, args.q)
    quad = kl_quadrature(args.p, args.q, QuadratureConfig(rel_tol=args.rel_tol))
    mc = kl_monte_carlo(args.p, args.q, args.n, args.seed)
    quad_ok = abs(closed - quad) <= max(1e-8, args.rel_tol * abs(closed))
    mc_ok = abs(closed - mc.estimate) <= 3.0 * mc.std_error
    passed = quad_ok and mc_ok
    if args.format == "json":
        inputs = {"p": _model_json(args.p), "q": _model_json(args.q), "n": args.n, "rel_tol": args.rel_tol}
        result = {
            "closed_form": closed,
            "quadrature": quad,
            "monte_carlo": {"estimate": mc.estimate, "std_error": mc.std_error, "n": mc.n},
            "quadrature_ok": quad_ok,
            "monte_carlo_ok": mc_ok,
            "passed": passed,
        }
        print(dumps(envelope("verify", inputs, result, seed=args.seed)), file=out)
    else:
        print(f"closed form   {_fmt(closed)}", file=out)
        print(f"quadrature    {_fmt(quad)}  [{'ok' if quad_ok else 'MISMATCH'}]", file=out)
        print(f"monte carlo   {_fmt(mc.estimate)} +/- {_fmt(mc.std_error)} (n={mc.n})"
              f"  [{'ok' if mc_ok else 'MISMATCH'}]", file=out)
        print("PASS" if passed else "FAIL", file=out)
    return EXIT_OK if passed else EXIT_FAIL


def _fit_json(fit) -> dict:
    return {
        "shape": fit.params.shape,
        "scale": fit.params.scale,
        "log_likelihood": fit.log_likelihood,
        "iterations": fit.iterations,
        "converged": fit.converged,
    }


def cmd_fit(args, out) -> int:
    fit = _fit(args.datafile)
    if args.format == "json":
        print(dumps(envelope("fit", {"datafile": str(args.datafile)}, _fit_json(fit))), file=out)
    else:
        print(f"shape           {_fmt(fit.params.shape)}", file=out)
        print(f"scale           {_fmt(fit.params.scale)}", file=out)
        print(f"log_likelihood  {_fmt(fit.log_likelihood)}", file=out)
        print(f"iterations      {fit.iterations}", file=out)
        print(f"converged       {str(fit.converged).lower()}", file=out)
    if not fit.converged:
        print("warning: shape estimate did not converge", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_compare(args, out) -> int:
    if not args.candidate:
        raise InputError("compare needs at least one --candidate k,l")
    fit = _fit(args.datafile)
    ranked = sorted(
        ((kl_weibull(fit.params, c), i, c) for i, c in enumerate(args.candidate)),
        key=lambda t: (t[0], t[1]),
    )
    if args.format == "json":
        inputs = {"datafile": str(args.datafile), "candidates": [_model_json(c) for c in args.candidate]}
        result = {
            "fit": _fit_json(fit),
            "ranking": [{"model": _model_json(c), "kl": v} for v, _, c in ranked],
        }
        print(dumps(envelope("compare", inputs, result)), file=out)
    else:
        print(f"fitted {_fmt(fit.params.shape)},{_fmt(fit.params.scale)}", file=out)
        for rank, (v, _, c) in enumerate(ranked, start=1):
            print(f"{rank}. {c.shape:g},{c.scale:g}  KL={_fmt(v)}", file=out)
    return EXIT_OK


def cmd_sample(args, out) -> int:
    draws = sample(args.p, args.n, args.seed)
    text = "".join(f"{x:.17g}\n" for x in draws)
    if str(args.out) == "-":
        out.write(text)
        return EXIT_OK
    try:
        args.out.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    return EXIT_OK


def cmd_kernel_matrix(args, out) -> int:
    models = read_models(args.modelsfile)
    mat = kernel_matrix(models, KernelConfig(args.scale))
    if args.format == "json":
        inputs = {"modelsfile": str(args.modelsfile), "scale": args.scale,
                  "models": [_model_json(m) for m in models]}
        print(dumps(envelope("kernel-matrix", inputs, mat.tolist())), file=out)
    else:
        for row in mat:
            print(",".join(repr(float(v)) for v in row), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weibull-kl",
        description="KL divergence between Weibull distributions (models given as shape,scale).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def pair(p):
        p.add_argument("--p", type=_model_arg, required=True, metavar="K,L", help="first model")
        p.add_argument("--q", type=_model_arg, required=True, metavar="K,L", help="second model")

    p = sub.add_parser("kl", help="closed-form KL(p || q)")
    pair(p)
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("breakdown", help="the four components of KL(p || q) as JSON")
    pair(p)
    p.set_defaults(func=cmd_breakdown)

    p = sub.add_parser("verify", help="check the closed form against quadrature and Monte Carlo")
    pair(p)
    p.add_argument("--n", type=_positive_int, default=100_000, help="Monte-Carlo sample size")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rel-tol", type=_positive_float, default=1e-10, dest="rel_tol")
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="maximum-likelihood fit to a data file")
    p.add_argument("datafile", type=Path)
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="rank candidate models by KL(fitted || candidate)")
    p.add_argument("datafile", type=Path)
    p.add_argument("-c", "--candidate", type=_model_arg, action="append", default=[], metavar="K,L")
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sample", help="write seeded Weibull draws, one per line")
    p.add_argument("--p", type=_model_arg, required=True, metavar="K,L")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, default=Path("-"), help="output file ('-' for stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("kernel-matrix", help="exp(-scale * symmetric KL) Gram matrix")
    p.add_argument("modelsfile", type=Path)
    p.add_argument("--scale", type=_positive_float, default=1.0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_kernel_matrix)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OverflowError, QuadratureError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
