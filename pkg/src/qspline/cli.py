"""Command-line entry point.

Exit codes: 0 success, 2 usage or invalid parameters, 3 numerical failure.
Every command writes its outputs plus a ``manifest.json`` into ``--out``.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .activations import ACTIVATIONS, evaluate
from .complexity import (
    CostModel,
    crossover,
    curves_csv as complexity_csv,
    default_models,
    emit_curves,
)
from .exceptions import InvalidInputError, NumericalError
from .hhl import HHLConfig
from .pipeline import (
    NORM_MODES,
    curves_csv,
    format_table,
    metrics_json,
    reproduce_table,
    run_classical,
    run_full,
    run_hybrid,
)
from .spline_model import SplineConfig

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _write(out_dir, name, text, outputs):
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    outputs[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()


def _write_manifest(out_dir, command, args, outputs):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "config": config,
        "outputs": outputs,
        "seed": args.seed,
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (out_dir / "manifest.json").write_text(text, encoding="utf-8")


def _spline_config(args):
    return SplineConfig.uniform(args.knots, tuple(args.domain), n_eval=args.n_eval)


def _hhl_config(args):
    return HHLConfig(clock_qubits=args.clock_qubits, backend=args.backend)


def cmd_fit(args):
    config = _spline_config(args)
    x = config.eval_grid()
    hhl = _hhl_config(args)
    if args.mode == "classical":
        fit, system, scaler, pred, score = run_classical(config, args.activation)
        fid = None
    elif args.mode == "hybrid":
        qfit, system, scaler, pred, score = run_hybrid(config, args.activation, hhl, args.norm_mode)
        fit, fid = qfit.fit, qfit.fit.per_interval_fidelity
    else:
        qfit, system, scaler, pred, score = run_full(
            config, args.activation, hhl, args.sign_repair, args.shots, args.seed
        )
        fit, fid = qfit.fit, qfit.fit.per_interval_fidelity

    truth = evaluate(args.activation, x)
    idx = system.locate(x)
    lines = ["x,interval,f_true,f_fit,fidelity"]
    for xi, k, t, p in zip(x, idx, truth, pred):
        f = "" if fid is None else repr(float(fid[k]))
        lines.append(f"{float(xi)!r},{int(k)},{float(t)!r},{float(p)!r},{f}")
    metrics = {
        "activation": args.activation,
        "mode": args.mode,
        "backend": None if args.mode == "classical" else args.backend,
        "rss": score,
        "average_fidelity": None if fid is None else float(np.mean(fid)),
        "n_intervals": len(system),
        "coefficients": fit.coefficients.tolist(),
    }
    outputs = {}
    _write(args.out, "curves.csv", "\n".join(lines) + "\n", outputs)
    _write(args.out, "metrics.json", json.dumps(metrics, indent=2) + "\n", outputs)
    _write_manifest(args.out, "fit", args, outputs)
    print(f"{args.activation} {args.mode}: rss = {score:.6g}"
          + ("" if fid is None else f", average fidelity = {np.mean(fid):.4f}"))
    return EXIT_OK


def cmd_table(args):
    config = _spline_config(args)
    reports = reproduce_table(
        config, _hhl_config(args), norm_mode=args.norm_mode,
        sign_repair=args.sign_repair, shots=args.shots, seed=args.seed,
    )
    outputs = {}
    table = format_table(reports)
    _write(args.out, "table.json", metrics_json(reports), outputs)
    _write(args.out, "table.txt", table, outputs)
    for r in reports:
        _write(args.out, f"curves_{r.activation}.csv", curves_csv(r), outputs)
    _write_manifest(args.out, "table", args, outputs)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_complexity(args):
    models = default_models(args.s, args.kappa, args.eps)
    rows = emit_curves(models, range(2, args.n_max + 1), tuple(args.band))
    hhl = CostModel("hhl", args.s, args.kappa, args.eps)
    cg = CostModel("conjugate_gradient", args.s, args.kappa, args.eps)
    n_cross = crossover(hhl, cg, args.n_max)
    outputs = {}
    _write(args.out, "complexity.csv", complexity_csv(rows), outputs)
    summary = {
        "s": args.s,
        "kappa": args.kappa,
        "eps": args.eps,
        "n_max": args.n_max,
        "hhl_vs_cg_crossover": n_cross,
    }
    _write(args.out, "crossover.json", json.dumps(summary, indent=2) + "\n", outputs)
    _write_manifest(args.out, "complexity", args, outputs)
    if n_cross is None:
        print(f"HHL does not overtake conjugate gradient for n <= {args.n_max}")
    else:
        print(f"HHL vs conjugate gradient crossover: n = {n_cross}")
    return EXIT_OK


def _add_spline_args(p):
    p.add_argument("--knots", type=int, default=20, help="number of knots (default 20)")
    p.add_argument("--domain", type=float, nargs=2, default=[-1.0, 1.0], metavar=("A", "B"))
    p.add_argument("--n-eval", type=int, default=100, help="evaluation grid size")
    p.add_argument("--clock-qubits", type=int, default=HHLConfig.clock_qubits)
    p.add_argument("--backend", choices=("circuit", "ideal"), default="circuit")
    p.add_argument("--norm-mode", choices=NORM_MODES, default="anchor")
    p.add_argument("--sign-repair", action="store_true",
                   help="restore swap-test signs from the anchored hybrid line")
    p.add_argument("--shots", type=int, default=None,
                   help="sample swap-test outcomes instead of exact probabilities")


def build_parser():
    parser = argparse.ArgumentParser(prog="qspline", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=0, help="RNG seed for --shots sampling")

    p = sub.add_parser("fit", parents=[common], help="fit one activation")
    p.add_argument("--activation", choices=ACTIVATIONS, required=True)
    p.add_argument("--mode", choices=("classical", "hybrid", "full"), default="hybrid")
    _add_spline_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("table", parents=[common], help="RSS and fidelity table for all activations")
    _add_spline_args(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("complexity", parents=[common], help="solver cost curves and crossover")
    p.add_argument("--s", type=float, default=3.0, help="sparsity")
    p.add_argument("--kappa", type=float, default=2.0, help="condition number")
    p.add_argument("--eps", type=float, default=0.5, help="error tolerance in (0, 1)")
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--band", type=int, nargs=2, default=[1, 10], metavar=("S_LO", "S_HI"),
                   help="sparsity range for the HHL band")
    p.set_defaults(func=cmd_complexity)
    return parser


def _validate(parser, args):
    try:
        if args.command in ("fit", "table"):
            _spline_config(args)
            _hhl_config(args)
            if args.shots is not None and args.shots < 1:
                raise InvalidInputError("--shots must be positive")
        else:
            CostModel("hhl", args.s, args.kappa, args.eps)
            if args.n_max < 2:
                raise InvalidInputError("--n-max must be >= 2")
            if not 1 <= args.band[0] <= args.band[1]:
                raise InvalidInputError("--band needs 1 <= S_LO <= S_HI")
    except InvalidInputError as exc:
        parser.error(str(exc))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except InvalidInputError as exc:
        print(f"qspline: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"qspline: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
