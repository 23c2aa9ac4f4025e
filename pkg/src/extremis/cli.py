"""Command-line entry point: ``extremis {fit,score,simulate,recover,eval}``.

Exit codes: 0 success, 2 input error, 3 parameter error, 4 undefined metric.
"""

import argparse
import csv
import json
import sys
import warnings

import numpy as np

from . import damex, subsets
from .damex import MEMBERSHIP_MODES, SELF_SCALED, DamexParams
from .errors import (
    InvalidInputError,
    ModelFormatError,
    ParameterError,
    UndefinedMetricError,
)
from .subcone import dimension_histogram

EXIT_OK, EXIT_INPUT, EXIT_PARAM, EXIT_METRIC = 0, 2, 3, 4


def read_matrix(path):
    """Numeric CSV with one header row -> (n, d) float array."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            X = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidInputError(f"{path}: non-numeric CSV content ({exc})") from exc
    if X.size == 0:
        raise InvalidInputError(f"{path}: no data rows")
    return X


def write_matrix(path, X, prefix="x"):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{prefix}{j + 1}" for j in range(X.shape[1])])
        for row in X:
            w.writerow([repr(float(v)) for v in row])


def _k(value):
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be an integer or 'auto', got {value!r}")


def _params(args):
    return DamexParams(k=args.k, epsilon=args.eps, p=args.p, membership_mode=args.membership)


def _add_damex_flags(p):
    p.add_argument("--k", type=_k, default="auto", help="number of extremes, or 'auto' for floor(sqrt(n))")
    p.add_argument("--eps", type=float, default=0.01, help="rectangle tolerance in (0, 1)")
    p.add_argument("--p", type=float, default=0.1, help="mass threshold as a share of the mean charged mass")
    p.add_argument("--membership", choices=MEMBERSHIP_MODES, default=SELF_SCALED)


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_fit(args):
    X = read_matrix(args.train)
    model = damex.fit(X, _params(args))
    damex.save(model, args.out)
    rep = model.representation
    summary = {
        "n": model.n_train,
        "d": model.d,
        "k": rep.k,
        "epsilon": rep.epsilon,
        "p": rep.p,
        "charged_subsets": len(rep),
        "total_mass": rep.total_mass,
        "dimension_histogram": {str(c): m for c, m in dimension_histogram(rep).items()},
    }
    print(json.dumps(summary, indent=2))


def cmd_score(args):
    model = damex.load(args.model)
    X = read_matrix(args.input)
    scores, radii, codes = damex.score_samples(model, X)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row_index", "score", "radius", "subset"])
        for i, (s, r, c) in enumerate(zip(scores, radii, codes)):
            w.writerow([i, repr(float(s)), repr(float(r)), "" if c is None else subsets.format_subset(c)])


def cmd_simulate(args):
    from .simulate import random_support, sample

    rng = np.random.default_rng(args.seed)
    spec = random_support(args.d, args.K, rng, w=args.w)
    X = sample(spec, args.n, rng)
    write_matrix(args.out, X)
    if args.spec_out:
        with open(args.spec_out, "w") as fh:
            json.dump(spec.to_dict(), fh, indent=2)
            fh.write("\n")


def cmd_recover(args):
    from .simulate import support_recovery

    report = support_recovery(args.d, args.K, args.n, runs=args.runs, params=_params(args),
                              seed=args.seed, w=args.w)
    _emit(report.to_json(), args.out)


def cmd_eval(args):
    from .datasets import preprocess
    from .evaluation import load_baseline_scores, run_benchmark

    data = preprocess(args.recipe, args.raw, header=not args.no_header, seed=args.seed)
    baseline = load_baseline_scores(args.baseline, data.n) if args.baseline else None
    report = run_benchmark(data, _params(args), runs=args.runs, seed=args.seed,
                           train_fraction=args.train_fraction, baseline=baseline)
    _emit(report.to_json(), args.out)


def build_parser():
    parser = argparse.ArgumentParser(prog="extremis", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a DAMEX model on a numeric CSV")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    _add_damex_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score rows of a CSV with a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("simulate", help="sample from a random asymmetric logistic model")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--w", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--spec-out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("recover", help="support-recovery experiment on simulated data")
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--w", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_damex_flags(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("eval", help="extreme-region benchmark on a public dataset")
    p.add_argument("--recipe", required=True, choices=("shuttle", "forestcover", "http", "SF", "SA"))
    p.add_argument("--raw", required=True)
    p.add_argument("--no-header", action="store_true", help="raw file has no header row")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--baseline", help="CSV row_index,abnormality_score")
    p.add_argument("--out")
    _add_damex_flags(p)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            args.func(args)
    except ParameterError as exc:
        print(f"extremis: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except UndefinedMetricError as exc:
        print(f"extremis: undefined metric: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except (InvalidInputError, ModelFormatError, OSError) as exc:
        print(f"extremis: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"extremis: warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
