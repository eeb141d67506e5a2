"""Command-line front end.

Exit codes: 0 success, 2 usage/configuration error, 3 estimation failure.
Every randomized subcommand requires --seed, and every output file starts
with `#` comment lines recording the resolved configuration, so a run can be
reproduced from its own artifacts.  A flat key=value config file (with `#`
comments) can supply defaults; explicit flags win.
"""

import argparse
import os
import sys

import numpy as np

from .errors import EstimationError, UsageError
from .experiments import (
    ESTIMATORS,
    EstimatorTask,
    ReturnLevelStudyConfig,
    StudyConfig,
    best_estimator_table,
    default_task_grid,
    pairwise_efficiency_table,
    run_return_level_study,
    run_study,
    write_csv,
)
from .fisher import AreConfig, are_table
from .likelihoods import fit_estimator, make_block_maxima, select_threshold
from .simulate import (
    SeedSpec,
    sample_logistic_maxstable,
    sample_opclayton,
    sample_study_data,
)


def _parse_float_list(text):
    return [float(x) for x in text.split(",") if x]


def _parse_int_list(text):
    return [int(x) for x in text.split(",") if x]


def _parse_alpha_grid(text):
    """Comma list or lo:hi:step range."""
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        out = []
        x = lo
        while x <= hi + 1e-12:
            out.append(round(x, 12))
            x += step
        return out
    return _parse_float_list(text)


def _parse_tasks(text):
    """name:tuning pairs, e.g. 'thr4:0.95,max1:100'."""
    tasks = []
    for item in text.split(","):
        if not item:
            continue
        try:
            name, tuning = item.split(":")
        except ValueError:
            raise UsageError(
                f"estimator spec {item!r} is not of the form name:tuning"
            ) from None
        tasks.append(EstimatorTask(name, float(tuning)))
    if not tasks:
        raise UsageError("no estimators given")
    return tuple(tasks)


def _read_config_file(path):
    known = None  # validated against parser flags by the caller
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _read_matrix_csv(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append([float(x) for x in line.split(",")])
    if header is None or not rows:
        raise UsageError(f"{path}: no data rows")
    return np.asarray(rows)


def _threads_default():
    env = os.environ.get("MEVLAB_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _config_header(args, skip=("func", "config", "out", "summary_out")):
    items = []
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        items.append(f"{key}={value}")
    return items


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_simulate(args):
    seed = SeedSpec(args.seed)
    if args.model == "logistic":
        data = sample_logistic_maxstable(args.n, args.dim, args.alpha, seed)
    elif args.model == "opclayton":
        data = sample_opclayton(args.n, args.dim, args.alpha, seed)
    elif args.model == "study-data":
        data = sample_study_data(args.n, args.dim, args.alpha, seed)
    else:
        raise UsageError(f"unknown model {args.model!r}")
    columns = [f"y{d + 1}" for d in range(args.dim)]
    rows = [dict(zip(columns, row)) for row in data]
    write_csv(args.out, rows, columns, _config_header(args))
    return 0


def _cmd_fit(args):
    data = _read_matrix_csv(args.infile)
    margins = {"known-frechet": "known", "fit": "fit"}.get(args.margins)
    if margins is None:
        raise UsageError("margins must be known-frechet or fit")
    if args.estimator.startswith("max"):
        if args.block_length is None:
            raise UsageError("block-maximum estimators need --block-length")
        prepared = make_block_maxima(data, args.block_length, margins=margins)
    else:
        if args.threshold_prob is None:
            raise UsageError("threshold estimators need --threshold-prob")
        kind = "diagonal" if args.estimator == "thr2" else "marginal"
        prepared = select_threshold(args.threshold_prob, kind, data,
                                    margins=margins)
    res = fit_estimator(args.estimator, prepared)
    if not res.converged:
        raise EstimationError(f"fit did not converge: {res.diagnostics}")
    print(f"alpha_hat={res.x!r}")
    print(f"loglik={res.value!r}")
    return 0


def _cmd_are(args):
    config = AreConfig(
        estimators=tuple(args.estimators.split(",")),
        block_length=args.block_length,
        mc_scores=args.mc_scores,
        sim_n=args.sim_n,
        sim_replicates=args.sim_replicates,
        seed=args.seed,
    )
    rows = are_table(_parse_alpha_grid(args.alphas), _parse_float_list(args.p),
                     config)
    out = [{
        "estimator": r.estimator, "alpha": r.alpha, "L_or_p": r.tuning,
        "root_are_percent": r.root_are_percent, "method": r.method,
        "mc_stderr": r.mc_stderr,
    } for r in rows]
    write_csv(args.out, out,
              ["estimator", "alpha", "L_or_p", "root_are_percent", "method",
               "mc_stderr"],
              _config_header(args))
    return 0


def _cmd_study(args):
    config = StudyConfig(
        model=args.model, alpha=args.alpha, dim=args.dim, n=args.n,
        replicates=args.replicates, tasks=_parse_tasks(args.estimators),
        margins_mode=args.margins, master_seed=args.seed,
    )
    result = run_study(config, workers=args.threads)
    header = _config_header(args)
    write_csv(args.out, result.replicate_rows(),
              ["estimator", "alpha_true", "D", "tuning", "replicate",
               "alpha_hat", "status"], header)
    if args.summary_out:
        write_csv(args.summary_out, result.summary_rows(),
                  ["estimator", "alpha_true", "D", "tuning", "bias", "se",
                   "rmse", "n_ok"], header)
    return 0


def _cmd_best_table(args):
    base = StudyConfig(
        model=args.model, alpha=0.5, dim=args.dim, n=args.n,
        replicates=args.replicates,
        tasks=default_task_grid(tuple(_parse_int_list(args.block_lengths)),
                                tuple(_parse_float_list(args.p_grid))),
        margins_mode=args.margins, master_seed=args.seed,
    )
    rows = best_estimator_table(_parse_alpha_grid(args.alphas), base,
                                workers=args.threads)
    write_csv(args.out, rows, ["alpha", "estimator", "tuning", "rmse"],
              _config_header(args))
    return 0


def _cmd_pair_eff(args):
    base = StudyConfig(
        model=args.model, alpha=0.5, dim=2, n=args.n,
        replicates=args.replicates, tasks=(EstimatorTask("thr4", 0.98),),
        margins_mode=args.margins, master_seed=args.seed,
    )
    rows = pairwise_efficiency_table(
        _parse_alpha_grid(args.alphas), _parse_int_list(args.dims), base,
        block_length=args.block_length, threshold_prob=args.threshold_prob,
        workers=args.threads,
    )
    write_csv(args.out, rows,
              ["family", "alpha", "D", "root_eff_percent", "n_ok"],
              _config_header(args))
    return 0


def _cmd_return_levels(args):
    config = ReturnLevelStudyConfig(
        alpha=args.alpha, n=args.n, replicates=args.replicates,
        block_length=args.block_length, threshold_prob=args.threshold_prob,
        periods=tuple(_parse_int_list(args.periods)), mc_size=args.mc_size,
        estimators=tuple(args.estimators.split(",")), master_seed=args.seed,
    )
    rows = run_return_level_study(config, workers=args.threads)
    write_csv(args.out, rows,
              ["estimator", "alpha_true", "period", "true_level", "mean",
               "bias", "se", "rmse", "n_ok"],
              _config_header(args))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="mevlab",
        description="Likelihood estimators for multivariate extreme-value "
                    "dependence (logistic family)",
    )
    parser.add_argument("--config", help="flat key=value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write simulated data as CSV")
    sim.add_argument("--model", required=True,
                     choices=["logistic", "opclayton", "study-data"])
    sim.add_argument("--alpha", type=float, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--dim", type=int, default=2)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="fit one estimator to a CSV dataset")
    fit.add_argument("--estimator", required=True, choices=list(ESTIMATORS))
    fit.add_argument("--in", dest="infile", required=True)
    fit.add_argument("--margins", default="known-frechet",
                     choices=["known-frechet", "fit"])
    fit.add_argument("--threshold-prob", type=float)
    fit.add_argument("--block-length", type=int)
    fit.set_defaults(func=_cmd_fit)

    are = sub.add_parser("are", help="root relative-efficiency table")
    are.add_argument("--alphas", required=True,
                     help="comma list or lo:hi:step")
    are.add_argument("--p", required=True, help="threshold probabilities")
    are.add_argument("--L", dest="block_length", type=int, default=100)
    are.add_argument("--estimators",
                     default="max1,max2,thr1,thr2,thr4,thr5")
    are.add_argument("--mc-scores", type=int, default=100_000)
    are.add_argument("--sim-n", type=int, default=20_000)
    are.add_argument("--sim-replicates", type=int, default=500)
    are.add_argument("--seed", type=int, required=True)
    are.add_argument("--out", required=True)
    are.set_defaults(func=_cmd_are)

    study = sub.add_parser("study", help="replicated estimation study")
    study.add_argument("--model", default="opclayton",
                       choices=["logistic", "opclayton"])
    study.add_argument("--alpha", type=float, required=True)
    study.add_argument("--dim", type=int, default=2)
    study.add_argument("--n", type=int, required=True)
    study.add_argument("--replicates", type=int, required=True)
    study.add_argument("--estimators", required=True,
                       help="name:tuning pairs, e.g. thr4:0.95,max1:100")
    study.add_argument("--margins", default="fit", choices=["known", "fit"])
    study.add_argument("--threads", type=int, default=_threads_default())
    study.add_argument("--seed", type=int, required=True)
    study.add_argument("--out", required=True)
    study.add_argument("--summary-out")
    study.set_defaults(func=_cmd_study)

    best = sub.add_parser("best-table", help="winner by RMSE per alpha")
    best.add_argument("--alphas", required=True)
    best.add_argument("--model", default="opclayton",
                      choices=["logistic", "opclayton"])
    best.add_argument("--dim", type=int, default=2)
    best.add_argument("--n", type=int, required=True)
    best.add_argument("--replicates", type=int, required=True)
    best.add_argument("--p-grid", default="0.9,0.95,0.98")
    best.add_argument("--block-lengths", default="50,100")
    best.add_argument("--margins", default="fit", choices=["known", "fit"])
    best.add_argument("--threads", type=int, default=_threads_default())
    best.add_argument("--seed", type=int, required=True)
    best.add_argument("--out", required=True)
    best.set_defaults(func=_cmd_best_table)

    pe = sub.add_parser("pair-eff", help="pairwise vs full efficiency table")
    pe.add_argument("--alphas", required=True)
    pe.add_argument("--dims", required=True)
    pe.add_argument("--model", default="opclayton",
                    choices=["logistic", "opclayton"])
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--replicates", type=int, required=True)
    pe.add_argument("--L", dest="block_length", type=int, default=100)
    pe.add_argument("--threshold-prob", type=float, default=0.98)
    pe.add_argument("--margins", default="fit", choices=["known", "fit"])
    pe.add_argument("--threads", type=int, default=_threads_default())
    pe.add_argument("--seed", type=int, required=True)
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=_cmd_pair_eff)

    rl = sub.add_parser("return-levels",
                        help="replicated return-level curves")
    rl.add_argument("--alpha", type=float, required=True)
    rl.add_argument("--n", type=int, default=2000)
    rl.add_argument("--replicates", type=int, default=200)
    rl.add_argument("--periods", default="1,2,5,10,20,50")
    rl.add_argument("--mc-size", type=int, default=500_000)
    rl.add_argument("--estimators", default=",".join(ESTIMATORS))
    rl.add_argument("--L", dest="block_length", type=int, default=100)
    rl.add_argument("--threshold-prob", type=float, default=0.98)
    rl.add_argument("--threads", type=int, default=_threads_default())
    rl.add_argument("--seed", type=int, required=True)
    rl.add_argument("--out", required=True)
    rl.set_defaults(func=_cmd_return_levels)

    return parser


def _apply_config_file(parser, argv):
    """Merge key=value defaults from --config; explicit flags override."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise UsageError("--config needs a file path") from None
    values = _read_config_file(path)
    rest = argv[:idx] + argv[idx + 2:]
    if not rest:
        raise UsageError("config file cannot supply the subcommand")
    command = rest[0]
    given = {a.split("=", 1)[0].lstrip("-").replace("-", "_")
             for a in rest if a.startswith("--")}
    extra = []
    known_flags = {
        a.dest for a in parser._subparsers._group_actions[0].choices[
            command
        ]._actions
    }
    for key, value in values.items():
        if key not in known_flags:
            raise UsageError(f"unknown config key {key!r} for {command!r}")
        if key in given:
            continue
        extra.extend([f"--{key.replace('_', '-')}", value])
    return rest[:1] + extra + rest[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and argv[0] not in ("-h", "--help"):
            # allow --config anywhere; normalize it before parsing
            argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
